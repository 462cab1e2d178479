"""The Kashiwara-Malgrange V-filtration on the graph embedding.

Two membership tests are provided.  :func:`v_member` follows Sabbah's
criterion through the b-function of the element itself.  :class:`VCriterion`
is a linear test: with U^k = V^k D * delta one has b_f(s+k) U^k in U^(k+1) and
G_p in U^(-p), so on the finite-dimensional space U^(-p)/U^K the operator s
is annihilated by F(s) = prod_{k=-p}^{K-1} b_f(s+k).  Splitting F into the
factors whose roots lambda satisfy -lambda >= gamma (call it B) and the rest,

    u in V^gamma  <=>  B(s) P_u in Ann(delta) + V^K D,

whenever U^K lies in V^gamma.  The right-hand side is decided by dividing
level by level by the initial forms of a V-adapted basis; the procedure is
linear in u, so the degree-bounded part of V^gamma is an exact matrix kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .bsato import FactoredB, _v_groebner, bernstein_sato, delta_annihilator, element_b
from .cache import GBCache
from .deltamod import DeltaElem, TheoremViolation
from .groebner_weyl import Budget, InitialDivider, _axpy
from .polyring import MPoly, PreconditionError, as_rat, format_rat
from .weyl import WeylOp


@dataclass(frozen=True)
class VQuery:
    f: MPoly
    gamma: Fraction
    strict: bool = False


def v_member(u: DeltaElem, gamma, strict: bool = False, budget: Budget = Budget(), cache: GBCache | None = None) -> bool:
    """Sabbah's criterion: all roots of b_u are <= -gamma (< -gamma if strict)."""
    if not u:
        raise PreconditionError("v_member needs a nonzero element")
    gamma = as_rat(gamma)
    b = element_b(u, budget, cache)
    if strict:
        return all(r < -gamma for r, _ in b.roots)
    return all(r <= -gamma for r, _ in b.roots)


def monomials_up_to(n: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree <= d, graded then lexicographic."""
    out = []
    for deg in range(d + 1):
        for combo in combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return sorted(set(out), key=lambda e: (sum(e), tuple(-x for x in e)))


class _Echelon:
    """Incremental row echelon form over Q for sparse dict vectors."""

    def __init__(self):
        self.rows: dict = {}  # pivot -> normalized row

    def reduce(self, vec: dict) -> dict:
        vec = dict(vec)
        while True:
            hits = [k for k in vec if k in self.rows]
            if not hits:
                return vec
            piv = max(hits)
            _axpy(vec, -vec[piv], self.rows[piv])

    def add(self, vec: dict) -> bool:
        vec = self.reduce(vec)
        if not vec:
            return False
        piv = max(vec)
        c = vec[piv]
        self.rows[piv] = {k: v / c for k, v in vec.items()}
        return True

    def __len__(self):
        return len(self.rows)


class VCriterion:
    """Exact linear V-membership for elements of G_p, for one polynomial f."""

    def __init__(self, f: MPoly, budget: Budget = Budget(), cache: GBCache | None = None):
        if not f or f.is_constant():
            raise PreconditionError("f must be a nonconstant polynomial")
        self.f = f
        self.n = f.n
        self.budget = budget
        self.cache = cache
        self.bf = bernstein_sato(f, budget, cache)
        self.lct = -self.bf.largest_root()
        gb = _v_groebner(delta_annihilator(f), f.n, budget, cache, "degrevlex")
        self.divider = InitialDivider(gb)
        self._plans: dict = {}
        self._rems: dict = {}

    # -- the reduction data for one (gamma, p, strict) ----------------------

    def plan(self, gamma, p: int, strict: bool = False) -> tuple[int, FactoredB]:
        """(K, B) with U^K inside V^gamma (resp. V^>gamma) and B the root-selected factor."""
        gamma = as_rat(gamma)
        key = (gamma, p, strict)
        hit = self._plans.get(key)
        if hit is not None:
            return hit
        K = max(0, math.ceil(gamma - self.lct))
        if strict and K + self.lct <= gamma:
            K += 1
        roots: dict[Fraction, int] = {}
        for k in range(-p, K):
            for r, m in self.bf.roots:
                lam = r - k
                roots[lam] = roots.get(lam, 0) + m
        keep = [(lam, m) for lam, m in roots.items() if (-lam > gamma if strict else -lam >= gamma)]
        out = (K, FactoredB.of(keep))
        self._plans[key] = out
        return out

    def _levels(self, op: dict, K: int) -> dict:
        vring = self.divider.vring
        weight = vring.weight
        op = dict(op)
        rems: dict = {}
        while True:
            live = [weight(e) for e in op]
            live = [w for w in live if w > -K]
            if not live:
                return rems
            top = max(live)
            level = {e: c for e, c in op.items() if weight(e) == top}
            corr, rem = self.divider.divide(level)
            _axpy(op, -1, corr)
            _axpy(op, -1, rem)
            if any(weight(e) == top for e in op):
                raise TheoremViolation("level reduction did not clear its level")
            _axpy(rems, 1, rem)

    def _rem_of_monomial(self, j: int, exps: tuple, gamma: Fraction, p: int, strict: bool) -> dict:
        key = (j, exps, gamma, p, strict)
        hit = self._rems.get(key)
        if hit is not None:
            return hit
        K, B = self.plan(gamma, p, strict)
        n = self.n
        op = WeylOp.from_s_poly(n, B.poly()) * WeylOp.from_poly(MPoly.monomial(exps)) * WeylOp.dt(n) ** j
        internal = {e + (0, 0): Fraction(c) for e, c in op.terms.items()}
        out = self._levels(internal, K)
        self._rems[key] = out
        return out

    def residual(self, u: DeltaElem, gamma, strict: bool = False) -> dict:
        """Linear obstruction vector; zero iff u lies in V^gamma (or V^>gamma)."""
        if u.f != self.f:
            raise PreconditionError("element belongs to a different f")
        gamma = as_rat(gamma)
        p = max(u.p, 0)
        total: dict = {}
        for j, v in enumerate(u.coeffs):
            for e, c in v.terms.items():
                _axpy(total, c, self._rem_of_monomial(j, e, gamma, p, strict))
        return total

    def member(self, u: DeltaElem, gamma, strict: bool = False) -> bool:
        if not u:
            return True
        return not self.residual(u, gamma, strict)

    # -- exact degree-bounded pieces ----------------------------------------

    def kernel(self, gamma, p: int, d: int, strict: bool = False) -> list[DeltaElem]:
        """A Q-basis of {u in G_p : deg v_j <= d, u in V^gamma}."""
        gamma = as_rat(gamma)
        cols = [(j, e) for j in range(p + 1) for e in monomials_up_to(self.n, d)]
        vecs = [self._rem_of_monomial(j, e, gamma, p, strict) for j, e in cols]
        rows_index: dict = {}
        for v in vecs:
            for key in v:
                rows_index.setdefault(key, len(rows_index))
        if not rows_index:
            basis = [[Fraction(int(i == k)) for i in range(len(cols))] for k in range(len(cols))]
        else:
            data: dict = {}
            for ci, v in enumerate(vecs):
                for key, c in v.items():
                    data.setdefault(rows_index[key], {})[ci] = QQ(c.numerator, c.denominator)
            mat = DomainMatrix(data, (len(rows_index), len(cols)), QQ)
            ns = mat.nullspace().to_list()
            basis = [[Fraction(int(x.numerator), int(x.denominator)) for x in row] for row in ns]
        out = []
        for row in basis:
            coeffs = [dict() for _ in range(p + 1)]
            for (j, e), c in zip(cols, row):
                if c:
                    coeffs[j][e] = c
            u = DeltaElem(self.f, [MPoly(self.n, c) for c in coeffs])
            if u:
                out.append(u)
        return out


_CRITERIA: dict = {}


def criterion_for(f: MPoly, budget: Budget = Budget(), cache: GBCache | None = None) -> VCriterion:
    """Shared per-f criterion object (memoized within the process)."""
    key = (f, budget)
    crit = _CRITERIA.get(key)
    if crit is None:
        crit = VCriterion(f, budget, cache)
        _CRITERIA[key] = crit
    return crit


def v_member_linear(u: DeltaElem, gamma, strict: bool = False, budget: Budget = Budget(), cache: GBCache | None = None) -> bool:
    if not u:
        raise PreconditionError("v_member needs a nonzero element")
    return criterion_for(u.f, budget, cache).member(u, gamma, strict)


# ---------------------------------------------------------------------------


def _element_key(u: DeltaElem) -> dict:
    return {(j, e): c for j, v in enumerate(u.coeffs) for e, c in v.terms.items()}


def _span_key(j: int, e: tuple) -> tuple:
    # pivot preference: higher dt-index, then larger degree
    return (j, sum(e), e)


def _module_span(gens: list[DeltaElem], n: int, d: int) -> _Echelon:
    ech = _Echelon()
    monos = monomials_up_to(n, d)
    for g in gens:
        gdeg = max((v.degree() for v in g.coeffs if v), default=0)
        for m in monos:
            if sum(m) + gdeg > d:
                continue
            vec = {_span_key(j, e): c for (j, e), c in _element_key(g.mul_poly(MPoly.monomial(m))).items()}
            ech.add(vec)
    return ech


def minimal_module_generators(elems: list[DeltaElem], n: int, d: int) -> list[DeltaElem]:
    """Greedy subset whose polynomial multiples (degree <= d) span the same space."""
    monos = monomials_up_to(n, d)
    ech = _Echelon()
    kept = []
    order = sorted(elems, key=lambda u: (max((v.degree() for v in u.coeffs if v), default=0), -u.p))
    for g in order:
        vec = {_span_key(j, e): c for (j, e), c in _element_key(g).items()}
        if not ech.reduce(vec):
            continue
        kept.append(g)
        gdeg = max((v.degree() for v in g.coeffs if v), default=0)
        for m in monos:
            if sum(m) + gdeg <= d:
                mult = g.mul_poly(MPoly.monomial(m))
                ech.add({_span_key(j, e): c for (j, e), c in _element_key(mult).items()})
    return kept


@dataclass
class VTruncation:
    """Generators of V^gamma in G_p with coefficients of degree <= degree_bound.

    ``complete`` records that the degree-bounded part was found exhaustively
    (exact kernel); ``stable`` records that the degree_bound+1 part is already
    generated, which is evidence but not proof that the full module is.
    """

    f: MPoly
    gamma: Fraction
    p: int
    degree_bound: int
    complete: bool
    generators: list[DeltaElem]
    stable: bool | None = None
    strict: bool = False
    dimension: int = 0

    def to_json(self) -> dict:
        return {
            "f": str(self.f),
            "gamma": format_rat(self.gamma),
            "p": self.p,
            "degree_bound": self.degree_bound,
            "complete": self.complete,
            "stable": self.stable,
            "strict": self.strict,
            "generators": [[str(u.coeff(j)) for j in range(self.p + 1)] for u in self.generators],
        }


def default_degree_bound(f: MPoly, p: int) -> int:
    return 2 * f.degree() + p + 2


def v_truncated_generators(
    f: MPoly,
    gamma,
    p: int,
    d: int | None = None,
    strict: bool = False,
    check_stable: bool = False,
    budget: Budget = Budget(),
    cache: GBCache | None = None,
) -> VTruncation:
    gamma = as_rat(gamma)
    if gamma <= 0:
        raise PreconditionError("gamma must be positive")
    if p < 0:
        raise PreconditionError("p must be nonnegative")
    d = default_degree_bound(f, p) if d is None else d
    crit = criterion_for(f, budget, cache)
    basis = crit.kernel(gamma, p, d, strict)
    gens = minimal_module_generators(basis, f.n, d)
    stable = None
    if check_stable:
        bigger = crit.kernel(gamma, p, d + 1, strict)
        stable = len(_module_span(gens, f.n, d + 1)) == len(bigger)
    return VTruncation(f, gamma, p, d, True, gens, stable, strict, len(basis))


def jump_candidates(bf: FactoredB, p: int) -> list[Fraction]:
    cands = {-r - m for r, _ in bf.roots for m in range(p + 1)}
    return sorted(c for c in cands if 0 < c <= 1)


def v_jumping_numbers(
    f: MPoly, p: int, d: int | None = None, budget: Budget = Budget(), cache: GBCache | None = None
) -> list[Fraction]:
    """Candidates c in (0,1] where the degree-bounded part of V^c in G_p is larger than that of V^>c."""
    d = default_degree_bound(f, p) if d is None else d
    crit = criterion_for(f, budget, cache)
    out = []
    for c in jump_candidates(crit.bf, p):
        at = len(crit.kernel(c, p, d))
        above = len(crit.kernel(c, p, d, strict=True))
        if at > above:
            out.append(c)
    return out
