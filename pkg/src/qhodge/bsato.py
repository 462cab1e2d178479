"""Bernstein-Sato polynomials of polynomials and of delta-module elements.

The annihilator of delta is generated by ``t - f`` and ``dx_i + f_i dt``.  A
Groebner basis under the V-weight order yields the b-function as the minimal
polynomial of theta = t*dt on the initial ideal (then s = -theta - 1).  For an
element u = P delta, the annihilator is the ideal quotient (Ann delta : P).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .cache import GBCache, default_cache
from .deltamod import DeltaElem, TheoremViolation
from .groebner_weyl import (
    Budget,
    InitialDivider,
    LeftGB,
    intersect_with_s,
    left_groebner,
    module_syzygy_quotient,
    v_order,
)
from .polyring import MPoly, PreconditionError, UniPoly, format_rat, uni_gcd
from .weyl import FsElem, WeylOp, apply_to_fs

INFINITY = math.inf
MinExp = Union[Fraction, float]


@dataclass(frozen=True)
class FactoredB:
    """Monic polynomial prod (s - root)^mult, roots sorted descending.

    Rendering puts the factor (s+1) first, then the remaining roots descending.
    """

    roots: tuple[tuple[Fraction, int], ...] = ()

    @classmethod
    def of(cls, pairs: Iterable[tuple]) -> "FactoredB":
        acc: dict[Fraction, int] = {}
        for r, m in pairs:
            r = Fraction(r)
            if m < 0:
                raise ValueError("negative multiplicity")
            if m:
                acc[r] = acc.get(r, 0) + m
        return cls(tuple(sorted(acc.items(), key=lambda t: -t[0])))

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self.roots)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def poly(self) -> UniPoly:
        p = UniPoly([1])
        for r, m in self.roots:
            p = p * UniPoly([-r, 1]) ** m
        return p

    def shift(self, m) -> "FactoredB":
        """The polynomial s -> b(s - m): every root moves up by m."""
        return FactoredB.of((r + m, k) for r, k in self.roots)

    def __mul__(self, other: "FactoredB") -> "FactoredB":
        return FactoredB.of(list(self.roots) + list(other.roots))

    def divides(self, other: "FactoredB") -> bool:
        mine, theirs = self.as_dict(), other.as_dict()
        return all(theirs.get(r, 0) >= m for r, m in mine.items())

    def largest_root(self) -> Fraction | None:
        return self.roots[0][0] if self.roots else None

    def render(self) -> str:
        if not self.roots:
            return "1"
        out = []
        ordered = sorted(self.roots, key=lambda t: (t[0] != -1, -t[0]))
        for r, m in ordered:
            c = -r
            body = "s" if c == 0 else (f"s+{format_rat(c)}" if c > 0 else f"s-{format_rat(-c)}")
            out.append(f"({body})" + (f"^{m}" if m > 1 else ""))
        return "".join(out)

    def to_json(self) -> list[dict]:
        return [{"root": format_rat(r), "multiplicity": m} for r, m in self.roots]

    def __str__(self):
        return self.render()


def rational_roots(b: UniPoly) -> FactoredB:
    """Factor a polynomial completely into rational linear factors.

    Raises :class:`TheoremViolation` if an irreducible factor of degree >= 2
    remains, which cannot happen for a genuine b-function.
    """
    if not b:
        raise PreconditionError("zero polynomial has no factorization")
    b = b.monic()
    found: dict[Fraction, int] = {}
    rest = b
    while rest.degree > 0:
        sqf = _squarefree_part(rest)
        roots = _rational_roots_squarefree(sqf)
        if not roots:
            raise TheoremViolation(f"nonrational factor {rest} survived rational-root extraction")
        for r in roots:
            lin = UniPoly([-r, 1])
            while True:
                q, rem = rest.divmod(lin)
                if rem:
                    break
                rest = q
                found[r] = found.get(r, 0) + 1
    return FactoredB.of(found.items())


def _squarefree_part(p: UniPoly) -> UniPoly:
    g = uni_gcd(p, p.derivative())
    return p.divmod(g)[0].monic() if g.degree > 0 else p.monic()


def _integer_coeffs(p: UniPoly) -> list[int]:
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return [v // g for v in ints]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _rational_roots_squarefree(p: UniPoly) -> list[Fraction]:
    ints = _integer_coeffs(p)
    roots = []
    shift = 0
    while ints and ints[0] == 0:
        ints = ints[1:]
        shift += 1
    if shift:
        roots.append(Fraction(0))
    if len(ints) <= 1:
        return roots
    reduced = UniPoly(ints)
    for q in _divisors(ints[-1]):
        for num in _divisors(ints[0]):
            for cand in (Fraction(num, q), Fraction(-num, q)):
                if cand not in roots and reduced(cand) == 0:
                    roots.append(cand)
    return roots


def reduced_b(b: FactoredB) -> FactoredB:
    d = b.as_dict()
    if d.get(Fraction(-1), 0) == 0:
        return b
    d[Fraction(-1)] -= 1
    return FactoredB.of(d.items())


# ---------------------------------------------------------------------------


def delta_annihilator(f: MPoly) -> list[WeylOp]:
    n = f.n
    gens = [WeylOp.t(n) - WeylOp.from_poly(f)]
    for i in range(n):
        gens.append(WeylOp.dx(n, True, i) + WeylOp.from_poly(f.diff(i)) * WeylOp.dt(n))
    return gens


def _check_f(f: MPoly):
    if not f or f.is_constant():
        raise PreconditionError("f must be a nonconstant polynomial")


def _v_groebner(gens: list[WeylOp], n: int, budget: Budget, cache: GBCache | None, tie: str) -> LeftGB:
    order = v_order(n, tie)
    cache = cache if cache is not None else default_cache()
    return cache.get_or_compute(n, True, order, gens, lambda: left_groebner(gens, order, budget))


def delta_gb(f: MPoly, budget: Budget = Budget(), cache: GBCache | None = None, tie: str = "degrevlex") -> LeftGB:
    """V-order Groebner basis of Ann(delta); normalized so c*f shares it with f."""
    _check_f(f)
    return _v_groebner(delta_annihilator(_normalize_f(f)), f.n, budget, cache, tie)


def _normalize_f(f: MPoly) -> MPoly:
    return f.content_free()


def bernstein_sato(
    f: MPoly,
    budget: Budget = Budget(),
    cache: GBCache | None = None,
    certify: bool = True,
    tie: str = "degrevlex",
) -> FactoredB:
    """b_f(s) as a factored multiset of rational roots.

    With ``certify`` set, the functional equation is checked exactly using the
    operator extracted from the Groebner basis.
    """
    _check_f(f)
    gb = delta_gb(f, budget, cache, tie)
    b = intersect_with_s(gb)
    if not b:
        raise TheoremViolation("no relation in s found for b_f")
    fb = rational_roots(b)
    if certify:
        P = extract_certificate(f, fb, gb)
        if not certify_bfunction(f, fb, P):
            raise TheoremViolation(f"functional equation failed for b = {fb}")
    return fb


def extract_certificate(f: MPoly, b: FactoredB, gb: LeftGB | None = None) -> WeylOp:
    """An operator P(s) in D_X[s] with P(s) f^(s+1) = b(s) f^s.

    b(s), viewed as an operator of V-degree 0, is divided by the initial forms
    of the annihilator basis; subtracting the full-generator corrections leaves
    an operator R of V-degree >= 1 with R delta = b(s) delta.  Writing
    R = sum_m t^m A_m(s) gives P(s) = sum_m A_m(s + m) f^(m - 1).
    """
    gb = gb or delta_gb(f)
    n = f.n
    div = InitialDivider(gb)
    target = WeylOp.from_s_poly(n, b.poly())
    poly = {e + (0, 0): c for e, c in target.terms.items()}
    weights = {e: div.vring.weight(e) for e in poly}
    level = {e: c for e, c in poly.items() if weights[e] == 0}
    corr, rem = div.divide(level)
    if rem:
        raise TheoremViolation("b(s) is not in the initial ideal")
    residual = dict(poly)
    for e, c in corr.items():
        x = residual.get(e, 0) - c
        if x:
            residual[e] = x
        else:
            residual.pop(e, None)
    if any(div.vring.weight(e) >= 0 for e in residual):
        raise TheoremViolation("certificate extraction left V-degree <= 0 terms")
    # group residual by m = (t exponent) - (dt exponent) >= 1
    by_m: dict[int, dict] = {}
    for e, c in residual.items():
        k, l = e[n], e[2 * n + 1]
        m = k - l
        core = list(e[: 2 * n + 2])
        core[n] = l  # keep t^l dt^l, which is a polynomial in s
        by_m.setdefault(m, {})[tuple(core)] = c
    # the basis belongs to the content-free f0; f = ratio * f0
    fscale = _normalize_f(f)
    lead_e = next(iter(f.terms))
    ratio = f.terms[lead_e] / fscale.terms[lead_e]
    s_op = WeylOp.s(n)
    total = WeylOp.constant(n, True, 0)
    for m, terms in by_m.items():
        A = WeylOp._raw(n, True, terms)
        pieces = A.s_decomposition()
        shifted = WeylOp.constant(n, True, 0)
        for j, Pj in pieces.items():
            shifted = shifted + ((s_op + m) ** j) * Pj.with_t_ring()
        # t^m A_m(s) delta corresponds to A_m(s+m) f0^(m-1) f0^(s+1)
        total = total + shifted * WeylOp.from_poly(fscale ** (m - 1))
    return total * (1 / ratio)


def certify_bfunction(f: MPoly, b: FactoredB, P: WeylOp) -> bool:
    """True iff P(s) f^(s+1) == b(s) f^s exactly."""
    lhs = apply_to_fs(P, FsElem.power(f, 1))
    rhs = FsElem.power(f, 0).scale_s(b.poly())
    return lhs == rhs


def element_b(u: DeltaElem, budget: Budget = Budget(), cache: GBCache | None = None) -> FactoredB:
    """b-function of the element u, from the V-order basis of Ann(u)."""
    if not u:
        raise PreconditionError("element_b needs a nonzero element")
    f = u.f
    _check_f(f)
    n = f.n
    P = WeylOp.constant(n, True, 0)
    for j, v in enumerate(u.coeffs):
        if v:
            P = P + WeylOp.from_poly(v) * WeylOp.dt(n) ** j
    ann = delta_annihilator(f)
    scaled_budget = Budget(budget.max_pairs, budget.max_degree + 2 * max(u.p, 0))
    quotient = module_syzygy_quotient(ann, P, scaled_budget)
    gb = _v_groebner(quotient, n, scaled_budget, cache, "degrevlex")
    b = intersect_with_s(gb)
    if not b:
        raise TheoremViolation("no relation in s found for the element")
    return rational_roots(b)


def minimal_exponent(f: MPoly, **kw) -> MinExp:
    rb = reduced_b(bernstein_sato(f, **kw))
    top = rb.largest_root()
    return INFINITY if top is None else -top


def lct(f: MPoly, **kw) -> Fraction:
    m = minimal_exponent(f, **kw)
    return Fraction(1) if m == INFINITY else min(Fraction(1), m)


def format_minexp(m: MinExp) -> str:
    return "infinity" if m == INFINITY else format_rat(m)
