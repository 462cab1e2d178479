"""Left Groebner bases in the Weyl algebra.

Runs happen in the homogenized Weyl algebra (a central variable h with
[d_i, x_i] = h^2), which makes Buchberger terminate for weight orders that are
not well-orders; results are dehomogenized before they are returned.

Internal monomials are exponent tuples of length ``2*nv + 2``: the ``2*nv``
Weyl exponents, then the h exponent, then a module component index.
Coefficients inside Buchberger are primitive integer vectors.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .polyring import PreconditionError, UniPoly
from .weyl import WeylOp, mono_mul


class ResourceLimit(RuntimeError):
    """The configured pair/degree budget was exhausted (CLI exit code 3)."""

    def __init__(self, message: str, stats: dict):
        super().__init__(f"{message} (stats: {stats})")
        self.stats = stats


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 10**6
    max_degree: int = 40


@dataclass(frozen=True)
class WeightOrder:
    """Weight vector on the ``2*nv`` Weyl exponents plus tie-break and elimination block.

    The term with the largest weight leads; ties go to larger total degree and
    then to the tie-break order.  ``eliminate`` lists exponent positions whose
    total degree is compared before anything else.
    """

    weights: tuple[int, ...]
    tie: str = "degrevlex"
    eliminate: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.weights) % 2:
            raise PreconditionError("weight vector must cover variables and derivations")
        nv = len(self.weights) // 2
        for i in range(nv):
            if self.weights[i] + self.weights[nv + i] < 0:
                raise PreconditionError("weight vector is not admissible for the Weyl algebra")
        if self.tie not in ("degrevlex", "deglex"):
            raise PreconditionError(f"unknown tie-break order {self.tie!r}")

    @property
    def nv(self) -> int:
        return len(self.weights) // 2

    def label(self) -> str:
        return f"w={list(self.weights)};tie={self.tie};elim={list(self.eliminate)}"


def v_order(n: int, tie: str = "degrevlex") -> WeightOrder:
    """Order whose leading forms are the lowest V-degree parts (t has V-degree 1)."""
    w = [0] * (2 * (n + 1))
    w[n] = -1
    w[2 * n + 1] = 1
    return WeightOrder(tuple(w), tie)


def degree_order(nv: int, tie: str = "degrevlex") -> WeightOrder:
    return WeightOrder((0,) * (2 * nv), tie)


class _Ring:
    """Ordering and multiplication helpers shared by one Groebner run."""

    def __init__(self, order: WeightOrder, homog: bool, module: bool = False, pot: bool = True):
        self.order = order
        self.nv = order.nv
        self.homog = homog
        self.module = module
        self.pot = pot
        self._keys: dict = {}
        self._neg: dict = {}
        self.width = 2 * self.nv

    def key(self, e: tuple) -> tuple:
        k = self._keys.get(e)
        if k is None:
            k = self._make_key(e)
            self._keys[e] = k
        return k

    def negkey(self, e: tuple) -> tuple:
        k = self._neg.get(e)
        if k is None:
            k = tuple(-x for x in self.key(e))
            self._neg[e] = k
        return k

    def _make_key(self, e):
        w = self.width
        core = e[:w]
        parts = []
        if self.module and self.pot:
            parts.append(-e[-1])
        if self.order.eliminate:
            parts.append(sum(core[i] for i in self.order.eliminate))
        parts.append(sum(a * b for a, b in zip(self.order.weights, core)))
        parts.append(sum(core))
        if self.order.tie == "degrevlex":
            parts.extend(-x for x in reversed(core))
        else:
            parts.extend(core)
        if self.module and not self.pot:
            parts.append(-e[-1])
        return tuple(parts)

    def weight(self, e) -> int:
        return sum(a * b for a, b in zip(self.order.weights, e[: self.width]))

    def lead(self, p: dict) -> tuple:
        return max(p, key=self.key)

    def lmul(self, m: tuple, c, p: dict) -> dict:
        """(c * monomial m) * p, with m carrying component 0."""
        out: dict = {}
        nv, homog = self.nv, self.homog
        for e, v in p.items():
            for te, k in mono_mul(m, e, nv, homog):
                x = out.get(te, 0) + c * v * k
                if x:
                    out[te] = x
                else:
                    out.pop(te, None)
        return out


def _divides(a: tuple, b: tuple, w: int) -> bool:
    if a[-1] != b[-1]:
        return False
    for i in range(w + 1):
        if a[i] > b[i]:
            return False
    return True


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a[:-1], b[:-1])) + (a[-1],)


def _quotient(a: tuple, b: tuple) -> tuple:
    """Monomial a / b (component 0)."""
    return tuple(x - y for x, y in zip(a[:-1], b[:-1])) + (0,)


def _primitive(p: dict, ring: _Ring) -> dict:
    g = 0
    for v in p.values():
        g = math.gcd(g, v)
        if g == 1:
            break
    lc = p[ring.lead(p)]
    if lc < 0:
        g = -g
    if g != 1:
        return {e: v // g for e, v in p.items()}
    return p


@dataclass
class _Elem:
    lm: tuple
    lc: int
    poly: dict


def _top_reduce(p: dict, G: list[_Elem], ring: _Ring) -> dict:
    w = ring.width
    while p:
        lm = ring.lead(p)
        for g in G:
            if _divides(g.lm, lm, w):
                c = p[lm]
                gc = math.gcd(c, g.lc)
                a, b = g.lc // gc, c // gc
                m = _quotient(lm, g.lm)
                if a != 1:
                    p = {e: v * a for e, v in p.items()}
                prod = ring.lmul(m, b, g.poly)
                for e, v in prod.items():
                    x = p.get(e, 0) - v
                    if x:
                        p[e] = x
                    else:
                        p.pop(e, None)
                break
        else:
            return _primitive(p, ring)
    return p


def _full_reduce(p: dict, G: list[_Elem], ring: _Ring) -> dict:
    """Reduce every term, returning a primitive integer polynomial."""
    w = ring.width
    rem: dict = {}
    heap = [(ring.negkey(e), e) for e in p]
    heapq.heapify(heap)
    p = dict(p)
    while heap:
        _, lm = heapq.heappop(heap)
        c = p.get(lm)
        if not c:
            continue
        for g in G:
            if _divides(g.lm, lm, w):
                gc = math.gcd(c, g.lc)
                a, b = g.lc // gc, c // gc
                if a != 1:
                    p = {e: v * a for e, v in p.items()}
                    rem = {e: v * a for e, v in rem.items()}
                prod = ring.lmul(_quotient(lm, g.lm), b, g.poly)
                for e, v in prod.items():
                    x = p.get(e, 0) - v
                    if x:
                        if e not in p:
                            heapq.heappush(heap, (ring.negkey(e), e))
                        p[e] = x
                    else:
                        p.pop(e, None)
                break
        else:
            rem[lm] = p.pop(lm)
    return _primitive(rem, ring) if rem else rem


def _buchberger(inputs: list[dict], ring: _Ring, budget: Budget, stats: dict) -> list[_Elem]:
    w = ring.width
    G: list[_Elem] = []
    pairs: list = []
    live: set = set()
    seq = 0

    def degree_of(e):
        return sum(e[: w + 1])

    def add(p: dict):
        nonlocal seq
        lm = ring.lead(p)
        r = len(G)
        G.append(_Elem(lm, p[lm], p))
        stats["basis_size"] = len(G)
        # drop old pairs made redundant by the new leading monomial
        for key in list(live):
            i, j = key
            lij = _lcm(G[i].lm, G[j].lm)
            if (
                _divides(lm, lij, w)
                and _lcm(G[i].lm, lm) != lij
                and _lcm(G[j].lm, lm) != lij
            ):
                live.discard(key)
        new = []
        for i in range(r):
            if G[i].lm[-1] == lm[-1]:
                new.append((_lcm(G[i].lm, lm), i))
        kept = []
        for lij, i in new:
            if any(
                _divides(other, lij, w) and (other != lij or j < i)
                for other, j in new
                if j != i
            ):
                continue
            kept.append((lij, i))
        for lij, i in kept:
            seq += 1
            live.add((i, r))
            heapq.heappush(pairs, (degree_of(lij), ring.negkey(lij), seq, i, r))

    for p in sorted(inputs, key=lambda q: degree_of(ring.lead(q))):
        r = _top_reduce(dict(p), G, ring)
        if r:
            add(r)
    while pairs:
        deg, _, _, i, j = heapq.heappop(pairs)
        if (i, j) not in live:
            continue
        live.discard((i, j))
        stats["pairs"] += 1
        stats["max_degree"] = max(stats["max_degree"], deg)
        if stats["pairs"] > budget.max_pairs:
            raise ResourceLimit("pair budget exhausted", dict(stats))
        if deg > budget.max_degree:
            raise ResourceLimit("degree bound exceeded", dict(stats))
        gi, gj = G[i], G[j]
        lij = _lcm(gi.lm, gj.lm)
        g = math.gcd(gi.lc, gj.lc)
        s = ring.lmul(_quotient(lij, gi.lm), gj.lc // g, gi.poly)
        for e, v in ring.lmul(_quotient(lij, gj.lm), gi.lc // g, gj.poly).items():
            x = s.get(e, 0) - v
            if x:
                s[e] = x
            else:
                s.pop(e, None)
        if not s:
            continue
        r = _top_reduce(s, G, ring)
        if r:
            stats["min_lead_weight"] = min(stats["min_lead_weight"], ring.weight(ring.lead(r)))
            add(r)
    return G


def _interreduce(G: list[_Elem], ring: _Ring) -> list[_Elem]:
    w = ring.width
    minimal = [
        g
        for i, g in enumerate(G)
        if not any(
            j != i and _divides(h.lm, g.lm, w) and (h.lm != g.lm or j < i) for j, h in enumerate(G)
        )
    ]
    out = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        red = _full_reduce(g.poly, others, ring)
        out.append(_Elem(g.lm, red[g.lm], red))
    out.sort(key=lambda g: ring.key(g.lm))
    return out


# ---------------------------------------------------------------------------
# Conversion between WeylOp and internal dictionaries.


def _to_internal(op: WeylOp, comp: int = 0) -> dict:
    den = 1
    for c in op.terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    return {tuple(e) + (0, comp): int(c * den) for e, c in op.terms.items()}


def _homogenize(p: dict, w: int) -> dict:
    deg = max(sum(e[:w]) for e in p)
    return {e[:w] + (deg - sum(e[:w]), e[-1]): v for e, v in p.items()}


def _dehomogenize(p: dict, w: int) -> dict:
    out: dict = {}
    for e, v in p.items():
        k = e[:w] + (0, e[-1])
        x = out.get(k, 0) + v
        if x:
            out[k] = x
        else:
            out.pop(k, None)
    return out


def _to_weyl(p: dict, n: int, with_t: bool, w: int) -> WeylOp:
    return WeylOp._raw(n, with_t, {e[:w]: Fraction(v) for e, v in p.items()})


@dataclass
class LeftGB:
    """A left Groebner basis (dehomogenized) with its order and run statistics."""

    n: int
    with_t: bool
    order: WeightOrder
    generators: list[WeylOp]
    complete: bool = True
    stats: dict = field(default_factory=dict)
    homogenized: list[dict] = field(default_factory=list, repr=False)

    def _ring(self) -> _Ring:
        return _Ring(self.order, homog=False)

    def internal(self) -> list[dict]:
        return [_to_internal(g) for g in self.generators]

    def initial_forms(self) -> list[WeylOp]:
        """Leading weight forms of the generators."""
        ring = self._ring()
        out = []
        for g in self.generators:
            ws = {e: ring.weight(e + (0, 0)) for e in g.terms}
            top = max(ws.values())
            out.append(WeylOp._raw(g.n, g.with_t, {e: c for e, c in g.terms.items() if ws[e] == top}))
        return out

    def reduces_to_zero(self, op: WeylOp, max_h_power: int = 8) -> bool:
        """Membership test through the homogenized basis.

        An operator lies in the ideal iff some h-power multiple of its
        homogenization top-reduces to zero.
        """
        if not op:
            return True
        ring = _Ring(self.order, homog=True)
        w = 2 * self.order.nv
        G = [_Elem(ring.lead(p), p[ring.lead(p)], p) for p in self.homogenized]
        q = _homogenize(_to_internal(op), w)
        for k in range(max_h_power + 1):
            lifted = {e[:w] + (e[w] + k, e[-1]): v for e, v in q.items()}
            if not _top_reduce(lifted, G, ring):
                return True
        return False


def _run(gens_internal: list[dict], order: WeightOrder, budget: Budget, module=False, homog=True):
    ring = _Ring(order, homog=homog, module=module)
    w = 2 * order.nv
    stats = {"pairs": 0, "max_degree": 0, "basis_size": 0, "min_lead_weight": 10**9}
    inputs = [_homogenize(p, w) if homog else p for p in gens_internal if p]
    for p in inputs:
        stats["min_lead_weight"] = min(stats["min_lead_weight"], ring.weight(ring.lead(p)))
    G = _buchberger(inputs, ring, budget, stats)
    G = _interreduce(G, ring)
    return G, ring, stats


def left_groebner(gens: Sequence[WeylOp], order: WeightOrder, budget: Budget = Budget()) -> LeftGB:
    """Left Groebner basis of the left ideal generated by ``gens``."""
    gens = [g for g in gens if g]
    if not gens:
        raise PreconditionError("empty generator list")
    n, with_t = gens[0].n, gens[0].with_t
    for g in gens:
        if (g.n, g.with_t) != (n, with_t):
            raise PreconditionError("generators live in different rings")
    if order.nv != n + with_t:
        raise PreconditionError("weight vector does not match the ring")
    w = 2 * order.nv
    G, ring, stats = _run([_to_internal(g) for g in gens], order, budget)
    homog = [g.poly for g in G]
    deh = []
    seen = set()
    dring = _Ring(order, homog=False)
    for p in homog:
        q = _dehomogenize(p, w)
        if q:
            q = _primitive(q, dring)
            key = frozenset(q.items())
            if key not in seen:
                seen.add(key)
                deh.append(q)
    # drop elements whose leading monomial is divisible by another one's
    leads = [dring.lead(q) for q in deh]
    keep = [
        q
        for i, q in enumerate(deh)
        if not any(j != i and _divides(leads[j], leads[i], w) and (leads[j] != leads[i] or j < i) for j in range(len(deh)))
    ]
    keep.sort(key=lambda q: dring.key(dring.lead(q)))
    ops = [_to_weyl(q, n, with_t, w) for q in keep]
    return LeftGB(n, with_t, order, ops, True, stats, homog)


def gb_from_stored(n: int, with_t: bool, order: WeightOrder, homogenized: list[dict]) -> LeftGB:
    """Rebuild a LeftGB from its homogenized basis (used by the cache)."""
    w = 2 * order.nv
    dring = _Ring(order, homog=False)
    deh, seen = [], set()
    for p in homogenized:
        q = _dehomogenize(p, w)
        if q:
            q = _primitive(q, dring)
            key = frozenset(q.items())
            if key not in seen:
                seen.add(key)
                deh.append(q)
    leads = [dring.lead(q) for q in deh]
    keep = [
        q
        for i, q in enumerate(deh)
        if not any(j != i and _divides(leads[j], leads[i], w) and (leads[j] != leads[i] or j < i) for j in range(len(deh)))
    ]
    keep.sort(key=lambda q: dring.key(dring.lead(q)))
    return LeftGB(n, with_t, order, [_to_weyl(q, n, with_t, w) for q in keep], True, {"cached": True}, homogenized)


def module_syzygy_quotient(
    ideal_gens: Sequence[WeylOp], element: WeylOp, budget: Budget = Budget()
) -> list[WeylOp]:
    """Generators of the left ideal {Q : Q * element in (ideal_gens)}.

    Computed with a two-component position-over-term module Groebner basis:
    rows (g, 0) and (element, 1); basis rows with vanishing first component
    carry the quotient in their second component.
    """
    n, with_t = element.n, element.with_t
    nv = n + with_t
    order = degree_order(nv)
    rows = []
    for g in ideal_gens:
        rows.append(_to_internal(g, comp=0))
    first = _to_internal(element, comp=0)
    # scale consistently: element row and unit marker share a denominator
    den = 1
    for c in element.terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    marker = {(0,) * (2 * nv) + (0, 1): den}
    row = dict(first)
    row.update(marker)
    rows.append(row)
    G, ring, stats = _run(rows, order, budget, module=True, homog=True)
    w = 2 * nv
    out = []
    for g in G:
        if all(e[-1] == 1 for e in g.poly):
            q = _dehomogenize(g.poly, w)
            if q:
                out.append(_to_weyl(q, n, with_t, w))
    return out


# ---------------------------------------------------------------------------
# Exact normal forms and division by initial forms (Fraction arithmetic).


class InitialDivider:
    """Linear division of weight-homogeneous operators by the initial forms of a basis.

    The initial forms of a Groebner basis under a weight order form a Groebner
    basis of the initial ideal under the tie-break term order, so remainders are
    canonical.  Division always reduces the largest remaining term by the first
    admissible divisor; per-monomial results are memoized, which is sound because
    that procedure is linear.
    """

    def __init__(self, gb: LeftGB):
        self.gb = gb
        self.nv = gb.order.nv
        self.w = 2 * self.nv
        self.ring = _Ring(WeightOrder((0,) * self.w, gb.order.tie), homog=False)
        self.vring = _Ring(gb.order, homog=False)
        self.full = []
        self.initial = []
        for g in gb.generators:
            full = {tuple(e) + (0, 0): c for e, c in g.terms.items()}
            top = max(self.vring.weight(e) for e in full)
            ini = {e: c for e, c in full.items() if self.vring.weight(e) == top}
            lm = self.ring.lead(ini)
            self.full.append(full)
            self.initial.append((lm, ini[lm], ini, top))
        self._memo: dict = {}

    def _find(self, e):
        w = self.w
        for idx, (lm, lc, ini, top) in enumerate(self.initial):
            if _divides(lm, e, w):
                return idx
        return None

    def divide_monomial(self, e: tuple) -> tuple[dict, dict]:
        """Return (correction, remainder) for the monomial e.

        ``correction`` is sum_i q_i * g_i with the *full* generators and
        ``remainder`` the canonical normal form of e modulo the initial ideal.
        """
        hit = self._memo.get(e)
        if hit is not None:
            return hit
        corr: dict = {}
        rem: dict = {}
        work = {e: Fraction(1)}
        heap = [(self.ring.negkey(e), e)]
        ring = self.ring
        while heap:
            _, m = heapq.heappop(heap)
            c = work.pop(m, None)
            if not c:
                continue
            if m != e and m in self._memo:
                mc, mr = self._memo[m]
                _axpy(corr, c, mc)
                _axpy(rem, c, mr)
                continue
            idx = self._find(m)
            if idx is None:
                rem[m] = rem.get(m, 0) + c
                continue
            lm, lc, ini, _ = self.initial[idx]
            q = _quotient(m, lm)
            coef = c / lc
            _axpy(corr, coef, ring.lmul(q, 1, self.full[idx]))
            for te, v in ring.lmul(q, coef, ini).items():
                if te == m:
                    continue
                x = work.get(te, 0) - v
                if te not in work:
                    heapq.heappush(heap, (ring.negkey(te), te))
                work[te] = x
        rem = {k: v for k, v in rem.items() if v}
        corr = {k: v for k, v in corr.items() if v}
        self._memo[e] = (corr, rem)
        return corr, rem

    def divide(self, p: dict) -> tuple[dict, dict]:
        corr: dict = {}
        rem: dict = {}
        for e, c in p.items():
            mc, mr = self.divide_monomial(e)
            _axpy(corr, c, mc)
            _axpy(rem, c, mr)
        return corr, rem

    def normal_form(self, p: dict) -> dict:
        return self.divide(p)[1]


def _axpy(acc: dict, c, p: dict):
    for e, v in p.items():
        x = acc.get(e, 0) + c * v
        if x:
            acc[e] = x
        else:
            acc.pop(e, None)


def theta_minimal_polynomial(gb: LeftGB, max_degree: int = 64) -> UniPoly:
    """Minimal polynomial of theta = t*dt modulo the initial ideal of ``gb``.

    Requires a basis computed under a V-type weight order on the t-extended
    ring.  Returns the zero polynomial if no relation is found up to
    ``max_degree``.
    """
    if not gb.with_t:
        raise PreconditionError("theta needs the t-extended ring")
    div = InitialDivider(gb)
    n = gb.n
    nv = n + 1
    theta = [0] * (2 * nv + 2)
    theta[n] = 1
    theta[2 * nv - 1] = 1
    theta = tuple(theta)
    one = (0,) * (2 * nv + 2)
    ring = div.ring
    forms = [div.normal_form({one: Fraction(1)})]
    # echelon basis over the normal forms seen so far, tracking combinations
    basis: list[tuple[tuple, dict, dict]] = []  # (pivot, vector, combination)

    def insert(vec: dict, comb: dict):
        vec, comb = dict(vec), dict(comb)
        for pivot, bvec, bcomb in basis:
            c = vec.get(pivot)
            if c:
                _axpy(vec, -c, bvec)
                _axpy(comb, -c, bcomb)
        if not vec:
            return comb
        pivot = max(vec, key=ring.key)
        c = vec[pivot]
        vec = {e: v / c for e, v in vec.items()}
        comb = {e: v / c for e, v in comb.items()}
        for k, (pv, bvec, bcomb) in enumerate(basis):
            d = bvec.get(pivot)
            if d:
                _axpy(bvec, -d, vec)
                _axpy(bcomb, -d, comb)
        basis.append((pivot, vec, comb))
        return None

    rel = insert(forms[0], {0: Fraction(1)})
    if rel is not None:
        return UniPoly([1])
    for k in range(1, max_degree + 1):
        prev = forms[-1]
        nxt = div.normal_form(ring.lmul(theta, 1, prev))
        forms.append(nxt)
        rel = insert(nxt, {k: Fraction(1)})
        if rel is not None:
            coeffs = [rel.get(i, Fraction(0)) for i in range(k + 1)]
            return UniPoly(coeffs).monic()
    return UniPoly()


def intersect_with_s(gb: LeftGB, max_degree: int = 64) -> UniPoly:
    """Monic generator of (initial ideal) intersected with Q[s], as a polynomial in s.

    ``gb`` must come from a V-type weight order (see :func:`v_order`).  The
    theta-relation b(theta) translates to s via theta = -s - 1.
    """
    b_theta = theta_minimal_polynomial(gb, max_degree)
    if not b_theta:
        return b_theta
    return b_theta.compose(UniPoly([-1, -1])).monic()
