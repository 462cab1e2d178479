"""Minimal-exponent toolkit: Lichtin's bound, Thom-Sebastiani, multiplicity and restriction bounds.

Local exponents at the origin are represented by the global minimal exponent
of an origin-centred polynomial, so inputs should have their only singular
point at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .bsato import INFINITY, MinExp, format_minexp, minimal_exponent
from .polyring import MPoly, PreconditionError, groebner_commutative, ideal_dimension


@dataclass(frozen=True)
class ResolutionData:
    """(a_i, b_i) for the exceptional divisors: coefficients in mu^*Z and in K_{Y/X}."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for a, b in self.pairs:
            if a < 1 or b < 0:
                raise PreconditionError(f"invalid resolution pair ({a}, {b})")


def parse_resolution(text: str) -> ResolutionData:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise PreconditionError(f"line {lineno}: expected two integers 'a b'")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise PreconditionError(f"line {lineno}: expected two integers 'a b'") from None
    return ResolutionData(tuple(pairs))


def lichtin_gamma(res: ResolutionData) -> MinExp:
    if not res.pairs:
        return INFINITY
    return min(Fraction(b + 1, a) for a, b in res.pairs)


@dataclass
class ExponentCheck:
    """Outcome of one inequality or identity between minimal exponents."""

    name: str
    holds: bool
    values: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, (Fraction, float)):
                return format_minexp(v)
            return v

        return {"check": self.name, "holds": self.holds, "values": {k: enc(v) for k, v in self.values.items()}}


def _vanishes_at_origin(f: MPoly) -> bool:
    return f.constant_term() == 0


def check_lichtin(f: MPoly, res: ResolutionData, **kw) -> ExponentCheck:
    m = minimal_exponent(f, **kw)
    g = lichtin_gamma(res)
    return ExponentCheck("lichtin", m >= g, {"minimal_exponent": m, "gamma": g})


def direct_sum(f: MPoly, g: MPoly) -> MPoly:
    """f(x) + g(y) on disjoint variable blocks."""
    n = f.n + g.n
    return f.embed(n, 0) + g.embed(n, f.n)


def thom_sebastiani_check(f: MPoly, g: MPoly, **kw) -> ExponentCheck:
    if not (_vanishes_at_origin(f) and _vanishes_at_origin(g)):
        raise PreconditionError("both summands must vanish at the origin")
    a, b = minimal_exponent(f, **kw), minimal_exponent(g, **kw)
    total = minimal_exponent(direct_sum(f, g), **kw)
    expected = a + b  # math.inf absorbs
    return ExponentCheck("thom_sebastiani", total == expected, {"f": a, "g": b, "sum": total})


def subadditivity_check(f: MPoly, g: MPoly, **kw) -> ExponentCheck:
    if f.n != g.n:
        raise PreconditionError("subadditivity needs a common ring")
    h = f + g
    if not f or not g or not h:
        raise PreconditionError("f, g and f + g must be nonzero")
    if not (_vanishes_at_origin(f) and _vanishes_at_origin(g)):
        raise PreconditionError("f and g must vanish at the origin")
    a, b, c = (minimal_exponent(x, **kw) for x in (f, g, h))
    return ExponentCheck("subadditivity", c <= a + b, {"f": a, "g": b, "f+g": c})


def tangent_cone_singular_dimension(f: MPoly) -> int:
    """Dimension of the singular locus of the projectivized tangent cone (-1 if empty)."""
    cone = f.homogeneous_part(f.low_degree())
    ideal = groebner_commutative([cone] + [cone.diff(i) for i in range(f.n)], n=f.n)
    affine = ideal_dimension(ideal)
    return max(-1, affine - 1)


def multiplicity_bounds_check(f: MPoly, r: int | None = None, **kw) -> ExponentCheck:
    """(n - r - 1)/m <= minimal exponent <= n/m with m the multiplicity at 0."""
    if not _vanishes_at_origin(f):
        raise PreconditionError("f must vanish at the origin")
    m = f.low_degree()
    if m <= 1:
        raise PreconditionError(f"multiplicity {m} at the origin; need at least 2")
    if r is None:
        r = tangent_cone_singular_dimension(f)
    n = f.n
    lower, upper = Fraction(n - r - 1, m), Fraction(n, m)
    e = minimal_exponent(f, **kw)
    return ExponentCheck(
        "multiplicity_bounds",
        lower <= e <= upper,
        {"lower": lower, "minimal_exponent": e, "upper": upper, "m": m, "r": r},
    )


def restrict_to_hyperplane(f: MPoly, i: int) -> MPoly:
    """f restricted to x_i = 0, as a polynomial in the remaining variables."""
    if not 0 <= i < f.n:
        raise PreconditionError(f"variable index {i} out of range")
    g = f.substitute(i, 0)
    if not g:
        raise PreconditionError(f"the hyperplane x{i + 1} = 0 lies inside the divisor")
    terms = {e[:i] + e[i + 1 :]: c for e, c in g.terms.items()}
    return MPoly(f.n - 1, terms)


def restriction_check(f: MPoly, i: int, **kw) -> ExponentCheck:
    if not _vanishes_at_origin(f):
        raise PreconditionError("f must vanish at the origin")
    g = restrict_to_hyperplane(f, i)
    if g.is_constant():
        raise PreconditionError("restriction is a nonzero constant")
    a, b = minimal_exponent(g, **kw), minimal_exponent(f, **kw)
    return ExponentCheck("restriction", a <= b, {"restricted": a, "original": b})


def lct_from_minimal_exponent(m: MinExp) -> Fraction:
    return Fraction(1) if m == INFINITY else min(Fraction(1), m)

