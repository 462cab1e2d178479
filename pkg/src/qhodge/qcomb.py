"""Rising-factorial polynomials Q_i(x) = x(x+1)...(x+i-1) and their identities."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .polyring import MPoly, UniPoly, as_rat

IDENTITY_BOUND = 12


@dataclass(frozen=True)
class QPoly:
    index: int
    expansion: UniPoly

    def __call__(self, x):
        return self.expansion(x)


@lru_cache(maxsize=None)
def q_poly(i: int) -> QPoly:
    if i < 0:
        raise ValueError("Q_i needs i >= 0")
    p = UniPoly([1])
    for j in range(i):
        p = p * UniPoly([j, 1])
    return QPoly(i, p)


def q_value(i: int, x) -> Fraction:
    """Q_i evaluated at a rational point without expanding."""
    x = as_rat(x)
    out = Fraction(1)
    for j in range(i):
        out *= x + j
    return out


def _q_bivariate(i: int, linear: MPoly) -> MPoly:
    """Q_i(L) for a linear form L in a polynomial ring."""
    out = MPoly.constant(linear.n, 1)
    for j in range(i):
        out = out * (linear + j)
    return out


def verify_convolution_identity(j: int) -> bool:
    """Q_j(x) == sum_i C(j,i) Q_{j-i}(y) Q_i(x-y) as polynomials in x, y."""
    if j > IDENTITY_BOUND:
        raise ValueError(f"identity checks are bounded by j <= {IDENTITY_BOUND}")
    x = MPoly.var(2, 0)
    y = MPoly.var(2, 1)
    lhs = _q_bivariate(j, x)
    rhs = MPoly(2)
    for i in range(j + 1):
        rhs = rhs + _q_bivariate(j - i, y) * _q_bivariate(i, x - y) * comb(j, i)
    return lhs == rhs


def verify_shift_identity(j: int) -> bool:
    """Q_j(x+1) == sum_i i! C(j,i) Q_{j-i}(x)."""
    if j > IDENTITY_BOUND:
        raise ValueError(f"identity checks are bounded by j <= {IDENTITY_BOUND}")
    lhs = q_poly(j).expansion.shift(1)
    rhs = UniPoly()
    for i in range(j + 1):
        rhs = rhs + q_poly(j - i).expansion * (factorial(i) * comb(j, i))
    return lhs == rhs
