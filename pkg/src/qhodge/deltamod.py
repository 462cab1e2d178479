"""The graph-embedding module and its twisted variant.

A :class:`DeltaElem` is ``sum_j v_j dt^j delta`` with polynomial ``v_j``; a
:class:`FracDeltaElem` is ``sum_j h_j f^beta (x) dt^j delta`` with ``h_j`` in
O[1/f], stored over one common power of f.  Operators act through

    t (m dt^j delta)   = f m dt^j delta - j m dt^(j-1) delta
    D (m dt^j delta)   = D(m) dt^j delta - D(f) m dt^(j+1) delta
    dt (m dt^j delta)  = m dt^(j+1) delta

where on the twisted module D(m) also picks up ``beta * D(f)/f * m``.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

from .polyring import MPoly, PreconditionError, UniPoly, as_rat
from .qcomb import q_poly, q_value
from .weyl import WeylOp


class TheoremViolation(AssertionError):
    """An identity that must hold by theory failed (CLI exit code 4)."""


def _trim(coeffs: list[MPoly]) -> list[MPoly]:
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


class DeltaElem:
    __slots__ = ("f", "coeffs")

    def __init__(self, f: MPoly, coeffs: Sequence[MPoly | int | Fraction] = ()):
        n = f.n
        cs = []
        for c in coeffs:
            if isinstance(c, MPoly):
                if c.n != n:
                    raise PreconditionError("coefficient ring mismatch")
                cs.append(c)
            else:
                cs.append(MPoly.constant(n, c))
        self.f = f
        self.coeffs = tuple(_trim(cs))

    @classmethod
    def delta(cls, f: MPoly) -> "DeltaElem":
        return cls(f, [1])

    @classmethod
    def dt_power(cls, f: MPoly, m: int) -> "DeltaElem":
        return cls(f, [0] * m + [1])

    @property
    def p(self) -> int:
        """dt-degree; -1 for the zero element."""
        return len(self.coeffs) - 1

    def coeff(self, j: int) -> MPoly:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else MPoly(self.f.n)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, DeltaElem) and self.f == other.f and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.f, self.coeffs))

    def __add__(self, other: "DeltaElem") -> "DeltaElem":
        k = max(len(self.coeffs), len(other.coeffs))
        return DeltaElem(self.f, [self.coeff(j) + other.coeff(j) for j in range(k)])

    def __sub__(self, other: "DeltaElem") -> "DeltaElem":
        return self + other.scale(-1)

    def scale(self, c) -> "DeltaElem":
        return DeltaElem(self.f, [v * as_rat(c) for v in self.coeffs])

    def mul_poly(self, g: MPoly) -> "DeltaElem":
        return DeltaElem(self.f, [v * g for v in self.coeffs])

    def __str__(self) -> str:
        return render_delta([str(v) for v in self.coeffs])

    def __repr__(self):
        return f"DeltaElem({self})"


def render_delta(parts: Sequence[str]) -> str:
    """Text form ``v0 + v1*dt + v2*dt^2 |delta``."""
    if not parts:
        return "0 |delta"
    out = []
    for j, v in enumerate(parts):
        if v == "0":
            continue
        body = f"({v})" if (" " in v and j) else v
        out.append(body if j == 0 else (f"{body}*dt" if j == 1 else f"{body}*dt^{j}"))
    return " + ".join(out) + " |delta"


def parse_delta(text: str, f: MPoly) -> DeltaElem:
    """Parse a comma-separated coefficient list ``"v0, v1, v2"``."""
    from .polyring import parse_poly

    items = [s for s in text.split(",")]
    if not any(s.strip() for s in items):
        raise PreconditionError("empty element")
    return DeltaElem(f, [parse_poly(s, f.n) if s.strip() else MPoly(f.n) for s in items])


class FracDeltaElem:
    """sum_j (num_j / f^K) f^beta (x) dt^j delta."""

    __slots__ = ("f", "beta", "K", "nums")

    def __init__(self, f: MPoly, beta, nums: Sequence[MPoly], K: int = 0):
        self.f = f
        self.beta = as_rat(beta)
        self.K = K
        self.nums = tuple(_trim(list(nums)))

    @classmethod
    def from_pairs(cls, f: MPoly, beta, pairs: Sequence[tuple[MPoly, int]]) -> "FracDeltaElem":
        K = max((k for _, k in pairs), default=0)
        return cls(f, beta, [g * f ** (K - k) for g, k in pairs], K)

    @property
    def p(self) -> int:
        return len(self.nums) - 1

    def lifted(self, K: int) -> list[MPoly]:
        m = self.f ** (K - self.K)
        return [g * m for g in self.nums]

    def normalized(self) -> "FracDeltaElem":
        K, nums = self.K, list(self.nums)
        while K > 0 and nums:
            try:
                nums = [g.exact_div(self.f) for g in nums]
            except ArithmeticError:
                break
            K -= 1
        return FracDeltaElem(self.f, self.beta, nums, K if nums else 0)

    def pairs(self) -> list[tuple[MPoly, int]]:
        return [(g, self.K) for g in self.nums]

    def coefficient(self, j: int) -> tuple[MPoly, int]:
        """(numerator, f-power) of h_j with the f-power reduced where possible."""
        g = self.nums[j] if j < len(self.nums) else MPoly(self.f.n)
        k = self.K
        while k > 0 and g:
            try:
                g2 = g.exact_div(self.f)
            except ArithmeticError:
                break
            g, k = g2, k - 1
        return g, (k if g else 0)

    def __eq__(self, other):
        if not isinstance(other, FracDeltaElem):
            return NotImplemented
        if self.f != other.f or self.beta != other.beta:
            return False
        K = max(self.K, other.K)
        a, b = self.lifted(K), other.lifted(K)
        n = max(len(a), len(b))
        zero = MPoly(self.f.n)
        a += [zero] * (n - len(a))
        b += [zero] * (n - len(b))
        return a == b

    def __add__(self, other: "FracDeltaElem") -> "FracDeltaElem":
        K = max(self.K, other.K)
        a, b = self.lifted(K), other.lifted(K)
        n = max(len(a), len(b))
        zero = MPoly(self.f.n)
        a += [zero] * (n - len(a))
        b += [zero] * (n - len(b))
        return FracDeltaElem(self.f, self.beta, [x + y for x, y in zip(a, b)], K)

    def scale(self, c) -> "FracDeltaElem":
        return FracDeltaElem(self.f, self.beta, [g * as_rat(c) for g in self.nums], self.K)

    def __str__(self):
        e = self.normalized()
        parts = []
        for j in range(len(e.nums)):
            g, k = e.coefficient(j)
            parts.append("0" if not g else (str(g) if k == 0 else f"({g})/f^{k}"))
        return render_delta(parts) + f" (twist {e.beta})"

    def __repr__(self):
        return f"FracDeltaElem({self})"


# ---------------------------------------------------------------------------
# Actions.


def _act_t(f, coeffs, zero):
    out = [zero] * len(coeffs)
    for j, v in enumerate(coeffs):
        out[j] = out[j] + f * v
        if j:
            out[j - 1] = out[j - 1] - v * j
    return out


def _act_dt(coeffs, zero):
    return [zero] + list(coeffs)


def _act_d(i, f, coeffs, zero):
    fi = f.diff(i)
    out = [zero] * (len(coeffs) + 1)
    for j, v in enumerate(coeffs):
        out[j] = out[j] + v.diff(i)
        out[j + 1] = out[j + 1] - fi * v
    return out


def _monomial_action(e: tuple, c: Fraction, n: int, f: MPoly, coeffs: list, zero, derive, mult_t):
    """Apply c * x^a t^k dx^b dt^l (rightmost factor first)."""
    cur = list(coeffs)
    l = e[2 * n + 1]
    if l:
        cur = [zero] * l + cur
    for i in range(n):
        for _ in range(e[n + 1 + i]):
            cur = derive(i, cur)
    for _ in range(e[n]):
        cur = mult_t(cur)
    mono = MPoly._raw(n, {e[:n]: c})
    return [v * mono for v in cur]


def act(P: WeylOp, u):
    """Action of an operator in x, t, dx, dt on a DeltaElem or FracDeltaElem."""
    P = P.with_t_ring()
    f = u.f
    n = f.n
    if P.n != n:
        raise PreconditionError("operator and element live in different rings")
    zero = MPoly(n)
    if isinstance(u, DeltaElem):
        coeffs = list(u.coeffs)
        derive = lambda i, cs: _act_d(i, f, cs, zero)
        mult_t = lambda cs: _act_t(f, cs, zero)
        total: list[MPoly] = []
        for e, c in P.terms.items():
            part = _monomial_action(e, c, n, f, coeffs, zero, derive, mult_t)
            total = _add_lists(total, part, zero)
        return DeltaElem(f, total)
    if isinstance(u, FracDeltaElem):
        return _act_frac(P, u)
    raise TypeError("act expects a DeltaElem or FracDeltaElem")


def _add_lists(a, b, zero):
    n = max(len(a), len(b))
    return [(a[j] if j < len(a) else zero) + (b[j] if j < len(b) else zero) for j in range(n)]


def _act_frac(P: WeylOp, u: FracDeltaElem) -> FracDeltaElem:
    """Twisted action, tracked as (numerators, common f-power)."""
    f = u.f
    n = f.n
    beta = u.beta
    zero = MPoly(n)
    total = FracDeltaElem(f, beta, [], 0)
    for e, c in P.terms.items():
        K = u.K
        cur = list(u.nums)
        l = e[2 * n + 1]
        if l:
            cur = [zero] * l + cur
        for i in range(n):
            fi = f.diff(i)
            for _ in range(e[n + 1 + i]):
                # D(g/f^K) + beta*D(f)/f * g/f^K, then the -D(f) m dt^(j+1) term
                new = [zero] * (len(cur) + 1)
                for j, g in enumerate(cur):
                    new[j] = new[j] + f * g.diff(i) + g * fi * (beta - K)
                    new[j + 1] = new[j + 1] - f * fi * g
                cur = new
                K += 1
        for _ in range(e[n]):
            new = [zero] * len(cur)
            for j, g in enumerate(cur):
                new[j] = new[j] + f * g
                if j:
                    new[j - 1] = new[j - 1] - g * j
            cur = new
        mono = MPoly._raw(n, {e[:n]: c})
        total = total + FracDeltaElem(f, beta, [g * mono for g in cur], K)
    return total


def q_of_s_times_delta(j: int, f: MPoly) -> DeltaElem:
    """Q_j(dt*t) applied to delta; checked against f^j dt^j delta."""
    n = f.n
    theta_shift = WeylOp.dt(n) * WeylOp.t(n)
    op = WeylOp.constant(n, True, 0)
    for c in reversed(q_poly(j).expansion.coeffs):
        op = op * theta_shift + c
    result = act(op, DeltaElem.delta(f))
    expected = DeltaElem(f, [0] * j + [f**j])
    if result != expected:
        raise TheoremViolation(f"Q_{j}(dt t) delta != f^{j} dt^{j} delta for f = {f}")
    return result


# ---------------------------------------------------------------------------
# The correspondence between the twisted module and the untwisted one.


def _frac_list(f: MPoly, pairs):
    """Normalize a list of (numerator, power) to numerators over f^K."""
    K = max((k for _, k in pairs), default=0)
    return [g * f ** (K - k) for g, k in pairs], K


def phi_inverse_coeffs(g: Sequence[tuple[MPoly, int]], beta, f: MPoly) -> list[tuple[MPoly, int]]:
    """h_i / f^i = sum_{j >= i} C(j,i) Q_{j-i}(-beta) g_j / f^j.

    Inputs and outputs are (numerator, f-power) pairs representing elements of
    O[1/f].
    """
    beta = as_rat(beta)
    p = len(g) - 1
    out = []
    for i in range(p + 1):
        terms = []
        for j in range(i, p + 1):
            num, k = g[j]
            c = comb(j, i) * q_value(j - i, -beta)
            if c and num:
                # (c * num / f^k) / f^j * f^i = c*num / f^(k + j - i)
                terms.append((num * c, k + j - i))
        nums, K = _frac_list(f, terms) if terms else ([MPoly(f.n)], 0)
        total = MPoly(f.n)
        for v in nums:
            total = total + v
        out.append(_reduce_pair(total, K, f))
    return out


def _reduce_pair(g: MPoly, k: int, f: MPoly) -> tuple[MPoly, int]:
    while k > 0 and g:
        try:
            g2 = g.exact_div(f)
        except ArithmeticError:
            break
        g, k = g2, k - 1
    return g, (k if g else 0)


def phi_forward(u: FracDeltaElem) -> list[tuple[MPoly, int]]:
    """Coefficients g with sum h_i/f^i Q_i(-s+beta) = sum g_i/f^i Q_i(-s).

    Solved top-down: Q_i(-s) has leading s-coefficient (-1)^i, so the system
    is triangular in the s-degree.
    """
    f, beta = u.f, u.beta
    p = u.p
    n = f.n
    if p < 0:
        return []
    # lhs as polynomial in s with O[1/f] coefficients, all over f^(K + p)
    K = u.K + p
    lhs = [MPoly(n) for _ in range(p + 1)]
    for i, num in enumerate(u.nums):
        # h_i / f^i = num / f^(u.K + i) = num * f^(p - i) / f^K
        scaled = num * f ** (p - i)
        poly = q_poly(i).expansion.compose(UniPoly([beta, -1]))
        for d, c in enumerate(poly.coeffs):
            if c:
                lhs[d] = lhs[d] + scaled * c
    # solve for G_i = g_i / f^i (numerators over f^K)
    G = [MPoly(n) for _ in range(p + 1)]
    rest = lhs
    for i in range(p, -1, -1):
        lead = Fraction((-1) ** i)
        G[i] = rest[i] * (1 / lead)
        poly = q_poly(i).expansion.compose(UniPoly([0, -1]))
        for d, c in enumerate(poly.coeffs):
            if c:
                rest[d] = rest[d] - G[i] * c
    # g_i = G_i * f^i, i.e. numerator G_i * f^i over f^K
    return [_reduce_pair(G[i] * f**i, K, f) for i in range(p + 1)]


def delta_from_pairs(f: MPoly, pairs: Sequence[tuple[MPoly, int]]) -> DeltaElem:
    """Convert (numerator, f-power) pairs to a polynomial DeltaElem, if possible."""
    coeffs = []
    for g, k in pairs:
        g, k = _reduce_pair(g, k, f)
        if k:
            raise PreconditionError("coefficients are not polynomial")
        coeffs.append(g)
    return DeltaElem(f, coeffs)


def w_from_v(v: DeltaElem, alpha) -> FracDeltaElem:
    """The unique w with t * w = Phi^{-1}(v) in the module twisted by beta = 1 - alpha."""
    alpha = as_rat(alpha)
    if alpha <= 0:
        raise PreconditionError("alpha must be positive")
    f = v.f
    p = v.p
    pairs = []
    for i in range(p + 1):
        terms = []
        for j in range(i, p + 1):
            c = comb(j, i) * q_value(j - i, alpha)
            if c and v.coeff(j):
                terms.append((v.coeff(j) * c, j - i + 1))
        if terms:
            nums, K = _frac_list(f, terms)
            total = MPoly(f.n)
            for x in nums:
                total = total + x
            pairs.append((total, K))
        else:
            pairs.append((MPoly(f.n), 0))
    return FracDeltaElem.from_pairs(f, 1 - alpha, pairs)


def theorem_a_combination(v: DeltaElem, alpha, p: int) -> MPoly:
    """sum_{j <= p} Q_j(alpha) f^(p-j) v_j."""
    alpha = as_rat(alpha)
    if v.p > p:
        raise PreconditionError("element has dt-degree above p")
    f = v.f
    total = MPoly(f.n)
    for j in range(v.p + 1):
        if v.coeff(j):
            total = total + v.coeff(j) * f ** (p - j) * q_value(j, alpha)
    return total


def check_w_against_t(v: DeltaElem, alpha) -> FracDeltaElem:
    """w_from_v cross-checked by t * w == Phi^{-1}(v) and f^(p+1) w_0 == the combination."""
    alpha = as_rat(alpha)
    w = w_from_v(v, alpha)
    lhs = act(WeylOp.t(v.f.n), w)
    rhs_pairs = phi_inverse_coeffs([(c, 0) for c in v.coeffs], 1 - alpha, v.f)
    rhs = FracDeltaElem.from_pairs(v.f, 1 - alpha, rhs_pairs)
    if lhs != rhs:
        raise TheoremViolation("t * w_from_v(v) differs from Phi^{-1}(v)")
    if v.p >= 0:
        g0, k0 = w.coefficient(0)
        combo = theorem_a_combination(v, alpha, v.p)
        power = v.p + 1
        lhs0 = g0 * v.f ** max(power - k0, 0)
        rhs0 = combo * v.f ** max(k0 - power, 0)
        if lhs0 != rhs0:
            raise TheoremViolation("f^(p+1) w_0 differs from the combination")
    return w
