"""Weyl algebra in x_1..x_n (optionally t) with normal ordering x^a t^k dx^b dt^l.

Exponent tuples have length ``2 * nv`` where ``nv = n + with_t``: first the
multiplicative variables (x_1..x_n, t), then the derivations in the same
order.  The symbol ``s`` is accepted on input and expanded as ``-dt*t``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Mapping, Sequence

from .polyring import (
    MAX_VARS,
    MPoly,
    ParseError,
    PreconditionError,
    UniPoly,
    as_rat,
    format_rat,
    infer_nvars,
    parse_expression,
    var_names,
    variable_index,
)


@lru_cache(maxsize=None)
def _commute_terms(b: int, c: int) -> tuple[tuple[int, int], ...]:
    """d^b x^c = sum_k coeff * x^(c-k) d^(b-k); returns (k, coeff) pairs."""
    return tuple((k, comb(b, k) * comb(c, k) * factorial(k)) for k in range(min(b, c) + 1))


def mono_mul(a: tuple, b: tuple, nv: int, homog: bool = False) -> list[tuple[tuple, int]]:
    """Normally ordered product of two monomials as (exponents, integer coefficient).

    When ``homog`` is set the exponent tuples carry an h-exponent at position
    ``2*nv`` and each commutation contributes ``h^2``.  Entries past ``2*nv`` are
    added componentwise, which lets module component tags ride along.
    """
    overlap = [i for i in range(nv) if a[nv + i] and b[i]]
    base = [x + y for x, y in zip(a, b)]
    if not overlap:
        return [(tuple(base), 1)]
    choices = [_commute_terms(a[nv + i], b[i]) for i in overlap]
    out = []
    for combo in product(*choices):
        e = list(base)
        coeff = 1
        drop = 0
        for i, (k, c) in zip(overlap, combo):
            if k:
                e[i] -= k
                e[nv + i] -= k
                drop += k
            coeff *= c
        if homog:
            e[2 * nv] += 2 * drop
        out.append((tuple(e), coeff))
    return out


class WeylOp:
    """Immutable normally ordered Weyl-algebra element with rational coefficients."""

    __slots__ = ("n", "with_t", "terms")

    def __init__(self, n: int, with_t: bool, terms: Mapping[tuple, object] | None = None):
        if n > MAX_VARS:
            raise PreconditionError(f"at most {MAX_VARS} variables are supported")
        self.n = n
        self.with_t = with_t
        width = 2 * (n + with_t)
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != width:
                raise ValueError("exponent width does not match ring signature")
            c = as_rat(c)
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    @property
    def nv(self) -> int:
        return self.n + self.with_t

    @classmethod
    def _raw(cls, n, with_t, terms):
        obj = cls.__new__(cls)
        obj.n, obj.with_t, obj.terms = n, with_t, terms
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def constant(cls, n: int, with_t: bool, c=1) -> "WeylOp":
        c = as_rat(c)
        return cls._raw(n, with_t, {(0,) * (2 * (n + with_t)): c} if c else {})

    @classmethod
    def _unit(cls, n, with_t, pos):
        e = [0] * (2 * (n + with_t))
        e[pos] = 1
        return cls._raw(n, with_t, {tuple(e): Fraction(1)})

    @classmethod
    def x(cls, n: int, with_t: bool, i: int) -> "WeylOp":
        return cls._unit(n, with_t, i)

    @classmethod
    def dx(cls, n: int, with_t: bool, i: int) -> "WeylOp":
        return cls._unit(n, with_t, n + with_t + i)

    @classmethod
    def t(cls, n: int) -> "WeylOp":
        return cls._unit(n, True, n)

    @classmethod
    def dt(cls, n: int) -> "WeylOp":
        return cls._unit(n, True, 2 * n + 1)

    @classmethod
    def s(cls, n: int) -> "WeylOp":
        """s = -dt*t = -t*dt - 1."""
        return -(cls.dt(n) * cls.t(n))

    @classmethod
    def from_poly(cls, f: MPoly, with_t: bool = True) -> "WeylOp":
        pad = (0,) * (with_t + f.n + with_t)
        terms = {}
        for e, c in f.terms.items():
            terms[tuple(e) + pad] = c
        return cls._raw(f.n, with_t, terms)

    @classmethod
    def from_s_poly(cls, n: int, b: UniPoly) -> "WeylOp":
        s = cls.s(n)
        acc = cls.constant(n, True, 0)
        for c in reversed(b.coeffs):
            acc = acc * s + c
        return acc

    # arithmetic -------------------------------------------------------
    def _check(self, other: "WeylOp"):
        if (self.n, self.with_t) != (other.n, other.with_t):
            raise PreconditionError("Weyl operators live in different rings")

    def _lift(self, other):
        if isinstance(other, WeylOp):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return WeylOp.constant(self.n, self.with_t, other)
        if isinstance(other, MPoly):
            return WeylOp.from_poly(other, self.with_t)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return WeylOp._raw(self.n, self.with_t, out)

    __radd__ = __add__

    def __neg__(self):
        return WeylOp._raw(self.n, self.with_t, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return WeylOp._raw(
                self.n, self.with_t, {e: c * other for e, c in self.terms.items()} if other else {}
            )
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return weyl_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return weyl_mul(other, self)

    def __pow__(self, k: int):
        out = WeylOp.constant(self.n, self.with_t, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = WeylOp.constant(self.n, self.with_t, other)
        if not isinstance(other, WeylOp):
            return NotImplemented
        return (self.n, self.with_t, self.terms) == (other.n, other.with_t, other.terms)

    def __hash__(self):
        return hash((self.n, self.with_t, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def as_constant(self):
        if all(not any(e) for e in self.terms):
            return self.terms.get((0,) * (2 * self.nv), Fraction(0))
        return None

    # structure --------------------------------------------------------
    def has_t_part(self) -> bool:
        if not self.with_t:
            return False
        n = self.n
        return any(e[n] or e[2 * n + 1] for e in self.terms)

    def v_weights(self) -> set[int]:
        """V-degrees (t-exponent minus dt-exponent) occurring in the operator."""
        if not self.with_t:
            return {0}
        n = self.n
        return {e[n] - e[2 * n + 1] for e in self.terms}

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def s_decomposition(self) -> dict[int, "WeylOp"]:
        """Write an operator of D_X[s] as sum_j s^j P_j with t-free P_j.

        Raises if some monomial has unequal t and dt exponents.
        """
        n = self.n
        if not self.with_t:
            return {0: self}
        by_k: dict[int, dict] = {}
        for e, c in self.terms.items():
            k, l = e[n], e[2 * n + 1]
            if k != l:
                raise PreconditionError("operator is not in D_X[s]")
            core = e[:n] + e[n + 1 : 2 * n + 1]
            by_k.setdefault(k, {})[core] = c
        out: dict[int, dict] = {}
        for k, terms in by_k.items():
            # t^k dt^k = theta(theta-1)...(theta-k+1), theta = -s-1
            poly = UniPoly([1])
            for i in range(k):
                poly = poly * UniPoly([-1 - i, -1])
            for j, cj in enumerate(poly.coeffs):
                if not cj:
                    continue
                bucket = out.setdefault(j, {})
                for core, c in terms.items():
                    v = bucket.get(core, 0) + c * cj
                    if v:
                        bucket[core] = v
                    else:
                        bucket.pop(core, None)
        return {j: WeylOp._raw(n, False, t) for j, t in out.items() if t}

    def drop_t(self) -> "WeylOp":
        if self.has_t_part():
            raise PreconditionError("operator involves t or dt")
        if not self.with_t:
            return self
        n = self.n
        return WeylOp._raw(n, False, {e[:n] + e[n + 1 : 2 * n + 1]: c for e, c in self.terms.items()})

    def with_t_ring(self) -> "WeylOp":
        if self.with_t:
            return self
        n = self.n
        return WeylOp._raw(
            n, True, {e[:n] + (0,) + e[n:] + (0,): c for e, c in self.terms.items()}
        )

    # display ----------------------------------------------------------
    def _names(self):
        xs = var_names(self.n)
        mult = xs + (["t"] if self.with_t else [])
        ders = ["d" + v for v in xs] + (["dt"] if self.with_t else [])
        return mult + ders

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self._names()
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            mag = abs(c)
            body = format_rat(mag) if not mono else (mono if mag == 1 else f"{format_rat(mag)}*{mono}")
            pieces.append(("-" if c < 0 else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"WeylOp({self})"


def weyl_mul(a: WeylOp, b: WeylOp) -> WeylOp:
    a._check(b)
    nv = a.nv
    out: dict = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            for e, k in mono_mul(ea, eb, nv):
                v = out.get(e, 0) + ca * cb * k
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
    return WeylOp._raw(a.n, a.with_t, out)


def parse_operator(text: str, n: int | None = None, with_t: bool = True) -> WeylOp:
    """Parse operator text using ``x``/``x1``, ``dx``/``dx1``, ``t``, ``dt`` and ``s``."""
    if n is None:
        n = max(infer_nvars(text), 1)

    def symbols(name, pos):
        if name in ("t", "dt", "s"):
            if not with_t:
                raise ParseError(f"{name!r} needs the t-extended ring", text, pos)
            return {"t": WeylOp.t, "dt": WeylOp.dt, "s": WeylOp.s}[name](n)
        i = variable_index(name)
        if i is not None and i < n:
            return WeylOp.x(n, with_t, i)
        if name.startswith("d"):
            i = variable_index(name[1:])
            if i is not None and i < n:
                return WeylOp.dx(n, with_t, i)
        raise ParseError(f"unknown symbol {name!r}", text, pos)

    return parse_expression(text, symbols, WeylOp.constant(n, with_t, 1))


def weyl_apply(P: WeylOp, g: MPoly) -> MPoly:
    """Natural action of a t-free operator on a polynomial."""
    if P.has_t_part():
        raise PreconditionError("weyl_apply needs an operator without t or dt")
    P = P.drop_t()
    if P.n != g.n:
        raise PreconditionError("operator and polynomial live in different rings")
    n = P.n
    out = MPoly(n)
    for e, c in P.terms.items():
        h = g
        for i in range(n):
            for _ in range(e[n + i]):
                h = h.diff(i)
        out = out + h.mul_monomial(e[:n], c)
    return out


class FsElem:
    """An element sum_j (g_j / f^K) s^j f^s of O[1/f][s] f^s.

    Stored with one common f-power ``K`` for all coefficients; equality clears
    denominators to a common power first.
    """

    __slots__ = ("f", "K", "coeffs")

    def __init__(self, f: MPoly, terms: Sequence[tuple[MPoly, int, int]] = ()):
        K = max((k for _, k, _ in terms), default=0)
        coeffs: dict[int, MPoly] = {}
        for g, k, j in terms:
            if g.n != f.n:
                raise PreconditionError("coefficient ring mismatch")
            if not g:
                continue
            coeffs[j] = coeffs.get(j, MPoly(f.n)) + g * f ** (K - k)
        self.f = f
        self.K = K
        self.coeffs = {j: g for j, g in coeffs.items() if g}

    @classmethod
    def _raw(cls, f, K, coeffs):
        obj = cls.__new__(cls)
        obj.f, obj.K, obj.coeffs = f, K, {j: g for j, g in coeffs.items() if g}
        return obj

    @classmethod
    def power(cls, f: MPoly, shift: int = 0) -> "FsElem":
        """f^(s + shift) for shift >= 0."""
        return cls(f, [(f**shift, 0, 0)])

    def lifted(self, K: int) -> dict[int, MPoly]:
        extra = self.f ** (K - self.K)
        return {j: g * extra for j, g in self.coeffs.items()}

    def __eq__(self, other):
        if not isinstance(other, FsElem) or other.f != self.f:
            return NotImplemented
        K = max(self.K, other.K)
        return self.lifted(K) == other.lifted(K)

    def __add__(self, other: "FsElem") -> "FsElem":
        K = max(self.K, other.K)
        a, b = self.lifted(K), other.lifted(K)
        for j, g in b.items():
            a[j] = a.get(j, MPoly(self.f.n)) + g
        return FsElem._raw(self.f, K, a)

    def scale_s(self, poly: UniPoly) -> "FsElem":
        out: dict[int, MPoly] = {}
        for j, g in self.coeffs.items():
            for i, c in enumerate(poly.coeffs):
                if c:
                    out[i + j] = out.get(i + j, MPoly(self.f.n)) + g * c
        return FsElem._raw(self.f, self.K, out)

    def derive(self, i: int) -> "FsElem":
        f, K = self.f, self.K
        fi = f.diff(i)
        out: dict[int, MPoly] = {}
        zero = MPoly(f.n)
        for j, g in self.coeffs.items():
            out[j] = out.get(j, zero) + f * g.diff(i) - g * fi * K
            out[j + 1] = out.get(j + 1, zero) + g * fi
        return FsElem._raw(f, K + 1, out)

    def mul_poly(self, h: MPoly) -> "FsElem":
        return FsElem._raw(self.f, self.K, {j: g * h for j, g in self.coeffs.items()})

    def normalized(self) -> "FsElem":
        """Cancel common powers of f from all numerators."""
        K, coeffs = self.K, dict(self.coeffs)
        while K > 0 and coeffs:
            try:
                coeffs = {j: g.exact_div(self.f) for j, g in coeffs.items()}
            except ArithmeticError:
                break
            K -= 1
        if not coeffs:
            K = 0
        return FsElem._raw(self.f, K, coeffs)

    def specialize(self, m: int) -> tuple[MPoly, int]:
        """Value at s = m as (numerator, f-power)."""
        total = MPoly(self.f.n)
        for j, g in self.coeffs.items():
            total = total + g * Fraction(m) ** j
        return total, self.K

    def __str__(self):
        e = self.normalized()
        if not e.coeffs:
            return "0"
        parts = []
        for j in sorted(e.coeffs):
            sj = "" if j == 0 else ("*s" if j == 1 else f"*s^{j}")
            parts.append(f"({e.coeffs[j]}){sj}")
        den = "" if e.K == 0 else f" / f^{e.K}"
        return "[" + " + ".join(parts) + "]" + den + " * f^s"


def apply_to_fs(P: WeylOp, e: FsElem) -> FsElem:
    """Action of an operator in D_X[s] on an element of O[1/f][s] f^s."""
    pieces = P.s_decomposition()
    n = e.f.n
    result = FsElem._raw(e.f, e.K, {})
    for j, Pj in pieces.items():
        if Pj.n != n:
            raise PreconditionError("operator and f live in different rings")
        for mono, c in Pj.terms.items():
            cur = e
            for i in range(n):
                for _ in range(mono[n + i]):
                    cur = cur.derive(i)
            h = MPoly._raw(n, {mono[:n]: c})
            cur = cur.mul_poly(h)
            if j:
                cur = cur.scale_s(UniPoly([0] * j + [1]))
            result = result + cur
    return result
