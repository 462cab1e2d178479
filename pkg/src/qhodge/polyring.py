"""Exact polynomial arithmetic over Q and commutative Groebner-basis services.

Polynomials are sparse maps from exponent tuples to ``Fraction`` coefficients.
Canonical forms use degree reverse lexicographic order throughout, so two
ideals are equal exactly when their reduced Groebner bases coincide.

>>> f = parse_poly("x^2 + y^3")
>>> str(f.diff(0))
'2*x'
>>> I = groebner_commutative([f, f.diff(0), f.diff(1)])
>>> [str(g) for g in I.basis]
['x', 'y^2']
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

Rat = Fraction
MAX_VARS = 8
ALIASES = ("x", "y", "z", "w")


class PreconditionError(ValueError):
    """Input violates a documented precondition (CLI exit code 2)."""


class ParseError(PreconditionError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and ``'a/b'`` strings to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise PreconditionError(f"not a rational number: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def var_names(n: int) -> list[str]:
    if n <= len(ALIASES):
        return list(ALIASES[:n])
    return [f"x{i + 1}" for i in range(n)]


def degrevlex_key(exps: tuple[int, ...]):
    return (sum(exps), tuple(-e for e in reversed(exps)))


def deglex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


def lex_key(exps: tuple[int, ...]):
    return exps


ORDERS: dict[str, Callable] = {
    "degrevlex": degrevlex_key,
    "deglex": deglex_key,
    "lex": lex_key,
}


class MPoly:
    """Immutable sparse polynomial in ``n`` variables with rational coefficients."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[tuple[int, ...], object] | None = None):
        if n < 0 or n > MAX_VARS:
            raise PreconditionError(f"polynomials are limited to {MAX_VARS} variables, got {n}")
        self.n = n
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != n:
                    raise ValueError("exponent length does not match variable count")
                c = as_rat(c)
                if c:
                    clean[tuple(exps)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "MPoly":
        obj = cls.__new__(cls)
        obj.n = n
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, n: int, c=1) -> "MPoly":
        c = as_rat(c)
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def var(cls, n: int, i: int, power: int = 1) -> "MPoly":
        e = [0] * n
        e[i] = power
        return cls._raw(n, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "MPoly":
        return cls(len(exps), {tuple(exps): c})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.n, Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.n, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.n != self.n:
                raise PreconditionError(f"ring mismatch: {self.n} vs {other.n} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.constant(self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MPoly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return MPoly._raw(self.n, {})
            return MPoly._raw(self.n, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return MPoly._raw(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MPoly.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "MPoly":
        return self * as_rat(c)

    def mul_monomial(self, exps: tuple[int, ...], c=1) -> "MPoly":
        c = as_rat(c)
        return MPoly._raw(
            self.n, {tuple(a + b for a, b in zip(e, exps)): v * c for e, v in self.terms.items()}
        ) if c else MPoly._raw(self.n, {})

    def diff(self, i: int) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MPoly._raw(self.n, out)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def low_degree(self) -> int:
        """Lowest total degree of a term (the multiplicity at the origin)."""
        return min((sum(e) for e in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> "MPoly":
        return MPoly._raw(self.n, {e: c for e, c in self.terms.items() if sum(e) == d})

    def variables_used(self) -> set[int]:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def substitute(self, i: int, value) -> "MPoly":
        """Set variable ``i`` to a rational constant (variable count unchanged)."""
        value = as_rat(value)
        out: dict = {}
        for e, c in self.terms.items():
            ne = list(e)
            k = ne[i]
            ne[i] = 0
            ne = tuple(ne)
            v = out.get(ne, 0) + c * value**k
            if v:
                out[ne] = v
            else:
                out.pop(ne, None)
        return MPoly._raw(self.n, out)

    def evaluate(self, point: Sequence) -> Fraction:
        pt = [as_rat(v) for v in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(pt, e):
                if k:
                    term *= v**k
            total += term
        return total

    def embed(self, n: int, offset: int = 0) -> "MPoly":
        """Re-express in ``n`` variables, shifting variable indices by ``offset``."""
        if self.n + offset > n:
            raise PreconditionError("embedding target has too few variables")
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            ne[offset : offset + self.n] = e
            out[tuple(ne)] = c
        return MPoly(n, out)

    def leading(self, order: str = "degrevlex") -> tuple[tuple[int, ...], Fraction]:
        key = ORDERS[order]
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def monic(self, order: str = "degrevlex") -> "MPoly":
        if not self.terms:
            return self
        return self * (1 / self.leading(order)[1])

    def content_free(self) -> "MPoly":
        """Scale to coprime integer coefficients with positive leading coefficient."""
        if not self.terms:
            return self
        import math

        den = 1
        for c in self.terms.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [int(c * den) for c in self.terms.values()]
        g = 0
        for v in nums:
            g = math.gcd(g, v)
        sign = 1 if self.leading()[1] > 0 else -1
        return self * Fraction(sign * den, g)

    def exact_div(self, other: "MPoly") -> "MPoly":
        """Exact polynomial division; raises ArithmeticError if not divisible."""
        q, r = divide(self, [other], "lex")
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q[0]

    def sorted_terms(self, order: str = "degrevlex"):
        key = ORDERS[order]
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or var_names(self.n)
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                s = format_rat(abs(c))
            elif abs(c) == 1:
                s = mono
            else:
                s = f"{format_rat(abs(c))}*{mono}"
            parts.append(("-" if c < 0 else "+", s))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"MPoly({self.n}, {self.to_str()!r})"


# ---------------------------------------------------------------------------
# Parsing: one grammar shared by polynomials and operators.

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError("unexpected character", text, bad)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", int(m.group(1)), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


def parse_expression(text: str, symbols: Callable[[str, int], object], one: object):
    """Recursive-descent parse of ``text`` using ``symbols`` to resolve names.

    The grammar accepts ``+ - * / ^``, parentheses, integer literals and
    implicit multiplication (``2x``, ``x y``).  Division is allowed only by
    rational constants.  ``one`` is the multiplicative identity of the target
    ring and determines how numbers are embedded.
    """
    tokens = _tokenize(text)
    idx = 0

    def peek():
        return tokens[idx]

    def take():
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    def expr():
        sign = 1
        if peek()[0] == "op" and peek()[1] in "+-":
            sign = -1 if take()[1] == "-" else 1
        acc = term()
        if sign < 0:
            acc = -acc
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            rhs = term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term():
        acc = power()
        while True:
            tok = peek()
            if tok[0] == "op" and tok[1] == "*":
                take()
                acc = acc * power()
            elif tok[0] == "op" and tok[1] == "/":
                take()
                pos = peek()[2]
                den = power()
                c = _as_constant(den)
                if c is None or c == 0:
                    raise ParseError("division by a non-constant or zero", text, pos)
                acc = acc * (1 / c)
            elif tok[0] in ("num", "name") or (tok[0] == "op" and tok[1] == "("):
                acc = acc * power()
            else:
                return acc

    def power():
        base = atom()
        if peek()[0] == "op" and peek()[1] == "^":
            take()
            tok = take()
            if tok[0] != "num":
                raise ParseError("exponent must be a nonnegative integer", text, tok[2])
            return base ** tok[1]
        return base

    def atom():
        tok = take()
        kind, val, pos = tok
        if kind == "num":
            return one * Fraction(val)
        if kind == "name":
            return symbols(val, pos)
        if kind == "op" and val == "(":
            inner = expr()
            close = take()
            if close[0] != "op" or close[1] != ")":
                raise ParseError("expected ')'", text, close[2])
            return inner
        if kind == "op" and val == "-":
            return -power()
        raise ParseError("unexpected token", text, pos)

    def _as_constant(value):
        if isinstance(value, MPoly):
            return value.constant_term() if value.is_constant() else None
        const = getattr(value, "as_constant", None)
        return const() if const else None

    if not text.strip():
        raise ParseError("empty expression", text, 0)
    result = expr()
    if peek()[0] != "end":
        raise ParseError("unexpected trailing input", text, peek()[2])
    return result


_INDEXED = re.compile(r"^x(\d+)$")


def variable_index(name: str) -> int | None:
    """Map ``x``, ``y``, ``z``, ``w`` or ``x<k>`` to a zero-based index."""
    if name in ALIASES:
        return ALIASES.index(name)
    m = _INDEXED.match(name)
    if m and int(m.group(1)) >= 1:
        return int(m.group(1)) - 1
    return None


def infer_nvars(text: str) -> int:
    """Smallest variable count covering every variable named in ``text``."""
    n = 0
    for kind, val, _ in _tokenize(text):
        if kind == "name":
            i = variable_index(val)
            if i is None:
                i = variable_index(val[1:]) if val.startswith("d") else None
            if i is not None:
                n = max(n, i + 1)
    return n


def parse_poly(text: str, nvars: int | None = None) -> MPoly:
    """Parse ``text`` such as ``"x^2 + y^3"`` or ``"x1*x3 - 1/2"``."""
    n = max(infer_nvars(text), 1) if nvars is None else nvars
    if n > MAX_VARS:
        raise PreconditionError(f"at most {MAX_VARS} variables are supported")

    def symbols(name, pos):
        i = variable_index(name)
        if i is None or i >= n:
            raise ParseError(f"unknown variable {name!r}", text, pos)
        return MPoly.var(n, i)

    return parse_expression(text, symbols, MPoly.constant(n, 1))


# ---------------------------------------------------------------------------
# Division and commutative Groebner bases.


def divide(p: MPoly, divisors: Sequence[MPoly], order: str = "degrevlex"):
    """Multivariate division; returns (quotients, remainder)."""
    key = ORDERS[order]
    leads = [d.leading(order) for d in divisors]
    quots: list[dict] = [{} for _ in divisors]
    rem: dict = {}
    work = dict(p.terms)
    n = p.n
    while work:
        e = max(work, key=key)
        c = work.pop(e)
        for i, (le, lc) in enumerate(leads):
            if all(a >= b for a, b in zip(e, le)):
                m = tuple(a - b for a, b in zip(e, le))
                q = c / lc
                quots[i][m] = quots[i].get(m, 0) + q
                for de, dc in divisors[i].terms.items():
                    if de == le:
                        continue
                    te = tuple(a + b for a, b in zip(de, m))
                    v = work.get(te, 0) - q * dc
                    if v:
                        work[te] = v
                    else:
                        work.pop(te, None)
                break
        else:
            rem[e] = c
    return [MPoly(n, q) for q in quots], MPoly._raw(n, rem)


def _reduce_full(terms: dict, basis: list[tuple[tuple, dict]], key) -> dict:
    """Fully reduce ``terms`` by monic ``basis`` entries (lead exps, terms)."""
    rem: dict = {}
    work = dict(terms)
    while work:
        e = max(work, key=key)
        c = work.pop(e)
        for le, g in basis:
            if all(a >= b for a, b in zip(e, le)):
                m = tuple(a - b for a, b in zip(e, le))
                for ge, gc in g.items():
                    if ge == le:
                        continue
                    te = tuple(a + b for a, b in zip(ge, m))
                    v = work.get(te, 0) - c * gc
                    if v:
                        work[te] = v
                    else:
                        work.pop(te, None)
                break
        else:
            rem[e] = c
    return rem


@dataclass(frozen=True)
class IdealGens:
    """Generators of a polynomial ideal together with its reduced Groebner basis."""

    n: int
    generators: tuple[MPoly, ...]
    basis: tuple[MPoly, ...] = field(compare=False)
    order: str = "degrevlex"

    @classmethod
    def of(cls, gens: Iterable[MPoly], n: int | None = None) -> "IdealGens":
        return groebner_commutative(list(gens), n=n)

    def is_zero(self) -> bool:
        return not self.basis

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def reduce(self, p: MPoly) -> MPoly:
        key = ORDERS[self.order]
        prepared = [(g.leading(self.order)[0], g.terms) for g in self.basis]
        return MPoly._raw(self.n, _reduce_full(p.terms, prepared, key))

    def contains(self, p: MPoly) -> bool:
        return not self.reduce(p)

    def contains_ideal(self, other: "IdealGens") -> bool:
        return all(self.contains(g) for g in other.basis)

    def __eq__(self, other) -> bool:
        return isinstance(other, IdealGens) and ideal_equal(self, other)

    def __hash__(self) -> int:
        return hash((self.n, self.basis))

    def to_strs(self) -> list[str]:
        return [str(g) for g in self.basis]

    def __str__(self) -> str:
        return "(" + ", ".join(self.to_strs()) + ")" if self.basis else "(0)"


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def groebner_commutative(gens: Sequence[MPoly], order: str = "degrevlex", n: int | None = None) -> IdealGens:
    """Reduced Groebner basis by Buchberger's algorithm with both criteria."""
    if n is None:
        if not gens:
            raise PreconditionError("cannot infer ring of an empty generator list")
        n = gens[0].n
    for g in gens:
        if g.n != n:
            raise PreconditionError("generators live in different rings")
    key = ORDERS[order]
    G: list[tuple[tuple, dict]] = []

    def monic(terms):
        le = max(terms, key=key)
        lc = terms[le]
        return le, {e: c / lc for e, c in terms.items()}

    pending = [g.terms for g in gens if g.terms]
    pairs: list[tuple[int, int]] = []

    def add(terms):
        le, mt = monic(terms)
        idx = len(G)
        G.append((le, mt))
        for i in range(idx):
            pairs.append((i, idx))

    for t in sorted(pending, key=lambda t: key(max(t, key=key))):
        r = _reduce_full(t, G, key)
        if r:
            add(r)
    while pairs:
        pairs.sort(key=lambda ij: key(_lcm(G[ij[0]][0], G[ij[1]][0])), reverse=True)
        i, j = pairs.pop()
        (li, gi), (lj, gj) = G[i], G[j]
        lij = _lcm(li, lj)
        if all(a + b == c for a, b, c in zip(li, lj, lij)):
            continue  # coprime leading monomials
        if any(
            k not in (i, j)
            and _divides(G[k][0], lij)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(G))
        ):
            continue  # chain criterion
        s: dict = {}
        for g, le in ((gi, li), (gj, lj)):
            m = tuple(a - b for a, b in zip(lij, le))
            sign = 1 if g is gi else -1
            for e, c in g.items():
                te = tuple(a + b for a, b in zip(e, m))
                v = s.get(te, 0) + sign * c
                if v:
                    s[te] = v
                else:
                    s.pop(te, None)
        r = _reduce_full(s, G, key)
        if r:
            add(r)
    # minimalize then interreduce
    leads = [le for le, _ in G]
    minimal = [
        (le, g)
        for i, (le, g) in enumerate(G)
        if not any(
            j != i and _divides(leads[j], le) and (leads[j] != le or j < i) for j in range(len(G))
        )
    ]
    reduced = []
    for i, (le, g) in enumerate(minimal):
        others = [minimal[j] for j in range(len(minimal)) if j != i]
        tail = {e: c for e, c in g.items() if e != le}
        tail_r = _reduce_full(tail, others, key)
        tail_r[le] = Fraction(1)
        reduced.append(MPoly._raw(n, tail_r))
    reduced.sort(key=lambda p: key(p.leading(order)[0]))
    return IdealGens(n, tuple(gens), tuple(reduced), order)


def ideal_equal(a: IdealGens, b: IdealGens) -> bool:
    if a.n != b.n:
        raise PreconditionError("ideals live in rings with different variable counts")
    if a.order != b.order:
        b = groebner_commutative(list(b.basis), a.order, n=b.n)
    return a.basis == b.basis


def ideal_sum_with_principal(a: IdealGens, f: MPoly) -> IdealGens:
    if f.n != a.n:
        raise PreconditionError("ideal and polynomial live in different rings")
    return groebner_commutative(list(a.basis) + [f], a.order, n=a.n)


def ideal_product_principal(a: IdealGens, f: MPoly) -> IdealGens:
    return groebner_commutative([g * f for g in a.basis], a.order, n=a.n)


def ideal_dimension(a: IdealGens) -> int:
    """Krull dimension of the quotient ring; -1 for the unit ideal."""
    if a.is_zero():
        raise PreconditionError("dimension of whole ring requested")
    if a.is_unit():
        return -1
    leads = [g.leading(a.order)[0] for g in a.basis]
    supports = [frozenset(i for i, k in enumerate(le) if k) for le in leads]
    for size in range(a.n, -1, -1):
        for subset in itertools.combinations(range(a.n), size):
            s = set(subset)
            if all(not sup <= s for sup in supports):
                return size
    return 0


# ---------------------------------------------------------------------------
# Univariate polynomials (in s, or in x for Q_i).


class UniPoly:
    """Dense univariate polynomial, coefficients listed from degree 0 upward."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_roots(cls, roots: Iterable) -> "UniPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-as_rat(r), 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UniPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            c = as_rat(other)
            return UniPoly(x * c for x in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = UniPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, (int, Fraction)) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, other: "UniPoly") -> "UniPoly":
        acc = UniPoly()
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def shift(self, c) -> "UniPoly":
        """The polynomial s -> p(s + c)."""
        return self.compose(UniPoly([as_rat(c), 1]))

    def divmod(self, other: "UniPoly"):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lc = other.coeffs[-1]
        for k in range(len(q) - 1, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lc
            q[k] = c
            if c:
                for i, b in enumerate(other.coeffs):
                    rem[k + i] -= c * b
        return UniPoly(q), UniPoly(rem)

    def monic(self) -> "UniPoly":
        if not self.coeffs:
            return self
        return self * (1 / self.coeffs[-1])

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def to_str(self, var: str = "s") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            mag = abs(c)
            body = format_rat(mag) if not mono else (mono if mag == 1 else f"{format_rat(mag)}*{mono}")
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"UniPoly({self.to_str()!r})"


def uni_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    while b:
        a, b = b, a.divmod(b)[1]
    return a.monic()
