"""Hodge ideals of Q-divisors alpha*H computed from the V-filtration.

For a truncation of V^alpha in G_p, each element sum_j v_j dt^j delta contributes

    sum_j Q_j(alpha) f^(p-j) v_j

to I''_p (which is I_p when f is reduced), and its top coefficient v_p to the
ideal of top coefficients.  For reduced f and alpha > 1 the default route is
the shift I_p((alpha+1)Z) = f * I_p(alpha Z); the witnesses are moved along by
t, under which the combination at alpha+1 of t*u is f times that of u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .bsato import INFINITY, MinExp, bernstein_sato, minimal_exponent, reduced_b
from .deltamod import DeltaElem, TheoremViolation, act, theorem_a_combination
from .groebner_weyl import Budget
from .cache import GBCache
from .polyring import (
    IdealGens,
    MPoly,
    PreconditionError,
    as_rat,
    format_rat,
    groebner_commutative,
    ideal_sum_with_principal,
    var_names,
)
from .vfilt import criterion_for, default_degree_bound, jump_candidates, v_truncated_generators
from .weyl import WeylOp


def _to_sympy(f: MPoly):
    gens = sympy.symbols(var_names(f.n))
    terms = {e: sympy.Rational(c.numerator, c.denominator) for e, c in f.terms.items()}
    return sympy.Poly.from_dict(terms, *gens, domain="QQ")


def _from_sympy(poly, n: int) -> MPoly:
    out = {}
    for e, c in poly.as_dict().items():
        c = sympy.Rational(c)
        out[tuple(e)] = Fraction(int(c.p), int(c.q))
    return MPoly(n, out)


def factor_multiplicities(f: MPoly) -> tuple[tuple[MPoly, int], ...]:
    """Irreducible factors over Q with multiplicities (constant content dropped)."""
    if f.n == 0 or f.is_constant():
        raise PreconditionError("f must be a nonconstant polynomial")
    _, factors = _to_sympy(f).factor_list()
    out = [(_from_sympy(p, f.n).content_free(), m) for p, m in factors]
    return tuple(sorted(out, key=lambda t: (str(t[0]), t[1])))


@dataclass(frozen=True)
class QDivSpec:
    """The divisor alpha * div(f) with the factorization of f."""

    f: MPoly
    alpha: Fraction
    factors: tuple[tuple[MPoly, int], ...] = field(compare=False, default=())

    @classmethod
    def of(cls, f: MPoly, alpha) -> "QDivSpec":
        alpha = as_rat(alpha)
        if alpha <= 0:
            raise PreconditionError("alpha must be positive")
        return cls(f, alpha, factor_multiplicities(f))

    @property
    def reduced(self) -> bool:
        return all(m == 1 for _, m in self.factors)

    def with_alpha(self, alpha) -> "QDivSpec":
        return QDivSpec(self.f, as_rat(alpha), self.factors)

    def check_round_up(self) -> None:
        """Require ceil(alpha * m_i) == 1 for every component."""
        for g, m in self.factors:
            if math.ceil(self.alpha * m) != 1:
                raise PreconditionError(
                    f"ceil(alpha*m) = {math.ceil(self.alpha * m)} != 1 for component {g} with m = {m}"
                )


@dataclass
class HodgeIdealResult:
    f: MPoly
    alpha: Fraction
    p: int
    kind: str  # "I", "I''" or "tilde"
    ideal: IdealGens
    complete: bool
    stable: bool | None
    witnesses: list[DeltaElem]
    generators: list[MPoly]
    degree_bound: int
    method: str = "direct"

    def to_json(self) -> dict:
        return {
            "f": str(self.f),
            "alpha": format_rat(self.alpha),
            "p": self.p,
            "kind": self.kind,
            "ideal": self.ideal.to_strs(),
            "complete": self.complete,
            "stable": self.stable,
            "degree_bound": self.degree_bound,
            "method": self.method,
            "witnesses": [[str(u.coeff(j)) for j in range(self.p + 1)] for u in self.witnesses],
        }


def _unit_result(spec: QDivSpec, p: int, kind: str, d: int) -> HodgeIdealResult:
    f = spec.f
    w = DeltaElem.dt_power(f, p)
    gen = w.coeff(p) if kind == "tilde" else theorem_a_combination(w, spec.alpha, p)
    return HodgeIdealResult(
        f, spec.alpha, p, kind, groebner_commutative([gen], n=f.n), True, True, [w], [gen], d, "triviality"
    )


def _dt_power_in_v(spec: QDivSpec, p: int, budget, cache) -> bool:
    return criterion_for(spec.f, budget, cache).member(DeltaElem.dt_power(spec.f, p), spec.alpha)


def tilde_ideal(
    spec: QDivSpec,
    p: int,
    d: int | None = None,
    check_stable: bool = False,
    shortcut: bool = True,
    budget: Budget = Budget(),
    cache: GBCache | None = None,
) -> HodgeIdealResult:
    """Ideal of top coefficients v_p over V^alpha in G_p."""
    if p < 0:
        raise PreconditionError("p must be nonnegative")
    f = spec.f
    d = _bound(f, p, spec.alpha, d)
    if shortcut and _dt_power_in_v(spec, p, budget, cache):
        return _unit_result(spec, p, "tilde", d)
    tr = v_truncated_generators(f, spec.alpha, p, d, check_stable=check_stable, budget=budget, cache=cache)
    gens = [u.coeff(p) for u in tr.generators]
    ideal = groebner_commutative(gens, n=f.n)
    return HodgeIdealResult(f, spec.alpha, p, "tilde", ideal, tr.complete, tr.stable, tr.generators, gens, d)


def _bound(f: MPoly, p: int, alpha: Fraction, d: int | None) -> int:
    if d is not None:
        return d
    extra = max(0, math.ceil(alpha) - 1) * f.degree()
    return default_degree_bound(f, p) + extra


def formula_ideal(
    f: MPoly,
    alpha,
    p: int,
    d: int | None = None,
    check_stable: bool = False,
    budget: Budget = Budget(),
    cache: GBCache | None = None,
    kind: str = "formula",
) -> HodgeIdealResult:
    """Ideal of all combinations sum_j Q_j(alpha) f^(p-j) v_j over V^alpha in G_p.

    No hypothesis on f or alpha is checked here; since t maps V^alpha onto
    V^(alpha+1) for alpha > 0, this ideal at alpha + 1 is f times its value at
    alpha for every f.
    """
    alpha = as_rat(alpha)
    d = _bound(f, p, alpha, d)
    tr = v_truncated_generators(f, alpha, p, d, check_stable=check_stable, budget=budget, cache=cache)
    gens = [theorem_a_combination(u, alpha, p) for u in tr.generators]
    ideal = groebner_commutative(gens, n=f.n)
    return HodgeIdealResult(f, alpha, p, kind, ideal, tr.complete, tr.stable, tr.generators, gens, d)


def hodge_ideal(
    spec: QDivSpec,
    p: int,
    d: int | None = None,
    method: str = "shift",
    check_stable: bool = False,
    budget: Budget = Budget(),
    cache: GBCache | None = None,
) -> HodgeIdealResult:
    """I_p(alpha Z) for reduced f, or I''_p(alpha H) when f is not reduced.

    ``method`` is "shift" (reduce alpha > 1 to (0, 1] and multiply by powers
    of f) or "direct" (evaluate the V-filtration formula at alpha itself).
    """
    if p < 0:
        raise PreconditionError("p must be nonnegative")
    if method not in ("shift", "direct"):
        raise PreconditionError(f"unknown method {method!r}")
    f = spec.f
    if not spec.reduced:
        spec.check_round_up()
        return formula_ideal(f, spec.alpha, p, d, check_stable, budget, cache, "I''")
    alpha = spec.alpha
    if alpha > 1 and method == "shift":
        k = math.ceil(alpha) - 1
        base = hodge_ideal(spec.with_alpha(alpha - k), p, d, method, check_stable, budget, cache)
        t_k = WeylOp.t(f.n) ** k
        witnesses = [act(t_k, u) for u in base.witnesses]
        gens = [g * f**k for g in base.generators]
        for u, g in zip(witnesses, gens):
            if theorem_a_combination(u, alpha, p) != g:
                raise TheoremViolation("shifted witness does not reproduce the shifted generator")
        ideal = groebner_commutative(gens, n=f.n)
        return HodgeIdealResult(
            f, alpha, p, "I", ideal, base.complete, base.stable, witnesses, gens, base.degree_bound + k * f.degree(), "shift"
        )
    d = _bound(f, p, alpha, d)
    if alpha <= 1 and _dt_power_in_v(spec, p, budget, cache):
        return _unit_result(spec, p, "I", d)
    return formula_ideal(f, alpha, p, d, check_stable, budget, cache, "I")


def nonreduced_convert(i2: IdealGens, spec: QDivSpec, p: int) -> IdealGens:
    """I_p from I''_p by dividing out prod f_i^(p(m_i - 1))."""
    divisor = MPoly.constant(spec.f.n, 1)
    for g, m in spec.factors:
        divisor = divisor * g ** (p * (m - 1))
    if divisor.is_constant():
        return i2
    out = []
    for g in i2.basis:
        try:
            out.append(g.exact_div(divisor))
        except ArithmeticError as exc:
            raise TheoremViolation(f"generator {g} of I'' is not divisible by {divisor}") from exc
    return groebner_commutative(out, n=i2.n)


def is_p_log_canonical(spec: QDivSpec, p: int, budget: Budget = Budget(), cache: GBCache | None = None) -> bool:
    """p <= minimal exponent - alpha (the convention for p = -1 is alpha <= 1)."""
    if not spec.reduced:
        raise PreconditionError("is_p_log_canonical needs reduced f")
    if p == -1:
        return spec.alpha <= 1
    if not 0 < spec.alpha <= 1:
        raise PreconditionError("alpha must lie in (0, 1]")
    m = minimal_exponent(spec.f, budget=budget, cache=cache)
    return m == INFINITY or p <= m - spec.alpha


# ---------------------------------------------------------------------------
# jumping coefficients


@dataclass
class ChainStep:
    upper: Fraction  # the value holds on (previous upper, upper]
    ideal: IdealGens  # I_p(alpha Z) + (f)


def _mod_f(spec: QDivSpec, p: int, d, budget, cache) -> IdealGens:
    res = hodge_ideal(spec, p, d, budget=budget, cache=cache)
    return ideal_sum_with_principal(res.ideal, spec.f)


def jumping_chain(
    f: MPoly, p: int, d: int | None = None, budget: Budget = Budget(), cache: GBCache | None = None
) -> list[ChainStep]:
    """The constant values of I_p(alpha Z) + (f) on (c_i, c_(i+1)], alpha in (0, 1]."""
    spec = QDivSpec.of(f, 1)
    if not spec.reduced:
        raise PreconditionError("jumping_chain needs reduced f")
    bf = bernstein_sato(f, budget, cache)
    cands = sorted(set(jump_candidates(bf, p)) | {Fraction(1)})
    values = [(c, _mod_f(spec.with_alpha(c), p, d, budget, cache)) for c in cands]
    chain: list[ChainStep] = []
    for i, (c, ideal) in enumerate(values):
        nxt = values[i + 1][1] if i + 1 < len(values) else None
        if nxt is not None and not ideal.contains_ideal(nxt):
            raise TheoremViolation(f"I_{p} + (f) grew from {c} to the next candidate")
        if nxt is None or nxt != ideal:
            chain.append(ChainStep(c, ideal))
    return chain


def chain_jumps(chain: list[ChainStep]) -> list[Fraction]:
    """The interior chain points c_1 < ... < c_s (excluding the final 1)."""
    return [step.upper for step in chain if step.upper < 1]


def roots_from_jumps(
    f: MPoly, p: int, d: int | None = None, budget: Budget = Budget(), cache: GBCache | None = None
) -> list[Fraction]:
    """Roots -p - c of the reduced b-function forced by jumps c of I_p.

    A jump c in (0, 1) qualifies when the pair is (p-1)-log canonical at some
    beta in (c, 1), i.e. when p - 1 < minimal exponent - c.
    """
    bt = reduced_b(bernstein_sato(f, budget, cache))
    top = bt.largest_root()
    mexp: MinExp = INFINITY if top is None else -top
    roots = bt.as_dict()
    out = []
    for c in chain_jumps(jumping_chain(f, p, d, budget, cache)):
        if not (mexp == INFINITY or p - 1 < mexp - c):
            continue
        r = -p - c
        if r not in roots:
            raise TheoremViolation(f"jump {c} of I_{p} does not give the root {r} of the reduced b-function")
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# structural report


@dataclass
class Check:
    name: str
    applies: bool
    passed: bool | None
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "applies": self.applies, "passed": self.passed, "detail": self.detail}


def _other_combination(u: DeltaElem, alpha: Fraction, p: int) -> MPoly:
    from .qcomb import q_value

    f = u.f
    total = MPoly(f.n)
    for j in range(2, p + 1):
        if u.coeff(j):
            total = total + u.coeff(j) * f ** (p - j + 1) * ((j - 1) * q_value(j - 1, alpha))
    return total


def property_report(
    spec: QDivSpec, p: int, d: int | None = None, budget: Budget = Budget(), cache: GBCache | None = None
) -> list[Check]:
    """Executable checks of the structural corollaries at (alpha, p); failures are reported."""
    if not spec.reduced:
        raise PreconditionError("property_report needs reduced f")
    if not 0 < spec.alpha <= 1:
        raise PreconditionError("alpha must lie in (0, 1]")
    f = spec.f
    kw = dict(budget=budget, cache=cache)
    ideals = {k: hodge_ideal(spec, k, d, **kw) for k in range(p + 2)}
    checks: list[Check] = []
    complete = all(r.complete for r in ideals.values())

    chain_ok = True
    for k in range(1, p + 1):
        hi = ideal_sum_with_principal(ideals[k].ideal, f)
        lo = ideal_sum_with_principal(ideals[k - 1].ideal, f)
        chain_ok = chain_ok and lo.contains_ideal(hi)
    checks.append(Check("inclusion_mod_f", p >= 1, chain_ok if p >= 1 else None, f"k = 1..{p}"))

    lc = is_p_log_canonical(spec, p - 1, **kw) if p >= 1 else True
    if lc:
        tilde = tilde_ideal(spec, p, d, **kw)
        same = tilde.ideal == ideals[p].ideal
        nested = ideals[p].ideal.contains_ideal(ideals[p + 1].ideal)
        checks.append(Check("first_nontrivial", True, same and nested, f"I_p = tilde I_p: {same}; I_(p+1) in I_p: {nested}"))
    else:
        checks.append(Check("first_nontrivial", False, None, "not (p-1)-log canonical"))

    if spec.alpha < 1 and p >= 2:
        res = ideals[p]
        ok = all(res.ideal.contains(_other_combination(u, spec.alpha, p)) for u in res.witnesses)
        checks.append(Check("derived_combination", True, ok, "sum (j-1)Q_(j-1)(alpha) f^(p-j+1) v_j in I_p"))
    else:
        checks.append(Check("derived_combination", False, None, "needs alpha < 1 and p >= 2"))

    tilde_full = tilde_ideal(spec, p, d, shortcut=False, **kw)
    member = criterion_for(f, budget, cache).member(DeltaElem.dt_power(f, p), spec.alpha)
    checks.append(
        Check("tilde_triviality", True, tilde_full.ideal.is_unit() == member, f"dt^p delta in V^alpha: {member}")
    )
    if not complete:
        for c in checks:
            c.detail += " (degree-truncated)"
    return checks
