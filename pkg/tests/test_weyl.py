from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from qhodge.polyring import MPoly, PreconditionError, parse_poly
from qhodge.weyl import FsElem, WeylOp, apply_to_fs, parse_operator, weyl_apply, weyl_mul

from conftest import mpolys


@st.composite
def operators(draw, n=2, with_t=False, max_terms=3, max_exp=2):
    nv = n + with_t
    terms = draw(
        st.dictionaries(
            st.tuples(*[st.integers(0, max_exp)] * (2 * nv)),
            st.integers(-3, 3).filter(bool).map(Fraction),
            max_size=max_terms,
        )
    )
    return WeylOp(n, with_t, terms)


def sympy_apply(P: WeylOp, g: MPoly):
    """Apply a normally ordered operator with sympy.diff (independent oracle)."""
    xs = sympy.symbols("x y")[: g.n]
    expr = sympy.sympify(str(g).replace("^", "**"), locals=dict(zip(["x", "y"], xs)))
    total = 0
    for e, c in P.terms.items():
        h = expr
        for i in range(g.n):
            h = sympy.diff(h, xs[i], e[g.n + i])
        total += sympy.Rational(c.numerator, c.denominator) * sympy.prod([xs[i] ** e[i] for i in range(g.n)]) * h
    return sympy.expand(total)


def as_sympy(g: MPoly):
    xs = sympy.symbols("x y")[: g.n]
    return sympy.expand(sympy.sympify(str(g).replace("^", "**"), locals=dict(zip(["x", "y"], xs))))


class TestMultiplication:
    def test_canonical_commutation(self):
        assert parse_operator("dx*x", 1, False) == parse_operator("x*dx + 1", 1, False)

    def test_s_times_t(self):
        s, t = WeylOp.s(1), WeylOp.t(1)
        assert s * t == t * (s - 1)

    def test_dt_past_q_of_theta(self):
        n = 1
        theta = WeylOp.dt(n) * WeylOp.t(n)

        def q_of(shift):
            out = WeylOp.constant(n, True, 1)
            for j in range(2):
                out = out * (theta + shift + j)
            return out

        assert WeylOp.dt(n) * q_of(0) == q_of(1) * WeylOp.dt(n)

    @given(operators(), operators(), operators())
    def test_associativity(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @given(operators(with_t=True, n=1), operators(with_t=True, n=1))
    def test_distributivity_with_t(self, a, b):
        c = WeylOp.dt(1) + WeylOp.t(1)
        assert (a + b) * c == a * c + b * c
        assert weyl_mul(a, b) == a * b


class TestApply:
    def test_examples(self):
        assert weyl_apply(parse_operator("dx", 1, False), parse_poly("x^3", 1)) == parse_poly("3x^2", 1)
        for k in range(5):
            assert weyl_apply(parse_operator("x*dx", 1, False), MPoly.var(1, 0, k)) == MPoly.var(1, 0, k) * k
        assert weyl_apply(parse_operator("dx^2/4", 1, False), parse_poly("x^4", 1)) == parse_poly("3x^2", 1)

    def test_t_part_rejected(self):
        with pytest.raises(PreconditionError):
            weyl_apply(WeylOp.t(1), parse_poly("x", 1))

    @given(operators(), mpolys())
    def test_against_sympy(self, P, g):
        assert as_sympy(weyl_apply(P, g)) == sympy_apply(P, g)

    @given(operators(max_terms=2), operators(max_terms=2), mpolys(max_terms=3))
    def test_module_axiom(self, P, Q, g):
        assert weyl_apply(P * Q, g) == weyl_apply(P, weyl_apply(Q, g))


class TestFs:
    def test_dx_on_fs_smooth(self):
        f = parse_poly("x", 1)
        out = apply_to_fs(parse_operator("dx", 1), FsElem.power(f))
        s_times = FsElem(f, [(MPoly.constant(1, 1), 1, 1)])  # s * x^-1 * f^s
        assert out == s_times

    def test_dx_on_fs_cusp(self):
        f = parse_poly("x^2+y^3")
        out = apply_to_fs(parse_operator("dx", 2), FsElem.power(f))
        assert out == FsElem(f, [(parse_poly("2x", 2), 1, 1)])

    def test_certificate_for_square(self):
        f = parse_poly("x^2", 1)
        out = apply_to_fs(parse_operator("dx^2/4", 1), FsElem.power(f, 1))
        from qhodge.polyring import UniPoly

        b = UniPoly([Fraction(1, 2), Fraction(3, 2), 1])
        assert out == FsElem.power(f, 0).scale_s(b)

    @given(operators(n=1, max_terms=2), operators(n=1, max_terms=2))
    def test_fs_module_axiom(self, P, Q):
        f = parse_poly("x^2+x", 1)
        e = FsElem.power(f, 1)
        assert apply_to_fs(P * Q, e) == apply_to_fs(P, apply_to_fs(Q, e))
