from fractions import Fraction

import pytest

from qhodge.bsato import INFINITY, minimal_exponent
from qhodge.exponent import (
    ResolutionData,
    check_lichtin,
    direct_sum,
    lct_from_minimal_exponent,
    lichtin_gamma,
    multiplicity_bounds_check,
    parse_resolution,
    restrict_to_hyperplane,
    restriction_check,
    subadditivity_check,
    tangent_cone_singular_dimension,
    thom_sebastiani_check,
)
from qhodge.polyring import PreconditionError

from conftest import poly

CUSP_RESOLUTION = ResolutionData(((2, 1), (3, 2), (6, 4)))
TS_PAIRS = [
    ("x", "x"), ("x^2", "x^2"), ("x^2", "x^3"), ("x^3", "x^3"), ("x^2", "x^4"),
    ("x", "x^2"), ("x^2", "x*y"), ("x*y", "x^2"), ("x^2", "x^5"), ("x^3", "x^4"),
]


def _p(text):
    return poly(text, 2 if "y" in text else 1)


class TestLichtin:
    def test_gamma(self):
        assert lichtin_gamma(ResolutionData()) == INFINITY
        assert lichtin_gamma(CUSP_RESOLUTION) == Fraction(5, 6)
        assert lichtin_gamma(ResolutionData(((1, 0),))) == 1

    def test_cusp_equality(self):
        check = check_lichtin(poly("x^2+y^3"), CUSP_RESOLUTION)
        assert check.holds
        assert check.values["gamma"] == check.values["minimal_exponent"] == Fraction(5, 6)

    def test_smooth(self):
        assert check_lichtin(poly("x", 1), ResolutionData())

    def test_normal_crossing(self):
        assert check_lichtin(poly("x*y"), ResolutionData(((2, 1),)))

    def test_parse(self):
        text = "# cusp\n2 1\n3 2\n\n6 4  # last\n"
        assert parse_resolution(text) == CUSP_RESOLUTION
        with pytest.raises(PreconditionError):
            parse_resolution("2 1 3")
        with pytest.raises(PreconditionError):
            parse_resolution("a b")
        with pytest.raises(PreconditionError):
            ResolutionData(((0, 1),))


class TestThomSebastiani:
    @pytest.mark.parametrize("f, g", TS_PAIRS)
    def test_additivity(self, f, g):
        check = thom_sebastiani_check(_p(f), _p(g))
        assert check.holds, check.values

    def test_cusp_decomposition(self):
        check = thom_sebastiani_check(poly("x^2", 1), poly("x^3", 1))
        assert check.values == {"f": Fraction(1, 2), "g": Fraction(1, 3), "sum": Fraction(5, 6)}

    def test_smooth_summands(self):
        assert thom_sebastiani_check(poly("x", 1), poly("x", 1)).values["sum"] == INFINITY

    def test_direct_sum_variables(self):
        assert direct_sum(poly("x^2", 1), poly("x*y")) == poly("x^2+y*z", 3)

    def test_must_vanish(self):
        with pytest.raises(PreconditionError):
            thom_sebastiani_check(poly("x+1", 1), poly("x", 1))


class TestSubadditivity:
    def test_examples(self):
        assert subadditivity_check(poly("x^2", 2), poly("y^3", 2)).values["f+g"] == Fraction(5, 6)
        check = subadditivity_check(poly("x^2", 2), poly("x^2", 2))
        assert check.holds and check.values["f+g"] == Fraction(1, 2)
        assert subadditivity_check(poly("x^2", 2), poly("y^2-x^2", 2)).holds

    def test_cancellation_rejected(self):
        with pytest.raises(PreconditionError):
            subadditivity_check(poly("x^2", 2), poly("-x^2", 2))


class TestMultiplicity:
    def test_tangent_cones(self):
        assert tangent_cone_singular_dimension(poly("x^2+y^3")) == 0
        assert tangent_cone_singular_dimension(poly("x^2+y^2")) == -1
        assert tangent_cone_singular_dimension(poly("x^3+y^3")) == -1

    @pytest.mark.parametrize("text, lower, upper", [
        ("x^2+y^3", Fraction(1, 2), 1),
        ("x^2+y^2", 1, 1),
        ("x^3+y^3", Fraction(2, 3), Fraction(2, 3)),
        ("x*y", 1, 1),
    ])
    def test_bounds(self, text, lower, upper):
        check = multiplicity_bounds_check(poly(text))
        assert check.holds
        assert (check.values["lower"], check.values["upper"]) == (lower, upper)

    def test_square_line(self):
        check = multiplicity_bounds_check(poly("x^2", 1))
        # the projectivized cone of x^2 in one variable is empty
        assert check.holds and check.values["r"] == -1

    def test_smooth_rejected(self):
        with pytest.raises(PreconditionError):
            multiplicity_bounds_check(poly("x", 1))


class TestRestriction:
    def test_cusp(self):
        check = restriction_check(poly("x^2+y^3"), 1)
        assert check.values == {"restricted": Fraction(1, 2), "original": Fraction(5, 6)}
        assert check.holds

    def test_node(self):
        assert restriction_check(poly("x^2+y^2"), 1).values["restricted"] == Fraction(1, 2)

    def test_inside_divisor(self):
        with pytest.raises(PreconditionError):
            restrict_to_hyperplane(poly("x", 1), 0)
        with pytest.raises(PreconditionError):
            restrict_to_hyperplane(poly("x*y"), 1)

    @pytest.mark.parametrize("text", ["x^2+y^2", "x^2+y^3", "x^3+y^3"])
    def test_corpus(self, text):
        f = poly(text)
        for i in range(2):
            assert restriction_check(f, i).holds


def test_lct_from_exponent():
    assert lct_from_minimal_exponent(INFINITY) == 1
    assert lct_from_minimal_exponent(Fraction(5, 6)) == Fraction(5, 6)
    assert lct_from_minimal_exponent(Fraction(3, 2)) == 1
    assert lct_from_minimal_exponent(minimal_exponent(poly("x^2", 1))) == Fraction(1, 2)


def test_check_json():
    data = thom_sebastiani_check(poly("x", 1), poly("x^2", 1)).to_json()
    assert data == {"check": "thom_sebastiani", "holds": True, "values": {"f": "infinity", "g": "1/2", "sum": "infinity"}}
