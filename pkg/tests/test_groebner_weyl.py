import pytest
from hypothesis import given, strategies as st

from qhodge.bsato import delta_annihilator
from qhodge.groebner_weyl import (
    Budget,
    InitialDivider,
    ResourceLimit,
    WeightOrder,
    degree_order,
    intersect_with_s,
    left_groebner,
    module_syzygy_quotient,
    v_order,
)
from qhodge.polyring import PreconditionError, UniPoly
from qhodge.weyl import WeylOp, parse_operator

from conftest import poly


def annihilator_gb(text, tie="degrevlex"):
    f = poly(text)
    return left_groebner(delta_annihilator(f), v_order(f.n, tie))


def test_single_derivation_is_its_own_basis():
    gb = left_groebner([parse_operator("dx", 1, False)], degree_order(1))
    assert gb.generators == [parse_operator("dx", 1, False)]


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x", UniPoly([1, 1])),
        ("x^2", UniPoly.from_roots([-1, "-1/2"])),
        ("x^2+y^3", UniPoly.from_roots([-1, "-5/6", "-7/6"])),
    ],
)
def test_intersect_with_s(text, expected):
    assert intersect_with_s(annihilator_gb(text)) == expected


@pytest.mark.parametrize("text", ["x^2", "x*y", "x^2+y^3"])
def test_tie_break_independence(text):
    a, b = annihilator_gb(text, "degrevlex"), annihilator_gb(text, "deglex")
    assert intersect_with_s(a) == intersect_with_s(b)
    for g in b.generators:
        assert a.reduces_to_zero(g)
    for g in a.generators:
        assert b.reduces_to_zero(g)


def test_membership_of_generators_and_combinations():
    f = poly("x^2+y^3")
    gens = delta_annihilator(f)
    gb = left_groebner(gens, v_order(2))
    combo = parse_operator("x*dy + 7", 2) * gens[1] + WeylOp.dt(2) * gens[0]
    assert gb.reduces_to_zero(combo)
    assert not gb.reduces_to_zero(WeylOp.dt(2))
    assert not gb.reduces_to_zero(WeylOp.constant(2, True, 1))


def test_resource_limit():
    f = poly("x^2+y^3")
    with pytest.raises(ResourceLimit) as info:
        left_groebner(delta_annihilator(f), v_order(2), Budget(max_pairs=2))
    assert "pairs" in info.value.stats


@given(st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_weight_admissibility(ws):
    admissible = ws[0] + ws[2] >= 0 and ws[1] + ws[3] >= 0
    if admissible:
        WeightOrder(tuple(ws))
    else:
        with pytest.raises(PreconditionError):
            WeightOrder(tuple(ws))


def test_v_order_shape():
    order = v_order(2)
    assert order.weights == (0, 0, -1, 0, 0, 1)
    with pytest.raises(PreconditionError):
        WeightOrder((0, 0, 0), "degrevlex")
    with pytest.raises(PreconditionError):
        WeightOrder((0, 0), "lex")


def test_initial_divider_round_trip():
    gb = annihilator_gb("x^2+y^3")
    div = InitialDivider(gb)
    theta = (WeylOp.t(2) * WeylOp.dt(2)).terms
    poly_in = {e + (0, 0): c for e, c in theta.items()}
    corr, rem = div.divide(poly_in)
    # the remainder is a normal form: dividing again leaves it unchanged
    assert div.normal_form(rem) == rem


def test_module_quotient_of_x_delta():
    f = poly("x", 1)
    ann = delta_annihilator(f)
    gb = left_groebner(module_syzygy_quotient(ann, WeylOp.from_poly(f)), v_order(1))
    # x commutes with t - x, so that generator survives the quotient
    assert gb.reduces_to_zero(ann[0])
    # dx * x = x * dx + 1 sends x delta to (1 - x dt) delta, which is nonzero
    assert not gb.reduces_to_zero(WeylOp.dx(1, True, 0))
    assert intersect_with_s(gb) == UniPoly([2, 1])
