import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ceslab.core import (Cesaro, ConcaveGauge, Domain, DomainMismatch, Explicit, Lp, OneMinusXInv, Power,
                         Product, Reciprocal, SeqLp, Sequence, SpecError, StepFunction, Tilde, Undecidable,
                         Weighted, load_input, nontriviality, parse_gauge, parse_space, parse_weight,
                         partial_integral)

from conftest import step_functions


def test_partial_integral_examples():
    H = Domain.halfline(2.0)
    F = partial_integral(StepFunction.indicator(0.0, 1.0, H))
    assert np.allclose(F([0.0, 0.5, 1.0, 2.0]), [0.0, 0.5, 1.0, 1.0])
    assert partial_integral(StepFunction.indicator(1.0, 2.0, H, 2.0))(2.0) == 2.0
    f = StepFunction.from_arrays(Domain.unit(), [0, 1 / 3, 2 / 3, 1], [1, 3, 2])
    assert partial_integral(f)(1.0) == pytest.approx(2.0, rel=1e-15)


@given(step_functions(), st.floats(-3, 3), st.floats(-3, 3))
def test_partial_integral_linear(f, a, b):
    g = f.scale(0.5) + StepFunction.constant(1.0, f.domain)
    lhs = partial_integral(f.scale(a) + g.scale(b))
    x = np.linspace(0, f.horizon, 17)
    rhs = a * partial_integral(f)(x) + b * partial_integral(g)(x)
    assert np.allclose(lhs(x), rhs, rtol=1e-12, atol=1e-12)


@given(step_functions())
def test_partial_integral_total(f):
    assert partial_integral(f)(f.horizon) == pytest.approx(f.integral(), rel=1e-13, abs=1e-13)


def test_step_function_invariants():
    U = Domain.unit()
    with pytest.raises(SpecError):
        StepFunction.from_arrays(U, [0, 0.5, 0.5, 1], [1, 2, 3])
    with pytest.raises(SpecError):
        StepFunction.from_arrays(U, [0, 0.5], [1])
    with pytest.raises(SpecError):
        StepFunction.from_arrays(U, [0, 1], [math.nan])
    with pytest.raises(SpecError):
        StepFunction.from_arrays(U, [0, 0.5, 1], [1])


@given(step_functions(nonneg=False))
def test_json_round_trip_bit_exact(f):
    g = StepFunction.from_json(f.to_json())
    assert g == f
    assert load_input(json.dumps(f.to_dict())) == f


def test_sequence_trailing_zeros_normalized():
    assert Sequence((1.0, 2.0, 0.0, 0.0)) == Sequence((1.0, 2.0))
    assert len(Sequence((0.0,))) == 0
    assert load_input('{"entries": [3, 4, 0]}') == Sequence((3.0, 4.0))


@pytest.mark.parametrize("text", [
    "Ces(Lp 2 (pow -0.25) halfline)",
    "Lp 2 (pow 0) unit",
    "Tilde(Lp 1 (onemx-inv) unit)",
    "SeqLp 2 (pow -0.25)",
    "Lorentz (gauge (0 0) (1 1) (4 2) (head 0.5) (tail 0.5))",
])
def test_space_round_trip(text):
    X = parse_space(text)
    assert parse_space(X.to_sexpr()) == X


@pytest.mark.parametrize("bad", ["Lp 2 (pow", "Ces(", "Lp x (pow 0) unit", "Foo 2", "Lp 0.5 (pow 0) unit"])
def test_bad_spec_strings(bad):
    with pytest.raises(SpecError):
        parse_space(bad)


def test_weighted_normalizes():
    X = Weighted(Weighted(Lp(2, Power(0.0), "unit"), Power(1.0)), OneMinusXInv())
    assert not isinstance(X.inner, Weighted)
    assert isinstance(X.weight, Product)


@given(st.floats(0.01, 0.99), st.floats(-2, 2))
def test_product_with_reciprocal_is_one(x, a):
    w = Product((Power(a), OneMinusXInv()))
    assert float(Product((w, Reciprocal(w)))(np.array(x))) == pytest.approx(1.0, rel=1e-14)


def test_weight_domain_rules():
    with pytest.raises((SpecError, DomainMismatch)):
        Lp(2, OneMinusXInv(), "halfline")
    with pytest.raises(SpecError):
        Explicit(StepFunction.from_arrays(Domain.unit(), [0, 1], [0.0]))


def test_gauge_validation():
    g = ConcaveGauge(((0, 0), (1, 1), (2, 1)))
    assert g(np.array(3.0)) == pytest.approx(1.0)
    with pytest.raises(SpecError):
        ConcaveGauge(((0, 0), (1, 1), (2, 3)))
    with pytest.raises(SpecError):
        ConcaveGauge(((0, 1), (1, 2)))
    phi = parse_gauge("(gauge (0 0) (1 1) (4 2) (head 0.5) (tail 0.5))")
    assert phi(np.array(1.0)) == pytest.approx(1.0)
    assert parse_gauge(phi.to_sexpr()) == phi


def test_parse_weight():
    assert parse_weight("(pow -0.25)") == Power(-0.25)
    assert isinstance(parse_weight("(onemx-inv)"), OneMinusXInv)


def test_nontriviality_examples():
    assert nontriviality(Cesaro(Lp(2, Power(0.0), "halfline"))).nontrivial
    assert not nontriviality(Cesaro(Lp(1, Power(0.0), "halfline"))).nontrivial
    assert nontriviality(Cesaro(Lp(1, Power(0.0), "unit"))).nontrivial
    # alpha >= 1 - 1/p kills the tail
    assert not nontriviality(Cesaro(Lp(2, Power(0.5), "halfline"))).nontrivial


def test_nontriviality_reports_undecidable():
    with pytest.raises(Undecidable):
        nontriviality(parse_space("Ces(Ces(Lp 2 (pow 0) halfline))"))
    # a linearly growing gauge has no room for the 1/x tail
    assert not nontriviality(parse_space("Ces(Lorentz (gauge (0 0) (1 1)))")).nontrivial
    with pytest.raises(SpecError):
        nontriviality(SeqLp(2, Power(0.0)))


def test_tilde_spec_wraps():
    X = Tilde(Lp(1, Power(0.0), "unit"))
    assert X.inner == Lp(1, Power(0.0), "unit")
