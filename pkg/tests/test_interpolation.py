import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ceslab.core import Domain, Lp, OneMinusXInv, Power, SpecError, StepFunction, UnsupportedSpec, parse_weight
from ceslab.interpolation import (cellwise_weight, check_k_identity, check_weighted_interp_bound, k_functional,
                                  k_functional_weighted, k_profile)

from conftest import step_functions

F = StepFunction.from_arrays(Domain.halfline(2.0), [0.0, 1.0, 2.0], [2.0, 1.0])


def test_k_examples():
    assert k_functional(F, 1.5) == pytest.approx(2.5)
    assert k_functional(StepFunction.constant(0.0, Domain.halfline(1.0)), 3.0) == 0.0
    assert k_functional(F, 100.0) == pytest.approx(3.0)
    with pytest.raises(SpecError):
        k_functional(F, 0.0)


def test_weighted_k_examples():
    dec = k_functional_weighted(F, 1.5, Power(0.0))
    assert dec.value == pytest.approx(2.5)
    assert dec.g_norm + 1.5 * dec.h_norm == pytest.approx(dec.value)
    z = k_functional_weighted(StepFunction.constant(0.0, Domain.halfline(1.0)), 1.0, Power(0.0))
    assert z.value == 0.0


def test_k_identity_saturation():
    f = StepFunction.indicator(0.0, 1.0, Domain.halfline(1.0))
    c = check_k_identity(f, 1e6, Power(1.0))
    # cellwise weight at the midpoint: x -> 1/2 on [0, 1]
    assert c.passed and c.lhs == pytest.approx(0.5)


@given(step_functions(kind="halfline", nonneg=False), st.floats(0.01, 20.0),
       st.sampled_from(["(pow 0)", "(pow 0.5)", "(pow -0.3)", "(const 2.5)"]))
def test_k_identity(f, t, w):
    assert check_k_identity(f, t, parse_weight(w)).passed


@given(step_functions(kind="halfline", nonneg=False))
def test_k_profile_concave_and_saturating(f):
    prof = k_profile(f)
    assert prof.is_concave()
    total = float(np.sum(np.abs(f.vals) * f.lengths))
    assert float(prof(prof.knots[-1])) == pytest.approx(total, rel=1e-12, abs=1e-12)


@given(step_functions(kind="halfline", nonneg=False), st.floats(0.01, 10.0))
def test_decomposition_is_feasible(f, t):
    dec = k_functional_weighted(f, t, Power(0.5))
    x = np.linspace(0, f.horizon, 57)[:-1]
    assert np.allclose(dec.g(x) + dec.h(x), f(x), atol=1e-12)
    assert dec.g_norm + t * dec.h_norm == pytest.approx(dec.value, rel=1e-9, abs=1e-12)


def test_cellwise_weight_midpoints():
    f = StepFunction.indicator(0.0, 1.0, Domain.halfline(1.0))
    ws = cellwise_weight(Power(1.0), f)
    assert float(ws(np.array(0.3))) == pytest.approx(0.5)
    with pytest.raises(SpecError):
        cellwise_weight(OneMinusXInv(), StepFunction.constant(1.0, Domain.halfline(2.0)))


def test_interp_bound_unit_lp():
    c = check_weighted_interp_bound(Lp(2, Power(0.0), "unit"), samples=12, seed=0)
    assert c.passed and c.lhs <= math.e


def test_interp_bound_rejects():
    with pytest.raises(UnsupportedSpec):
        check_weighted_interp_bound(Lp(2, Power(0.5), "unit"))
    with pytest.raises(UnsupportedSpec):
        check_weighted_interp_bound(Lp(2, Power(0.0), "halfline"))
