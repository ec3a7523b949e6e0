import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ceslab.core import Domain, Sequence, SpecError, StepFunction
from ceslab.inequalities import (UNIT_WEIGHTED_PROBE, InequalityCheck, unit_weighted_probe, bernoulli_check, check_am_weighted,
                                 check_curbera_ricker_cont, check_curbera_ricker_seq, check_d_lemma,
                                 check_hardy_classical, check_hardy_power, check_hardy_unit_weighted,
                                 check_idempotency, check_T_endpoint_bounds, d_function, extremal_hardy_ratio,
                                 extremal_step, grid_min_embedding_constant)

from conftest import sequences, step_functions

E = math.e
H1 = Domain.halfline(1.0)
U = Domain.unit()


def test_check_semantics():
    assert InequalityCheck("a", 1.0, 1.0 + 1e-12).passed
    assert not InequalityCheck("a", 1.0, 0.5).passed
    assert InequalityCheck("a", math.inf, math.inf).margin == 0.0
    eq = InequalityCheck("b", 1.0, 1.0 + 1e-10, equality=True, tolerance=1e-8)
    assert eq.passed and eq.margin < 0
    assert not InequalityCheck("b", 1.0, 1.1, equality=True).passed
    assert InequalityCheck("c", 0.0, 0.0).ratio == 0.0


def test_hardy_classical_examples():
    c = check_hardy_classical(StepFunction.indicator(0.0, 1.0, H1), 2)
    assert c.lhs == pytest.approx(math.sqrt(2)) and c.rhs == pytest.approx(2.0) and c.passed
    z = check_hardy_classical(StepFunction.constant(0.0, H1), 2)
    assert z.lhs == 0.0 and z.passed
    with pytest.raises(SpecError):
        check_hardy_classical(StepFunction.indicator(0.0, 1.0, H1), 1)


def test_hardy_near_extremal():
    assert extremal_hardy_ratio(2, 0.01) >= 1.9
    f = extremal_step(2, 0.01, H1)
    c = check_hardy_classical(f, 2)
    assert c.passed and c.ratio * 2 >= 1.9


def test_hardy_power_examples():
    f = StepFunction.indicator(0.0, 1.0, H1)
    c = check_hardy_power(f, 2, -0.25)
    assert c.constant == pytest.approx(4 / 3) and c.passed
    assert c.details["constant_pow_p"] == pytest.approx((4 / 3) ** 2)
    assert check_hardy_power(f, 3, 0.0).constant == pytest.approx(1.5)
    assert check_hardy_power(f, 2, -0.5).constant == pytest.approx(1.0)
    with pytest.raises(SpecError):
        check_hardy_power(f, 2, 0.5)


@given(step_functions(kind="halfline"), st.floats(1.2, 5.0), st.floats(-0.8, 0.2))
def test_hardy_power_holds(f, p, alpha):
    if alpha >= 1 - 1 / p - 0.05:
        return
    assert check_hardy_power(f, p, alpha).passed


def test_unit_weighted_examples():
    one = StepFunction.constant(1.0, U)
    c = check_hardy_unit_weighted(one, 2, 0.0)
    assert c.lhs == pytest.approx(1.0) and c.rhs == pytest.approx(4 / 3) and c.constant == pytest.approx(2.0)
    c1 = check_hardy_unit_weighted(one, 1, -0.5)
    assert c1.constant == pytest.approx(2.0)
    assert check_hardy_unit_weighted(StepFunction.constant(0.0, U), 2, 0.0).passed


def test_unit_weighted_probe_violates_constant():
    c = unit_weighted_probe()
    assert not c.passed
    assert c.ratio > 1.3
    # the constant without the 1/p root still holds
    assert c.lhs <= c.details["proof_constant"] ** 2 * c.rhs / c.constant ** 2
    assert len(UNIT_WEIGHTED_PROBE[0]) == len(UNIT_WEIGHTED_PROBE[1]) + 1


def test_am_weighted_example():
    c = check_am_weighted(StepFunction.constant(1.0, U), 2)
    assert c.lhs == pytest.approx(1.0)
    assert c.rhs == pytest.approx(8 / math.sqrt(3))
    assert check_am_weighted(StepFunction.constant(0.0, U), 2).passed


@given(step_functions(kind="unit"), st.floats(1.2, 5.0))
def test_am_weighted_holds(f, p):
    assert check_am_weighted(f, p).passed


def test_curbera_ricker_cont_example():
    c = check_curbera_ricker_cont(StepFunction.indicator(0.0, 1.0, H1), E, np.array([E]))
    assert c.lhs == pytest.approx(1.0) and c.rhs == pytest.approx(2.0)


@pytest.mark.parametrize("a", [2.0, E, 10.0])
@given(f=step_functions(kind="halfline"))
def test_curbera_ricker_cont_random(a, f):
    grid = np.linspace(0.01, 3 * f.horizon, 200)
    c = check_curbera_ricker_cont(f, a, grid)
    assert c.passed and c.details["violations"] == 0


def test_curbera_ricker_seq_example():
    left, right = check_curbera_ricker_seq(Sequence.unit_vector(1), 3)
    assert (left.lhs, left.rhs) == (3.0, 3.0)
    assert right.rhs == pytest.approx(22.0)
    zl, zr = check_curbera_ricker_seq(Sequence(()), 5)
    assert zl.lhs == zl.rhs == zr.rhs == 0.0


@given(sequences(max_len=100), st.integers(1, 100))
def test_curbera_ricker_seq_random(x, n):
    assert all(c.passed for c in check_curbera_ricker_seq(x, n))


def test_d_lemma_example():
    c = check_d_lemma(StepFunction.constant(1.0, U), 0.5)
    assert c.lhs == pytest.approx(1 / (1 + E))
    assert c.rhs == pytest.approx(math.log(2))
    assert check_d_lemma(StepFunction.constant(0.0, U), 0.5).passed


@given(st.floats(1e-9, 1 - 1e-9))
def test_d_range(t):
    assert 1 < float(d_function(t)) < E


@given(step_functions(kind="unit", nonneg=False), st.floats(0.01, 0.99))
def test_d_lemma_random(f, t):
    assert check_d_lemma(f, t).passed


def test_T_endpoint_tight_near_one():
    # h close to the indicator of [1-delta, 1] gives ratios near e in L^oo(1/(1-x))
    h = StepFunction.indicator(0.999, 1.0, U)
    inf_chk, one_chk = check_T_endpoint_bounds(h)
    assert inf_chk.passed and one_chk.passed
    zero = check_T_endpoint_bounds(StepFunction.constant(0.0, U))
    assert all(c.lhs == 0.0 for c in zero)


@given(step_functions(kind="unit", nonneg=False))
def test_T_endpoint_random(h):
    assert all(c.passed for c in check_T_endpoint_bounds(h))


@pytest.mark.parametrize("q", [0.3, 1.0, 2.5, 7.0])
def test_bernoulli(q):
    assert bernoulli_check(q).passed


def test_idempotency():
    rep = check_idempotency(2.0, samples=6, seed=0)
    assert rep.passed and rep.grid_ok
    m, a = grid_min_embedding_constant(3.0)
    assert m == pytest.approx(E / 1.5, rel=1e-6) and a == pytest.approx(math.exp(1.5), rel=1e-2)


CHECKS = [
    (lambda f: check_hardy_classical(f, 2.0), "halfline", 1),
    (lambda f: check_hardy_power(f, 3.0, -0.2), "halfline", 1),
    (lambda f: check_am_weighted(f, 2.0), "unit", 1),
    (lambda f: check_d_lemma(f, 0.6), "unit", 1),
    (lambda f: check_hardy_unit_weighted(f, 2.0, 0.0), "unit", 2),
]


@pytest.mark.parametrize("check,kind,power", CHECKS)
@given(data=st.data())
def test_homogeneity(check, kind, power, data):
    f = data.draw(step_functions(kind=kind))
    base = check(f)
    for c in (1e-3, 1e3):
        s = check(f.scale(c))
        assert s.lhs == pytest.approx(c ** power * base.lhs, rel=1e-9, abs=1e-300)
        assert s.rhs == pytest.approx(c ** power * base.rhs, rel=1e-9, abs=1e-300)
        assert (s.margin >= 0) == (base.margin >= 0) or abs(base.margin) <= 1e-9 * abs(base.rhs)


def test_checks_reproducible():
    a = check_idempotency(2.0, samples=4, seed=5).to_dict()
    b = check_idempotency(2.0, samples=4, seed=5).to_dict()
    assert a == b
