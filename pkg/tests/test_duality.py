import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ceslab import norms as N
from ceslab.core import (Cesaro, Domain, Lp, Power, SeqCesaro, SeqLp, Sequence, StepFunction,
                         Weighted)
from ceslab.duality import (unit_weighted_constant, associate_norm, cesaro_dual_norm, cone_dual, conjugate,
                            down_norm, duality_report, hardy_constant, holder_conjugate_space, sinnamon_sup,
                            dilation_constant_A)
from ceslab.operators import majorant

from conftest import sequences, step_functions


def test_conjugate():
    assert conjugate(2) == 2
    assert conjugate(1) == math.inf and conjugate(math.inf) == 1
    assert conjugate(3) == pytest.approx(1.5)


def test_associate_examples():
    assert associate_norm(Sequence((3.0, 4.0)), SeqLp(2)).value == pytest.approx(5.0)
    assert associate_norm(Sequence((1.0, 2.0)), SeqLp(1)).value == pytest.approx(2.0)
    g = Sequence((1.0, 1.0, 1.0))
    ex = associate_norm(g, SeqLp(2)).value
    bf = associate_norm(g, SeqLp(2), method="brute").value
    assert ex == pytest.approx(math.sqrt(3))
    assert bf == pytest.approx(ex, abs=1e-6)


@given(sequences(max_len=6), st.floats(1.2, 4.0), st.floats(-0.4, 0.4))
def test_weighted_dual_identity(g, p, alpha):
    # [l^p(w)]' = l^p'(1/w)
    X = SeqLp(p, Power(alpha))
    lhs = associate_norm(g, X).value
    rhs = N.seq_norm(g, SeqLp(conjugate(p), Power(-alpha))).value
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)
    Y = holder_conjugate_space(X)
    assert N.seq_norm(g, Y).value == pytest.approx(rhs, rel=1e-12, abs=1e-300)


@given(sequences(max_len=6), st.sampled_from([1e-3, 2.0, 1e3]))
def test_associate_scaling(g, c):
    X = SeqCesaro(SeqLp(2))
    a = associate_norm(g, X).value
    b = associate_norm(Sequence(tuple(c * g.arr)), X).value
    assert b == pytest.approx(c * a, rel=1e-8, abs=1e-300)


@given(sequences(max_len=6))
def test_cesaro_dual_monotone(g):
    X = SeqLp(2)
    bigger = Sequence(tuple(np.abs(g.arr) + 0.5))
    assert cesaro_dual_norm(g, X).value <= cesaro_dual_norm(bigger, X).value * (1 + 1e-9)


def test_cesaro_dual_examples():
    assert cesaro_dual_norm(Sequence.unit_vector(1), SeqLp(math.inf)).value == pytest.approx(1.0, abs=1e-9)
    assert cesaro_dual_norm(Sequence(()), SeqLp(2)).value == 0.0
    g = Sequence((1.0, 1.0))
    v = cesaro_dual_norm(g, SeqLp(2)).value
    assert math.sqrt(2) / 2 <= v <= 4 * math.sqrt(6)


@pytest.mark.parametrize("g", [(1.0,), (1.0, 2.0), (0.5, 0.0, 2.0), (3.0, 1.0, 1.0, 0.2)])
def test_cesaro_dual_matches_brute_force(g):
    g = Sequence(g)
    X = SeqCesaro(SeqLp(2))
    ex = associate_norm(g, X).value
    bf = associate_norm(g, X, method="brute").value
    assert bf <= ex * (1 + 1e-6)
    assert bf == pytest.approx(ex, rel=1e-4)


def test_cone_dual_examples():
    q = np.ones(3)
    # increasing c: the cone constraint is inactive, plain Holder
    assert cone_dual(np.array([1.0, 2.0, 3.0]), q, 2.0)[0] == pytest.approx(math.sqrt(14), rel=1e-10)
    # decreasing c pools to a constant S
    val, S = cone_dual(np.array([3.0, 2.0, 1.0]), q, 2.0)
    assert val == pytest.approx(6 / math.sqrt(3), rel=1e-10)
    assert np.allclose(S, S[0])


def test_down_norm_examples():
    H = Domain.halfline(1.0)
    L1 = Lp(1, Power(0.0), "halfline")
    assert down_norm(StepFunction.indicator(0.0, 1.0, H), L1).value == pytest.approx(1.0)
    assert down_norm(StepFunction.constant(0.0, H), L1).value == 0.0
    f = StepFunction.indicator(1.0, 2.0, Domain.halfline(2.0))
    assert down_norm(f, L1).value == pytest.approx(0.5)


@given(step_functions(kind="halfline"))
def test_down_norm_within_constants(f):
    if not np.any(f.vals):
        return
    d = down_norm(f, Lp(2, Power(0.0), "halfline")).value
    c = N.norm(f, Cesaro(Lp(2, Power(0.0), "halfline"))).value
    # ||C||_2 = 2 and A = e/2 for L^2 on the half-line
    assert c / 2 * (1 - 1e-6) <= d <= math.e / 2 * c * (1 + 1e-6)


def test_sinnamon_examples():
    H = Domain.halfline(2.0)
    lp, closed, wit = sinnamon_sup(StepFunction.indicator(0.0, 1.0, H), StepFunction.indicator(1.0, 2.0, H))
    assert lp == pytest.approx(1.0) and closed == pytest.approx(1.0)
    assert wit.constraint_slack >= -1e-9
    lp, closed, _ = sinnamon_sup(StepFunction.indicator(0.0, 2.0, H), StepFunction.indicator(1.0, 2.0, H))
    assert lp == pytest.approx(2.0) and closed == pytest.approx(2.0)


@given(step_functions(kind="halfline"))
def test_sinnamon_decreasing_g_uses_f(f):
    g = majorant(f)
    lp, closed, _ = sinnamon_sup(f, g)
    direct = float(np.sum((f * g).vals * (f * g).lengths))
    assert closed == pytest.approx(direct, rel=1e-10, abs=1e-12)
    assert lp == pytest.approx(closed, rel=1e-8, abs=1e-10)


@given(step_functions(kind="halfline"), step_functions(kind="halfline"))
def test_sinnamon_identity(f, g):
    lp, closed, wit = sinnamon_sup(f, g)
    assert abs(lp - closed) <= 1e-8 * max(abs(lp), abs(closed), 1.0)
    assert wit.constraint_slack >= -1e-9 * max(float(np.sum(f.vals * f.lengths)), 1.0)


@given(sequences(), sequences())
def test_sinnamon_identity_sequences(x, y):
    lp, closed, _ = sinnamon_sup(x, y)
    assert lp == pytest.approx(closed, rel=1e-8, abs=1e-10)


def test_constants():
    assert hardy_constant(2) == pytest.approx(2.0)
    assert hardy_constant(2, -0.25) == pytest.approx(1 / 0.75)
    assert math.isinf(hardy_constant(2, 0.5))
    A, a = dilation_constant_A(Lp(2, Power(0.0), "halfline"))
    assert A == pytest.approx(math.e / 2, rel=1e-4)
    assert unit_weighted_constant(2, -0.5) == pytest.approx(2 / 2 * 2 ** 0.5)
    assert unit_weighted_constant(1, -0.5) == pytest.approx(2.0)


def test_report_sequence_l2():
    rep = duality_report(SeqLp(2), 8, seed=1)
    assert rep.interval[0] == pytest.approx(0.5)
    assert rep.interval[1] == pytest.approx(4 * math.sqrt(3))
    assert rep.passed and len(rep.ratios) == 8


def test_report_ces_inf_isometric():
    rep = duality_report(Lp(1.0, Power(0.0), "unit"), 8, seed=2, kind="ces-inf")
    assert rep.passed
    assert np.allclose(rep.ratios, 1.0, atol=1e-6)


def test_report_halfline():
    rep = duality_report(Lp(2.0, Power(0.0), "halfline"), 6, seed=3)
    assert rep.kind == "halfline"
    assert rep.passed and rep.interval[0] == pytest.approx(0.5)


def test_report_is_deterministic():
    a = duality_report(SeqLp(2), 5, seed=9).to_dict()
    b = duality_report(SeqLp(2), 5, seed=9).to_dict()
    assert a == b


def test_report_rejects_wrong_space():
    with pytest.raises(ValueError):
        duality_report(SeqLp(2), 2, kind="halfline")
    with pytest.raises(ValueError):
        duality_report(SeqLp(2), 2, kind="nope")


def test_weighted_spec_in_report():
    X = Weighted(SeqLp(2), Power(-0.25))
    rep = duality_report(X, 4, seed=0)
    assert rep.passed
