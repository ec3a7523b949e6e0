import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ceslab import norms as N
from ceslab.core import Domain, DomainMismatch, Lp, Power, Sequence, StepFunction
from ceslab.operators import (cesaro, cesaro_seq, cesaro_twice, copson, decreasing_rearrangement, dilation,
                              dilation_seq, majorant, sigma, sigma_inv, substitution_T, substitution_T_inv)

from conftest import sequences, step_functions

E = math.e


def test_cesaro_examples(chi01_half):
    Cf = cesaro(chi01_half)
    assert np.allclose(Cf(np.array([0.25, 1.0, 2.0, 10.0])), [1.0, 1.0, 0.5, 0.1])
    g = StepFunction.indicator(1.0, 2.0, Domain.halfline(2.0), 2.0)
    assert float(cesaro(g)(np.array(2.0))) == pytest.approx(1.0)
    c = StepFunction.constant(3.5, Domain.unit())
    assert np.allclose(cesaro(c)(np.linspace(0.01, 1, 9)), 3.5)


@given(step_functions())
def test_cesaro_is_F_over_x(f):
    top = f.horizon if f.domain.is_unit else 1.5 * f.horizon
    x = np.linspace(0.05, top, 23)
    F = np.array([float(np.sum(f.vals * np.clip(t - f.bp[:-1], 0.0, f.lengths))) for t in x])
    assert np.allclose(cesaro(f)(x), F / x, rtol=1e-12, atol=1e-12)


@given(step_functions(nonneg=False), st.floats(-2, 2))
def test_cesaro_linear(f, a):
    g = StepFunction.constant(1.0, f.domain)
    x = np.linspace(0.1, f.horizon, 11)
    assert np.allclose(cesaro(f.scale(a) + g)(x), a * cesaro(f)(x) + cesaro(g)(x), atol=1e-12)


def test_cesaro_twice_closed_form():
    # CCf(e) = (1/e)(1 + ln e) for f = chi[0,1]
    f = StepFunction.indicator(0.0, 1.0, Domain.halfline(1.0))
    assert float(cesaro_twice(f)(np.array(E))) == pytest.approx(2 / E, rel=1e-14)


def test_copson_examples():
    U = Domain.unit()
    x = np.array([0.1, 0.5, 0.9])
    assert np.allclose(copson(StepFunction.constant(1.0, U))(x), -np.log(x))
    f = StepFunction.indicator(0.5, 1.0, U)
    assert float(copson(f)(np.array(0.25))) == pytest.approx(math.log(2))
    assert np.allclose(copson(StepFunction.constant(0.0, U))(x), 0.0)
    with pytest.raises(DomainMismatch):
        copson(StepFunction.constant(1.0, Domain.halfline(2.0)))


def test_majorant_examples():
    U = Domain.unit()
    f = StepFunction.from_arrays(U, [0, 1 / 3, 2 / 3, 1], [1, 3, 2])
    assert majorant(f).values == (3.0, 3.0, 2.0)
    assert majorant(Sequence((1.0, 3.0, 2.0))) == Sequence((3.0, 3.0, 2.0))
    dec = StepFunction.from_arrays(U, [0, 0.5, 1], [2, -1])
    assert majorant(dec).values == (2.0, 1.0)


@given(step_functions(nonneg=False))
def test_majorant_idempotent_and_dominating(f):
    m = majorant(f)
    assert majorant(m) == m
    assert np.all(np.diff(m.vals) <= 0)
    assert np.all(m.vals >= np.abs(f.vals))


@given(step_functions(kind="unit"))
def test_majorant_monotone(f):
    g = f.abs() + StepFunction.constant(0.5, f.domain)
    x = np.linspace(0, 0.999, 31)
    assert np.all(majorant(f)(x) <= majorant(g)(x) + 1e-15)


@given(step_functions())
def test_majorant_is_own_rearrangement(f):
    m = majorant(f)
    r = decreasing_rearrangement(m).fstar
    x = np.linspace(0, m.horizon * 0.999, 41)
    assert np.allclose(r(x), m(x))


def test_dilation_examples():
    U, H = Domain.unit(), Domain.halfline(1.0)
    d = dilation(StepFunction.indicator(0.0, 1.0, U), 0.5)
    assert np.allclose(d(np.array([0.25, 0.75])), [1.0, 0.0])
    d2 = dilation(StepFunction.indicator(0.0, 1.0, H), 2.0)
    assert d2.horizon == 2.0 and np.allclose(d2(np.array([1.5])), 1.0)


@pytest.mark.parametrize("p,alpha,tau", [(2, 0.0, 0.5), (3, 0.25, 0.3), (1.5, -0.2, 0.7)])
def test_dilation_norm_power_law(p, alpha, tau):
    f = StepFunction.indicator(0.0, 1.0, Domain.halfline(1.0))
    X = Lp(p, Power(alpha), "halfline")
    ratio = N.norm(dilation(f, tau), X).value / N.norm(f, X).value
    assert ratio == pytest.approx(tau ** (1 / p + alpha), rel=1e-12)


def test_dilation_seq_examples():
    assert dilation_seq(Sequence((1.0, 2.0)), 2) == Sequence((1.0, 1.0, 2.0, 2.0))
    x = Sequence((4.0, 5.0))
    assert dilation_seq(x, 1) == x
    assert dilation_seq(Sequence.unit_vector(1), 3) == Sequence((1.0, 1.0, 1.0))


def test_cesaro_seq_examples():
    assert np.allclose(cesaro_seq(Sequence.unit_vector(1), 4), [1, 1 / 2, 1 / 3, 1 / 4])
    assert np.allclose(cesaro_seq(Sequence((1.0, 1.0, 1.0))), [1, 1, 1])
    assert np.allclose(cesaro_seq(Sequence((0.0, 2.0))), [0, 1])


@given(st.floats(0.1, 10), st.integers(1, 6), st.integers(1, 5))
def test_dilation_then_cesaro_on_constants(c, n, m):
    x = Sequence((c,) * n)
    assert np.allclose(cesaro_seq(dilation_seq(x, m)), c)


def test_substitution_examples():
    U = Domain.unit()
    Th = substitution_T(StepFunction.indicator(0.0, 0.5, U))
    assert Th.bp[1] == pytest.approx(E / (1 + E), rel=1e-15)
    x = 0.3
    d = x + E - E * x
    Tx = substitution_T(StepFunction.indicator(0.0, x / d, U))
    assert Tx.bp[1] == pytest.approx(x, rel=1e-14)
    assert sigma(0.0) == 0.0 and sigma(1.0) == 1.0


@given(step_functions(kind="unit", nonneg=False))
def test_substitution_bijection(h):
    back = substitution_T_inv(substitution_T(h))
    assert np.allclose(back.bp, h.bp, atol=1e-14)
    assert back.values == h.values


@given(st.floats(0.0, 1.0))
def test_sigma_inverse(b):
    assert float(sigma(sigma_inv(b))) == pytest.approx(b, abs=1e-15)


def test_rearrangement_examples():
    U = Domain.unit()
    f = StepFunction.from_arrays(U, [0, 1 / 3, 2 / 3, 1], [1, 3, 2])
    assert decreasing_rearrangement(f).fstar.values == (3.0, 2.0, 1.0)
    dec = StepFunction.from_arrays(U, [0, 0.5, 1], [2, 1])
    assert decreasing_rearrangement(dec).fstar == dec
    perm = StepFunction.from_arrays(U, [0, 1 / 3, 2 / 3, 1], [2, 1, 3])
    assert np.allclose(decreasing_rearrangement(perm).fstar.vals, decreasing_rearrangement(f).fstar.vals)


@given(step_functions(nonneg=False), st.floats(0.0, 10.0))
def test_rearrangement_preserves_distribution(f, lam):
    prof = decreasing_rearrangement(f)
    direct = float(np.sum(f.lengths[np.abs(f.vals) > lam]))
    assert prof.distribution(lam) == pytest.approx(direct, abs=1e-12)
    star = decreasing_rearrangement(prof.fstar)
    assert star.distribution(lam) == pytest.approx(direct, abs=1e-12)


@given(sequences(nonneg=False))
def test_sequence_majorant_suffix_sup(x):
    m = majorant(x)
    a = np.abs(x.arr)
    want = np.maximum.accumulate(a[::-1])[::-1] if len(a) else a
    assert np.allclose(m.padded(len(a)), want)
