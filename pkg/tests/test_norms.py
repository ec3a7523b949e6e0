import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ceslab import norms as N
from ceslab.core import (Cesaro, ConcaveGauge, Domain, DomainMismatch, Lp, Max,
                         OneMinusXInv, Power, SeqCesaro, SeqLp, SeqTilde, Sequence, StepFunction, Tilde,
                         parse_space)
from ceslab.operators import decreasing_rearrangement, majorant

from conftest import sequences, step_functions

MIN1 = ConcaveGauge(((0, 0), (1, 1), (2, 1)))


def test_lp_unit_indicator():
    v = N.norm(StepFunction.constant(1.0, Domain.unit()), Lp(2, Power(0.0), "unit"))
    assert v.value == pytest.approx(1.0, rel=1e-14)
    assert v.error_bound == 0.0


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 5.0])
def test_cesaro_lp_of_indicator(p):
    f = StepFunction.indicator(0.0, 1.0, Domain.halfline(1.0))
    v = N.norm(f, Cesaro(Lp(p, Power(0.0), "halfline")))
    assert v.value ** p == pytest.approx(1 + 1 / (p - 1), rel=1e-10)


def test_example1_divergence():
    H = Domain.halfline(3.0)
    X = Cesaro(Lp(2.0, Max((OneMinusXInv(), Power(0.0))), "halfline"))
    assert math.isinf(N.norm(StepFunction.indicator(0.0, 0.5, H), X).value)
    assert math.isfinite(N.norm(StepFunction.indicator(2.0, 3.0, H), X).value)


def test_domain_mismatch():
    with pytest.raises(DomainMismatch):
        N.norm(StepFunction.constant(1.0, Domain.unit()), parse_space("Lp 2 (pow 0) halfline"))


def test_power_weight_closed_form():
    # int_0^1 x^(2 alpha) dx with alpha = -0.25 -> 2
    v = N.norm(StepFunction.constant(1.0, Domain.unit()), Lp(2, Power(-0.25), "unit"))
    assert v.value == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert math.isinf(N.norm(StepFunction.constant(1.0, Domain.unit()), Lp(2, Power(-0.5), "unit")).value)


def test_onemx_inv_weight_diverges_at_one():
    U = Domain.unit()
    X = Lp(1, OneMinusXInv(), "unit")
    assert math.isinf(N.norm(StepFunction.constant(1.0, U), X).value)
    v = N.norm(StepFunction.indicator(0.0, 0.5, U), X)
    assert v.value == pytest.approx(math.log(2), rel=1e-10)


def test_tilde_non_order_continuity():
    U = Domain.unit()
    X = Tilde(Lp(1, Power(0.0), "unit"))
    for n in (2, 5, 50):
        f = StepFunction.indicator(1 - 1 / n, 1.0, U)
        assert N.norm(f, X).value == pytest.approx(1.0, rel=1e-12)


def test_lorentz_examples():
    H = Domain.halfline(2.0)
    assert N.lorentz_norm(StepFunction.indicator(0.0, 2.0, H), MIN1).value == pytest.approx(1.0)
    assert N.lorentz_norm(StepFunction.constant(0.0, H), MIN1).value == 0.0
    g = ConcaveGauge(((0, 0), (1, 1), (4, 2)))
    f = StepFunction.indicator(0.0, 3.0, Domain.halfline(3.0)).scale(2.5)
    assert N.lorentz_norm(f, g).value == pytest.approx(2.5 * float(g(3.0)), rel=1e-12)


def test_marcinkiewicz_examples():
    H = Domain.halfline(1.0)
    f = StepFunction.indicator(0.0, 1.0, H)
    for starred in (False, True):
        assert N.marcinkiewicz_norm(f, MIN1, starred).value == pytest.approx(1.0)
        assert N.marcinkiewicz_norm(StepFunction.constant(0.0, H), MIN1, starred).value == 0.0


@given(step_functions(kind="halfline"))
def test_marcinkiewicz_starred_le_unstarred(f):
    phi = ConcaveGauge(((0, 0), (1, 1), (4, 2)), 0.5, 0.5)
    s = N.marcinkiewicz_norm(f, phi, True).value
    u = N.marcinkiewicz_norm(f, phi, False).value
    assert s <= u * (1 + 1e-9) + 1e-12


def test_seq_norm_examples():
    assert N.seq_norm(Sequence((3.0, 4.0)), SeqLp(2)).value == pytest.approx(5.0)
    assert N.seq_norm(Sequence.unit_vector(1), SeqCesaro(SeqLp(math.inf))).value == pytest.approx(1.0)
    assert N.seq_norm(Sequence.unit_vector(1), SeqTilde(SeqLp(1))).value == pytest.approx(1.0)


def test_seq_cesaro_tail_bound():
    v = N.seq_norm(Sequence.unit_vector(1), SeqCesaro(SeqLp(2)))
    # sum 1/n^2 = pi^2/6
    assert v.value == pytest.approx(math.pi / math.sqrt(6), abs=v.error_bound + 1e-9)


SPACES = [
    "Lp 2 (pow 0) halfline",
    "Lp 3 (pow -0.1) halfline",
    "Ces(Lp 2 (pow 0) halfline)",
    "Tilde(Lp 1.5 (pow 0) halfline)",
    "Lorentz (gauge (0 0) (1 1) (4 2) (head 0.5) (tail 0.5))",
]


@pytest.mark.parametrize("spec", SPACES)
@given(f=step_functions(kind="halfline", nonneg=False), c=st.floats(0.0, 1.0))
def test_ideal_property(spec, f, c):
    X = parse_space(spec)
    small = f.scale(c)
    assert N.norm(small, X).value <= N.norm(f, X).value * (1 + 1e-9) + 1e-12


@pytest.mark.parametrize("spec", ["Lp 1 (pow 0) halfline", "Lorentz (gauge (0 0) (1 1) (4 2))",
                                  "Marc (gauge (0 0) (1 1) (4 2))"])
@given(f=step_functions(kind="halfline", nonneg=False))
def test_symmetric_norms_see_only_rearrangement(spec, f):
    X = parse_space(spec)
    star = decreasing_rearrangement(f).fstar
    assert N.norm(star, X).value == pytest.approx(N.norm(f, X).value, rel=1e-9, abs=1e-12)


@given(f=step_functions(kind="halfline"), c=st.sampled_from([1e-3, 1.0, 1e3]))
def test_homogeneity(f, c):
    X = parse_space("Ces(Lp 2 (pow -0.1) halfline)")
    assert N.norm(f.scale(c), X).value == pytest.approx(c * N.norm(f, X).value, rel=1e-9, abs=1e-300)


def test_fatou_nested_refinements():
    H = Domain.halfline(1.0)
    X = Cesaro(Lp(2, Power(0.0), "halfline"))
    target = N.norm(StepFunction.indicator(0.0, 1.0, H), X).value
    prev = 0.0
    for k in range(1, 14):
        fk = StepFunction.indicator(2.0 ** -k, 1.0, H)
        v = N.norm(fk, X).value
        assert prev <= v <= target * (1 + 1e-10)
        prev = v
    assert prev == pytest.approx(target, rel=1e-3)


@given(step_functions(kind="halfline"))
def test_tilde_marc_star_equals_weighted_sup(f):
    phi = ConcaveGauge(((0, 0), (1, 1), (4, 2)))
    m = majorant(f)
    lhs = N.marcinkiewicz_norm(m, phi, True).value
    x = np.concatenate([m.bp[1:], m.bp[1:] * (1 - 1e-12)])
    rhs = float(np.max(m(x * (1 - 1e-12)) * x / np.asarray(phi(x)))) if m.n_cells else 0.0
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)


@given(sequences())
def test_seq_norm_batch_matches_single(x):
    X = SeqCesaro(SeqLp(2, Power(-0.2)))
    if not len(x):
        return
    batch = N.seq_norm_batch(x.arr[None, :], X)
    assert batch[0] == pytest.approx(N.seq_norm(x, X).value, rel=1e-12, abs=1e-300)
