import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ceslab.core import Domain, Sequence, StepFunction

settings.register_profile("ceslab", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ceslab"))


@st.composite
def step_functions(draw, kind=None, max_cells=8, nonneg=True, horizon=None):
    """Step functions with well separated breakpoints and moderate values."""
    kind = kind or draw(st.sampled_from(["unit", "halfline"]))
    if kind == "unit":
        H = 1.0
    else:
        H = horizon or draw(st.floats(0.5, 6.0))
    n = draw(st.integers(1, max_cells))
    cuts = draw(st.lists(st.floats(0.02, 0.98), min_size=n - 1, max_size=n - 1, unique=True))
    inner = np.unique(np.round(np.sort(cuts) * H, 6))
    bp = np.concatenate([[0.0], inner, [H]])
    lo = 0.0 if nonneg else -10.0
    vals = draw(st.lists(st.floats(lo, 10.0), min_size=len(bp) - 1, max_size=len(bp) - 1))
    return StepFunction.from_arrays(Domain(kind, H), bp, vals)


@st.composite
def sequences(draw, max_len=12, nonneg=True):
    lo = 0.0 if nonneg else -10.0
    return Sequence(tuple(draw(st.lists(st.floats(lo, 10.0), min_size=0, max_size=max_len))))


@pytest.fixture
def chi01_half():
    return StepFunction.indicator(0.0, 1.0, Domain.halfline(1.0))


@pytest.fixture
def unit_one():
    return StepFunction.constant(1.0, Domain.unit())
