import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from measureiso import spaces as sp
from measureiso.measures import FinitePointMeasure, canonicalize

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------------- strategies

weights_st = st.floats(0.05, 1.0, allow_nan=False)


@st.composite
def line_measures(draw, max_atoms=6, grid=True):
    k = draw(st.integers(1, max_atoms))
    if grid:
        xs = draw(st.lists(st.integers(-12, 12), min_size=k, max_size=k))
        atoms = np.array(xs, dtype=float) * 0.25
    else:
        atoms = np.array(draw(st.lists(st.floats(-5, 5, allow_nan=False), min_size=k, max_size=k)))
    w = np.array(draw(st.lists(weights_st, min_size=k, max_size=k)))
    return canonicalize(FinitePointMeasure(sp.line(), atoms, w / w.sum()))


@st.composite
def discrete_measures(draw, k=6, max_atoms=6):
    labels = draw(st.lists(st.integers(0, k - 1), min_size=1, max_size=max_atoms))
    w = np.array(draw(st.lists(weights_st, min_size=len(labels), max_size=len(labels))))
    return canonicalize(FinitePointMeasure(sp.discrete(k), labels, w / w.sum()))


@st.composite
def seeded_measures(draw, space, max_atoms=5):
    """Measures on any space, drawn through the package's seeded generator."""
    from measureiso.measures import random_measure

    seed = draw(st.integers(0, 2**32 - 1))
    k = draw(st.integers(1, max_atoms))
    return random_measure(space, k, np.random.default_rng(seed))
