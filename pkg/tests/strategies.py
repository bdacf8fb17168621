"""Hypothesis strategies and seeded corpora shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from aplab.funcs1d import StepFunction1D


@st.composite
def step_functions(draw, min_cells=1, max_cells=8, nonneg=False, positive_support=False):
    n = draw(st.integers(min_cells, max_cells))
    start = draw(st.floats(0.0 if positive_support else -4.0, 4.0, allow_subnormal=False))
    gaps = draw(st.lists(st.floats(0.05, 2.0), min_size=n, max_size=n))
    lo = 0.0 if nonneg else -3.0
    vals = draw(st.lists(st.floats(lo, 3.0, allow_subnormal=False), min_size=n, max_size=n))
    e = start + np.concatenate(([0.0], np.cumsum(gaps)))
    return StepFunction1D(e, vals)


def random_step(rng, n_cells=6, lo=-2.0, hi=2.0, nonneg=True, positive=False):
    """Seeded random step function on a random grid inside ``[lo, hi]``."""
    e = np.sort(rng.uniform(lo, hi, n_cells + 1))
    while np.any(np.diff(e) < 1e-3):
        e = np.sort(rng.uniform(lo, hi, n_cells + 1))
    v = rng.uniform(0.0 if nonneg else -1.0, 1.0, n_cells)
    if positive:
        v = v + 0.05
    return StepFunction1D(e, v)
