import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aplab import DomainError, InvalidArgument, ProfileFunction, StepFunction1D
from aplab.funcs1d import dyadic_log_nodes, from_pieces, indicator, integrate, transform

from .strategies import step_functions


def test_integrate_examples():
    chi = indicator(0, 1)
    assert integrate(chi, 0, 1) == 1
    assert integrate(chi, 0.5, 3) == 0.5
    f = from_pieces([(0, 1, 2.0), (1, 3, -1.0)])
    assert integrate(f, 0, 3) == 0


def test_integrate_rejects_bad_limits():
    with pytest.raises(InvalidArgument):
        integrate(indicator(0, 1), 0, math.inf)
    with pytest.raises(InvalidArgument):
        integrate(indicator(0, 1), 2, 1)


def test_transform_examples():
    chi = indicator(0, 1)
    assert transform(chi, "power", 3) == chi
    assert transform(indicator(0, 1, -2.0), "abs") == indicator(0, 1, 2.0)
    f = from_pieces([(0, 1, 2.0), (1, 2, 1.0)])
    g = transform(f, "power", -1)
    assert g.equivalent(from_pieces([(0, 1, 0.5), (1, 2, 1.0)]))


def test_transform_domain_errors():
    with pytest.raises(DomainError):
        transform(indicator(0, 1, -1.0), "power", 0.5)
    f = StepFunction1D([0, 1, 2, 3], [1.0, 0.0, 1.0])
    with pytest.raises(DomainError):
        transform(f, "power", -2)
    # integer powers of negative values are fine
    assert transform(indicator(0, 1, -2.0), "power", 3)(0.5) == -8


def test_representation_invariants():
    with pytest.raises(InvalidArgument):
        StepFunction1D([0], [])
    with pytest.raises(InvalidArgument):
        StepFunction1D([0, 0, 1], [1, 2])
    with pytest.raises(InvalidArgument):
        StepFunction1D([0, 1, 2], [1])
    with pytest.raises(InvalidArgument):
        StepFunction1D([0, math.inf], [1])


def test_evaluation_is_right_continuous_and_zero_outside():
    f = from_pieces([(0, 1, 2.0), (1, 3, 5.0)])
    assert f(-1) == 0 and f(3) == 0 and f(10) == 0
    assert f(0) == 2 and f(1) == 5 and f(2.999) == 5


@settings(max_examples=60, deadline=None)
@given(step_functions(), st.floats(-5, 5), st.floats(0, 3), st.floats(0, 3))
def test_integrate_is_additive(f, a, d1, d2):
    b, c = a + d1, a + d1 + d2
    lhs = integrate(f, a, c)
    rhs = integrate(f, a, b) + integrate(f, b, c)
    scale = max(1.0, float(np.sum(np.abs(f.values) * f.lengths)))
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(step_functions(), st.sampled_from([0.5, 2.0, -4.0, 0.25, 8.0]))
def test_scale_roundtrip_exact_for_powers_of_two(f, c):
    g = transform(transform(f, "scale", c), "scale", 1 / c)
    assert g == f


@settings(max_examples=60, deadline=None)
@given(step_functions(), st.floats(0.1, 10.0))
def test_scale_roundtrip_general_within_two_ulp(f, c):
    g = transform(transform(f, "scale", c), "scale", 1 / c)
    assert np.array_equal(g.breakpoints, f.breakpoints)
    np.testing.assert_array_max_ulp(g.values, f.values, maxulp=2)


def test_csv_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(3)
    e = np.cumsum(rng.random(12) + 1e-3) - 4.0
    v = rng.standard_normal(11) * 1e3
    f = StepFunction1D(e, v)
    path = tmp_path / "f.csv"
    f.to_csv(path)
    assert path.read_text().splitlines()[0] == "breakpoint,value"
    assert path.read_text().splitlines()[-1].endswith(",")
    assert StepFunction1D.from_csv(path) == f


def test_dyadic_nodes_are_symmetric_and_cover_window():
    nodes = dyadic_log_nodes(2.0**10, per_octave=4, near_zero_octaves=6)
    assert nodes[0] == -1024 and nodes[-1] == 1024
    assert np.all(np.diff(nodes) > 0)
    assert np.array_equal(nodes, -nodes[::-1])
    assert {1.0, 2.0, 0.5, 1.25}.issubset(set(nodes.tolist()))


def test_hilbert_profile_antisymmetric():
    prof = ProfileFunction("HilbertIndicator", (0.0, 1.0, 1 / math.pi))
    t = np.linspace(0.01, 3, 200)
    np.testing.assert_allclose(prof(0.5 + t), -prof(0.5 - t), atol=1e-13)


def test_czphi_strictly_decreasing():
    prof = ProfileFunction("CZPhi", (1 / math.pi,))
    x = np.linspace(1e-6, 0.5 - 1e-6, 2000)
    assert np.all(np.diff(prof(x)) < 0)


def test_profiles_nan_outside_domain():
    assert math.isnan(ProfileFunction("CommutatorTail")(2.0))
    assert math.isnan(ProfileFunction("MaximalTail", (2,))(1.0))
    assert ProfileFunction("MaximalTail", (1,))(10.0) == pytest.approx(0.1)
    assert ProfileFunction("AdjointHardyIndicator", (0.0, 1.0))(0.25) == pytest.approx(math.log(4))


def test_profile_parameter_validation():
    with pytest.raises(InvalidArgument):
        ProfileFunction("MaximalTail", (0,))
    with pytest.raises(InvalidArgument):
        ProfileFunction("HilbertIndicator", (1.0, 0.0, 1.0))
    with pytest.raises(InvalidArgument):
        ProfileFunction("Nope")


def test_longdouble_is_preserved():
    e = np.array([0, 1, 2], dtype=np.longdouble)
    f = StepFunction1D(e, [1.0, 2.0])
    assert f.dtype == np.longdouble
    assert (f * 2.0).dtype == np.longdouble
    big = StepFunction1D(np.array([0, np.exp(np.longdouble(2000))]), [1.0])
    assert np.isfinite(integrate(big, 0, big.breakpoints[-1]))
