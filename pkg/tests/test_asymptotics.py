import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aplab import InsufficientData, InsufficientVariation, InvalidArgument
from aplab import asymptotics
from aplab.asymptotics import (
    INFINITY,
    ONE_PLUS,
    NormCurve,
    beta_lower,
    fit_exponent,
    parse_p_grid,
    sample_norm_curve,
    sharpness_probe,
)
from aplab.funcs1d import indicator
from aplab.weights import Weight, power_weight


def curve(p, N):
    return NormCurve("synthetic", "none", "const:1", p, N)


# fits -------------------------------------------------------------------------------


def test_fit_pure_power_at_infinity():
    p = np.geomspace(8, 512, 8)
    fit = fit_exponent(curve(p, 3 * p**2), "infinity")
    assert fit.exponent == pytest.approx(2.0, abs=1e-12)
    assert fit.residual < 1e-12 and fit.points_used == 8


def test_fit_pure_power_at_one():
    p = np.linspace(1.01, 1.2, 6)
    fit = fit_exponent(curve(p, 1 / (p - 1)), "one_plus")
    assert fit.exponent == pytest.approx(1.0, abs=1e-12)
    assert fit.residual < 1e-12


def test_fit_clamps_negative_slopes_and_needs_three_points():
    p = np.array(INFINITY)
    fit = fit_exponent(curve(p, 1 / p), "infinity")
    assert fit.exponent == 0.0 and fit.clamped
    with pytest.raises(InsufficientData):
        fit_exponent(curve([1.5, 1.6], [1.0, 2.0]), "one_plus")
    with pytest.raises(InsufficientData):
        fit_exponent(curve(p, p), "infinity", tail=2)
    with pytest.raises(InvalidArgument):
        fit_exponent(curve(p, p), "middle")


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 4.0), st.floats(1e-3, 1e3), st.sampled_from(["one_plus", "infinity"]))
def test_fit_recovers_slope_and_ignores_scale(s, c, endpoint):
    p = np.array(ONE_PLUS if endpoint == "one_plus" else INFINITY)
    x = -np.log(p - 1) if endpoint == "one_plus" else np.log(p)
    N = np.exp(s * x)
    a, b = fit_exponent(curve(p, N), endpoint), fit_exponent(curve(p, c * N), endpoint)
    assert a.exponent == pytest.approx(s, abs=1e-9)
    assert b.exponent == pytest.approx(a.exponent, abs=1e-9)
    assert b.intercept - a.intercept == pytest.approx(math.log(c), abs=1e-9)


def test_fit_json_schema():
    fit = fit_exponent(curve(np.array(INFINITY), np.array(INFINITY)), "infinity")
    assert set(json.loads(fit.to_json())) == {"operator", "endpoint", "exponent", "residual", "points_used"}


# beta ---------------------------------------------------------------------------------


def test_beta_lower_examples():
    assert beta_lower(0, 1, 2).beta_min == 1
    assert beta_lower(1, 2, 2).beta_min == 2
    assert beta_lower(1, 2, 1.25).beta_min == 4
    for k in (2, 3):
        assert beta_lower(k - 1, 0, 1.5).beta_min == pytest.approx((k - 1) / 0.5)
    assert beta_lower(0, 0, 3).beta_min == 0
    assert json.loads(beta_lower(1, 2, 2).to_json()) == {"p0": 2, "alpha": 1, "gamma": 2, "beta_min": 2}
    with pytest.raises(InvalidArgument):
        beta_lower(1, 1, 1.0)
    with pytest.raises(InvalidArgument):
        beta_lower(-1, 1, 2)


@settings(max_examples=100)
@given(st.floats(0, 10), st.floats(0, 10), st.floats(1.01, 10), st.floats(0, 1))
def test_beta_lower_monotone(a, g, p0, d):
    b = beta_lower(a, g, p0).beta_min
    assert b == max(g, a / (p0 - 1))
    assert beta_lower(a + d, g, p0).beta_min >= b
    assert beta_lower(a, g + d, p0).beta_min >= b
    if a / (p0 - 1) >= g:
        assert beta_lower(a, g, p0 + d).beta_min <= b


# curves ---------------------------------------------------------------------------------


def test_parse_p_grid():
    assert parse_p_grid("one_plus") == list(ONE_PLUS)
    assert parse_p_grid("infinity") == list(INFINITY)
    g = parse_p_grid("geometric:8:512:7")
    assert g[0] == pytest.approx(8) and g[-1] == pytest.approx(512) and len(g) == 7
    assert parse_p_grid("1.5, 2,4") == [1.5, 2.0, 4.0]
    for bad in ("geometric:1:4:3", "geometric:8:4:3", "one,two"):
        with pytest.raises(InvalidArgument):
            parse_p_grid(bad)


def test_curve_validation_and_csv_roundtrip(tmp_path):
    c = curve([1.5, 2.0, 1 / 3 + 4], [0.1 + 0.2, 2.0, math.pi])
    text = c.to_csv(tmp_path / "c.csv")
    assert text.splitlines()[0] == "operator,family,weight,p,norm"
    back = NormCurve.from_csv(tmp_path / "c.csv")
    assert np.array_equal(back.p, c.p) and np.array_equal(back.N, c.N)
    with pytest.raises(InvalidArgument):
        curve([2.0, 1.5], [1.0, 1.0])
    with pytest.raises(InvalidArgument):
        curve([1.0, 2.0], [1.0, 1.0])
    with pytest.raises(InvalidArgument):
        curve([1.5, 2.0], [1.0, 0.0])


def test_maximal_curve_at_two_is_exact():
    # lam |{M chi > lam}|^{1/2} = (2 lam - lam^2)^{1/2} for lam < 1, maximal at lam = 1
    c = sample_norm_curve("maximal:uncentered", "indicator", None, [2.0])
    assert c.N[0] == pytest.approx(1.0, rel=1e-12)


def test_hilbert_curve_example():
    c = sample_norm_curve("hilbert", "indicator", None, [10.0])
    assert c.N[0] >= 10 / math.pi * 2**0.1 / math.e


def test_iterated_maximal_curve_example():
    p = 1.1
    q = p / (p - 1)
    c = sample_norm_curve("iterated-maximal:k=2", "indicator", None, [p])
    x = np.geomspace(2 * math.e, 1e300, 4000)
    profile = np.max(0.5 ** (1 / p) * q * np.log(x ** (1 / q)) / x ** (1 / q))
    assert c.N[0] >= profile


def test_curve_errors():
    with pytest.raises(InvalidArgument):
        sample_norm_curve("hilbert", "indicator", None, [1.0, 2.0])
    with pytest.raises(InvalidArgument):
        sample_norm_curve("hilbert", "nothing", None, [2.0])
    with pytest.raises(InvalidArgument):
        sample_norm_curve("adjoint-hardy", [("neg", indicator(-1.0, 1.0))], None, [2.0])


def test_hilbert_tail_fits_stabilize_from_below():
    c = sample_norm_curve("hilbert", "indicator", None, parse_p_grid("geometric:8:512:8"))
    short, full = fit_exponent(c, "infinity", tail=4), fit_exponent(c, "infinity", tail=8)
    assert 0.95 <= full.exponent <= 1.05
    assert full.exponent <= short.exponent + 0.05


# probes -----------------------------------------------------------------------------------


def test_probe_constant_ratio_gives_zero_slope(monkeypatch):
    monkeypatch.setattr(asymptotics, "weak_ratio", lambda *a, **k: 2.5)
    res = sharpness_probe("maximal:uncentered", 2.0, deltas=(0.5, 0.25, 0.125))
    assert res.exponent == pytest.approx(0.0, abs=1e-12)
    assert len(res.pairs) == 3


def test_probe_rejects_constant_family():
    ws = [Weight.constant(c, 8.0) for c in (1.0, 2.0, 3.0)]
    with pytest.raises(InsufficientVariation):
        sharpness_probe("maximal:uncentered", 2.0, deltas=(0.5, 0.25, 0.125), weights=ws,
                        tests=[indicator(0.0, 1.0)] * 3)


def test_probe_pairs_use_power_family():
    res = sharpness_probe("maximal:uncentered", 2.0, deltas=(0.5, 0.25))
    a = [x for x, _ in res.pairs]
    assert a[0] < a[1]
    assert power_weight(0.5, 2.0).diagnostics["candidate"] <= a[0] * (1 + 1e-9)
