"""Smoke tests for the Python bindings.

These exercise the binding layer, not the numerics (the C++ suites and the
acceptance binary own those): import surface, config plumbing, determinism,
and a couple of closed-form spot values.
"""

import json
import math

import pytest

import vmmafields as vf

CONFIG = {
    "model": {
        "kernel": {"family": "sup_ou", "mixing": {"type": "dirac", "point": [1.0]}},
        "volatility": {
            "kernel": {"family": "sup_ou", "mixing": {"type": "dirac", "point": [1.0]}},
            "basis": {"family": "gamma", "shape": 2.0, "rate": 2.0},
        },
    },
    "grid": {"origin": [0.0], "step": [0.25], "count": [64]},
    "run": {"n_reps": 60, "master_seed": 7, "thetas": [0.0, 1.0], "lags": [[1.0]]},
}


@pytest.fixture(scope="module")
def exp():
    return vf.Experiment.from_json(json.dumps(CONFIG))


def test_import_surface():
    for name in vf.__all__:
        assert hasattr(vf, name), name


def test_config_errors_are_value_errors():
    with pytest.raises(vf.ConfigError):
        vf.Experiment.from_json('{"bogus": 1}')
    with pytest.raises(ValueError):
        vf.Experiment.from_json("not json")


def test_grid_properties(exp):
    assert exp.master_seed == 7
    assert exp.n_reps == 60
    assert exp.grid.dim == 1
    assert len(exp.grid) == 64
    assert exp.grid.axes[0].step == 0.25


def test_field_draws_are_deterministic(exp):
    a = exp.simulate_field(rep=0)
    b = exp.simulate_field(rep=0)
    c = exp.simulate_field(rep=1)
    assert len(a) == 64
    assert a.values == b.values
    assert a.values != c.values
    assert a.coordinates(4) == [1.0]


def test_volatility_is_nonnegative(exp):
    vol = exp.simulate_volatility(rep=0)
    assert all(v >= 0.0 for v in vol.values)


def test_replicate_matches_the_law(exp):
    summary = exp.replicate(80)
    assert summary["n_reps"] == 80
    second = summary["second_moment"]
    assert abs(second["value"] - exp.var_x0()) < 5.0 * second["se"]
    assert summary["char_fn"][0]["value"] == 1.0  # theta = 0


def test_analytic_law(exp):
    assert exp.char_x(0.0) == 1.0
    assert 0.0 < exp.char_x(2.0) < exp.char_x(1.0) < 1.0
    assert exp.laplace_v(0.0) == 0.0
    assert abs(exp.correlation([1.0]) - math.exp(-1.0)) < 1e-4


def test_selfsim_spectral_closed_form():
    for w in (0.0, 0.5, 2.0):
        want = 2.0 / (math.pi * (1.0 + 4.0 * w * w))
        assert abs(vf.selfsim_spectral(0.5, w) - want) < 1e-9
    with pytest.raises(Exception):
        vf.selfsim_spectral(1.5, 1.0)


def test_design_kernel_roundtrip():
    lags = [-4.0 + 0.25 * i for i in range(33)]
    values = [math.exp(-0.5 * h * h) for h in lags]
    design = vf.design_kernel(lags, values, root="even")
    assert design["roundtrip_error"] < 1e-3
    assert len(design["z"]) == len(design["values"]) == 32

    bad = [1.0 if h == 0.0 else (-0.9 if abs(h) <= 0.25 else 0.0) for h in lags]
    with pytest.raises(ValueError, match="not a covariance"):
        vf.design_kernel(lags, bad)


def test_mss_transform_roundtrip(exp):
    x = exp.simulate_field(rep=0)
    y = vf.to_mss(x, [0.5])
    back = vf.from_mss(y, [0.5])
    assert y.values != x.values
    assert y.coordinates(0) == [math.exp(x.coordinates(0)[0])]
    assert all(abs(a - b) <= 1e-12 * max(1.0, abs(a)) for a, b in zip(x.values, back.values))


def test_scaling_helpers():
    assert vf.rho_translation_invariant([0.5], [0.0]) == 1.0
    assert abs(vf.rho_translation_invariant([0.5], [1.0]) - math.exp(-0.5)) < 1e-12
    assert vf.stat_incr_covariance([0.5], 2.0, [1.5], [0.75]) == pytest.approx(1.5)
