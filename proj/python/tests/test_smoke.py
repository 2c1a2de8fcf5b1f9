import cmath
import math

import numpy as np
import pytest

import fopi


def test_version():
    assert fopi.__version__ == "0.1.0"


def test_oustaloup_half_order_at_band_centre():
    tf = fopi.oustaloup(0.5, fopi.ApproxConfig(omega_low=1e-3, omega_high=1e3, sections=5))
    h = tf.freq_response(1.0)
    assert abs(abs(h) - 1.0) <= 0.01
    assert abs(math.degrees(cmath.phase(h)) - 45.0) <= 1.0
    assert tf.is_stable()


def test_order_zero_is_constant():
    tf = fopi.oustaloup(0.0)
    assert tf.num == [1.0]
    assert tf.den == [1.0]


def test_fitted_lag_matches_exact():
    g = fopi.approx_lag(1.0, 20.0, 0.5)
    assert abs(abs(g.freq_response(0.05)) - 0.84090) / 0.84090 <= 0.01
    assert abs(abs(fopi.exact_lag_response(1.0, 20.0, 0.5, 0.05)) - 2 ** -0.25) < 1e-12


def test_analytic_step():
    assert abs(fopi.analytic_step(1.0, 20.0, 4, 80.0) - 0.566530) <= 1e-6


def test_simulate_tracks_setpoint():
    r = fopi.simulate(horizon=700.0)
    assert not r["diverged"]
    t, y = r["t"], r["y"]
    assert len(t) == 70001
    assert abs(y[(t >= 475) & (t < 500)].mean() - 1.0) <= 0.01
    assert r["J1"] > 0 and r["J2"] > 0


def test_topologies_agree():
    kw = dict(controller=fopi.FracPI(1.2, 0.04, 0.8), chi=0.8, horizon=600.0)
    a = fopi.simulate(topology="predictor", **kw)
    b = fopi.simulate(topology="equivalent", **kw)
    assert np.max(np.abs(a["y"] - b["y"])) <= 1e-6


def test_fit_error_surfaces():
    with pytest.raises(fopi.FitError):
        fopi.approx_lag(1.0, 20.0, 0.5, fopi.ApproxConfig(fit_error_ceiling=1e-12))


def test_bad_arguments_raise():
    with pytest.raises(ValueError):
        fopi.simulate(chi=3.0)


def test_pareto_helpers():
    fronts = fopi.non_dominated_sort([(1, 2), (2, 1), (3, 3)])
    assert sorted(fronts[0]) == [0, 1] and fronts[1] == [2]
    assert fopi.hypervolume([(1, 3), (3, 1)], (4, 4)) == 5.0


def test_tune_is_deterministic():
    kw = dict(chi=1.2, pop_size=6, generations=1, seed=4, dt=0.05, horizon=600.0,
              approx=fopi.ApproxConfig(omega_high=10.0))
    a = fopi.tune(**kw)
    b = fopi.tune(**kw)
    assert a == b
    assert a and all(row["J1"] > 0 for row in a)


def test_sweep_and_report(tmp_path):
    conf = tmp_path / "tiny.conf"
    conf.write_text("sweep.chi = 0.6, 1.4\nga.pop_size = 4\nga.generations = 1\n"
                    "sim.dt = 0.05\nsim.horizon = 600\napprox.omega_high = 10\n")
    fopi.sweep(str(conf), tmp_path / "out")
    first = (tmp_path / "out" / "summary.csv").read_bytes()
    fopi.report(tmp_path / "out")
    assert (tmp_path / "out" / "summary.csv").read_bytes() == first
    assert (tmp_path / "out" / "front_chi_0.6.csv").exists()
