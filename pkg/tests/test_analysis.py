import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from propagate.analysis import (FrontTrace, annihilation_verdict, attractivity_verdict, build_majorant,
                                build_minorant, check_majorant, check_minorant, estimate_speed,
                                fronts_to_csv, propagation_probe, sandwich_check, spreading_verdict,
                                track_front)
from propagate.errors import ConfigError, HypothesisError, NumericError
from propagate.grid import Field, Trajectory, grid_from_spacing, make_grid
from propagate.models import builtin_fisher, builtin_shifted_logistic, builtin_shifted_ricker
from propagate.sim import SimConfig, ic_bump_h, ic_constant, run
from propagate.speeds import Speeds


def _step_trajectory(positions, times, grid):
    snaps = [Field(grid, (grid.x <= p).astype(float)) for p in positions]
    return Trajectory(list(times), snaps, "step")


@pytest.fixture(scope="module")
def fisher_run():
    m = builtin_fisher()
    g = grid_from_spacing(-100, 100, 0.1)
    return m, run(m, ic_bump_h(g), SimConfig(0.02, 30.0, snapshot_stride=50))


def test_track_step_front():
    g = make_grid(-10, 10, 201)
    tr = track_front(_step_trajectory([0.05, 1.05, 2.05], [0, 1, 2], g), 0.5)
    np.testing.assert_allclose(tr.positions, [0.05, 1.05, 2.05], atol=1e-12)
    left = track_front(_step_trajectory([0.05], [0], g), 0.5, "leftmost")
    assert abs(left.positions[0] - 0.05) < 1e-12


def test_track_zero_is_nan():
    g = make_grid(-10, 10, 201)
    traj = Trajectory([0.0], [Field(g, np.zeros(g.n))], "zero")
    assert math.isnan(track_front(traj, 0.5).positions[0])
    with pytest.raises(ValueError):
        track_front(traj, 0.0)


@given(st.floats(-3, 3))
def test_track_translation(shift):
    g = make_grid(-20, 20, 401)
    u = np.exp(-(g.x / 3) ** 2)
    a = track_front(Trajectory([0.0], [Field(g, u)], "a"), 0.5)
    b = track_front(Trajectory([0.0], [Field(g, np.exp(-((g.x - shift) / 3) ** 2))], "b"), 0.5)
    assert abs(b.positions[0] - a.positions[0] - shift) < 2e-3


def test_estimate_speed_linear():
    t = np.linspace(0, 50, 101)
    slope, r2 = estimate_speed(FrontTrace(t, 2 * t + 3, 0.5, "rightmost"))
    assert abs(slope - 2) < 1e-12 and abs(r2 - 1) < 1e-12


def test_estimate_speed_log_correction():
    t = np.linspace(0, 80, 161)
    p = 2 * t - 1.5 * np.log(np.maximum(t, 1e-300))
    p[0] = 0.0
    slope, _ = estimate_speed(FrontTrace(t, p, 0.5, "rightmost"), 0.5)
    w = t >= 40
    ref = np.linalg.lstsq(np.vstack([t[w], np.ones(w.sum())]).T, p[w], rcond=None)[0][0]
    assert abs(slope - ref) < 1e-10 and abs(slope - 1.975) < 5e-3


def test_estimate_speed_edge_cases():
    t = np.arange(40.0)
    slope, r2 = estimate_speed(FrontTrace(t, np.full(40, 4.0), 0.5, "rightmost"))
    assert slope == 0.0 and r2 == 1.0
    with pytest.raises(NumericError):
        estimate_speed(FrontTrace(np.arange(5.0), np.arange(5.0), 0.5, "rightmost"))
    with pytest.raises(NumericError):
        estimate_speed(FrontTrace(t, np.full(40, np.nan), 0.5, "rightmost"))
    with pytest.raises(ValueError):
        estimate_speed(FrontTrace(t, t, 0.5, "rightmost"), 0.0)


def test_fronts_csv_layout():
    tr = FrontTrace(np.array([0.0, 1.0]), np.array([1.0, np.nan]), 0.5, "rightmost")
    lines = fronts_to_csv([tr]).splitlines()
    assert lines[0] == "t,direction,level,component,position"
    assert lines[2].endswith("nan")


def test_fisher_front_speed(fisher_run):
    _, traj = fisher_run
    slope, r2 = estimate_speed(track_front(traj, 0.5))
    assert 1.85 < slope < 2.0 and r2 > 0.99


def test_fisher_spreading_and_annihilation(fisher_run):
    m, traj = fisher_run
    speeds = Speeds(2.0, 2.0)
    v = spreading_verdict(traj, m, speeds, 0.5, 10.0)
    assert v.passed and v.final_error < 0.05
    a = annihilation_verdict(traj, m, speeds, 0.5, 10.0)
    assert a.passed


def test_spreading_error_grows_as_epsilon_shrinks(fisher_run):
    m, traj = fisher_run
    speeds = Speeds(2.0, 2.0)
    errs = [spreading_verdict(traj, m, speeds, e, 10.0).final_error for e in (0.9, 0.6, 0.3, 0.1)]
    assert all(b >= a for a, b in zip(errs, errs[1:]))


def test_verdict_hypothesis_and_config_errors(fisher_run):
    m, traj = fisher_run
    with pytest.raises(HypothesisError, match="theorem hypotheses unmet"):
        spreading_verdict(traj, m.replace(c=2.5), Speeds(2.0, 2.0), 0.2, 10.0)
    with pytest.raises(HypothesisError, match="theorem hypotheses unmet"):
        spreading_verdict(traj, m, Speeds(2.0, 2.0), 1.5, 10.0)
    with pytest.raises(ConfigError):
        spreading_verdict(traj, m, Speeds(2.0, 2.0), 0.2, 31.0)
    with pytest.raises(HypothesisError):
        annihilation_verdict(traj, m, Speeds(2.0, 2.0), 0.0, 10.0)


def test_attractivity_needs_monotone_reaction():
    m = builtin_shifted_ricker(2.0, 5.0)
    assert not m.monotone
    g = make_grid(-20, 20, 201)
    traj = run(m, ic_bump_h(g), SimConfig(0.02, 1.0, snapshot_stride=10))
    with pytest.raises(HypothesisError, match="theorem hypotheses unmet"):
        attractivity_verdict(traj, None, m, Speeds.of(m), 0.1, 0.5)


def test_zero_solution_annihilates():
    m = builtin_shifted_logistic(0.25, 1.0, tau=0.5, c=1.0)
    g = make_grid(-50, 50, 501)
    traj = run(m, ic_constant(g, 0.0), SimConfig(0.02, 5.0, snapshot_stride=50))
    v = annihilation_verdict(traj, m, Speeds.of(m), 0.1, 1.0)
    assert v.passed and v.final_error == 0.0


@pytest.mark.parametrize("model", [builtin_shifted_logistic(0.25, 1.0),
                                   builtin_shifted_ricker(1.5, 2.5)])
def test_minorant_invariants(model):
    spec = build_minorant(model)
    assert check_minorant(spec, model).passed
    root = brentq(lambda u: spec.f_min(np.inf, u) - u, 1e-9, spec.u_star_star)
    assert abs(root - spec.u_inf) < 1e-10
    assert spec.r_minus < 0 < spec.r_plus


def test_majorant_invariants():
    m = builtin_shifted_logistic(0.25, 1.0)
    spec = build_majorant(m, gamma=0.1)
    assert check_majorant(spec, m).passed
    assert abs(spec.limit_plus - (0.1 + 4.0 / 3.0)) < 1e-12
    assert np.all(np.diff(spec.values) <= 0)


def test_majorant_of_linear_reaction():
    m = builtin_shifted_logistic(0.25, 1.0)
    lin = m.replace(f=lambda s, u: (1.0 + 0.5 * (1 + np.tanh(s))) * u, df_du=None)
    spec = build_majorant(lin, u_star_star=1.0, gamma=0.2)
    assert check_majorant(spec, lin).passed
    assert np.all(spec.values >= 2.0 - 1e-12)


def test_envelope_errors():
    with pytest.raises(HypothesisError):
        build_minorant(builtin_shifted_logistic(0.25, 1.0), gamma=5.0)
    with pytest.raises(HypothesisError):
        build_majorant(builtin_shifted_logistic(0.25, 1.0), gamma=-1.0)


def test_sandwich_from_zero():
    m = builtin_shifted_logistic(0.25, 1.0, c=1.0)
    v = sandwich_check(m, ic_constant(make_grid(-20, 20, 201), 0.0), 2.0)
    assert v.passed and max(v.sup_errors) == 0.0


def test_probe_frontier():
    m = builtin_fisher()
    rep = propagation_probe(m, Speeds(2.0, 2.0), 0.3, [0, 10, 15], [0.0], c_grid=[0.0])
    assert rep.frontier["c=0,y=0"] == 10
    first = [r for r in rep.rows if r["n"] == 0][0]
    assert not first["holds"]
