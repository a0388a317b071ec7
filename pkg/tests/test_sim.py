import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import delayed_ode
from scipy.integrate import solve_ivp

from propagate.errors import ConfigError, NumericError
from propagate.grid import Field, interpolate_at, make_grid
from propagate.models import builtin_cooperative_pair, builtin_fisher, builtin_shifted_logistic
from propagate.sim import (SimConfig, bump_h, cn_substeps, comoving_history, diffusion_step,
                           ic_bump_h, ic_constant, ic_xi, ic_xi_tilde, run, xi, xi_tilde)


def test_diffusion_keeps_constants():
    g = make_grid(-5, 5, 101)
    f = Field(g, np.vstack([np.full(g.n, 0.3), np.full(g.n, 7.0)]))
    out = diffusion_step(f, [1.0, 0.25], 0.37)
    assert np.max(np.abs(out.values - f.values)) < 1e-12


@given(st.lists(st.floats(0, 1), min_size=51, max_size=51), st.floats(0.001, 2.0), st.floats(0.05, 3.0))
def test_diffusion_maximum_principle(vals, dt, d):
    g = make_grid(0, 5, 51)
    f = Field(g, np.array(vals))
    out = diffusion_step(f, d, dt).values
    assert out.min() >= f.values.min() - 1e-12 and out.max() <= f.values.max() + 1e-12


def test_diffusion_with_advection_maximum_principle():
    g = make_grid(-10, 10, 201)
    f = ic_bump_h(g)
    out = diffusion_step(f, 1.0, 0.02, c=1.5).values
    assert out.min() >= -1e-12 and out.max() <= 1 + 1e-12


def test_heat_kernel():
    g = make_grid(-10, 10, 401)
    x = g.x
    f = Field(g, np.exp(-x**2 / 1.0) / math.sqrt(math.pi))
    for _ in range(100):
        f = diffusion_step(f, 1.0, 0.01)
    exact = np.exp(-x**2 / 5.0) / math.sqrt(5 * math.pi)
    assert np.max(np.abs(f.values[0] - exact)) < 1e-3


def test_cn_symbol_for_cosine_mode():
    L = 20.0
    g = make_grid(0, L, 801)
    k = 2 * math.pi / L * 3
    f = Field(g, np.cos(k * g.x))
    dt = 0.01
    out = diffusion_step(f, 1.0, dt)
    symbol = (1 - 0.5 * k * k * dt) / (1 + 0.5 * k * k * dt)
    assert np.max(np.abs(out.values[0] - symbol * f.values[0])) < 1e-5


def test_cn_substeps():
    assert cn_substeps(1.0, 0.01, 0.1) == 1
    assert cn_substeps(1.0, 0.05, 0.1) == 5


def test_constant_state_matches_delayed_ode():
    mu, tau, u0 = 3.0, 0.5, 0.1
    m = builtin_fisher(r=1.0, mu=mu, tau=tau)
    oracle = delayed_ode(lambda v: v + v * (1 - v) / mu, mu, tau, u0, 10.0)
    tr = run(m, ic_constant(make_grid(-1, 1, 5), u0), SimConfig(0.01, 10.0, snapshot_stride=10))
    err = max(abs(s.values[0, 2] - oracle(t)) for t, s in zip(tr.times, tr.snapshots))
    assert err < 1e-4


def test_equilibria_fixed():
    m = builtin_fisher(tau=0.5)
    g = make_grid(-5, 5, 51)
    tr = run(m, ic_constant(g, 1.0), SimConfig(0.01, 1.0))
    drift = max(np.max(np.abs(b.values - a.values)) for a, b in zip(tr.snapshots, tr.snapshots[1:]))
    assert drift < 1e-10
    zero = run(builtin_shifted_logistic(0.25, 1.0, tau=0.5, c=1.0), ic_constant(g, 0.0), SimConfig(0.02, 2.0))
    assert np.all(zero.final.values == 0.0)


def test_cooperative_constant_matches_ode():
    m = builtin_cooperative_pair((0.5, 0.5), (1.0, 1.0), 0.3)
    g = make_grid(-1, 1, 5)
    ic = Field(g, np.vstack([np.full(5, 0.2), np.full(5, 0.05)]))
    tr = run(m, ic, SimConfig(0.01, 5.0, snapshot_stride=100))
    ref = solve_ivp(lambda t, u: m.f_plus(u) if False else m.f(0.0, u), (0, 5), [0.2, 0.05],
                    rtol=1e-12, atol=1e-14)
    assert np.max(np.abs(tr.final.values[:, 2] - ref.y[:, -1])) < 1e-5


def test_comparison_principle_random_pairs():
    rng = np.random.default_rng(7)
    m = builtin_shifted_logistic(0.25, 1.0, tau=0.5, c=1.0)
    g = make_grid(-20, 20, 201)
    cfg = SimConfig(0.02, 10.0, snapshot_stride=50)
    for _ in range(5):
        lo = np.clip(rng.random(g.n) * bump_h(g.x / 5), 0, 1)
        hi = np.clip(lo + 0.3 * rng.random(g.n), 0, 1)
        a, b = run(m, Field(g, lo), cfg), run(m, Field(g, hi), cfg)
        for sa, sb in zip(a.snapshots, b.snapshots):
            assert np.all(sa.values <= sb.values + 1e-8)


def test_frame_equivalence():
    m = builtin_shifted_logistic(0.25, 1.0, tau=0.5, c=0.5)
    g = make_grid(-60, 60, 1201)
    ic = ic_bump_h(g, 0.5)
    lab = run(m, ic, SimConfig(0.02, 10.0, snapshot_stride=500))
    hist = comoving_history(ic, 0.5, 0.02, 0.5)
    co = run(m, ic, SimConfig(0.02, 10.0, frame="comoving", snapshot_stride=500), history=hist)
    z = g.x
    inner = np.abs(z) < 40
    lab_at_z = interpolate_at(lab.final, z + 0.5 * 10.0)
    assert np.max(np.abs(lab_at_z - co.final.values[0])[inner]) < 5e-3


def test_box_invariance_logistic():
    m = builtin_shifted_logistic(0.25, 1.0, tau=0.5, c=1.5)
    g = make_grid(-30, 60, 451)
    tr = run(m, ic_bump_h(g), SimConfig(0.02, 15.0, snapshot_stride=25))
    assert tr.meta["u_min"] >= -1e-8 and tr.meta["u_max"] <= m.cap + 1e-8


def test_run_metadata_and_stride():
    g = make_grid(-10, 10, 101)
    tr = run(builtin_fisher(), ic_bump_h(g), SimConfig(0.05, 1.0, snapshot_stride=4))
    assert tr.times == pytest.approx([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert tr.meta["steps"] == 20 and tr.meta["frame"] == "lab"


def test_guards_and_config_errors():
    g = make_grid(-10, 10, 101)
    with pytest.raises(NumericError, match="blowup"):
        run(builtin_fisher(), ic_bump_h(g), SimConfig(0.05, 1.0, blowup_guard=0.5))
    with pytest.raises(ConfigError):
        SimConfig(0.0, 1.0)
    with pytest.raises(ConfigError):
        SimConfig(0.1, 1.0, frame="rotating")
    with pytest.raises(ConfigError):
        run(builtin_fisher(tau=0.5), ic_bump_h(g), SimConfig(0.3, 1.0))
    pair = builtin_cooperative_pair(1.0, 1.0, 0.3)
    with pytest.raises(ConfigError):
        run(pair, ic_bump_h(g, n_components=2), SimConfig(0.02, 1.0, frame="comoving"))
    with pytest.raises(ConfigError):
        run(pair, ic_bump_h(g), SimConfig(0.02, 1.0))


def test_initial_condition_shapes():
    assert bump_h(np.array([0.0, 1.0, 1.5, 2.0, -3.0])).tolist() == [1.0, 1.0, 0.5, 0.0, 0.0]
    assert xi(np.array([0.0, 2.0, 2.5, 4.0]), 2.0).tolist() == [1.0, 1.0, 0.5, 0.0]
    v = xi_tilde(np.array([0.0, 2.0, 2.5, 10.0]), 2.0, 3.0)
    assert v.tolist() == [1.0, 1.0, 2.0, 3.0]
    g = make_grid(-5, 5, 11)
    assert ic_xi(g, 1.0).values.max() == 1.0
    assert ic_xi_tilde(g, 1.0, 2.0).values.max() == 2.0
    with pytest.raises(ValueError):
        ic_xi_tilde(g, 1.0, 0.5)
