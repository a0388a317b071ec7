"""Strang-split time stepping for both model classes.

One step of length ``dt`` is: half a Crank-Nicolson diffusion step, a full
reaction step by explicit midpoint, another half diffusion step.  In the
comoving frame ``z = x - c t`` the advection ``c u_z`` rides along inside the
diffusion operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConfigError, NumericError
from .grid import DelayHistory, Field, Grid1D, Trajectory, _shift_array
from .models import CooperativeModel, ScalarShiftModel

FRAMES = ("lab", "comoving")


@dataclass(frozen=True)
class SimConfig:
    dt: float
    t_end: float
    frame: str = "lab"
    snapshot_stride: int = 1
    boundary: str = "neumann"
    blowup_guard: float = 1e6

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.t_end < 0:
            raise ConfigError("t_end must be nonnegative")
        if self.frame not in FRAMES:
            raise ConfigError(f"frame must be one of {FRAMES}")
        if self.snapshot_stride < 1:
            raise ConfigError("snapshot_stride must be >= 1")
        if self.boundary != "neumann":
            raise ConfigError("only neumann boundaries are supported")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class SimState:
    t: float
    current: Field
    history: DelayHistory | None = None


# ---------------------------------------------------------------- diffusion

@lru_cache(maxsize=64)
def _cn_operator(n: int, dx: float, d: float, c: float, h: float):
    """Banded ``I - h/2 A`` and the three diagonals of ``I + h/2 A``.

    ``A = d D2 + c D1`` with centred differences and reflecting ghost nodes.
    """
    lo = np.full(n, d / dx**2 - c / (2 * dx))  # coefficient of u[i-1]
    up = np.full(n, d / dx**2 + c / (2 * dx))  # coefficient of u[i+1]
    di = np.full(n, -2 * d / dx**2)
    up[0] = 2 * d / dx**2
    lo[-1] = 2 * d / dx**2
    lo[0] = 0.0
    up[-1] = 0.0
    ab = np.zeros((3, n))
    ab[0, 1:] = -0.5 * h * up[:-1]
    ab[1] = 1.0 - 0.5 * h * di
    ab[2, :-1] = -0.5 * h * lo[1:]
    ab.flags.writeable = False
    return ab, 0.5 * h * lo, 1.0 + 0.5 * h * di, 0.5 * h * up


def cn_substeps(d: float, dt: float, dx: float) -> int:
    """Number of CN substeps keeping ``d h / dx^2 <= 1`` (discrete maximum principle)."""
    return max(1, math.ceil(d * dt / dx**2 - 1e-9))


def _diffuse(u: np.ndarray, d: float, dt: float, dx: float, c: float = 0.0) -> np.ndarray:
    k = cn_substeps(d, dt, dx)
    h = dt / k
    ab, lo, di, up = _cn_operator(u.size, dx, d, c, h)
    for _ in range(k):
        rhs = di * u
        rhs[1:] += lo[1:] * u[:-1]
        rhs[:-1] += up[:-1] * u[1:]
        u = solve_banded((1, 1), ab, rhs, check_finite=False)
    return u


def _diffuse_all(u: np.ndarray, ds: np.ndarray, dt: float, dx: float, c: float = 0.0) -> np.ndarray:
    return np.stack([_diffuse(u[k], float(ds[k]), dt, dx, c) for k in range(u.shape[0])])


def diffusion_step(f: Field, d_per_component, dt: float, c: float = 0.0) -> Field:
    """Crank-Nicolson step of ``u_t = d u_xx + c u_x`` per component, Neumann ends.

    Long steps are split so that every substep has ``d h / dx^2 <= 1``;
    together with ``|c| dx <= 2 d`` this keeps the output inside
    ``[min f, max f]``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    ds = np.broadcast_to(np.asarray(d_per_component, dtype=float), (f.n_components,))
    return Field(f.grid, _diffuse_all(np.array(f.values), ds, dt, f.grid.dx, c))


# ---------------------------------------------------------------- reaction substeps

def _react_scalar(v, lag, s_mid, s_start, model: ScalarShiftModel, dt: float):
    mu = model.mu
    f = model.f
    if lag is None:
        k1 = mu * (f(s_start, v) - v)
        vh = v + 0.5 * dt * k1
        return v + dt * mu * (f(s_mid, vh) - vh)
    F = mu * f(s_mid, lag)
    vh = v + 0.5 * dt * (F - mu * v)
    return v + dt * (F - mu * vh)


def _react_system(v, x, model: CooperativeModel, dt: float):
    vh = v + 0.5 * dt * model.f(x, v)
    return v + dt * model.f(x, vh)


def _guard(u: np.ndarray, t: float, threshold: float) -> None:
    if not np.all(np.isfinite(u)):
        raise NumericError(f"non-finite values at t={t:.6g}")
    peak = float(np.max(np.abs(u)))
    if peak > threshold:
        raise NumericError(f"blowup guard tripped at t={t:.6g}: max|u|={peak:.3g} > {threshold:.3g}")


def _lag_field(hist: DelayHistory, model: ScalarShiftModel, frame: str, dx: float) -> np.ndarray | None:
    """Delayed state for the reaction step over ``[t, t+dt]``.

    The two stored slots bracketing ``t + dt/2 - tau`` are averaged; in the
    comoving frame the result is read at ``z + c tau``.
    """
    if hist.m == 0:
        return None
    lag = 0.5 * (hist.at_lag(hist.tau).values[0] + hist.at_lag(hist.tau - hist.dt).values[0])
    if frame == "comoving" and model.c != 0.0:
        lag = _shift_array(lag, model.c * model.tau / dx)
    return lag


def step_scalar_delay(state: SimState, model: ScalarShiftModel, cfg: SimConfig) -> SimState:
    grid = state.current.grid
    dx, dt = grid.dx, cfg.dt
    x = grid.x
    adv = model.c if cfg.frame == "comoving" else 0.0
    t = state.t
    if cfg.frame == "lab":
        s_start, s_mid = x - model.c * t, x - model.c * (t + 0.5 * dt)
    else:
        s_start = s_mid = x
    hist = state.history
    lag = _lag_field(hist, model, cfg.frame, dx)
    v = _diffuse(np.array(state.current.values[0]), model.d, 0.5 * dt, dx, adv)
    v = _react_scalar(v, lag, s_mid, s_start, model, dt)
    v = _diffuse(v, model.d, 0.5 * dt, dx, adv)
    _guard(v, t + dt, cfg.blowup_guard)
    new = Field(grid, v[None, :])
    hist.push(new)
    return SimState(t + dt, new, hist)


def step_cooperative(state: SimState, model: CooperativeModel, cfg: SimConfig) -> SimState:
    if cfg.frame != "lab":
        raise ConfigError("cooperative systems have no shifting frame; use frame = lab")
    grid = state.current.grid
    dt = cfg.dt
    ds = model.diffusivities
    v = _diffuse_all(np.array(state.current.values), ds, 0.5 * dt, grid.dx)
    v = _react_system(v, grid.x, model, dt)
    v = _diffuse_all(v, ds, 0.5 * dt, grid.dx)
    _guard(v, state.t + dt, cfg.blowup_guard)
    return SimState(state.t + dt, Field(grid, v), None)


@dataclass
class _Monitor:
    u_min: float = math.inf
    u_max: float = -math.inf
    boundary_activity: float = 0.0
    edge0: np.ndarray | None = field(default=None, repr=False)

    def update(self, u: np.ndarray) -> None:
        self.u_min = min(self.u_min, float(np.min(u)))
        self.u_max = max(self.u_max, float(np.max(u)))
        edges = np.concatenate([u[:, :10], u[:, -10:]], axis=1)
        if self.edge0 is None:
            self.edge0 = edges.copy()
        self.boundary_activity = max(self.boundary_activity, float(np.max(np.abs(edges - self.edge0))))

    def summary(self) -> dict:
        return dict(u_min=self.u_min, u_max=self.u_max, boundary_activity=self.boundary_activity)


def initial_state(model, ic: Field, cfg: SimConfig, history=None) -> SimState:
    """``history`` optionally lists the states on ``[-tau, 0]`` oldest first;
    by default the history is constant in time and equal to ``ic``."""
    if ic.n_components != model.n_components:
        raise ConfigError(f"initial condition has {ic.n_components} components, model needs {model.n_components}")
    if np.min(ic.values) < 0:
        raise ConfigError("initial condition must be nonnegative")
    if isinstance(model, ScalarShiftModel):
        return SimState(0.0, ic, DelayHistory(cfg.dt, model.tau, ic if history is None else history))
    return SimState(0.0, ic, None)


def run(model, ic: Field, cfg: SimConfig, model_id: str | None = None, history=None) -> Trajectory:
    """Integrate from ``ic`` up to ``t_end``."""
    state = initial_state(model, ic, cfg, history)
    step = step_scalar_delay if isinstance(model, ScalarShiftModel) else step_cooperative
    mon = _Monitor()
    mon.update(ic.values)
    traj = Trajectory([0.0], [ic], model_id or model.kind, cfg.frame)
    n = cfg.n_steps
    for k in range(1, n + 1):
        state = step(state, model, cfg)
        mon.update(state.current.values)
        if k % cfg.snapshot_stride == 0 or k == n:
            traj.append(k * cfg.dt, state.current)
    traj.meta.update(mon.summary(), dt=cfg.dt, steps=n, frame=cfg.frame)
    return traj


def comoving_history(phi: Field, c: float, dt: float, tau: float) -> list[Field]:
    """Comoving-frame history matching a lab-frame history that is constant in time.

    Lab state ``u(theta, x) = phi(x)`` on ``[-tau, 0]`` reads
    ``v(theta, z) = phi(z + c theta)`` in the frame ``z = x - c t``.
    """
    m = int(round(tau / dt))
    return [Field(phi.grid, _shift_array(phi.values, c * (-tau + k * dt) / phi.grid.dx))
            for k in range(m + 1)]


# ---------------------------------------------------------------- initial conditions

def bump_h(x) -> np.ndarray:
    """Plateau 1 on [-1, 1], linear ramps to 0 at +-2."""
    return np.clip(2.0 - np.abs(np.asarray(x, dtype=float)), 0.0, 1.0)


def xi(x, d: float) -> np.ndarray:
    return np.maximum(0.0, np.minimum(1.0, d + 1.0 - np.abs(np.asarray(x, dtype=float))))


def xi_tilde(x, d: float, rho: float) -> np.ndarray:
    ax = np.abs(np.asarray(x, dtype=float))
    return np.minimum(rho, np.maximum(1.0, (rho - 1.0) * ax - rho * d + d + 1.0))


def ic_bump_h(grid: Grid1D, amplitude: float = 1.0, center: float = 0.0, n_components: int = 1) -> Field:
    return Field(grid, np.tile(amplitude * bump_h(grid.x - center), (n_components, 1)))


def ic_xi(grid: Grid1D, d: float, amplitude: float = 1.0) -> Field:
    if d <= 0:
        raise ValueError("d must be positive")
    return Field(grid, amplitude * xi(grid.x, d))


def ic_xi_tilde(grid: Grid1D, d: float, rho: float, amplitude: float = 1.0) -> Field:
    if d <= 0:
        raise ValueError("d must be positive")
    if rho < 1:
        raise ValueError("rho must be >= 1")
    return Field(grid, amplitude * xi_tilde(grid.x, d, rho))


def ic_constant(grid: Grid1D, value, n_components: int = 1) -> Field:
    vals = np.broadcast_to(np.asarray(value, dtype=float).reshape(-1, 1), (n_components, grid.n))
    return Field(grid, np.array(vals))
