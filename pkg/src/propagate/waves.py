"""Forced waves and steady states as long-time equilibria of the comoving flow.

Relaxation starts from a constant supersolution ``r**`` slightly above every
equilibrium and runs until the state stops moving.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .grid import Field, Grid1D, _shift_array
from .models import CooperativeModel, ScalarShiftModel
from .sim import SimConfig, SimState, initial_state, step_cooperative, step_scalar_delay

HEADROOM = 1.05
BOUNDARY_CELLS = 10
TAIL_FRACTION = 0.05


@dataclass
class WaveProfile:
    grid: Grid1D
    values: Field
    speed: float
    residual_sup: float
    tail_plus: np.ndarray
    tail_minus: np.ndarray
    converged: bool
    iterations: int
    time_used: float  # simulated relaxation time
    drift: float
    oscillating: bool = False
    max_increase: float = 0.0
    drift_history: list[float] = field(default_factory=list, repr=False)

    def report(self) -> dict:
        return dict(speed=self.speed, residual_sup=self.residual_sup,
                    tail_plus=np.atleast_1d(self.tail_plus).tolist(),
                    tail_minus=np.atleast_1d(self.tail_minus).tolist(),
                    converged=self.converged, iterations=self.iterations,
                    time_used=self.time_used, drift=self.drift,
                    oscillating=self.oscillating, max_increase=self.max_increase)


def tail_windows(n: int) -> tuple[slice, slice]:
    """Index ranges of the left and right tail windows (outer 5% of interior cells)."""
    interior = n - 2 * BOUNDARY_CELLS
    if interior < 20:
        raise ConfigError("grid too small for tail windows; need more than 40 points")
    k = max(1, int(round(TAIL_FRACTION * interior)))
    return (slice(BOUNDARY_CELLS, BOUNDARY_CELLS + k),
            slice(n - BOUNDARY_CELLS - k, n - BOUNDARY_CELLS))


def tails(f: Field) -> tuple[np.ndarray, np.ndarray]:
    left, right = tail_windows(f.grid.n)
    return f.values[:, right].mean(axis=1), f.values[:, left].mean(axis=1)


def supersolution_level(model) -> float:
    levels = [np.max(model.u_star("+")), np.max(model.u_star("-"))]
    if isinstance(model, ScalarShiftModel):
        levels.append(model.cap)
    return HEADROOM * float(max(levels))


def steady_residual(profile: WaveProfile | Field, model) -> float:
    """Sup over interior nodes of the discrete steady comoving equation."""
    W = profile.values if isinstance(profile, WaveProfile) else profile
    grid = W.grid
    if grid.n < 7:
        raise ValueError("need at least 5 interior points")
    u = W.values
    dx = grid.dx
    x = grid.x
    d2 = (u[:, 2:] - 2 * u[:, 1:-1] + u[:, :-2]) / dx**2
    if isinstance(model, ScalarShiftModel):
        d1 = (u[0, 2:] - u[0, :-2]) / (2 * dx)
        lag = _shift_array(u[0], model.c * model.tau / dx)
        r = (model.d * d2[0] + model.c * d1 - model.mu * u[0, 1:-1]
             + model.mu * model.f(x[1:-1], lag[1:-1]))
        return float(np.max(np.abs(r)))
    rhs = model.f(x, u)
    r = model.diffusivities[:, None] * d2 + rhs[:, 1:-1]
    return float(np.max(np.abs(r)))


def _relax(model, grid: Grid1D, tol_steady: float, t_max: float, dt: float, ic: Field | None,
           frame: str, step) -> WaveProfile:
    n_comp = model.n_components
    if ic is None:
        ic = Field(grid, np.full((n_comp, grid.n), supersolution_level(model)))
    cfg = SimConfig(dt=dt, t_end=t_max, frame=frame, blowup_guard=np.inf)
    state: SimState = initial_state(model, ic, cfg)
    per_unit = int(round(1.0 / dt))
    if abs(per_unit * dt - 1.0) > 1e-9:
        raise ConfigError("dt must divide the unit check interval")
    checks = [np.array(ic.values)]
    drifts: list[float] = []
    max_inc = -np.inf
    converged = oscillating = False
    n_units = int(np.floor(t_max + 1e-9))
    for unit in range(1, n_units + 1):
        for _ in range(per_unit):
            state = step(state, model, cfg)
        cur = np.array(state.current.values)
        delta = cur - checks[-1]
        drifts.append(float(np.max(np.abs(delta))))
        max_inc = max(max_inc, float(np.max(delta)))
        checks.append(cur)
        if len(checks) > 3:
            checks.pop(0)
        if drifts[-1] < tol_steady:
            converged = True
            break
        # period two: state returns after two checks while single-step drift stays large
        if len(checks) == 3 and unit > 10:
            back = float(np.max(np.abs(checks[2] - checks[0])))
            if back < 0.1 * drifts[-1] and drifts[-1] >= 0.5 * drifts[-2]:
                oscillating = True
    W = state.current
    tp, tm = tails(W)
    c = model.c if isinstance(model, ScalarShiftModel) else 0.0
    prof = WaveProfile(grid=grid, values=W, speed=float(c), residual_sup=0.0,
                       tail_plus=tp, tail_minus=tm, converged=converged,
                       iterations=len(drifts), time_used=float(len(drifts)),
                       drift=drifts[-1] if drifts else np.inf, oscillating=oscillating,
                       max_increase=max_inc, drift_history=drifts)
    prof.residual_sup = steady_residual(prof, model)
    return prof


def solve_forced_wave(model: ScalarShiftModel, grid: Grid1D, tol_steady: float = 1e-8,
                      t_max: float = 2000.0, dt: float = 0.02, ic: Field | None = None) -> WaveProfile:
    """Profile ``W(z)`` with ``u(t, x) = W(x - c t)``, by comoving relaxation.

    ``ic`` defaults to the constant supersolution ``1.05 * max(u*_+, u*_-, cap)``.
    """
    if not isinstance(model, ScalarShiftModel):
        raise TypeError("solve_forced_wave needs a scalar model; use solve_steady_state")
    return _relax(model, grid, tol_steady, t_max, dt, ic, "comoving", step_scalar_delay)


def solve_steady_state(model: CooperativeModel, grid: Grid1D, tol_steady: float = 1e-8,
                       t_max: float = 2000.0, dt: float = 0.02, ic: Field | None = None) -> WaveProfile:
    if not isinstance(model, CooperativeModel):
        raise TypeError("solve_steady_state needs a cooperative system")
    return _relax(model, grid, tol_steady, t_max, dt, ic, "lab", step_cooperative)
