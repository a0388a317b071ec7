"""Uniform 1-D grids, multi-component fields and the delay history buffer."""

from __future__ import annotations

import io
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NumericError


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with ``n`` nodes ``x_i = x_min + i*dx`` on ``[x_min, x_max]``."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ConfigError("grid bounds must be finite")
        if self.x_min >= self.x_max:
            raise ConfigError("inverted bounds: x_min must be < x_max")
        if self.n < 3:
            raise ConfigError("grid needs n >= 3 points")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.n) * self.dx

    @property
    def width(self) -> float:
        return self.x_max - self.x_min


def make_grid(x_min: float, x_max: float, n: int) -> Grid1D:
    return Grid1D(float(x_min), float(x_max), int(n))


def grid_from_spacing(x_min: float, x_max: float, dx: float) -> Grid1D:
    """Grid whose spacing is ``dx`` (the width must be a multiple of ``dx``)."""
    cells = (x_max - x_min) / dx
    k = round(cells)
    if abs(cells - k) > 1e-9 * max(1.0, abs(cells)):
        raise ConfigError(f"domain width {x_max - x_min} is not a multiple of dx={dx}")
    return make_grid(x_min, x_max, k + 1)


@dataclass(frozen=True, eq=False)
class Field:
    """Values of an ``n_components``-vector function on a grid.

    ``values`` has shape ``(n_components, grid.n)`` and is read-only.
    """

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[1] != self.grid.n or v.shape[0] < 1:
            raise ValueError(f"field shape {v.shape} does not match grid with n={self.grid.n}")
        if not np.all(np.isfinite(v)):
            raise NumericError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n_components(self) -> int:
        return self.values.shape[0]

    def component(self, k: int = 0) -> np.ndarray:
        return self.values[k]

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)


def sample_field(grid: Grid1D, fn: Callable, n_components: int = 1) -> Field:
    """Sample ``fn`` at the grid nodes.

    ``fn`` may be vectorised (array in, array out) or scalar; a scalar
    callable returning a sequence of length ``n_components`` also works.
    """
    x = grid.x
    try:
        vals = np.broadcast_to(np.asarray(fn(x), dtype=float), (n_components, grid.n))
    except (TypeError, ValueError):
        pointwise = [np.atleast_1d(np.asarray(fn(xi), dtype=float)) for xi in x]
        vals = np.broadcast_to(np.array(pointwise).T, (n_components, grid.n))
    if not np.all(np.isfinite(vals)):
        raise NumericError("non-finite sample while building field")
    return Field(grid, np.array(vals))


def _shift_array(u: np.ndarray, shift_cells: float) -> np.ndarray:
    # u[..., i] <- u at (i + shift_cells), linear, constant extrapolation
    n = u.shape[-1]
    k = math.floor(shift_cells)
    theta = shift_cells - k
    if theta < 1e-12:
        theta = 0.0
    elif theta > 1.0 - 1e-12:
        k, theta = k + 1, 0.0
    idx = np.arange(n) + k
    lo = np.clip(idx, 0, n - 1)
    if theta == 0.0:
        return u[..., lo]
    hi = np.clip(idx + 1, 0, n - 1)
    return (1.0 - theta) * u[..., lo] + theta * u[..., hi]


def shift_interpolate(f: Field, delta: float) -> Field:
    """Return the field ``x -> f(x + delta)``.

    Linear interpolation between nodes, boundary value held constant outside
    the grid, so the result never leaves ``[min f, max f]``.
    """
    if abs(delta) >= f.grid.width:
        raise ValueError("shift must be smaller than the domain width")
    return Field(f.grid, _shift_array(f.values, delta / f.grid.dx))


def interpolate_at(f: Field, points: np.ndarray, component: int = 0) -> np.ndarray:
    """Evaluate one component at arbitrary points (linear, constant extrapolation)."""
    return np.interp(points, f.grid.x, f.values[component])


def sup_distance(a: Field, b: Field, window: tuple[float, float] | None = None) -> float:
    """Max over components and nodes inside ``window`` of ``|a - b|``."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    x = a.grid.x
    if window is None:
        mask = np.ones(x.shape, dtype=bool)
    else:
        mask = (x >= window[0]) & (x <= window[1])
    if not mask.any():
        raise ValueError("empty window")
    return float(np.max(np.abs(a.values[:, mask] - b.values[:, mask])))


class DelayHistory:
    """Ring buffer of the last ``m+1`` states, spaced ``dt`` apart, with ``tau = m*dt``."""

    def __init__(self, dt: float, tau: float, initial: Field | Sequence[Field]):
        if dt <= 0:
            raise ConfigError("dt must be positive")
        m = round(tau / dt)
        if tau < 0 or abs(m * dt - tau) > 1e-9 * max(1.0, tau):
            raise ConfigError(f"tau={tau} is not an integer multiple of dt={dt}")
        self.dt = dt
        self.tau = tau
        self.m = m
        self.slots: deque[Field] = deque(maxlen=m + 1)
        if isinstance(initial, Field):
            self.slots.extend([initial] * (m + 1))
        else:
            initial = list(initial)
            if len(initial) != m + 1:
                raise ValueError(f"history needs {m + 1} slots, got {len(initial)}")
            self.slots.extend(initial)

    def push(self, f: Field) -> "DelayHistory":
        self.slots.append(f)
        return self

    def at_lag(self, lag: float) -> Field:
        k = round(lag / self.dt)
        if abs(k * self.dt - lag) > 1e-9 * self.dt or not 0 <= k <= self.m:
            raise ValueError(f"lag not on grid: {lag}")
        return self.slots[self.m - k]

    def newest(self) -> Field:
        return self.slots[-1]

    def __len__(self) -> int:
        return len(self.slots)


def history_push(hist: DelayHistory, f: Field) -> DelayHistory:
    return hist.push(f)


def history_at_lag(hist: DelayHistory, lag: float) -> Field:
    return hist.at_lag(lag)


@dataclass
class Trajectory:
    """Snapshots of one run."""

    times: list[float]
    snapshots: list[Field]
    model_id: str
    frame: str = "lab"
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.times) != len(self.snapshots):
            raise ValueError("one snapshot per time")
        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise ValueError("snapshot times must be strictly increasing")

    @property
    def grid(self) -> Grid1D:
        return self.snapshots[0].grid

    @property
    def final(self) -> Field:
        return self.snapshots[-1]

    def append(self, t: float, f: Field) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError("snapshot times must be strictly increasing")
        self.times.append(t)
        self.snapshots.append(f)


# ---------------------------------------------------------------- CSV output

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def field_to_csv(f: Field, xname: str = "x", prefix: str = "u") -> str:
    buf = io.StringIO()
    cols = [xname] + [f"{prefix}{k + 1}" for k in range(f.n_components)]
    buf.write(",".join(cols) + "\n")
    for i, xi in enumerate(f.grid.x):
        buf.write(",".join([_fmt(xi)] + [_fmt(v) for v in f.values[:, i]]) + "\n")
    return buf.getvalue()


def field_from_csv(text: str) -> Field:
    rows = [line.split(",") for line in text.strip().splitlines()]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    x = data[:, 0]
    grid = make_grid(x[0], x[-1], len(x))
    if not np.allclose(grid.x, x, rtol=0, atol=1e-9 * max(1.0, grid.width)):
        raise ValueError("CSV abscissae are not uniformly spaced")
    return Field(grid, data[:, 1:].T)


def trajectory_to_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    ncomp = traj.snapshots[0].n_components
    buf.write(",".join(["t", "x"] + [f"u{k + 1}" for k in range(ncomp)]) + "\n")
    for t, snap in zip(traj.times, traj.snapshots):
        ts = _fmt(t)
        for i, xi in enumerate(snap.grid.x):
            buf.write(",".join([ts, _fmt(xi)] + [_fmt(v) for v in snap.values[:, i]]) + "\n")
    return buf.getvalue()
