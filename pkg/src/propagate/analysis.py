"""Front tracking, limit-statement verdicts, reaction envelopes and comparison tests."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, HypothesisError, NumericError
from .grid import Field, Grid1D, Trajectory, interpolate_at
from .models import CooperativeModel, ScalarShiftModel
from .sim import SimConfig, bump_h, run
from .speeds import Speeds
from .waves import WaveProfile

SPREAD_TOL = 0.05
ANNIHILATION_TOL = 0.01
SANDWICH_TOL = 1e-8
SAMPLE_TOL = 1e-12
# slack allowed when checking that sup-errors do not increase, relative to tol
MONOTONE_SLACK = 1e-3


# ---------------------------------------------------------------- fronts

@dataclass
class FrontTrace:
    times: np.ndarray
    positions: np.ndarray  # nan where the level is not crossed
    level: float
    direction: str
    component: int = 0

    def valid(self) -> tuple[np.ndarray, np.ndarray]:
        ok = np.isfinite(self.positions)
        return self.times[ok], self.positions[ok]


def _crossing(x: np.ndarray, u: np.ndarray, level: float, direction: str) -> float:
    above = u >= level
    idx = np.nonzero(above[:-1] != above[1:])[0]
    if idx.size == 0:
        return math.nan
    i = idx[-1] if direction == "rightmost" else idx[0]
    u0, u1 = u[i], u[i + 1]
    return float(x[i] + (level - u0) / (u1 - u0) * (x[i + 1] - x[i]))


def track_front(traj: Trajectory, level: float, direction: str = "rightmost",
                component: int = 0) -> FrontTrace:
    """Outermost crossing of ``level`` per snapshot, linearly interpolated."""
    if direction not in ("rightmost", "leftmost"):
        raise ValueError("direction must be 'rightmost' or 'leftmost'")
    if level <= 0:
        raise ValueError("level must be positive")
    x = traj.grid.x
    pos = [_crossing(x, s.values[component], level, direction) for s in traj.snapshots]
    return FrontTrace(np.asarray(traj.times, dtype=float), np.array(pos), level, direction, component)


def estimate_speed(trace: FrontTrace, window_fraction: float = 0.4) -> tuple[float, float]:
    """Least-squares slope and r^2 over the final ``window_fraction`` of the time span."""
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must be in (0, 1]")
    t, p = trace.valid()
    if t.size == 0:
        raise NumericError("front never crossed the level")
    t0 = t[-1] - window_fraction * (t[-1] - trace.times[0])
    keep = t >= t0 - 1e-12
    t, p = t[keep], p[keep]
    if t.size < 10:
        raise NumericError(f"need at least 10 front positions in the window, have {t.size}")
    tm, pm = t.mean(), p.mean()
    stt = np.sum((t - tm) ** 2)
    slope = float(np.sum((t - tm) * (p - pm)) / stt)
    resid = p - pm - slope * (t - tm)
    spp = float(np.sum((p - pm) ** 2))
    r2 = 1.0 if spp == 0.0 else 1.0 - float(np.sum(resid**2)) / spp
    return slope, r2


def fronts_to_csv(traces: list[FrontTrace]) -> str:
    lines = ["t,direction,level,component,position"]
    for tr in traces:
        for t, p in zip(tr.times, tr.positions):
            lines.append(f"{t:.17g},{tr.direction},{tr.level:.17g},{tr.component},{p:.17g}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- verdicts

@dataclass
class Verdict:
    clause: str
    region: str
    sup_errors: list[float]
    times: list[float]
    tolerance: float
    passed: bool
    flags: list[str] = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    @property
    def final_error(self) -> float:
        return self.sup_errors[-1] if self.sup_errors else 0.0

    def as_dict(self) -> dict:
        return dict(clause=self.clause, region=self.region, tolerance=self.tolerance,
                    passed=self.passed, final_error=self.final_error,
                    times=list(self.times), sup_errors=list(self.sup_errors),
                    flags=list(self.flags), detail=self.detail)


def _limit_pass(errors: list[float], tol: float) -> bool:
    if not errors or errors[-1] > tol:
        return False
    tail = errors[-3:]
    return all(b <= a + MONOTONE_SLACK * tol for a, b in zip(tail, tail[1:]))


def _eval_times(traj: Trajectory, t_min: float) -> list[int]:
    if t_min > traj.times[-1]:
        raise ConfigError(f"t_min={t_min} is after the last snapshot t={traj.times[-1]}")
    return [k for k, t in enumerate(traj.times) if t >= t_min]


def _in_intervals(x: np.ndarray, intervals) -> np.ndarray:
    mask = np.zeros(x.shape, dtype=bool)
    for lo, hi in intervals:
        if lo <= hi:
            mask |= (x >= lo) & (x <= hi)
    return mask


def _u_star_max(model) -> float:
    return float(np.max(model.u_star("+")))


def spreading_intervals(model, speeds: Speeds, epsilon: float, alpha: float = 0.0):
    """Unit-time region as ``t -> [(lo, hi), ...]`` for the spreading clause."""
    if isinstance(model, CooperativeModel):
        def region(t):
            return [(alpha, t * (speeds.plus - epsilon)), (t * (-speeds.minus + epsilon), -alpha)]
        return region
    c = model.c

    def region(t):
        return [(t * (-speeds.minus + epsilon), t * (min(c, speeds.minus) - epsilon)),
                (t * (c + epsilon), t * (speeds.plus - epsilon))]
    return region


def spreading_verdict(traj: Trajectory, model, speeds: Speeds, epsilon: float, t_min: float,
                      tol: float | None = None, alpha: float | None = None) -> Verdict:
    """Sup-error to the two-state target on the expanding spreading region.

    The target is ``u*_+`` right of ``x = c t`` and ``u*_-`` left of it.
    Cooperative systems exclude ``|x| < alpha`` around the habitat transition.
    """
    if epsilon <= 0:
        raise HypothesisError("epsilon must be positive")
    scalar = isinstance(model, ScalarShiftModel)
    c = model.c if scalar else 0.0
    if scalar:
        if not c < speeds.plus:
            raise HypothesisError(f"theorem hypotheses unmet: need c < c*(+inf), have c={c:g} "
                                  f">= {speeds.plus:.6g}")
        bound = 0.5 * min(speeds.minus, speeds.plus - c)
        if not epsilon < bound:
            raise HypothesisError(f"theorem hypotheses unmet: epsilon={epsilon:g} must be below "
                                  f"{bound:.6g}")
        alpha = 0.0
    elif alpha is None:
        alpha = 20.0 * model.width
    tol = SPREAD_TOL * _u_star_max(model) if tol is None else tol
    region = spreading_intervals(model, speeds, epsilon, alpha)
    x = traj.grid.x
    up = np.asarray(model.u_star("+"), dtype=float).reshape(-1, 1)
    um = np.asarray(model.u_star("-"), dtype=float).reshape(-1, 1)
    errs, times, flags = [], [], []
    for k in _eval_times(traj, t_min):
        t = traj.times[k]
        ivals = region(t)
        mask = _in_intervals(x, ivals)
        if not mask.any():
            if not times:
                raise ConfigError("spreading region is empty at t_min; extend domain or t_min")
            continue
        if any(lo < x[0] or hi > x[-1] for lo, hi in ivals if lo <= hi):
            if "region truncated by domain" not in flags:
                flags.append("region truncated by domain")
        target = np.where(x - c * t > 0, up, um)
        u = traj.snapshots[k].values
        errs.append(float(np.max(np.abs(u - target)[:, mask])))
        times.append(t)
    desc = (f"t*[-c*(-inf)+eps, min(c,c*(-inf))-eps] U t*[c+eps, c*(+inf)-eps], c={c:g}, eps={epsilon:g}"
            if scalar else f"[alpha, t(c*(+inf)-eps)] U [t(-c*(-inf)+eps), -alpha], alpha={alpha:g}")
    return Verdict("spreading", desc, errs, times, tol, _limit_pass(errs, tol), flags,
                   dict(c_star_plus=speeds.plus, c_star_minus=speeds.minus, epsilon=epsilon))


def annihilation_verdict(traj: Trajectory, model, speeds: Speeds, epsilon: float, t_min: float,
                         tol: float | None = None) -> Verdict:
    """Sup of ``|u|`` beyond ``t(max(c, c*(+inf)) + eps)`` and below ``-t(c*(-inf) + eps)``."""
    if epsilon <= 0:
        raise HypothesisError("epsilon must be positive")
    ic = traj.snapshots[0].values
    x = traj.grid.x
    if np.any(ic[:, 10:-10] > 0) and (np.any(ic[:, :10] > 0) or np.any(ic[:, -10:] > 0)):
        raise HypothesisError("theorem hypotheses unmet: initial data must have compact support")
    c = float(getattr(model, "c", 0.0))
    tol = ANNIHILATION_TOL * _u_star_max(model) if tol is None else tol
    right_speed = max(c, speeds.plus) + epsilon
    left_speed = speeds.minus + epsilon
    errs, times, flags = [], [], []
    for k in _eval_times(traj, t_min):
        t = traj.times[k]
        mask = (x >= t * right_speed) | (x <= -t * left_speed)
        if t * right_speed > x[-1] or -t * left_speed < x[0]:
            if "region partly outside domain" not in flags:
                flags.append("region partly outside domain")
        u = traj.snapshots[k].values
        errs.append(float(np.max(np.abs(u[:, mask]))) if mask.any() else 0.0)
        times.append(t)
    ok = bool(errs) and errs[-1] <= tol
    return Verdict("annihilation", f"x >= {right_speed:g} t or x <= -{left_speed:g} t",
                   errs, times, tol, ok, flags,
                   dict(c_star_plus=speeds.plus, c_star_minus=speeds.minus, epsilon=epsilon))


def attractivity_verdict(traj: Trajectory, wave: WaveProfile, model, speeds: Speeds, epsilon: float,
                         t_min: float, tol: float | None = None) -> Verdict:
    """Sup of ``|u(t, x) - W(x - c t)|`` on ``t(-c*(-inf)+eps) <= x <= t(c*(+inf)-eps)``."""
    c = float(getattr(model, "c", 0.0))
    problems = []
    if not (model.monotone and model.subhomogeneous):
        problems.append("f must be nondecreasing and subhomogeneous in u")
    if not c < min(speeds.plus, speeds.minus):
        problems.append(f"need c < min(c*(+inf), c*(-inf)) = {min(speeds.plus, speeds.minus):.6g}, "
                        f"have c={c:g}")
    elif not 0 < epsilon < min(speeds.plus - c, speeds.minus + c):
        problems.append("epsilon outside the admissible range")
    if problems:
        raise HypothesisError("theorem hypotheses unmet: " + "; ".join(problems))
    tol = SPREAD_TOL * _u_star_max(model) if tol is None else tol
    x = traj.grid.x
    errs, times = [], []
    for k in _eval_times(traj, t_min):
        t = traj.times[k]
        mask = (x >= t * (-speeds.minus + epsilon)) & (x <= t * (speeds.plus - epsilon))
        if not mask.any():
            if not times:
                raise ConfigError("attractivity region is empty at t_min; extend domain or t_min")
            continue
        u = traj.snapshots[k].values
        W = np.stack([interpolate_at(wave.values, x - c * t, j) for j in range(u.shape[0])])
        errs.append(float(np.max(np.abs(u - W)[:, mask])))
        times.append(t)
    return Verdict("attractivity", f"{-speeds.minus + epsilon:g} t <= x <= {speeds.plus - epsilon:g} t",
                   errs, times, tol, _limit_pass(errs, tol), [],
                   dict(c_star_plus=speeds.plus, c_star_minus=speeds.minus, epsilon=epsilon))


def wave_tail_verdict(wave: WaveProfile, model, tol: float = 1e-3) -> Verdict:
    err = max(float(np.max(np.abs(wave.tail_plus - np.asarray(model.u_star("+"))))),
              float(np.max(np.abs(wave.tail_minus - np.asarray(model.u_star("-"))))))
    flags = [] if wave.converged else ["relaxation did not converge"]
    if wave.oscillating:
        flags.append("period-two oscillation detected")
    return Verdict("wave-tails", "outer 5% of interior cells on each side", [err], [wave.time_used],
                   tol, wave.converged and err <= tol, flags, wave.report())


# ---------------------------------------------------------------- envelopes

def _limit_slope(model: ScalarShiftModel, u):
    h = 1e-7
    f = model.f_plus
    return (f(u + h) - f(np.maximum(u - h, 0.0))) / (u + h - np.maximum(u - h, 0.0))


@dataclass
class MinorantSpec:
    u_star_star: float
    gamma: float
    K: float
    s_frak: float
    delta1: float
    f_star: float
    b: float

    def r(self, s):
        s = np.asarray(s, dtype=float)
        ramp = ((self.b - self.gamma) * (s - self.s_frak) - 1.0) / self.K
        return np.where(s <= self.s_frak, -1.0 / self.K,
                        np.where(s >= self.s_frak + 1.0, self.r_plus, ramp))

    @property
    def r_minus(self) -> float:
        return -1.0 / self.K

    @property
    def r_plus(self) -> float:
        return (self.b - 1.0 - self.gamma) / self.K

    def f_min(self, s, u):
        q = 1.0 + self.K * self.r(s)
        u = np.asarray(u, dtype=float)
        return np.where(u >= q / (2 * self.K), q * q / (4 * self.K), q * u - self.K * u * u)

    @property
    def u_inf(self) -> float:
        """Positive fixed point of ``f_min(+inf, .)``."""
        kr = self.K * self.r_plus
        return (1.0 + kr) ** 2 / (4 * self.K) if kr > 1 else self.r_plus


def build_minorant(model: ScalarShiftModel, u_star_star: float | None = None,
                   gamma: float | None = None, n_samples: int = 2000) -> MinorantSpec:
    """Monotone, subhomogeneous lower reaction ``f_min <= f`` on ``[0, u**]``."""
    if not isinstance(model, ScalarShiftModel):
        raise TypeError("envelopes are built for scalar models")
    b = model.b_plus
    if b <= 1:
        raise HypothesisError("growth at the favourable end requires f'_+(0) > 1")
    gamma = 0.5 * (b - 1.0) if gamma is None else gamma
    if not 0 < gamma < b - 1:
        raise HypothesisError(f"gamma must lie in (0, {b - 1:g})")
    uss = float(model.cap) if u_star_star is None else float(u_star_star)
    u = np.linspace(0.0, uss, n_samples)
    good = _limit_slope(model, u) > b - gamma / 3
    if not good[0]:
        raise NumericError("limit slope at 0 does not match f'_+(0)")
    delta1 = float(u[-1] if good.all() else u[np.argmin(good) - 1])
    if delta1 <= 0:
        raise NumericError("delta_1 collapsed to 0; refine sampling")
    w = model.width
    s = np.linspace(-50 * w, 50 * w, 4001)
    uu = np.linspace(0.0, delta1, 101)
    S, U = np.meshgrid(s, uu, indexing="ij")
    ok = np.all(model.dfdu(S, U) > b - 2 * gamma / 3, axis=1)
    if not ok[-1]:
        raise HypothesisError("slope condition not reached within 50 transition widths")
    bad = np.nonzero(~ok)[0]
    s_frak = float(s[bad[-1] + 1] if bad.size else s[0])
    s2 = np.linspace(s_frak, s_frak + 50 * w, 1001)
    u2 = np.linspace(delta1, uss, 201)
    S2, U2 = np.meshgrid(s2, u2, indexing="ij")
    f_star = float(np.min(model.f(S2, U2)))
    if f_star <= 0:
        raise HypothesisError("positivity fails: f vanishes on the sampled positivity region")
    K = b * b / (4 * f_star)
    return MinorantSpec(u_star_star=uss, gamma=gamma, K=K, s_frak=s_frak, delta1=delta1,
                        f_star=f_star, b=b)


@dataclass
class MajorantSpec:
    s_nodes: np.ndarray
    values: np.ndarray
    gamma: float
    u_star_star: float

    def R_bar(self, s):
        # left-node step function: nonincreasing and never below the sampled envelope
        s = np.asarray(s, dtype=float)
        i = np.clip(np.searchsorted(self.s_nodes, s, side="right") - 1, 0, self.s_nodes.size - 1)
        return self.values[i]

    @property
    def limit_plus(self) -> float:
        return float(self.values[-1])

    @property
    def limit_minus(self) -> float:
        return float(self.values[0])


def build_majorant(model: ScalarShiftModel, u_star_star: float | None = None,
                   gamma: float | None = None, n_s: int = 4001, n_u: int = 400) -> MajorantSpec:
    """Nonincreasing ``R_bar`` with ``f(s, u) <= R_bar(s) u`` on ``[0, u**]``."""
    if not isinstance(model, ScalarShiftModel):
        raise TypeError("envelopes are built for scalar models")
    gamma = 0.5 * (model.b_plus - 1.0) if gamma is None else gamma
    if gamma <= 0:
        raise HypothesisError("gamma must be positive")
    uss = float(model.cap) if u_star_star is None else float(u_star_star)
    w = model.width
    s = np.linspace(-60 * w, 60 * w, n_s)
    u = np.geomspace(1e-8 * uss, uss, n_u)
    S, U = np.meshgrid(s, u, indexing="ij")
    ratio = np.max(model.f(S, U) / U, axis=1)
    ratio = np.maximum(ratio, model.dfdu(s, np.zeros_like(s)))
    if not np.all(np.isfinite(ratio)):
        raise NumericError("envelope unbounded: f/u blows up")
    g = np.maximum(gamma + model.b_plus, ratio)
    vals = np.maximum.accumulate(g[::-1])[::-1]
    return MajorantSpec(s_nodes=s, values=vals, gamma=gamma, u_star_star=uss)


@dataclass
class EnvelopeCheck:
    n_samples: int
    worst: dict

    @property
    def passed(self) -> bool:
        return all(v <= SAMPLE_TOL for v in self.worst.values())


def _sample_box(model, spec_uss: float, s_lo: float, s_hi: float, n: int):
    s = np.linspace(s_lo, s_hi, n)
    u = np.linspace(0.0, spec_uss, n)
    return np.meshgrid(s, u, indexing="ij")


def check_minorant(spec: MinorantSpec, model: ScalarShiftModel, n: int = 200) -> EnvelopeCheck:
    """Sampled ``f_min <= f``, monotonicity in ``s`` and ``u``, subhomogeneity (``n*n`` points)."""
    w = model.width
    S, U = _sample_box(model, spec.u_star_star, spec.s_frak - 20 * w, spec.s_frak + 30 * w, n)
    fm = spec.f_min(S, U)
    worst = {
        "f_min <= f": float(np.max(fm - model.f(S, U))),
        "nondecreasing in s": float(np.max(-np.diff(fm, axis=0))),
        "nondecreasing in u": float(np.max(-np.diff(fm, axis=1))),
    }
    sub = 0.0
    for a in np.linspace(0.0, 1.0, 11):
        sub = max(sub, float(np.max(a * fm - spec.f_min(S, a * U))))
    worst["subhomogeneous"] = sub
    worst["r monotone"] = float(np.max(-np.diff(spec.r(S[:, 0]))))
    return EnvelopeCheck(S.size, worst)


def check_majorant(spec: MajorantSpec, model: ScalarShiftModel, n: int = 200) -> EnvelopeCheck:
    w = model.width
    S, U = _sample_box(model, spec.u_star_star, -60 * w, 60 * w, n)
    R = spec.R_bar(S)
    worst = {
        "f <= R_bar u": float(np.max(model.f(S, U) - R * U)),
        "R_bar nonincreasing": float(np.max(np.diff(R[:, 0]))),
    }
    return EnvelopeCheck(S.size, worst)


def minorant_model(model: ScalarShiftModel, spec: MinorantSpec) -> ScalarShiftModel:
    b = spec.b - spec.gamma
    return model.replace(f=spec.f_min, f_plus=lambda u: spec.f_min(np.inf, u),
                         f_minus=lambda u: spec.f_min(-np.inf, u), b_plus=b, b_minus=0.0,
                         u_star_plus=spec.u_inf, u_star_minus=0.0, kind="minorant", df_du=None,
                         monotone=True, subhomogeneous=True)


def majorant_model(model: ScalarShiftModel, spec: MajorantSpec) -> ScalarShiftModel:
    def f(s, u):
        return spec.R_bar(s) * u

    return model.replace(f=f, f_plus=lambda u: spec.limit_plus * u,
                         f_minus=lambda u: spec.limit_minus * u, b_plus=spec.limit_plus,
                         b_minus=spec.limit_minus, kind="linear-majorant", df_du=None,
                         cap=math.inf, monotone=True, subhomogeneous=True)


def sandwich_check(model: ScalarShiftModel, ic: Field, T: float, tol: float = SANDWICH_TOL,
                   dt: float = 0.02, u_star_star: float | None = None, gamma: float | None = None,
                   snapshot_stride: int = 10) -> Verdict:
    """Run minorant, full and linear-majorant models from ``ic`` and check their ordering."""
    if not isinstance(model, ScalarShiftModel):
        raise TypeError("sandwich_check is defined for the scalar model")
    if not model.monotone:
        raise HypothesisError("theorem hypotheses unmet: f must be nondecreasing in u")
    lo_spec = build_minorant(model, u_star_star, gamma)
    hi_spec = build_majorant(model, u_star_star, gamma)
    if np.max(ic.values) > lo_spec.u_star_star:
        raise ConfigError("initial data exceed u**")
    cfg = SimConfig(dt=dt, t_end=T, snapshot_stride=snapshot_stride)
    lin_cfg = SimConfig(dt=dt, t_end=T, snapshot_stride=snapshot_stride, blowup_guard=math.inf)
    jobs = [(minorant_model(model, lo_spec), cfg), (model, cfg), (majorant_model(model, hi_spec), lin_cfg)]
    with ThreadPoolExecutor(max_workers=3) as ex:
        lo, mid, hi = ex.map(lambda j: run(j[0], ic, j[1]), jobs)
    x = ic.grid.x
    errs, times = [], []
    worst = (0.0, None, None)
    for t, a, u, b in zip(mid.times, lo.snapshots, mid.snapshots, hi.snapshots):
        gap = np.maximum(a.values[0] - u.values[0], u.values[0] - b.values[0])
        i = int(np.argmax(gap))
        v = max(0.0, float(gap[i]))
        errs.append(v)
        times.append(t)
        if v > worst[0]:
            worst = (v, t, float(x[i]))
    ok = max(errs) <= tol
    return Verdict("sandwich", "u_min <= u <= u_lin on the whole grid", errs, times, tol, ok, [],
                   dict(worst_violation=worst[0], worst_time=worst[1], worst_x=worst[2],
                        K=lo_spec.K, s_frak=lo_spec.s_frak, R_bar_plus=hi_spec.limit_plus))


# ---------------------------------------------------------------- propagation probe

@dataclass
class ProbeReport:
    rows: list[dict]
    frontier: dict

    def as_dict(self) -> dict:
        return dict(rows=self.rows, frontier=self.frontier)


def propagation_probe(model: ScalarShiftModel, speeds: Speeds, epsilon: float, n_grid, y_grid,
                      c_grid=None, grid: Grid1D | None = None, dt: float = 0.02) -> ProbeReport:
    """Check ``u(n, y + n c + x) >= (u*_+/4) h(x)`` on ``[-2, 2]`` starting from ``(u*_+/16) h(x - y)``.

    The flow is the comoving one, so ``c`` is a probe speed relative to the habitat.
    For each ``(c, y)`` the frontier is the first tested ``n`` from which the
    inequality holds for every larger tested ``n``.
    """
    from .grid import make_grid

    n_grid = sorted(int(n) for n in n_grid)
    y_grid = [float(y) for y in y_grid]
    if c_grid is None:
        lo, hi = -speeds.minus + 2 * epsilon / 3, speeds.plus - 2 * epsilon / 3
        c_grid = np.linspace(lo, hi, 3)
    r = float(model.u_star_plus)
    n_max = max(n_grid)
    rows, frontier = [], {}
    for c in c_grid:
        for y in y_grid:
            ends = [y - 2, y + 2, y + n_max * c - 2, y + n_max * c + 2, y + n_grid[0] * c]
            g = grid
            if g is None:
                margin = 20.0 + 2.0 * n_max * max(speeds.plus, speeds.minus, model.d)
                lo_x, hi_x = min(ends) - margin, max(ends) + margin
                g = make_grid(lo_x, hi_x, int(round((hi_x - lo_x) / 0.1)) + 1)
            elif min(ends) < g.x_min + 10 or max(ends) > g.x_max - 10:
                raise ConfigError("domain too small for the largest y + n*c probe")
            ic = Field(g, (r / 16) * bump_h(g.x - y))
            traj = run(model, ic, SimConfig(dt=dt, t_end=n_max, frame="comoving",
                                            snapshot_stride=int(round(1 / dt))))
            xs = np.linspace(-2, 2, 81)
            holds_by_n = {}
            for n in n_grid:
                k = int(np.argmin(np.abs(np.asarray(traj.times) - n)))
                vals = interpolate_at(traj.snapshots[k], xs + y + n * c)
                margin_n = float(np.min(vals - (r / 4) * bump_h(xs)))
                holds_by_n[n] = margin_n >= 0
                rows.append(dict(c=float(c), n=n, y=y, holds=bool(margin_n >= 0), margin=margin_n))
            first = None
            for n in reversed(n_grid):
                if not holds_by_n[n]:
                    break
                first = n
            frontier[f"c={float(c):.6g},y={y:g}"] = first
    return ProbeReport(rows, frontier)
