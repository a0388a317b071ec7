"""Run configuration: flat INI-style sections, validated with derived values echoed."""

from __future__ import annotations

import configparser
import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, PropagateError
from .grid import Field, Grid1D, grid_from_spacing
from .models import (builtin_cooperative_pair, builtin_fisher, builtin_shifted_logistic,
                     builtin_shifted_ricker, max_reaction_slope, tabulated_scalar_model)
from .sim import SimConfig, ic_bump_h, ic_constant, ic_xi, ic_xi_tilde

MODEL_KEYS = {
    "shifted_logistic": dict(beta_minus=None, beta_plus=None, w=1.0, mu=3.0, d=1.0, tau=0.0, c=0.0),
    "shifted_ricker": dict(p_minus=None, p_plus=None, w=1.0, mu=1.0, d=1.0, tau=0.0, c=0.0),
    "fisher": dict(d=1.0, r=1.0, mu=1.0, tau=0.0, c=0.0),
    "cooperative_pair": dict(beta1_minus=None, beta1_plus=None, beta2_minus=None, beta2_plus=None,
                             kappa=None, w=1.0, d1=1.0, d2=1.0),
    "tabulated": dict(table=None, mu=None, d=1.0, tau=0.0, c=0.0, cap=None),
}
SECTION_DEFAULTS = {
    "grid": dict(x_min=-200.0, x_max=200.0, dx=0.1),
    "time": dict(dt=0.02, t_end=40.0, frame="lab", snapshot_every=1.0),
    "ic": dict(kind="bump", amplitude=1.0, center=0.0, d=1.0, rho=2.0, value=0.0),
    "analysis": dict(epsilon=0.2, t_min=None, level=None, window_fraction=0.4, tol_spreading=None,
                     tol_annihilation=None, tol_attractivity=None, tol_wave=1e-3, tol_steady=1e-8,
                     t_max_wave=2000.0, wave_x_min=None, wave_x_max=None, alpha=None),
    "output": dict(dir="out"),
    "sweep": dict(parameter=None, values=None),
}
STRING_KEYS = {("model", "kind"), ("model", "table"), ("time", "frame"), ("ic", "kind"),
               ("output", "dir"), ("sweep", "parameter"), ("sweep", "values")}
IC_KINDS = ("bump", "xi", "xi_tilde", "constant")
DT_SLOPE_FACTOR = 0.1


@dataclass
class RunConfig:
    model: dict
    grid: dict
    time: dict
    ic: dict
    analysis: dict
    output: dict
    sweep: dict
    base_dir: Path = Path(".")
    warnings: list[str] = field(default_factory=list)
    echo: dict = field(default_factory=dict)

    def build_model(self):
        return build_model(self.model, self.base_dir)

    def build_grid(self) -> Grid1D:
        return grid_from_spacing(self.grid["x_min"], self.grid["x_max"], self.grid["dx"])

    def build_ic(self, grid: Grid1D | None = None, n_components: int | None = None) -> Field:
        grid = grid or self.build_grid()
        n = n_components or (2 if self.model["kind"] == "cooperative_pair" else 1)
        ic = self.ic
        kind = ic["kind"]
        if kind == "bump":
            return ic_bump_h(grid, ic["amplitude"], ic["center"], n)
        if kind == "constant":
            return ic_constant(grid, ic["value"], n)
        base = ic_xi(grid, ic["d"], ic["amplitude"]) if kind == "xi" else \
            ic_xi_tilde(grid, ic["d"], ic["rho"], ic["amplitude"])
        return Field(grid, np.tile(base.values, (n, 1)))

    def sim_config(self) -> SimConfig:
        dt = self.time["dt"]
        stride = max(1, int(round(self.time["snapshot_every"] / dt)))
        return SimConfig(dt=dt, t_end=self.time["t_end"], frame=self.time["frame"],
                         snapshot_stride=stride)

    @property
    def hash(self) -> str:
        return config_hash(self.echo)


def config_hash(echo: dict) -> str:
    return hashlib.sha256(json.dumps(echo, sort_keys=True).encode()).hexdigest()[:16]


def _num(section: str, key: str, raw: str):
    if (section, key) in STRING_KEYS:
        return raw.strip()
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None


def load_table(path: Path):
    """CSV with header ``s,u,f`` on a full tensor grid."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3:
        raise ConfigError(f"[model] table: {path} must have columns s,u,f")
    s_nodes = np.unique(data[:, 0])
    u_nodes = np.unique(data[:, 1])
    if s_nodes.size * u_nodes.size != data.shape[0]:
        raise ConfigError("[model] table: rows must cover the full (s, u) grid")
    table = np.full((s_nodes.size, u_nodes.size), np.nan)
    table[np.searchsorted(s_nodes, data[:, 0]), np.searchsorted(u_nodes, data[:, 1])] = data[:, 2]
    return s_nodes, u_nodes, table


def build_model(m: dict, base_dir: Path = Path(".")):
    kind = m["kind"]
    p = {k: v for k, v in m.items() if k != "kind"}
    if kind == "shifted_logistic":
        return builtin_shifted_logistic(**p)
    if kind == "shifted_ricker":
        return builtin_shifted_ricker(**p)
    if kind == "fisher":
        return builtin_fisher(**p)
    if kind == "cooperative_pair":
        return builtin_cooperative_pair((p["beta1_minus"], p["beta1_plus"]),
                                        (p["beta2_minus"], p["beta2_plus"]),
                                        p["kappa"], p["w"], (p["d1"], p["d2"]))
    s_nodes, u_nodes, table = load_table(base_dir / p["table"])
    return tabulated_scalar_model(s_nodes, u_nodes, table, mu=p["mu"], d=p["d"], tau=p["tau"],
                                  c=p["c"], cap=p["cap"])


def _fill(section: str, given: dict, defaults: dict) -> dict:
    for k in given:
        if k not in defaults:
            raise ConfigError(f"[{section}] unknown key {k!r}")
    out = dict(defaults)
    out.update({k: _num(section, k, v) for k, v in given.items()})
    missing = [k for k, v in out.items() if v is None and section == "model" and k != "cap"]
    if missing:
        raise ConfigError(f"[model] missing required key(s): {', '.join(missing)}")
    return out


def _predicted_speeds(model) -> dict:
    from .speeds import spreading_speed

    out = {}
    for side, name in (("+", "plus"), ("-", "minus")):
        try:
            out[name] = spreading_speed(model, side).c_star
        except PropagateError:
            out[name] = None
    return out


def parse_config(text: str, base_dir: Path | str = ".", overrides: dict | None = None) -> RunConfig:
    """Parse, fill defaults, apply cross-field rules and build the echo."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed config: {e}") from None
    known = {"model"} | set(SECTION_DEFAULTS)
    for sec in cp.sections():
        if sec not in known:
            raise ConfigError(f"unknown section [{sec}]")
    if not cp.has_section("model"):
        raise ConfigError("missing [model] section")
    raw = {sec: dict(cp.items(sec)) if cp.has_section(sec) else {} for sec in known}
    for key, val in (overrides or {}).items():
        sec, _, k = key.partition(".")
        raw.setdefault(sec, {})[k] = str(val)
    kind = raw["model"].pop("kind", None)
    if kind not in MODEL_KEYS:
        raise ConfigError(f"[model] kind must be one of {sorted(MODEL_KEYS)}, got {kind!r}")
    model = {"kind": kind, **_fill("model", raw["model"], MODEL_KEYS[kind])}
    sections = {s: _fill(s, raw[s], SECTION_DEFAULTS[s]) for s in SECTION_DEFAULTS}
    cfg = RunConfig(model=model, base_dir=Path(base_dir), **sections)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    g, t = cfg.grid, cfg.time
    if g["x_min"] >= g["x_max"]:
        raise ConfigError("[grid] x_min must be < x_max")
    if g["dx"] <= 0:
        raise ConfigError("[grid] dx must be positive")
    if t["dt"] <= 0 or t["t_end"] <= 0:
        raise ConfigError("[time] dt and t_end must be positive")
    if t["frame"] not in ("lab", "comoving"):
        raise ConfigError("[time] frame must be lab or comoving")
    if cfg.ic["kind"] not in IC_KINDS:
        raise ConfigError(f"[ic] kind must be one of {IC_KINDS}")
    model = cfg.build_model()
    grid = cfg.build_grid()

    tau = float(getattr(model, "tau", 0.0))
    if tau > 0:
        m = math.ceil(tau / t["dt"] - 1e-9)
        dt_new = tau / m
        if abs(dt_new - t["dt"]) > 1e-12:
            msg = f"[time] dt adjusted from {t['dt']:g} to {dt_new:.12g} so that tau/dt is an integer"
            warnings.warn(msg, stacklevel=2)
            cfg.warnings.append(msg)
            t["dt"] = dt_new

    scale = float(getattr(model, "mu", 1.0)) * max_reaction_slope(model)
    if scale > 0 and t["dt"] > DT_SLOPE_FACTOR / scale * (1 + 1e-9):
        raise ConfigError(f"[time] dt={t['dt']:g} violates dt <= 0.1/(mu*max|df/du|) = "
                          f"{DT_SLOPE_FACTOR / scale:.6g}")

    speeds = _predicted_speeds(model)
    vmax = max([v for v in speeds.values() if v is not None], default=0.0)
    need = 2.0 * vmax * t["t_end"] + 20.0
    if grid.width < need:
        raise ConfigError(f"[grid] domain margin: x_max - x_min = {grid.width:g} < "
                          f"2*max speed*t_end + 20 = {need:.6g}")

    cfg.echo = dict(
        model=cfg.model, grid=dict(cfg.grid, n=grid.n, dx_effective=grid.dx),
        time=dict(cfg.time), ic=dict(cfg.ic), analysis=dict(cfg.analysis),
        output=dict(cfg.output), sweep=dict(cfg.sweep),
        c_star_prediction=speeds, warnings=list(cfg.warnings),
    )
