"""Command-line entry point: ``propagate {speed,simulate,wave,verify,sweep}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import (annihilation_verdict, attractivity_verdict, estimate_speed, fronts_to_csv,
                       spreading_verdict, track_front, wave_tail_verdict)
from .config import RunConfig, parse_config
from .errors import ConfigError, HypothesisError, PropagateError
from .grid import field_to_csv, grid_from_spacing, trajectory_to_csv
from .models import CooperativeModel
from .sim import run
from .speeds import Speeds, spreading_speed
from .waves import solve_forced_wave, solve_steady_state

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERDICT = 0, 2, 3, 4
CLAUSES = ("spreading", "annihilation", "wave", "attractivity")


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _write_json(out: Path, name: str, obj: dict, cfg: RunConfig) -> None:
    obj = dict(obj, config_hash=cfg.hash)
    _write(out, name, json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def _out_dir(cfg: RunConfig, flag: str | None) -> Path:
    return Path(flag) if flag else cfg.base_dir / cfg.output["dir"]


def cmd_speed(cfg: RunConfig, args) -> int:
    model = cfg.build_model()
    out = _out_dir(cfg, args.out)
    side = {"plus": "+", "minus": "-"}[args.side]
    rep = spreading_speed(model, side)
    print(f"c_star={rep.c_star:.6f}, nu_star={rep.nu_star:.6f}")
    _write(out, f"speed_{args.side}.csv", rep.to_csv())
    info = dict(side=args.side, c_star=rep.c_star, nu_star=rep.nu_star, flags=rep.flags,
                perron_vector=rep.perron_vector, echo=cfg.echo)
    _write_json(out, f"speed_{args.side}.json", info, cfg)
    return EXIT_OK


def _simulate(cfg: RunConfig):
    model = cfg.build_model()
    grid = cfg.build_grid()
    traj = run(model, cfg.build_ic(grid, model.n_components), cfg.sim_config(), model.kind)
    return model, traj


def cmd_simulate(cfg: RunConfig, args) -> int:
    model, traj = _simulate(cfg)
    out = _out_dir(cfg, args.out)
    _write(out, "trajectory.csv", trajectory_to_csv(traj))
    grid = traj.grid
    meta = dict(grid=dict(x_min=grid.x_min, x_max=grid.x_max, n=grid.n, dx=grid.dx),
                model=cfg.model, monitor=traj.meta, echo=cfg.echo)
    _write_json(out, "meta.json", meta, cfg)
    return EXIT_OK


def _wave(cfg: RunConfig, model):
    a = cfg.analysis
    g = cfg.grid
    grid = grid_from_spacing(g["x_min"] if a["wave_x_min"] is None else a["wave_x_min"],
                             g["x_max"] if a["wave_x_max"] is None else a["wave_x_max"], g["dx"])
    solve = solve_steady_state if isinstance(model, CooperativeModel) else solve_forced_wave
    return solve(model, grid, a["tol_steady"], a["t_max_wave"], cfg.time["dt"])


def cmd_wave(cfg: RunConfig, args) -> int:
    model = cfg.build_model()
    w = _wave(cfg, model)
    out = _out_dir(cfg, args.out)
    _write(out, "wave.csv", field_to_csv(w.values, xname="z", prefix="W"))
    _write_json(out, "wave_report.json", dict(w.report(), echo=cfg.echo), cfg)
    return EXIT_OK


def _clause_record(fn) -> dict:
    try:
        return fn().as_dict()
    except HypothesisError as e:
        return dict(passed=False, error=str(e))


def cmd_verify(cfg: RunConfig, args) -> int:
    clauses = [c.strip() for c in (args.clauses or ",".join(CLAUSES)).split(",") if c.strip()]
    bad = [c for c in clauses if c not in CLAUSES]
    if bad:
        raise ConfigError(f"--clauses: unknown clause(s) {bad}; choose from {list(CLAUSES)}")
    model, traj = _simulate(cfg)
    speeds = Speeds.of(model)
    a = cfg.analysis
    eps = a["epsilon"]
    t_min = a["t_min"] if a["t_min"] is not None else cfg.time["t_end"] / 3
    u_star = float(np.max(model.u_star("+")))
    records = {}
    wave = None
    if "wave" in clauses or "attractivity" in clauses:
        wave = _wave(cfg, model)
    for clause in clauses:
        if clause == "spreading":
            rec = _clause_record(lambda: spreading_verdict(traj, model, speeds, eps, t_min,
                                                           a["tol_spreading"], a["alpha"]))
        elif clause == "annihilation":
            rec = _clause_record(lambda: annihilation_verdict(traj, model, speeds, eps, t_min,
                                                              a["tol_annihilation"]))
        elif clause == "wave":
            rec = _clause_record(lambda: wave_tail_verdict(wave, model, a["tol_wave"]))
        else:
            rec = _clause_record(lambda: attractivity_verdict(traj, wave, model, speeds, eps, t_min,
                                                              a["tol_attractivity"]))
        rec["clause"] = clause
        records[clause] = rec
    level = a["level"] if a["level"] is not None else 0.5 * u_star
    traces = [track_front(traj, level, d) for d in ("rightmost", "leftmost")]
    out = _out_dir(cfg, args.out)
    _write(out, "fronts.csv", fronts_to_csv(traces))
    summary = dict(verdicts=[records[c] for c in clauses],
                   speeds=dict(plus=speeds.plus, minus=speeds.minus), echo=cfg.echo)
    _write_json(out, "verdicts.json", summary, cfg)
    for c in clauses:
        print(f"{c}: {'pass' if records[c]['passed'] else 'FAIL'}")
    failed = any(not r["passed"] for r in records.values())
    return EXIT_VERDICT if failed and args.strict else EXIT_OK


def _sweep_one(job):
    text, base_dir, key, value = job
    cfg = parse_config(text, base_dir, overrides={key: value})
    model, traj = _simulate(cfg)
    speeds = Speeds.of(model)
    level = cfg.analysis["level"]
    level = level if level is not None else 0.5 * float(np.max(model.u_star("+")))
    try:
        speed, r2 = estimate_speed(track_front(traj, level, "rightmost"), cfg.analysis["window_fraction"])
    except PropagateError:
        speed, r2 = float("nan"), float("nan")
    return dict(value=value, c_star_plus=speeds.plus, c_star_minus=speeds.minus,
                front_speed=speed, r_squared=r2)


def cmd_sweep(cfg: RunConfig, args, text: str) -> int:
    param, values = cfg.sweep["parameter"], cfg.sweep["values"]
    if not param or not values:
        raise ConfigError("[sweep] needs both parameter and values")
    key = param if "." in param else f"model.{param}"
    vals = [float(v) for v in values.replace(",", " ").split()]
    jobs = [(text, cfg.base_dir, key, v) for v in vals]
    n_jobs = max(1, args.jobs)
    if n_jobs == 1:
        rows = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            rows = list(ex.map(_sweep_one, jobs))
    name = key.split(".")[-1]
    lines = [f"{name},c_star_plus,c_star_minus,front_speed,r_squared"]
    for r in rows:
        lines.append(",".join(format(float(r[k]), ".17g") for k in
                              ("value", "c_star_plus", "c_star_minus", "front_speed", "r_squared")))
    out = _out_dir(cfg, args.out)
    _write(out, "sweep.csv", "\n".join(lines) + "\n")
    _write_json(out, "sweep.json", dict(parameter=key, rows=rows, echo=cfg.echo), cfg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="propagate", description="Spreading speeds, fronts and forced waves "
                                "for reaction-diffusion models with a shifting habitat.")
    p.add_argument("command", choices=("speed", "simulate", "wave", "verify", "sweep"))
    p.add_argument("--config", required=True, help="INI-style run configuration")
    p.add_argument("--out", help="output directory (default: [output] dir next to the config)")
    p.add_argument("--jobs", type=int, default=int(os.environ.get("PROPAGATE_JOBS", "1")))
    p.add_argument("--side", choices=("plus", "minus"), default="plus")
    p.add_argument("--clauses", help="comma-separated subset of " + ",".join(CLAUSES))
    p.add_argument("--strict", action="store_true", help="exit 4 when a verdict fails")
    return p


def _error(e: Exception, code: int) -> int:
    rec = dict(error=type(e).__name__, message=str(e), exit_code=code)
    print(json.dumps(rec), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from None
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = parse_config(text, path.parent)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if args.command == "sweep":
            return cmd_sweep(cfg, args, text)
        return {"speed": cmd_speed, "simulate": cmd_simulate, "wave": cmd_wave,
                "verify": cmd_verify}[args.command](cfg, args)
    except PropagateError as e:
        return _error(e, e.exit_code)
    except (ValueError, TypeError) as e:
        return _error(e, EXIT_CONFIG)
    except ArithmeticError as e:
        return _error(e, EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
