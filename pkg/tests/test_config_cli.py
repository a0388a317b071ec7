import json

import pytest

from propagate.cli import main
from propagate.config import parse_config
from propagate.errors import ConfigError

FISHER = "[model]\nkind = fisher\n"

LOGISTIC = """
[model]
kind = shifted_logistic
beta_minus = 0.25
beta_plus = 1.0
tau = 0.5
c = {c}

[grid]
x_min = -60
x_max = 60
dx = 0.2

[time]
dt = 0.02
t_end = 20

[analysis]
epsilon = 0.1
t_min = 10
tol_steady = 1e-6
t_max_wave = 300
"""

SWEEP = """
[model]
kind = shifted_logistic
beta_minus = 0.25
beta_plus = 1.0

[grid]
x_min = -60
x_max = 100
dx = 0.2

[time]
dt = 0.02
t_end = 20
snapshot_every = 0.5

[sweep]
parameter = c
values = 0, 0.5, 1.0, 1.5
"""


def _cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_minimal_fisher_config():
    cfg = parse_config(FISHER)
    assert cfg.grid["dx"] == 0.1 and cfg.time["dt"] == 0.02 and cfg.ic["kind"] == "bump"
    assert cfg.echo["c_star_prediction"]["plus"] == pytest.approx(2.0, abs=1e-6)
    assert len(cfg.hash) == 16


def test_dt_adjusted_to_divide_tau():
    text = "[model]\nkind = fisher\nmu = 0.2\nr = 0.1\ntau = 1\n[time]\ndt = 0.3\n"
    with pytest.warns(UserWarning, match="adjusted"):
        cfg = parse_config(text)
    assert cfg.time["dt"] == pytest.approx(0.25)
    assert cfg.echo["warnings"]


def test_config_errors():
    with pytest.raises(ConfigError, match="domain margin"):
        parse_config(FISHER + "[grid]\nx_min = -10\nx_max = 10\n")
    with pytest.raises(ConfigError, match="unknown key 'speed'"):
        parse_config(FISHER + "speed = 3\n")
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config(FISHER + "[plot]\ncolor = 1\n")
    with pytest.raises(ConfigError, match="dt"):
        parse_config(FISHER + "[time]\ndt = 0.5\n")
    with pytest.raises(ConfigError, match="missing"):
        parse_config("[model]\nkind = shifted_logistic\nbeta_plus = 1\n")


def test_overrides_and_hash():
    a = parse_config(FISHER)
    b = parse_config(FISHER, overrides={"model.c": 0.5})
    assert b.model["c"] == 0.5 and a.hash != b.hash
    assert parse_config(FISHER).hash == a.hash


def test_cli_speed(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["speed", "--config", _cfg(tmp_path, FISHER), "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "c_star=2.000000, nu_star=1.000000"
    info = json.loads((out / "speed_plus.json").read_text())
    assert info["config_hash"] and (out / "speed_plus.csv").read_text().startswith("nu,lambda,phi")


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["speed", "--config", _cfg(tmp_path, FISHER + "bogus = 1\n")]) == 2
    rec = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert rec["exit_code"] == 2 and "bogus" in rec["message"]
    assert main(["speed", "--config", str(tmp_path / "missing.cfg")]) == 2
    (tmp_path / "flat.csv").write_text("s,u,f\n-1,0,0\n-1,1,0.5\n1,0,0\n1,1,0.5\n")
    table = "[model]\nkind = tabulated\ntable = flat.csv\nmu = 1\n"
    assert main(["speed", "--config", _cfg(tmp_path, table)]) == 3
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["exit_code"] == 3
    failing = _cfg(tmp_path, LOGISTIC.format(c=1.5))
    out = str(tmp_path / "v")
    assert main(["verify", "--config", failing, "--out", out, "--clauses", "spreading"]) == 0
    assert main(["verify", "--config", failing, "--out", out, "--clauses", "spreading", "--strict"]) == 4
    assert main(["verify", "--config", failing, "--clauses", "nope"]) == 2


def test_cli_simulate_and_wave(tmp_path):
    cfg = _cfg(tmp_path, LOGISTIC.format(c=0.5))
    out = tmp_path / "o"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    head = (out / "trajectory.csv").read_text().splitlines()[0]
    assert head == "t,x,u1"
    meta = json.loads((out / "meta.json").read_text())
    assert meta["config_hash"] and meta["monitor"]["u_max"] <= 1.0 + 1e-8
    assert main(["wave", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "wave.csv").read_text().startswith("z,W1")
    assert json.loads((out / "wave_report.json").read_text())["config_hash"]


def test_cli_verify_four_records(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["verify", "--config", _cfg(tmp_path, LOGISTIC.format(c=0.5)), "--out", str(out)]) == 0
    rep = json.loads((out / "verdicts.json").read_text())
    assert [r["clause"] for r in rep["verdicts"]] == ["spreading", "annihilation", "wave", "attractivity"]
    assert rep["config_hash"]
    assert (out / "fronts.csv").exists()
    assert len(capsys.readouterr().out.strip().splitlines()) == 4


def test_cli_sweep_rows_and_determinism(tmp_path):
    cfg = _cfg(tmp_path, SWEEP)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", "--config", cfg, "--out", str(a)]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(b), "--jobs", "2"]) == 0
    rows = (a / "sweep.csv").read_text().splitlines()
    assert rows[0].startswith("c,") and len(rows) == 5
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()
    data = json.loads((a / "sweep.json").read_text())
    assert data["config_hash"]
    assert all(1.7 < r["front_speed"] < 2.05 for r in data["rows"])


def test_simulate_is_deterministic(tmp_path):
    cfg = _cfg(tmp_path, LOGISTIC.format(c=0.5))
    a, b = tmp_path / "a", tmp_path / "b"
    main(["simulate", "--config", cfg, "--out", str(a)])
    main(["simulate", "--config", cfg, "--out", str(b)])
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
