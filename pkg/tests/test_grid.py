import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from propagate.errors import ConfigError, NumericError
from propagate.grid import (DelayHistory, Field, Trajectory, field_from_csv, field_to_csv,
                            grid_from_spacing, history_at_lag, history_push, interpolate_at,
                            make_grid, sample_field, shift_interpolate, sup_distance,
                            trajectory_to_csv)
from propagate.sim import bump_h


def test_grid_spacing():
    assert make_grid(-1, 1, 5).dx == 0.5
    assert make_grid(0, 10, 101).dx == pytest.approx(0.1, abs=1e-15)
    g = make_grid(-2, 3, 11)
    assert np.array_equal(g.x, -2 + np.arange(11) * 0.5)


def test_grid_rejects_bad_bounds():
    with pytest.raises(ConfigError, match="inverted bounds"):
        make_grid(1, 0, 10)
    with pytest.raises(ConfigError):
        make_grid(0, 1, 2)
    with pytest.raises(ConfigError):
        grid_from_spacing(0, 1, 0.3)


def test_sample_field_constant_and_bump():
    g = make_grid(-3, 3, 13)
    assert np.all(sample_field(g, lambda x: 1.0).values == 1.0)
    f = sample_field(g, bump_h)
    assert interpolate_at(f, np.array([0.0, 1.5, 2.5])) == pytest.approx([1.0, 0.5, 0.0])


def test_sample_field_vector_valued_pointwise():
    g = make_grid(0, 1, 5)
    f = sample_field(g, lambda x: (x, 2 * x), n_components=2)
    assert np.allclose(f.values[1], 2 * g.x)


def test_sample_field_non_finite():
    g = make_grid(0, 1, 5)
    with pytest.raises(NumericError), np.errstate(invalid="ignore", divide="ignore"):
        sample_field(g, lambda x: np.log(x - 0.5))


def test_field_is_read_only():
    f = Field(make_grid(0, 1, 5), np.zeros(5))
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0


def test_shift_interpolate_examples():
    g = make_grid(-4, 4, 81)
    f = Field(g, g.x)
    assert np.array_equal(shift_interpolate(f, 0.0).values, f.values)
    s = shift_interpolate(f, 0.5 * g.dx)
    assert np.allclose(s.values[0, :-1], g.x[:-1] + 0.5 * g.dx, atol=1e-13)
    c = Field(g, np.full(g.n, 0.7))
    assert np.all(shift_interpolate(c, 1.234).values == 0.7)
    with pytest.raises(ValueError):
        shift_interpolate(f, 8.0)


@given(st.integers(-30, 30), st.lists(st.floats(0, 1), min_size=61, max_size=61))
def test_shift_roundtrip_on_grid_multiples(k, vals):
    g = make_grid(-3, 3, 61)
    f = Field(g, np.array(vals))
    back = shift_interpolate(shift_interpolate(f, k * g.dx), -k * g.dx)
    inner = slice(abs(k), g.n - abs(k))
    assert np.array_equal(back.values[0, inner], f.values[0, inner])


@given(st.floats(-3.9, 3.9), st.lists(st.floats(0, 2), min_size=41, max_size=41))
def test_shift_stays_in_range(delta, vals):
    g = make_grid(-2, 2, 41)
    f = Field(g, np.array(vals))
    s = shift_interpolate(f, delta).values
    assert s.min() >= f.values.min() - 1e-15 and s.max() <= f.values.max() + 1e-15


def test_sup_distance_examples():
    g = make_grid(-4, 4, 81)
    one, zero, ramp = Field(g, np.ones(g.n)), Field(g, np.zeros(g.n)), Field(g, g.x)
    assert sup_distance(one, one) == 0.0
    assert sup_distance(one, zero) == 1.0
    assert sup_distance(ramp, zero, (0, 2)) == pytest.approx(2.0)
    with pytest.raises(ValueError, match="empty window"):
        sup_distance(one, zero, (10, 11))


@given(st.lists(st.lists(st.floats(-3, 3), min_size=21, max_size=21), min_size=3, max_size=3))
def test_sup_distance_is_metric(rows):
    g = make_grid(0, 1, 21)
    a, b, c = (Field(g, np.array(r)) for r in rows)
    w = (0.2, 0.8)
    assert sup_distance(a, a, w) == 0.0
    assert sup_distance(a, b, w) == sup_distance(b, a, w)
    assert sup_distance(a, c, w) <= sup_distance(a, b, w) + sup_distance(b, c, w) + 1e-12


def test_history_lags():
    g = make_grid(0, 1, 5)
    fields = [Field(g, np.full(5, float(k))) for k in range(5)]
    h = DelayHistory(0.1, 0.4, fields[0])
    for f in fields:
        history_push(h, f)
    assert history_at_lag(h, 0.0) is fields[-1]
    assert history_at_lag(h, 0.4) is fields[0]
    with pytest.raises(ValueError, match="lag not on grid"):
        h.at_lag(0.05)
    with pytest.raises(ConfigError):
        DelayHistory(0.3, 1.0, fields[0])


@given(st.integers(0, 8), st.integers(0, 30))
def test_history_capacity_constant(m, pushes):
    g = make_grid(0, 1, 3)
    h = DelayHistory(0.1, m * 0.1, Field(g, np.zeros(3)))
    for k in range(pushes):
        h.push(Field(g, np.full(3, float(k))))
    assert len(h) == m + 1


def test_trajectory_times_increase():
    g = make_grid(0, 1, 3)
    f = Field(g, np.zeros(3))
    tr = Trajectory([0.0], [f], "x")
    tr.append(1.0, f)
    with pytest.raises(ValueError):
        tr.append(1.0, f)


def test_csv_roundtrip():
    g = make_grid(-1, 1, 7)
    f = Field(g, np.vstack([np.sin(g.x), np.cos(g.x) / 3]))
    text = field_to_csv(f)
    assert text.splitlines()[0] == "x,u1,u2"
    back = field_from_csv(text)
    assert np.array_equal(back.values, f.values)
    tr = Trajectory([0.0, 0.5], [f, f], "m")
    lines = trajectory_to_csv(tr).splitlines()
    assert lines[0] == "t,x,u1,u2" and len(lines) == 1 + 2 * 7
