import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from rffboot.datasets.module import (
    SWISS_ROLL_HEIGHT,
    SWISS_ROLL_T_MAX,
    SWISS_ROLL_T_MIN,
    PointSet,
    gen_gaussian_pair,
    gen_lorenz,
    gen_regression,
    gen_swiss_roll,
    load_csv,
    lorenz_rhs,
    minmax_scale,
    rk4_step,
    subsample,
    swiss_roll_point,
)
from rffboot.exceptions import DatasetError, IntegrationError, InvalidInput


def test_point_set_validation():
    with pytest.raises(InvalidInput):
        PointSet(np.zeros(3))
    with pytest.raises(InvalidInput):
        PointSet(np.array([[0.0, np.nan]]))
    with pytest.raises(InvalidInput):
        PointSet(np.zeros((3, 2)), np.zeros(2))


def test_labels():
    points = PointSet(np.zeros((3, 2))).with_labels([4.0, 9.0, 0.0])
    assert np.array_equal(points.sqrt_labels().labels, [2.0, 3.0, 0.0])
    with pytest.raises(InvalidInput):
        points.with_labels([-1.0, 1.0, 1.0]).sqrt_labels()
    with pytest.raises(InvalidInput):
        PointSet(np.zeros((3, 2))).sqrt_labels()


def test_swiss_roll_point():
    point = swiss_roll_point(2.0 * math.pi, 3.0)
    assert point == pytest.approx([2.0 * math.pi, 3.0, 0.0], abs=1e-12)
    points = swiss_roll_point([math.pi, 1.5 * math.pi], [0.0, 1.0])
    assert points.shape == (2, 3)
    assert points[0] == pytest.approx([-math.pi, 0.0, 0.0], abs=1e-12)


def test_swiss_roll(rng):
    points = gen_swiss_roll(500, rng)
    assert (points.n, points.d) == (500, 3)
    radius = np.hypot(points.points[:, 0], points.points[:, 2])
    assert radius.min() >= SWISS_ROLL_T_MIN - 1e-9
    assert radius.max() <= SWISS_ROLL_T_MAX + 1e-9
    assert 0.0 <= points.points[:, 1].min()
    assert points.points[:, 1].max() <= SWISS_ROLL_HEIGHT


def test_swiss_roll_is_reproducible():
    first = gen_swiss_roll(20, np.random.default_rng(1))
    second = gen_swiss_roll(20, np.random.default_rng(1))
    assert np.array_equal(first.points, second.points)


def test_lorenz_burn_in():
    state = np.ones(3)
    for _ in range(5):
        state = rk4_step(state, 0.01)
    trajectory = gen_lorenz(4, dt=0.01, burn_in=5)
    assert trajectory.points.shape == (4, 3)
    assert np.array_equal(trajectory.points[0], state)
    assert np.array_equal(trajectory.points[1], rk4_step(state, 0.01))
    assert np.array_equal(gen_lorenz(2, burn_in=0).points[0], np.ones(3))


def test_lorenz_matches_reference_solver():
    trajectory = gen_lorenz(21, dt=0.01, burn_in=0).points
    reference = solve_ivp(
        lambda t, state: lorenz_rhs(state),
        (0.0, 0.2),
        [1.0, 1.0, 1.0],
        method="DOP853",
        t_eval=np.linspace(0.0, 0.2, 21),
        rtol=1e-12,
        atol=1e-12,
    )
    assert np.allclose(trajectory, reference.y.T, rtol=1e-4, atol=1e-4)


def test_lorenz_stays_on_attractor():
    trajectory = gen_lorenz(2000).points
    assert np.all(np.abs(trajectory[:, :2]) < 35.0)
    assert np.all((trajectory[:, 2] > 0.0) & (trajectory[:, 2] < 60.0))


def test_lorenz_divergence():
    with np.errstate(all="ignore"):
        with pytest.raises(IntegrationError):
            gen_lorenz(200, dt=5.0, burn_in=0)


def test_lorenz_arguments():
    with pytest.raises(InvalidInput):
        gen_lorenz(0)
    with pytest.raises(InvalidInput):
        gen_lorenz(10, dt=0.0)
    with pytest.raises(InvalidInput):
        gen_lorenz(10, x0=(1.0, 1.0))


def test_gaussian_pair(rng):
    first, second = gen_gaussian_pair(4000, 10, 0.1, 0.1933, rng)
    assert first.points.shape == second.points.shape == (4000, 10)
    assert first.points.var() == pytest.approx(0.1, rel=0.05)
    assert second.points.var() == pytest.approx(0.1933, rel=0.05)
    with pytest.raises(InvalidInput):
        gen_gaussian_pair(10, 2, 0.0, 1.0, rng)


def test_regression(rng):
    data = gen_regression(50, 10, 1.0, rng)
    assert data.points.shape == (50, 10)
    assert data.labels.shape == (50,)
    assert data.points.min() >= 0.0 and data.points.max() <= 1.0
    with pytest.raises(InvalidInput):
        gen_regression(50, 4, 1.0, rng)


def test_minmax_scale():
    points = PointSet(np.array([[1.0, 5.0], [3.0, 5.0], [2.0, 5.0]]), [1.0, 2.0, 3.0])
    scaled = minmax_scale(points)
    assert np.array_equal(scaled.points[:, 0], [0.0, 1.0, 0.5])
    assert np.array_equal(scaled.points[:, 1], [0.0, 0.0, 0.0])
    assert np.array_equal(scaled.labels, points.labels)


def test_minmax_scale_is_idempotent(rng):
    points = PointSet(rng.normal(3.0, 2.0, size=(30, 4)))
    once = minmax_scale(points)
    twice = minmax_scale(once)
    assert np.allclose(twice.points, once.points, rtol=0.0, atol=1e-15)


def test_subsample(rng):
    points = PointSet(np.arange(40.0).reshape(10, 4), np.arange(10.0))
    sub = subsample(points, 6, 2, rng)
    assert sub.points.shape == (6, 2)
    assert len(set(sub.labels)) == 6
    rows = (sub.points[:, 0] // 4).astype(int)
    assert np.array_equal(rows, sub.labels.astype(int))
    with pytest.raises(InvalidInput):
        subsample(points, 11, 2, rng)


def test_load_csv(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("a,b,y\n1,2,3\n4,5,6\n\n7,8,9\n")
    data = load_csv(str(path), has_header=True, labels=True)
    assert np.array_equal(data.points, [[1.0, 2.0], [4.0, 5.0], [7.0, 8.0]])
    assert np.array_equal(data.labels, [3.0, 6.0, 9.0])
    plain = load_csv(str(path), has_header=True)
    assert plain.points.shape == (3, 3)
    assert plain.labels is None


def test_load_csv_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3,x\n")
    with pytest.raises(DatasetError) as info:
        load_csv(str(path))
    assert info.value.line == 2
    assert str(info.value).startswith(f"{path}:2:")

    path.write_text("1,2\n3,4\n5\n")
    with pytest.raises(DatasetError) as info:
        load_csv(str(path))
    assert info.value.line == 3


def test_load_csv_file_errors(tmp_path):
    with pytest.raises(DatasetError) as info:
        load_csv(str(tmp_path / "missing.csv"))
    assert info.value.line is None
    empty = tmp_path / "empty.csv"
    empty.write_text("x,y\n")
    with pytest.raises(DatasetError):
        load_csv(str(empty), has_header=True)
    single = tmp_path / "single.csv"
    single.write_text("1\n2\n")
    with pytest.raises(DatasetError):
        load_csv(str(single), labels=True)


def test_load_csv_rejects_invalid_utf8(tmp_path):
    path = tmp_path / "binary.csv"
    path.write_bytes(b"1,2\n3,4\n\xff\xfe,5\n")
    with pytest.raises(DatasetError) as info:
        load_csv(str(path))
    assert info.value.line == 3
    assert "UTF-8" in str(info.value)
