"""Point sets: synthetic generators, CSV ingestion and preprocessing."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from sklearn.datasets import make_friedman1
from sklearn.preprocessing import MinMaxScaler

from rffboot import logger
from rffboot.exceptions import DatasetError, IntegrationError, InvalidInput

lib_log = logger.Library.logger()

LORENZ_SIGMA: float = 10.0
LORENZ_RHO: float = 28.0
LORENZ_BETA: float = 8.0 / 3.0

SWISS_ROLL_T_MIN: float = 1.5 * math.pi
SWISS_ROLL_T_MAX: float = 4.5 * math.pi
SWISS_ROLL_HEIGHT: float = 21.0


@dataclass(frozen=True)
class PointSet:
    """``n x d`` finite points with optional labels ``y``."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise InvalidInput(f"Expected an n x d matrix, got shape {points.shape}.")
        if not np.all(np.isfinite(points)):
            raise InvalidInput("Point set contains non-finite entries.")
        object.__setattr__(self, "points", points)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=float).ravel()
            if labels.size != points.shape[0]:
                raise InvalidInput(
                    f"{points.shape[0]} points but {labels.size} labels."
                )
            if not np.all(np.isfinite(labels)):
                raise InvalidInput("Labels contain non-finite entries.")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def with_labels(self, labels: np.ndarray) -> PointSet:
        return PointSet(self.points, labels)

    def sqrt_labels(self) -> PointSet:
        """Replace labels by their square roots, for labels with a wide range."""
        if self.labels is None:
            raise InvalidInput("Point set has no labels.")
        if np.any(self.labels < 0):
            raise InvalidInput("Cannot take the square root of negative labels.")
        return PointSet(self.points, np.sqrt(self.labels))

    def __repr__(self) -> str:
        labelled = self.labels is not None
        return f'<PointSet n="{self.n}" d="{self.d}" labels="{labelled}">'


def swiss_roll_point(t, h) -> np.ndarray:
    """``(t cos t, h, t sin t)`` for scalars or equally shaped arrays."""
    t = np.asarray(t, dtype=float)
    h = np.asarray(h, dtype=float)
    return np.stack([t * np.cos(t), h, t * np.sin(t)], axis=-1)


def gen_swiss_roll(n: int, rng: np.random.Generator) -> PointSet:
    """Swiss roll with ``t ~ U[3pi/2, 9pi/2]`` and height ``h ~ U[0, 21]``."""
    if n < 1:
        raise InvalidInput(f"Need n >= 1, got {n}.")
    t = SWISS_ROLL_T_MIN + (SWISS_ROLL_T_MAX - SWISS_ROLL_T_MIN) * rng.random(n)
    h = SWISS_ROLL_HEIGHT * rng.random(n)
    return PointSet(swiss_roll_point(t, h))


def lorenz_rhs(state: np.ndarray) -> np.ndarray:
    x, y, z = state
    return np.array(
        [
            LORENZ_SIGMA * (y - x),
            x * (LORENZ_RHO - z) - y,
            x * y - LORENZ_BETA * z,
        ]
    )


def rk4_step(state: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of the Lorenz system."""
    k1 = lorenz_rhs(state)
    k2 = lorenz_rhs(state + 0.5 * dt * k1)
    k3 = lorenz_rhs(state + 0.5 * dt * k2)
    k4 = lorenz_rhs(state + dt * k3)
    return state + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def gen_lorenz(
    n: int,
    dt: float = 0.01,
    x0: Sequence[float] = (1.0, 1.0, 1.0),
    burn_in: int = 1000,
) -> PointSet:
    """``n`` consecutive states of an RK4 Lorenz trajectory.

    The first ``burn_in`` steps are discarded; the first returned point is the
    state after them.
    """
    if n < 1:
        raise InvalidInput(f"Need n >= 1, got {n}.")
    if not dt > 0:
        raise InvalidInput(f"Step size has to be positive, got {dt}.")
    if burn_in < 0:
        raise InvalidInput(f"burn_in cannot be negative, got {burn_in}.")
    state = np.asarray(x0, dtype=float).ravel()
    if state.size != 3:
        raise InvalidInput(f"Initial state has to be 3-dimensional, got {state.size}.")
    for _ in range(burn_in):
        state = rk4_step(state, dt)
    trajectory = np.empty((n, 3))
    for k in range(n):
        if not np.all(np.isfinite(state)):
            raise IntegrationError(f"Trajectory diverged at step {burn_in + k}.")
        trajectory[k] = state
        state = rk4_step(state, dt)
    return PointSet(trajectory)


def gen_gaussian_pair(
    n: int, d: int, var1: float, var2: float, rng: np.random.Generator
) -> Tuple[PointSet, PointSet]:
    """Samples from ``N(0, var1 I_d)`` and ``N(0, var2 I_d)``."""
    if n < 1 or d < 1:
        raise InvalidInput(f"Need n >= 1 and d >= 1, got n={n}, d={d}.")
    if not (var1 > 0 and var2 > 0):
        raise InvalidInput(f"Variances have to be positive, got {var1}, {var2}.")
    first = rng.normal(0.0, math.sqrt(var1), size=(n, d))
    second = rng.normal(0.0, math.sqrt(var2), size=(n, d))
    return PointSet(first), PointSet(second)


def gen_regression(
    n: int, d: int, noise: float, rng: np.random.Generator
) -> PointSet:
    """Labelled points on the Friedman #1 surface, ``d >= 5`` inputs in ``[0, 1]``."""
    if n < 1 or d < 5:
        raise InvalidInput(f"Need n >= 1 and d >= 5, got n={n}, d={d}.")
    X, y = make_friedman1(
        n_samples=n,
        n_features=d,
        noise=noise,
        random_state=int(rng.integers(0, 2**31 - 1)),
    )
    return PointSet(X, y)


def minmax_scale(points: PointSet) -> PointSet:
    """Map every column onto ``[0, 1]``; constant columns become ``0``."""
    scaled = MinMaxScaler().fit_transform(points.points)
    return replace(points, points=np.clip(scaled, 0.0, 1.0))


def _decoded_lines(handle, path: str):
    for line_number, raw in enumerate(handle, start=1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DatasetError(
                f"Not valid UTF-8 at byte {exc.start} of the line.", path, line_number
            ) from None


def load_csv(path: str, has_header: bool = False, labels: bool = False) -> PointSet:
    """Read comma separated numeric rows.

    :param has_header: Skip the first line.
    :param labels: Treat the last column as labels.
    """
    rows = []
    width = None
    try:
        with open(path, "rb") as handle:
            reader = csv.reader(_decoded_lines(handle, path))
            for row in reader:
                line_number = reader.line_num
                if has_header and line_number == 1:
                    continue
                if not row or all(not cell.strip() for cell in row):
                    continue
                try:
                    values = [float(cell) for cell in row]
                except ValueError:
                    raise DatasetError(
                        f"Non-numeric value in {row!r}.", path, line_number
                    ) from None
                if width is None:
                    width = len(values)
                elif len(values) != width:
                    raise DatasetError(
                        f"Expected {width} columns, found {len(values)}.",
                        path,
                        line_number,
                    )
                rows.append(values)
    except OSError as exc:
        raise DatasetError(f"Cannot read file: {exc.strerror}.", path) from exc
    if not rows:
        raise DatasetError("File contains no data rows.", path)
    data = np.array(rows)
    if labels:
        if data.shape[1] < 2:
            raise DatasetError("Need at least one feature column besides labels.", path)
        result = PointSet(data[:, :-1], data[:, -1])
    else:
        result = PointSet(data)
    lib_log.debug("Loaded %d x %d points from %s.", result.n, result.d, path)
    return result


def subsample(
    points: PointSet, rows: int, cols: int, rng: np.random.Generator
) -> PointSet:
    """Uniform row and column subsets drawn without replacement."""
    if not (1 <= rows <= points.n and 1 <= cols <= points.d):
        raise InvalidInput(
            f"Cannot take {rows} x {cols} from a {points.n} x {points.d} point set."
        )
    row_idx = rng.choice(points.n, size=rows, replace=False)
    col_idx = rng.choice(points.d, size=cols, replace=False)
    labels = None if points.labels is None else points.labels[row_idx]
    return PointSet(points.points[np.ix_(row_idx, col_idx)], labels)
