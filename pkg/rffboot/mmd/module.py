"""Unbiased MMD statistic with exact and random-feature kernels.

Both samples are always embedded with the same :class:`FeatureMap`, and a
bootstrap resample is applied to the columns of both feature matrices at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from rffboot.bootstrap.enums import ErrorMode
from rffboot.bootstrap.module import ErrorFunctional
from rffboot.exceptions import InvalidInput
from rffboot.features.module import FeatureMap
from rffboot.kernels.module import Kernel


@dataclass(frozen=True)
class MmdProblem:
    """Two samples of equal size ``n >= 2`` in the same dimension."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        if X.shape != Y.shape:
            raise InvalidInput(f"Samples need equal shapes, got {X.shape}, {Y.shape}.")
        if X.shape[0] < 2:
            raise InvalidInput(f"Samples need at least 2 points, got {X.shape[0]}.")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def __repr__(self) -> str:
        return f'<MmdProblem n="{self.n}" d="{self.d}">'


def _quadratic_statistic(
    Kxx: np.ndarray, Kyy: np.ndarray, Kxy: np.ndarray, n: int
) -> float:
    within = 1.0 / (n * (n - 1))
    xx = np.sum(Kxx) - np.trace(Kxx)
    yy = np.sum(Kyy) - np.trace(Kyy)
    return float(within * xx - 2.0 * np.sum(Kxy) / (n * n) + within * yy)


def _linear_statistic(
    mean_x: np.ndarray,
    mean_y: np.ndarray,
    squares_x: np.ndarray,
    squares_y: np.ndarray,
    n: int,
) -> float:
    """Statistic from per-feature column means and column sums of squares."""
    factor = n / (n - 1)
    xx = factor * (mean_x @ mean_x - np.sum(squares_x) / (n * n))
    yy = factor * (mean_y @ mean_y - np.sum(squares_y) / (n * n))
    return float(xx - 2.0 * (mean_x @ mean_y) + yy)


def _column_moments(Z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return Z.mean(axis=0), np.sum(Z * Z, axis=0)


def mmd_exact(problem: MmdProblem, kernel: Kernel) -> float:
    """Unbiased ``MMD_u^2`` statistic ``T`` with the exact kernel."""
    return _quadratic_statistic(
        kernel.matrix(problem.X),
        kernel.matrix(problem.Y),
        kernel.matrix(problem.X, problem.Y),
        problem.n,
    )


def mmd_rff_quadratic(problem: MmdProblem, feature_map: FeatureMap) -> float:
    """``T`` with ``k~`` substituted term by term, quadratic in ``n``."""
    Zx = feature_map.transform(problem.X)
    Zy = feature_map.transform(problem.Y)
    return _quadratic_statistic(Zx @ Zx.T, Zy @ Zy.T, Zx @ Zy.T, problem.n)


def mmd_rff_linear(problem: MmdProblem, feature_map: FeatureMap) -> float:
    """Same value as :func:`mmd_rff_quadratic` from mean embeddings, linear in ``n``."""
    mean_x, squares_x = _column_moments(feature_map.transform(problem.X))
    mean_y, squares_y = _column_moments(feature_map.transform(problem.Y))
    return _linear_statistic(mean_x, mean_y, squares_x, squares_y, problem.n)


def mmd_threshold(m: int, alpha: float) -> float:
    """Acceptance cut-off ``4 / sqrt(-m ln(alpha))`` of a level-``alpha`` test."""
    if m < 1:
        raise InvalidInput(f"Sample size has to be positive, got {m}.")
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha has to lie in (0, 1), got {alpha}.")
    return 4.0 / math.sqrt(-m * math.log(alpha))


def mmd_rejects(statistic: float, m: int, alpha: float) -> bool:
    """Whether ``statistic`` falls outside the acceptance region."""
    return statistic >= mmd_threshold(m, alpha)


class MmdFunctional(ErrorFunctional):
    """``T~(idx) - T~`` with one index vector applied to both samples.

    Only per-feature column moments are kept, so an evaluation costs ``O(s)``.
    """

    default_mode = ErrorMode.ABSOLUTE

    def __init__(self, problem: MmdProblem, feature_map: FeatureMap):
        self.n = problem.n
        self._mean_x, self._squares_x = _column_moments(
            feature_map.transform(problem.X)
        )
        self._mean_y, self._squares_y = _column_moments(
            feature_map.transform(problem.Y)
        )
        self.statistic = self._statistic(np.arange(feature_map.s))

    @property
    def width(self) -> int:
        return self._mean_x.size

    def _statistic(self, idx: np.ndarray) -> float:
        return _linear_statistic(
            self._mean_x[idx],
            self._mean_y[idx],
            self._squares_x[idx],
            self._squares_y[idx],
            self.n,
        )

    def evaluate(self, idx: np.ndarray, rng: np.random.Generator) -> float:
        idx = self.check_indices(idx)
        return self._statistic(idx) - self.statistic


def mmd_bootstrap_functional(
    problem: MmdProblem, feature_map: FeatureMap
) -> MmdFunctional:
    return MmdFunctional(problem, feature_map)
