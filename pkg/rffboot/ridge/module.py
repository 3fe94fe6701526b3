"""Kernel ridge regression with exact and random-feature kernels.

The test functional is the mean squared error on held-out points. For the
bootstrap, ``Z = QR`` and ``b = Z^T y`` are computed once and every resample
``idx`` solves the ``s x s`` system
``(R(:, idx)^T R(:, idx) + lambda I) beta = b(idx)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.model_selection import train_test_split

from rffboot import logger
from rffboot.bootstrap.enums import ErrorMode
from rffboot.bootstrap.module import ErrorFunctional
from rffboot.errnorms.module import qr_factor
from rffboot.exceptions import InvalidInput, SolverError
from rffboot.features.module import FeatureMap, exact_kernel_matrix
from rffboot.kernels.module import Kernel

lib_log = logger.Library.logger()

DEFAULT_LAMBDA: float = 1.0


@dataclass(frozen=True)
class RidgeProblem:
    """Training and test data with the regularisation parameter ``lam``."""

    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        X_train = np.atleast_2d(np.asarray(self.X_train, dtype=float))
        X_test = np.atleast_2d(np.asarray(self.X_test, dtype=float))
        y_train = np.asarray(self.y_train, dtype=float).ravel()
        y_test = np.asarray(self.y_test, dtype=float).ravel()
        if X_train.shape[0] != y_train.size or X_train.shape[0] == 0:
            raise InvalidInput(
                f"Training set has {X_train.shape[0]} points and {y_train.size} labels."
            )
        if X_test.shape[0] != y_test.size or X_test.shape[0] == 0:
            raise InvalidInput(
                f"Test set has {X_test.shape[0]} points and {y_test.size} labels."
            )
        if X_train.shape[1] != X_test.shape[1]:
            raise InvalidInput(
                f"Train and test dimensions differ: "
                f"{X_train.shape[1]}, {X_test.shape[1]}."
            )
        if not self.lam > 0:
            raise InvalidInput(f"lambda has to be positive, got {self.lam}.")
        object.__setattr__(self, "X_train", X_train)
        object.__setattr__(self, "X_test", X_test)
        object.__setattr__(self, "y_train", y_train)
        object.__setattr__(self, "y_test", y_test)

    @property
    def n(self) -> int:
        return self.X_train.shape[0]

    @property
    def t(self) -> int:
        return self.X_test.shape[0]

    @property
    def d(self) -> int:
        return self.X_train.shape[1]

    @classmethod
    def from_arrays(
        cls,
        X: np.ndarray,
        y: np.ndarray,
        test_size,
        lam: float = DEFAULT_LAMBDA,
        seed: int = 0,
    ) -> RidgeProblem:
        """Split labelled data into a training and a held-out test part.

        :param test_size: Fraction or absolute number of test points.
        """
        X_train, X_test, y_train, y_test = train_test_split(
            np.asarray(X, dtype=float),
            np.asarray(y, dtype=float),
            test_size=test_size,
            random_state=seed,
        )
        return cls(X_train, y_train, X_test, y_test, lam)

    def __repr__(self) -> str:
        return (
            f'<RidgeProblem n="{self.n}" t="{self.t}" d="{self.d}" lam="{self.lam}">'
        )


@dataclass(frozen=True)
class RffRidgeFit:
    beta_tilde: np.ndarray
    feature_map: FeatureMap

    def predict(self, points: np.ndarray) -> np.ndarray:
        return self.feature_map.transform(points) @ self.beta_tilde


def solve_spd(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A x = b`` for symmetric positive definite ``A`` via Cholesky."""
    try:
        factor = scipy.linalg.cho_factor(A, lower=False, check_finite=True)
        x = scipy.linalg.cho_solve(factor, b, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"Cholesky solve failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SolverError("Cholesky solve produced non-finite values.")
    return x


def fit_exact(problem: RidgeProblem, kernel: Kernel) -> np.ndarray:
    """``beta`` solving ``(K + lambda I) beta = y``."""
    K = exact_kernel_matrix(kernel, problem.X_train)
    K[np.diag_indices_from(K)] += problem.lam
    return solve_spd(K, problem.y_train)


def predict_exact(
    problem: RidgeProblem, kernel: Kernel, beta: np.ndarray, points: np.ndarray
) -> np.ndarray:
    """``f_k(x) = sum_i beta_i k(x_i, x)`` at every row of ``points``."""
    return kernel.matrix(points, problem.X_train) @ beta


def psi_exact(problem: RidgeProblem, kernel: Kernel) -> float:
    """Mean squared test error of the exact kernel ridge regressor."""
    beta = fit_exact(problem, kernel)
    residual = problem.y_test - predict_exact(problem, kernel, beta, problem.X_test)
    return float(np.mean(residual**2))


def fit_rff(
    problem: RidgeProblem, Z: np.ndarray, feature_map: FeatureMap
) -> RffRidgeFit:
    """``beta_tilde`` solving ``(Z^T Z + lambda I) beta_tilde = Z^T y``."""
    Z = np.asarray(Z, dtype=float)
    if Z.shape != (problem.n, feature_map.s):
        raise InvalidInput(
            f"Feature matrix has shape {Z.shape}, "
            f"expected {(problem.n, feature_map.s)}."
        )
    A = Z.T @ Z
    A[np.diag_indices_from(A)] += problem.lam
    beta = solve_spd(A, Z.T @ problem.y_train)
    return RffRidgeFit(beta_tilde=beta, feature_map=feature_map)


def psi_rff(fit: RffRidgeFit, problem: RidgeProblem) -> float:
    """Mean squared test error of the random-feature regressor."""
    residual = problem.y_test - fit.predict(problem.X_test)
    return float(np.mean(residual**2))


class KrrFunctional(ErrorFunctional):
    """Signed change ``psi(k*) - psi(k~)`` of the test error under a resample."""

    default_mode = ErrorMode.SIGNED

    def __init__(self, problem: RidgeProblem, Z: np.ndarray, feature_map: FeatureMap):
        Z = np.asarray(Z, dtype=float)
        n, s = Z.shape
        if n < s:
            raise InvalidInput(f"QR path needs n >= s, got n={n}, s={s}.")
        if n != problem.n or s != feature_map.s:
            raise InvalidInput(
                f"Feature matrix {Z.shape} does not match "
                f"n={problem.n}, s={feature_map.s}."
            )
        self.problem = problem
        self._R = qr_factor(Z).R
        self._b = Z.T @ problem.y_train
        self._test = feature_map.transform(problem.X_test)
        self._identity = np.arange(s)
        self.psi_reference = self._psi(self._identity)
        lib_log.debug(
            "KRR functional ready: n=%d, s=%d, t=%d, psi=%.6g.",
            n,
            s,
            problem.t,
            self.psi_reference,
        )

    @property
    def width(self) -> int:
        return self._R.shape[1]

    def _psi(self, idx: np.ndarray) -> float:
        R = np.take(self._R, idx, axis=1)
        A = R.T @ R
        A[np.diag_indices_from(A)] += self.problem.lam
        beta = solve_spd(A, self._b[idx])
        residual = self.problem.y_test - np.take(self._test, idx, axis=1) @ beta
        return float(np.mean(residual**2))

    def evaluate(self, idx: np.ndarray, rng: np.random.Generator) -> float:
        idx = self.check_indices(idx)
        return self._psi(idx) - self.psi_reference


def krr_bootstrap_functional(
    problem: RidgeProblem, Z: np.ndarray, feature_map: FeatureMap
) -> KrrFunctional:
    return KrrFunctional(problem, Z, feature_map)
