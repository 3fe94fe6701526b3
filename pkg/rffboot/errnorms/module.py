"""Error norms of ``ZZ^T`` against a reference.

For bootstrap differences ``Z* Z*^T - Z Z^T`` two fast paths exist: a
matrix-free power method and the ``s x s`` problem obtained from a thin QR
factorisation ``Z = QR``, using ``Z(:, idx) = Q R(:, idx)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from rffboot import logger
from rffboot.bootstrap.module import ErrorFunctional
from rffboot.exceptions import InvalidInput
from rffboot.utils import as_rng

from .enums import OpnormMethod

lib_log = logger.Library.logger()

DEFAULT_POWER_TOL: float = 1e-4


@dataclass(frozen=True)
class PowerMethodResult:
    """Operator norm estimate.

    :param value: Best estimate of the norm.
    :param iterations: Power steps taken, each applying the operator twice.
    :param converged: Whether the stopping tolerance was met.
    """

    value: float
    iterations: int
    converged: bool

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class QrFactor:
    """Thin QR factorisation, ``Q`` is ``n x s`` orthonormal, ``R`` upper triangular."""

    Q: np.ndarray
    R: np.ndarray


def _check_same_shape(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise InvalidInput(f"Shapes differ: {A.shape} and {B.shape}.")


def linf_error(A: np.ndarray, B: np.ndarray) -> float:
    """Largest absolute entrywise difference."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _check_same_shape(A, B)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A - B)))


def opnorm_error(A: np.ndarray, B: np.ndarray) -> float:
    """Operator norm of the symmetric difference ``A - B``, dense eigensolver."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _check_same_shape(A, B)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"Expected square matrices, got {A.shape}.")
    return _symmetric_norm(A - B)


def _symmetric_norm(D: np.ndarray) -> float:
    eigenvalues = scipy.linalg.eigvalsh(D)
    return float(max(abs(eigenvalues[0]), abs(eigenvalues[-1])))


def default_max_iter(n: int) -> int:
    return max(1, math.ceil(10.0 * math.log(n + 1)))


def opnorm_diff_powermethod(
    Z_star: np.ndarray,
    Z: np.ndarray,
    tol: float = DEFAULT_POWER_TOL,
    max_iter: Optional[int] = None,
    rng=None,
) -> PowerMethodResult:
    """``||Z* Z*^T - Z Z^T||_op`` without forming an ``n x n`` matrix.

    The difference ``M`` is symmetric but indefinite, so the iteration runs on
    ``M^2`` and returns the square root of the Rayleigh quotient
    ``theta = ||M v||^2``, which never exceeds the norm. Stops once the
    residual ``||M^2 v - theta v||`` is at most ``tol * theta``, or after
    ``max_iter`` steps (``ceil(10 ln(n + 1))`` by default).
    """
    Z_star = np.asarray(Z_star, dtype=float)
    Z = np.asarray(Z, dtype=float)
    _check_same_shape(Z_star, Z)
    if tol <= 0:
        raise InvalidInput(f"Tolerance has to be positive, got {tol}.")
    n = Z.shape[0]
    if max_iter is None:
        max_iter = default_max_iter(n)
    if max_iter < 1:
        raise InvalidInput(f"max_iter has to be positive, got {max_iter}.")

    def apply(v: np.ndarray) -> np.ndarray:
        return Z_star @ (Z_star.T @ v) - Z @ (Z.T @ v)

    v = as_rng(rng).standard_normal(n)
    v /= np.linalg.norm(v)
    theta = 0.0
    for iteration in range(1, max_iter + 1):
        w = apply(v)
        theta = float(w @ w)
        if theta == 0.0:
            return PowerMethodResult(value=0.0, iterations=iteration, converged=True)
        u = apply(w)
        if np.linalg.norm(u - theta * v) <= tol * theta:
            return PowerMethodResult(
                value=math.sqrt(theta), iterations=iteration, converged=True
            )
        # v^T u = theta > 0, so u is never zero here
        v = u / np.linalg.norm(u)
    lib_log.debug(
        "Power method stopped after %d iterations without reaching tol=%g.",
        max_iter,
        tol,
    )
    return PowerMethodResult(
        value=math.sqrt(theta), iterations=max_iter, converged=False
    )


def qr_factor(Z: np.ndarray) -> QrFactor:
    """Thin Householder QR (LAPACK ``geqrf``) of an ``n x s`` matrix, ``n >= s``."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise InvalidInput(f"Expected a matrix, got shape {Z.shape}.")
    n, s = Z.shape
    if n < s:
        raise InvalidInput(f"Thin QR needs n >= s, got n={n}, s={s}.")
    Q, R = scipy.linalg.qr(Z, mode="economic")
    return QrFactor(Q=Q, R=R)


def opnorm_diff_qr(R: np.ndarray, idx: np.ndarray) -> float:
    """``||R(:, idx) R(:, idx)^T - R R^T||_op`` on the ``s x s`` problem."""
    R = np.asarray(R, dtype=float)
    s = R.shape[1]
    idx = np.asarray(idx)
    if idx.shape != (s,) or (idx.size and (idx.min() < 0 or idx.max() >= s)):
        raise InvalidInput(f"Bad resample for {s} columns: {idx!r}.")
    base = np.take(R, np.arange(s), axis=1)
    resampled = np.take(R, idx, axis=1)
    return _symmetric_norm(resampled @ resampled.T - base @ base.T)


class LinfFunctional(ErrorFunctional):
    """``||Z* Z*^T - Z Z^T||_inf`` for a resample ``Z* = Z(:, idx)``."""

    def __init__(self, Z: np.ndarray):
        Z = np.asarray(Z, dtype=float)
        self._Z = Z
        base = np.take(Z, np.arange(Z.shape[1]), axis=1)
        self._gram = base @ base.T

    @property
    def width(self) -> int:
        return self._Z.shape[1]

    def evaluate(self, idx: np.ndarray, rng: np.random.Generator) -> float:
        idx = self.check_indices(idx)
        resampled = np.take(self._Z, idx, axis=1)
        return linf_error(resampled @ resampled.T, self._gram)


class OpnormFunctional(ErrorFunctional):
    """``||Z* Z*^T - Z Z^T||_op`` through the power method or the QR path.

    :param method: :class:`OpnormMethod`; the QR path factors ``Z`` once here.
    :param tol: Power method tolerance.
    :param max_iter: Power method iteration cap.
    """

    def __init__(
        self,
        Z: np.ndarray,
        method: OpnormMethod = OpnormMethod.POWER,
        tol: float = DEFAULT_POWER_TOL,
        max_iter: Optional[int] = None,
    ):
        Z = np.asarray(Z, dtype=float)
        self.method = OpnormMethod(method)
        self.tol = tol
        self.max_iter = max_iter
        self._Z = Z
        self._base = np.take(Z, np.arange(Z.shape[1]), axis=1)
        self._R = qr_factor(Z).R if self.method == OpnormMethod.QR else None

    @property
    def width(self) -> int:
        return self._Z.shape[1]

    def evaluate(self, idx: np.ndarray, rng: np.random.Generator) -> float:
        return self.evaluate_with_status(idx, rng)[0]

    def evaluate_with_status(
        self, idx: np.ndarray, rng: np.random.Generator
    ) -> Tuple[float, bool]:
        idx = self.check_indices(idx)
        if self.method == OpnormMethod.QR:
            return opnorm_diff_qr(self._R, idx), True
        result = opnorm_diff_powermethod(
            np.take(self._Z, idx, axis=1),
            self._base,
            tol=self.tol,
            max_iter=self.max_iter,
            rng=rng,
        )
        return result.value, result.converged
