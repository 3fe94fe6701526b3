"""Shift-invariant kernels and their spectral distributions.

The ``scale`` of a :class:`Kernel` is read per family:

* Gaussian, ``exp(-||x - x'||_2^2 / (2 scale^2))``, frequencies ``N(0, 1/scale^2)``
* Laplacian, ``exp(-||x - x'||_1 / scale)``, frequencies ``Cauchy(0, 1/scale)``
* Cauchy, ``prod_j 1 / (1 + (x_j - x'_j)^2 / scale)``, frequencies
  ``Laplace(0, 1/sqrt(scale))``

Frequencies are drawn coordinate-wise i.i.d., phases uniformly on ``[0, 2 pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from rffboot.exceptions import InvalidInput

from .enums import KernelFamily

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Kernel:
    """Shift-invariant kernel normalised so that ``k(x, x) = 1``.

    :param family: Kernel family.
    :param scale: Positive bandwidth, see module documentation for its meaning.
    """

    family: KernelFamily
    scale: float

    def __post_init__(self):
        if not isinstance(self.family, KernelFamily):
            if not KernelFamily.has_member(str(self.family)):
                raise InvalidInput(f"Unknown kernel family: {self.family!r}.")
            object.__setattr__(self, "family", KernelFamily(self.family))
        scale = float(self.scale)
        if not math.isfinite(scale) or scale <= 0:
            raise InvalidInput(f"Kernel scale has to be positive, got {self.scale}.")
        object.__setattr__(self, "scale", scale)

    @classmethod
    def from_name(cls, name: str, scale: float) -> Kernel:
        return cls(KernelFamily(name.lower()), scale)

    def eval(self, x: np.ndarray, x2: np.ndarray) -> float:
        """Evaluate ``k(x, x2)`` for two points of equal dimension."""
        x = np.asarray(x, dtype=float).ravel()
        x2 = np.asarray(x2, dtype=float).ravel()
        if x.shape != x2.shape or x.size == 0:
            raise InvalidInput(
                f"Points have to share a positive dimension, got {x.size}, {x2.size}."
            )
        delta = x - x2
        if self.family == KernelFamily.GAUSSIAN:
            return float(np.exp(-np.sum(delta * delta) / (2.0 * self.scale**2)))
        if self.family == KernelFamily.LAPLACIAN:
            return float(np.exp(-np.sum(np.abs(delta)) / self.scale))
        return float(np.prod(1.0 / (1.0 + delta * delta / self.scale)))

    def matrix(self, X: np.ndarray, Y: Optional[np.ndarray] = None) -> np.ndarray:
        """Kernel matrix with entries ``k(X[i], Y[j])``.

        :param X: ``n x d`` points.
        :param Y: ``m x d`` points, ``X`` when omitted.
        :return: ``n x m`` matrix.
        """
        X = as_points(X)
        Y = X if Y is None else as_points(Y)
        if X.shape[1] != Y.shape[1]:
            raise InvalidInput(
                f"Point dimensions differ: {X.shape[1]} and {Y.shape[1]}."
            )
        if self.family == KernelFamily.GAUSSIAN:
            return np.exp(-cdist(X, Y, "sqeuclidean") / (2.0 * self.scale**2))
        if self.family == KernelFamily.LAPLACIAN:
            return np.exp(-cdist(X, Y, "cityblock") / self.scale)
        # product over coordinates
        K = np.ones((X.shape[0], Y.shape[0]))
        for j in range(X.shape[1]):
            gap = cdist(X[:, j : j + 1], Y[:, j : j + 1], "sqeuclidean")
            K /= 1.0 + gap / self.scale
        return K

    def __repr__(self) -> str:
        return f'<Kernel family="{self.family.value}" scale="{self.scale}">'


@dataclass(frozen=True)
class SpectralSample:
    """One draw ``(W, U)`` from the spectral distribution and the phase law."""

    frequency: np.ndarray
    phase: float


def eval_kernel(kernel: Kernel, x: np.ndarray, x2: np.ndarray) -> float:
    return kernel.eval(x, x2)


def sample_spectral_arrays(
    kernel: Kernel, d: int, count: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` frequencies and phases as arrays.

    Frequencies are drawn before phases, so the same stream always gives the
    same pairs.

    :return: ``count x d`` frequency matrix and ``count`` phases in ``[0, 2 pi)``.
    """
    if d < 1 or count < 1:
        raise InvalidInput(f"Need d >= 1 and count >= 1, got d={d}, count={count}.")
    size = (count, d)
    if kernel.family == KernelFamily.GAUSSIAN:
        W = rng.normal(0.0, 1.0 / kernel.scale, size=size)
    elif kernel.family == KernelFamily.LAPLACIAN:
        # inverse CDF of Cauchy(0, 1/scale)
        W = np.tan(np.pi * (rng.random(size) - 0.5)) / kernel.scale
    else:
        # Laplace(0, b) as an exponential with a random sign
        magnitude = rng.exponential(1.0 / math.sqrt(kernel.scale), size=size)
        W = np.where(rng.random(size) < 0.5, -magnitude, magnitude)
    U = TWO_PI * rng.random(count)
    return W, U


def sample_spectral(
    kernel: Kernel, d: int, count: int, rng: np.random.Generator
) -> List[SpectralSample]:
    W, U = sample_spectral_arrays(kernel, d, count, rng)
    return [SpectralSample(frequency=w, phase=float(u)) for w, u in zip(W, U)]


def as_points(points: Union[np.ndarray, list]) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    if points.ndim != 2 or points.shape[1] == 0:
        raise InvalidInput(f"Expected an n x d point matrix, got shape {points.shape}.")
    return points
