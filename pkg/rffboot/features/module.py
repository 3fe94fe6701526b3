"""Random Fourier features ``Z_i(x) = sqrt(2) cos(<x, W_i> + U_i)``.

:func:`eval_feature` returns the unnormalised value; the ``1/sqrt(s)`` factor
is applied only when a feature matrix is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from rffboot.exceptions import InvalidInput
from rffboot.kernels.module import (
    Kernel,
    SpectralSample,
    as_points,
    sample_spectral_arrays,
)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FeatureMap:
    """Sampled frequencies ``W`` (``s x d``) and phases ``U`` (``s``)."""

    W: np.ndarray
    U: np.ndarray

    def __post_init__(self):
        W = np.array(self.W, dtype=float, ndmin=2)
        U = np.array(self.U, dtype=float).ravel()
        if W.shape[0] != U.shape[0] or W.shape[0] == 0:
            raise InvalidInput(
                f"Need s >= 1 frequencies and phases, got {W.shape}, {U.shape}."
            )
        W.setflags(write=False)
        U.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "U", U)

    @property
    def s(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1]

    @property
    def samples(self) -> List[SpectralSample]:
        return [
            SpectralSample(frequency=w, phase=float(u)) for w, u in zip(self.W, self.U)
        ]

    def raw(self, points: np.ndarray) -> np.ndarray:
        """Unnormalised feature values, ``n x s``."""
        points = as_points(points)
        if points.shape[1] != self.d:
            raise InvalidInput(
                f"Points have dimension {points.shape[1]}, the map expects {self.d}."
            )
        return SQRT2 * np.cos(points @ self.W.T + self.U)

    def transform(self, points: np.ndarray) -> np.ndarray:
        """Feature matrix ``Z`` with columns ``Z_i(x_1..x_n) / sqrt(s)``.

        Stored column-major, every consumer slices it by feature.
        """
        return np.asfortranarray(self.raw(points) / math.sqrt(self.s))

    def __repr__(self) -> str:
        return f'<FeatureMap s="{self.s}" d="{self.d}">'


def make_feature_map(
    kernel: Kernel, d: int, s: int, rng: np.random.Generator
) -> FeatureMap:
    W, U = sample_spectral_arrays(kernel, d, s, rng)
    return FeatureMap(W=W, U=U)


def eval_feature(feature_map: FeatureMap, i: int, x: np.ndarray) -> float:
    """Evaluate the ``i``-th (0-based) feature at ``x``, no ``1/sqrt(s)`` factor."""
    if not 0 <= i < feature_map.s:
        raise InvalidInput(f"Feature index {i} out of range 0..{feature_map.s - 1}.")
    x = np.asarray(x, dtype=float).ravel()
    if x.size != feature_map.d:
        raise InvalidInput(
            f"Point has dimension {x.size}, feature map expects {feature_map.d}."
        )
    return float(SQRT2 * np.cos(x @ feature_map.W[i] + feature_map.U[i]))


def build_feature_matrix(feature_map: FeatureMap, points: np.ndarray) -> np.ndarray:
    return feature_map.transform(points)


def approx_kernel(feature_map: FeatureMap, x: np.ndarray, x2: np.ndarray) -> float:
    """``(1/s) sum_i Z_i(x) Z_i(x2)``."""
    x = np.asarray(x, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    if x.shape != x2.shape:
        raise InvalidInput(f"Point dimensions differ: {x.size} and {x2.size}.")
    z = feature_map.transform(x)[0]
    z2 = feature_map.transform(x2)[0]
    return float(z @ z2)


def approx_kernel_matrix(feature_map: FeatureMap, points: np.ndarray) -> np.ndarray:
    Z = feature_map.transform(points)
    return Z @ Z.T


def exact_kernel_matrix(kernel: Kernel, points: np.ndarray) -> np.ndarray:
    """Symmetric ``n x n`` kernel matrix with a unit diagonal."""
    K = kernel.matrix(points)
    # exact symmetry and unit diagonal
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return K
