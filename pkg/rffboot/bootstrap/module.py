"""Bootstrap estimation of RFF error quantiles.

A run draws ``n_boot`` resample index vectors (columns of ``Z`` sampled with
replacement), evaluates a pseudo-error for each of them and reports the
``1 - alpha`` empirical quantile. The estimate can be carried over to a larger
feature count with :func:`extrapolate`.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from rffboot import logger
from rffboot.exceptions import BootstrapIterationError, InvalidInput
from rffboot.utils import derive_rng, parallel_map

from .enums import ErrorMode

lib_log = logger.Library.logger()

DEFAULT_N_BOOT: int = 50
DEFAULT_ALPHA: float = 0.1


class ErrorFunctional(abc.ABC):
    """Pseudo-error of a column resample relative to the original sketch.

    Implementations hold read-only feature data of width :attr:`width` and
    must return exactly ``0.0`` for the identity index vector.
    """

    #: mode used when :class:`BootstrapConfig` does not pick one
    default_mode: ErrorMode = ErrorMode.ABSOLUTE

    @property
    @abc.abstractmethod
    def width(self) -> int:
        """Number of feature columns ``s``."""

    @abc.abstractmethod
    def evaluate(self, idx: np.ndarray, rng: np.random.Generator) -> float:
        """Signed pseudo-error for the resample ``idx``.

        :param idx: 0-based column indices, length :attr:`width`.
        :param rng: Stream private to this evaluation.
        """

    def evaluate_with_status(
        self, idx: np.ndarray, rng: np.random.Generator
    ) -> Tuple[float, bool]:
        """Pseudo-error together with whether its iterative solve converged."""
        return self.evaluate(idx, rng), True

    def check_indices(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx)
        if idx.shape != (self.width,):
            raise InvalidInput(
                f"Resample has shape {idx.shape}, expected ({self.width},)."
            )
        if not np.issubdtype(idx.dtype, np.integer):
            raise InvalidInput("Resample indices have to be integers.")
        if idx.size and (idx.min() < 0 or idx.max() >= self.width):
            raise InvalidInput(f"Resample indices out of range 0..{self.width - 1}.")
        return idx


@dataclass(frozen=True)
class BootstrapConfig:
    """Bootstrap settings.

    :param n_boot: Number of iterations ``N``.
    :param alpha: Quantile level is ``1 - alpha``.
    :param seed: Base seed; iteration ``j`` uses a stream derived from ``(seed, j)``.
    :param mode: Absolute or signed pseudo-errors; ``None`` keeps the
        functional's default.
    :param workers: Threads evaluating iterations.
    """

    n_boot: int = DEFAULT_N_BOOT
    alpha: float = DEFAULT_ALPHA
    seed: int = 0
    mode: Optional[ErrorMode] = None
    workers: int = 1

    def __post_init__(self):
        if self.n_boot < 1:
            raise InvalidInput(f"n_boot has to be at least 1, got {self.n_boot}.")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInput(f"alpha has to lie in (0, 1), got {self.alpha}.")
        if self.workers < 1:
            raise InvalidInput(f"workers has to be positive, got {self.workers}.")
        if self.mode is not None and not isinstance(self.mode, ErrorMode):
            object.__setattr__(self, "mode", ErrorMode(self.mode))


@dataclass(frozen=True)
class BootstrapResult:
    pseudo_errors: List[float]
    estimate: float
    s: int
    alpha: float
    n_boot: int
    mode: ErrorMode = field(default=ErrorMode.ABSOLUTE)
    #: iterations whose pseudo-error comes from an unconverged solve
    unconverged: int = 0

    def extrapolate(self, s1: int) -> float:
        return extrapolate(self.estimate, self.s, s1)

    def __repr__(self) -> str:
        return (
            f'<BootstrapResult estimate="{self.estimate}" s="{self.s}" '
            f'alpha="{self.alpha}" n_boot="{self.n_boot}" mode="{self.mode.value}">'
        )

    def dump(self) -> dict:
        return {
            "pseudo_errors": list(self.pseudo_errors),
            "estimate": self.estimate,
            "s": self.s,
            "alpha": self.alpha,
            "n_boot": self.n_boot,
            "mode": self.mode.value,
            "unconverged": self.unconverged,
        }


def empirical_quantile(values: Sequence[float], level: float) -> float:
    """Smallest ``a`` among ``values`` with ``#{v <= a} / N >= level``."""
    ordered = np.sort(np.asarray(values, dtype=float).ravel())
    count = ordered.size
    if count == 0:
        raise InvalidInput("Cannot take a quantile of an empty list.")
    if not 0.0 < level < 1.0:
        raise InvalidInput(f"Quantile level has to lie in (0, 1), got {level}.")
    k = min(max(math.ceil(level * count), 1), count)
    # ceil() may overshoot by one when level * count is inexact
    while k > 1 and (k - 1) / count >= level:
        k -= 1
    while k < count and k / count < level:
        k += 1
    return float(ordered[k - 1])


def resample_indices(s: int, rng: np.random.Generator) -> np.ndarray:
    """``s`` indices drawn uniformly with replacement from ``0..s-1``."""
    if s < 1:
        raise InvalidInput(f"Need s >= 1, got {s}.")
    return rng.integers(0, s, size=s)


def run_bootstrap(
    functional: ErrorFunctional, s: int, config: BootstrapConfig
) -> BootstrapResult:
    """Run the bootstrap and return all pseudo-errors with their quantile.

    The result does not depend on ``config.workers``: iteration ``j`` draws its
    resample from its own stream and results are kept in iteration order.
    """
    if functional.width != s:
        raise InvalidInput(
            f"Functional is bound to {functional.width} features, asked for {s}."
        )
    mode = config.mode if config.mode is not None else functional.default_mode

    def iteration(j: int) -> Tuple[float, bool]:
        rng = derive_rng(config.seed, j)
        idx = resample_indices(s, rng)
        try:
            value, converged = functional.evaluate_with_status(idx, rng)
        except Exception as exc:
            raise BootstrapIterationError(j, exc) from exc
        return (abs(value) if mode == ErrorMode.ABSOLUTE else value), converged

    outcomes = parallel_map(iteration, range(config.n_boot), config.workers)
    pseudo_errors = [value for value, _ in outcomes]
    unconverged = sum(1 for _, converged in outcomes if not converged)
    if unconverged:
        lib_log.warning(
            "%d of %d bootstrap iterations at s=%d did not converge.",
            unconverged,
            config.n_boot,
            s,
        )
    estimate = empirical_quantile(pseudo_errors, 1.0 - config.alpha)
    lib_log.debug(
        "Bootstrap s=%d N=%d alpha=%s finished, estimate %.6g.",
        s,
        config.n_boot,
        config.alpha,
        estimate,
    )
    return BootstrapResult(
        pseudo_errors=[float(v) for v in pseudo_errors],
        estimate=estimate,
        s=s,
        alpha=config.alpha,
        n_boot=config.n_boot,
        mode=mode,
        unconverged=unconverged,
    )


def extrapolate(estimate_at_s0: float, s0: int, s1: int) -> float:
    """Carry an estimate from ``s0`` to ``s1`` features with the ``1/sqrt(s)`` rule."""
    if s0 < 1 or s1 < 1:
        raise InvalidInput(f"Feature counts have to be positive, got {s0}, {s1}.")
    return math.sqrt(s0 / s1) * estimate_at_s0


def select_feature_count(estimate_at_s0: float, s0: int, tol: float) -> int:
    """Feature count whose extrapolated error meets ``tol``, never below ``s0``."""
    if tol <= 0:
        raise InvalidInput(f"Tolerance has to be positive, got {tol}.")
    if estimate_at_s0 < 0:
        raise InvalidInput(f"Estimate has to be non-negative, got {estimate_at_s0}.")
    if s0 < 1:
        raise InvalidInput(f"Need s0 >= 1, got {s0}.")
    if estimate_at_s0 <= tol:
        return s0
    ratio = estimate_at_s0 / tol
    s1 = s0 * ratio * ratio
    # 50 * (0.8 / 0.08)^2 evaluates to 5000.000000000001
    rounded = round(s1)
    if math.isclose(s1, rounded, rel_tol=1e-12):
        return max(int(rounded), s0)
    return max(math.ceil(s1), s0)
