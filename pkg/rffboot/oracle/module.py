"""Monte Carlo ground truth for RFF error quantiles.

Every trial draws an independent feature map, so the distribution of the true
error (and of the bootstrap estimate computed from the same map) can be
sampled on instances small enough for the exact kernel to be formed.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, replace
from typing import List, Optional, Union

import numpy as np

from rffboot import logger
from rffboot.bootstrap.module import (
    BootstrapConfig,
    ErrorFunctional,
    empirical_quantile,
    run_bootstrap,
)
from rffboot.datasets.module import PointSet
from rffboot.errnorms.enums import OpnormMethod
from rffboot.errnorms.module import (
    DEFAULT_POWER_TOL,
    LinfFunctional,
    OpnormFunctional,
    linf_error,
    opnorm_error,
)
from rffboot.exceptions import InvalidInput
from rffboot.features.module import FeatureMap, exact_kernel_matrix, make_feature_map
from rffboot.kernels.module import Kernel
from rffboot.mmd.module import MmdFunctional, MmdProblem, mmd_exact, mmd_rff_linear
from rffboot.ridge.module import (
    KrrFunctional,
    RidgeProblem,
    fit_rff,
    psi_exact,
    psi_rff,
)
from rffboot.utils import derive_rng, derive_seed, parallel_map

from .enums import ErrorTarget

lib_log = logger.Library.logger()

DEFAULT_ORACLE_TRIALS: int = 300
MIN_ORACLE_TRIALS: int = 30


class TargetInstance(abc.ABC):
    """Problem data bound to a kernel and an error target."""

    target: ErrorTarget

    def __init__(self, kernel: Kernel):
        self.kernel = kernel

    @property
    @abc.abstractmethod
    def dim(self) -> int:
        """Dimension of the points the feature maps act on."""

    @property
    def reference_value(self) -> Optional[float]:
        """Exact functional value (``psi(k)`` or ``T``), ``None`` for matrix norms."""
        return None

    @property
    def max_features(self) -> Optional[int]:
        """Largest feature count the bootstrap path accepts, ``None`` if unbounded."""
        return None

    def draw_map(self, s: int, rng: np.random.Generator) -> FeatureMap:
        return make_feature_map(self.kernel, self.dim, s, rng)

    @abc.abstractmethod
    def true_error(self, feature_map: FeatureMap) -> float:
        """Error of the approximation built from ``feature_map``."""

    @abc.abstractmethod
    def functional(self, feature_map: FeatureMap) -> ErrorFunctional:
        """Bootstrap functional for the approximation built from ``feature_map``."""


class MatrixInstance(TargetInstance):
    """``||ZZ^T - K||`` in the entrywise maximum or operator norm."""

    def __init__(
        self,
        points: Union[PointSet, np.ndarray],
        kernel: Kernel,
        target: ErrorTarget = ErrorTarget.MATRIX_LINF,
        method: OpnormMethod = OpnormMethod.POWER,
        tol: float = DEFAULT_POWER_TOL,
        max_iter: Optional[int] = None,
    ):
        super().__init__(kernel)
        if target not in (ErrorTarget.MATRIX_LINF, ErrorTarget.MATRIX_OP):
            raise InvalidInput(f"Not a matrix target: {target}.")
        self.target = target
        self.points = points.points if isinstance(points, PointSet) else points
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.method = OpnormMethod(method)
        self.tol = tol
        self.max_iter = max_iter
        self.K = exact_kernel_matrix(kernel, self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def max_features(self) -> Optional[int]:
        if self.target == ErrorTarget.MATRIX_OP and self.method == OpnormMethod.QR:
            return self.points.shape[0]
        return None

    def true_error(self, feature_map: FeatureMap) -> float:
        Z = feature_map.transform(self.points)
        if self.target == ErrorTarget.MATRIX_LINF:
            return linf_error(Z @ Z.T, self.K)
        return opnorm_error(Z @ Z.T, self.K)

    def functional(self, feature_map: FeatureMap) -> ErrorFunctional:
        Z = feature_map.transform(self.points)
        if self.target == ErrorTarget.MATRIX_LINF:
            return LinfFunctional(Z)
        return OpnormFunctional(Z, self.method, self.tol, self.max_iter)


class RidgeInstance(TargetInstance):
    """Signed excess test error ``psi(k~) - psi(k)`` of kernel ridge regression."""

    target = ErrorTarget.KRR

    def __init__(self, problem: RidgeProblem, kernel: Kernel):
        super().__init__(kernel)
        self.problem = problem
        self.psi = psi_exact(problem, kernel)

    @property
    def dim(self) -> int:
        return self.problem.d

    @property
    def reference_value(self) -> float:
        return self.psi

    @property
    def max_features(self) -> int:
        # thin QR of the n x s training features
        return self.problem.n

    def true_error(self, feature_map: FeatureMap) -> float:
        Z = feature_map.transform(self.problem.X_train)
        fit = fit_rff(self.problem, Z, feature_map)
        return psi_rff(fit, self.problem) - self.psi

    def functional(self, feature_map: FeatureMap) -> ErrorFunctional:
        Z = feature_map.transform(self.problem.X_train)
        return KrrFunctional(self.problem, Z, feature_map)


class MmdInstance(TargetInstance):
    """``|T~ - T|`` for the unbiased MMD statistic."""

    target = ErrorTarget.MMD

    def __init__(self, problem: MmdProblem, kernel: Kernel):
        super().__init__(kernel)
        self.problem = problem
        self.statistic = mmd_exact(problem, kernel)

    @property
    def dim(self) -> int:
        return self.problem.d

    @property
    def reference_value(self) -> float:
        return self.statistic

    def true_error(self, feature_map: FeatureMap) -> float:
        return abs(mmd_rff_linear(self.problem, feature_map) - self.statistic)

    def functional(self, feature_map: FeatureMap) -> ErrorFunctional:
        return MmdFunctional(self.problem, feature_map)


def make_instance(
    target: ErrorTarget, data, kernel: Kernel, **options
) -> TargetInstance:
    """Bind ``data`` to ``kernel`` for the given target.

    ``data`` is a :class:`PointSet` (or array) for the matrix targets, a
    :class:`RidgeProblem` for ``krr`` and an :class:`MmdProblem` for ``mmd``.
    Extra ``options`` go to :class:`MatrixInstance`.
    """
    target = ErrorTarget(target)
    if target in (ErrorTarget.MATRIX_LINF, ErrorTarget.MATRIX_OP):
        return MatrixInstance(data, kernel, target, **options)
    if target == ErrorTarget.KRR:
        if not isinstance(data, RidgeProblem):
            raise InvalidInput("The krr target needs a RidgeProblem.")
        return RidgeInstance(data, kernel)
    if not isinstance(data, MmdProblem):
        raise InvalidInput("The mmd target needs an MmdProblem.")
    return MmdInstance(data, kernel)


@dataclass(frozen=True)
class OracleResult:
    trials: int
    error_samples: List[float]
    quantile: float
    s: int
    alpha: float

    def __repr__(self) -> str:
        return (
            f'<OracleResult s="{self.s}" alpha="{self.alpha}" '
            f'trials="{self.trials}" quantile="{self.quantile}">'
        )


@dataclass(frozen=True)
class TrialOutcome:
    """True error and bootstrap estimate computed from one feature map."""

    error: float
    estimate: float


@dataclass(frozen=True)
class CoverageResult:
    outcomes: List[TrialOutcome]

    @property
    def errors(self) -> List[float]:
        return [outcome.error for outcome in self.outcomes]

    @property
    def estimates(self) -> List[float]:
        return [outcome.estimate for outcome in self.outcomes]

    @property
    def frequency(self) -> float:
        """Share of trials where the true error did not exceed the estimate."""
        hits = sum(outcome.error <= outcome.estimate for outcome in self.outcomes)
        return hits / len(self.outcomes)


def trial_rng(seed: int, s: int, trial: int) -> np.random.Generator:
    """Stream that draws the feature map of one trial."""
    return derive_rng(seed, s, trial)


def sample_errors(
    instance: TargetInstance, s: int, trials: int, seed: int = 0, workers: int = 1
) -> List[float]:
    """True errors of ``trials`` independent feature maps with ``s`` features."""
    if s < 1 or trials < 1:
        raise InvalidInput(f"Need s >= 1 and trials >= 1, got s={s}, trials={trials}.")

    def trial(t: int) -> float:
        return instance.true_error(instance.draw_map(s, trial_rng(seed, s, t)))

    return parallel_map(trial, range(trials), workers)


def instance_oracle(
    instance: TargetInstance,
    s: int,
    alpha: float,
    trials: int = DEFAULT_ORACLE_TRIALS,
    seed: int = 0,
    workers: int = 1,
) -> OracleResult:
    if trials < MIN_ORACLE_TRIALS:
        raise InvalidInput(
            f"The oracle needs at least {MIN_ORACLE_TRIALS} trials, got {trials}."
        )
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha has to lie in (0, 1), got {alpha}.")
    errors = sample_errors(instance, s, trials, seed, workers)
    quantile = empirical_quantile(errors, 1.0 - alpha)
    lib_log.debug(
        "Oracle %s s=%d trials=%d: quantile %.6g.",
        instance.target.value,
        s,
        trials,
        quantile,
    )
    return OracleResult(
        trials=trials, error_samples=errors, quantile=quantile, s=s, alpha=alpha
    )


def oracle_quantile(
    target: ErrorTarget,
    data,
    kernel: Kernel,
    s: int,
    alpha: float,
    trials: int = DEFAULT_ORACLE_TRIALS,
    seed: int = 0,
    workers: int = 1,
    **options,
) -> OracleResult:
    """Empirical ``1 - alpha`` quantile of the true error over independent maps."""
    instance = make_instance(target, data, kernel, **options)
    return instance_oracle(instance, s, alpha, trials, seed, workers)


def joint_trials(
    instance: TargetInstance,
    s: int,
    config: BootstrapConfig,
    trials: int,
    seed: int = 0,
    workers: int = 1,
) -> List[TrialOutcome]:
    """For each trial, the true error and the bootstrap estimate of one map.

    Trial ``t`` draws its map from ``(seed, s, t)`` and bootstraps with a seed
    derived from ``(config.seed, s, t)``; trials run on ``workers`` threads
    while each bootstrap runs inline.
    """
    if s < 1 or trials < 1:
        raise InvalidInput(f"Need s >= 1 and trials >= 1, got s={s}, trials={trials}.")

    def trial(t: int) -> TrialOutcome:
        feature_map = instance.draw_map(s, trial_rng(seed, s, t))
        error = instance.true_error(feature_map)
        trial_config = replace(config, seed=derive_seed(config.seed, s, t), workers=1)
        result = run_bootstrap(instance.functional(feature_map), s, trial_config)
        return TrialOutcome(error=error, estimate=result.estimate)

    return parallel_map(trial, range(trials), workers)


def coverage(
    instance: TargetInstance,
    s: int,
    config: BootstrapConfig,
    trials: int,
    seed: int = 0,
    workers: int = 1,
) -> CoverageResult:
    """How often the true error stays below the bootstrap estimate."""
    return CoverageResult(joint_trials(instance, s, config, trials, seed, workers))
