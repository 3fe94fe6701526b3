"""Command line experiment runner.

``run`` sweeps a grid of feature counts and writes one CSV row per count: the
Monte Carlo quantile of the true error, the mean and spread of the bootstrap
estimates computed from the same feature maps, the same for estimates
extrapolated from ``s0``, and the observed coverage.

``select`` recommends a feature count for an error tolerance, ``history``
shows runs stored with ``run --record``.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from rffboot import logger
from rffboot.bootstrap.module import (
    DEFAULT_ALPHA,
    BootstrapConfig,
    empirical_quantile,
    extrapolate,
    run_bootstrap,
    select_feature_count,
)
from rffboot.database import database
from rffboot.datasets.module import (
    PointSet,
    gen_gaussian_pair,
    gen_lorenz,
    gen_regression,
    gen_swiss_roll,
    load_csv,
    minmax_scale,
    subsample,
)
from rffboot.errnorms.enums import OpnormMethod
from rffboot.errnorms.module import DEFAULT_POWER_TOL
from rffboot.exceptions import (
    ConfigException,
    InvalidInput,
    OutputError,
    RffBootException,
)
from rffboot.kernels.enums import KernelFamily
from rffboot.kernels.module import Kernel
from rffboot.mmd.module import MmdProblem
from rffboot.oracle.enums import ErrorTarget
from rffboot.oracle.module import (
    DEFAULT_ORACLE_TRIALS,
    TargetInstance,
    joint_trials,
    make_instance,
    sample_errors,
    trial_rng,
)
from rffboot.ridge.module import DEFAULT_LAMBDA, RidgeProblem
from rffboot.utils import derive_rng, derive_seed

from .database import ExperimentRow, ExperimentRun
from .enums import DatasetKind, Rescale

run_log = logger.Experiment.logger()


RFFBOOT_WORKERS: str = os.getenv("RFFBOOT_WORKERS", "1")


def test_dotenv() -> None:
    try:
        workers = int(RFFBOOT_WORKERS)
    except ValueError:
        raise ConfigException("RFFBOOT_WORKERS is not an integer.") from None
    if workers < 1:
        raise ConfigException("RFFBOOT_WORKERS has to be positive.")


test_dotenv()


DEFAULT_WORKERS: int = int(RFFBOOT_WORKERS)
DEFAULT_EXPERIMENT_N_BOOT: int = 30

CSV_HEADER: Tuple[str, ...] = (
    "s",
    "oracle_quantile",
    "mean_bootstrap_estimate",
    "sd_bootstrap_estimate",
    "mean_extrapolated_estimate",
    "sd_extrapolated_estimate",
    "coverage",
)

# spawn key of the dataset stream, trials use (s, trial) keys with s >= 1
DATA_STREAM: int = 0

# widest acceptable distance between observed coverage and 1 - alpha
COVERAGE_SLACK: float = 0.1
COVERAGE_MIN_TRIALS: int = 100

HISTORY_LINE: str = (
    "{idx} {timestamp:%Y-%m-%d %H:%M} {task} {dataset} {kernel}({scale:g}) "
    "alpha={alpha:g} N={n_boot} trials={trials} seed={seed}\n"
)


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything that determines an experiment and its output bytes."""

    task: ErrorTarget
    dataset: DatasetKind
    kernel: Kernel
    s_grid: Tuple[int, ...]
    s0: int
    alpha: float = DEFAULT_ALPHA
    n_boot: int = DEFAULT_EXPERIMENT_N_BOOT
    trials: int = DEFAULT_ORACLE_TRIALS
    seed: int = 0
    out: Optional[str] = None
    workers: int = 1
    n: int = 500
    dim: int = 10
    csv_path: Optional[str] = None
    csv_path2: Optional[str] = None
    has_header: bool = False
    labels: bool = False
    rows: Optional[int] = None
    cols: Optional[int] = None
    minmax: bool = False
    test_size: float = 0.1
    noise: float = 1.0
    var1: float = 0.1
    var2: float = 0.1933
    lam: float = DEFAULT_LAMBDA
    sqrt_y: bool = False
    opnorm: OpnormMethod = OpnormMethod.POWER
    power_tol: float = DEFAULT_POWER_TOL
    rescale: Rescale = Rescale.NONE
    tol: Optional[float] = None
    verify: bool = False
    record: bool = False
    db: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "task", ErrorTarget(self.task))
        object.__setattr__(self, "dataset", DatasetKind(self.dataset))
        object.__setattr__(self, "opnorm", OpnormMethod(self.opnorm))
        object.__setattr__(self, "rescale", Rescale(self.rescale))
        object.__setattr__(self, "s_grid", tuple(int(s) for s in self.s_grid))
        if not self.s_grid:
            raise InvalidInput("The s-grid is empty.")
        if any(b <= a for a, b in zip(self.s_grid, self.s_grid[1:])):
            raise InvalidInput(f"The s-grid has to increase strictly: {self.s_grid}.")
        if not 1 <= self.s0 <= self.s_grid[0]:
            raise InvalidInput(
                f"s0 has to lie between 1 and the smallest grid value, got {self.s0}."
            )
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInput(f"alpha has to lie in (0, 1), got {self.alpha}.")
        if self.n_boot < 1 or self.trials < 1 or self.workers < 1:
            raise InvalidInput("n-boot, trials and workers have to be positive.")
        if self.rescale == Rescale.FUNCTIONAL and self.task not in (
            ErrorTarget.KRR,
            ErrorTarget.MMD,
        ):
            raise InvalidInput("Functional rescaling needs the krr or mmd task.")
        if self.tol is not None and not self.tol > 0:
            raise InvalidInput(f"Tolerance has to be positive, got {self.tol}.")


@dataclass(frozen=True)
class ResultRow:
    s: int
    oracle_quantile: float
    mean_bootstrap_estimate: float
    sd_bootstrap_estimate: float
    mean_extrapolated_estimate: float
    sd_extrapolated_estimate: float
    coverage: float

    def values(self) -> Tuple:
        return tuple(getattr(self, name) for name in CSV_HEADER)

    def rescaled(self, reference: float) -> ResultRow:
        return replace(
            self,
            oracle_quantile=self.oracle_quantile / reference,
            mean_bootstrap_estimate=self.mean_bootstrap_estimate / reference,
            sd_bootstrap_estimate=self.sd_bootstrap_estimate / reference,
            mean_extrapolated_estimate=self.mean_extrapolated_estimate / reference,
            sd_extrapolated_estimate=self.sd_extrapolated_estimate / reference,
        )

    def dump(self) -> dict:
        return dict(zip(CSV_HEADER, self.values()))


@dataclass(frozen=True)
class SelectionReport:
    s0: int
    estimate: float
    s1: int
    predicted: float
    oracle_quantile: Optional[float] = None

    def lines(self) -> List[str]:
        lines = [
            f"s0: {self.s0}",
            f"estimate: {self.estimate!r}",
            f"recommended_s1: {self.s1}",
            f"predicted_error: {self.predicted!r}",
        ]
        if self.oracle_quantile is not None:
            lines.append(f"oracle_quantile: {self.oracle_quantile!r}")
        return lines


#


def _prepare(points: PointSet, spec: ExperimentSpec, rng) -> PointSet:
    if spec.rows is not None or spec.cols is not None:
        points = subsample(
            points,
            spec.rows if spec.rows is not None else points.n,
            spec.cols if spec.cols is not None else points.d,
            rng,
        )
    if spec.minmax:
        points = minmax_scale(points)
    return points


def _require_csv(path: Optional[str], flag: str) -> str:
    if not path:
        raise InvalidInput(f"The csv dataset needs {flag}.")
    return path


def load_point_set(spec: ExperimentSpec, rng) -> PointSet:
    """Single point set for the matrix and ridge tasks."""
    if spec.dataset == DatasetKind.SWISS_ROLL:
        points = gen_swiss_roll(spec.n, rng)
    elif spec.dataset == DatasetKind.LORENZ:
        points = gen_lorenz(spec.n)
    elif spec.dataset == DatasetKind.REGRESSION:
        points = gen_regression(spec.n, spec.dim, spec.noise, rng)
    elif spec.dataset == DatasetKind.CSV:
        points = load_csv(
            _require_csv(spec.csv_path, "--csv"), spec.has_header, spec.labels
        )
    else:
        raise InvalidInput(f"Dataset {spec.dataset.value} only works with --task mmd.")
    return _prepare(points, spec, rng)


def load_sample_pair(spec: ExperimentSpec, rng) -> MmdProblem:
    if spec.dataset == DatasetKind.GAUSSIAN_PAIR:
        first, second = gen_gaussian_pair(spec.n, spec.dim, spec.var1, spec.var2, rng)
    elif spec.dataset == DatasetKind.CSV:
        first = load_csv(_require_csv(spec.csv_path, "--csv"), spec.has_header)
        second = load_csv(_require_csv(spec.csv_path2, "--csv2"), spec.has_header)
        rows = spec.rows if spec.rows is not None else min(first.n, second.n)
        cols = spec.cols if spec.cols is not None else min(first.d, second.d)
        first = subsample(first, rows, cols, rng)
        second = subsample(second, rows, cols, rng)
    else:
        raise InvalidInput(
            "The mmd task needs --dataset gaussian-pair or csv, "
            f"got {spec.dataset.value}."
        )
    if spec.minmax:
        first, second = minmax_scale(first), minmax_scale(second)
    return MmdProblem(first.points, second.points)


def build_instance(spec: ExperimentSpec) -> TargetInstance:
    """Load or generate the data of ``spec`` and bind it to its kernel."""
    rng = derive_rng(spec.seed, DATA_STREAM)
    if spec.task == ErrorTarget.MMD:
        return make_instance(spec.task, load_sample_pair(spec, rng), spec.kernel)
    points = load_point_set(spec, rng)
    if spec.task == ErrorTarget.KRR:
        if points.labels is None:
            raise InvalidInput("The krr task needs labelled data (--labels for csv).")
        if spec.sqrt_y:
            points = points.sqrt_labels()
        test_size = int(spec.test_size) if spec.test_size >= 1 else spec.test_size
        problem = RidgeProblem.from_arrays(
            points.points,
            points.labels,
            test_size=test_size,
            lam=spec.lam,
            seed=derive_seed(spec.seed, DATA_STREAM),
        )
        return make_instance(spec.task, problem, spec.kernel)
    return make_instance(
        spec.task,
        points,
        spec.kernel,
        method=spec.opnorm,
        tol=spec.power_tol,
    )


def check_feature_counts(instance: TargetInstance, counts: Sequence[int]) -> None:
    """Reject feature counts the bootstrap path of ``instance`` cannot handle."""
    limit = instance.max_features
    if limit is not None and max(counts) > limit:
        raise InvalidInput(
            f"s={max(counts)} exceeds the {limit} rows the {instance.target.value} "
            "bootstrap can use, lower the feature counts or use more data."
        )


def _rescale(
    rows: List[ResultRow], spec: ExperimentSpec, instance: TargetInstance
) -> List[ResultRow]:
    if spec.rescale == Rescale.NONE:
        return rows
    if spec.rescale == Rescale.INITIAL:
        reference = rows[0].oracle_quantile
    else:
        reference = abs(instance.reference_value)
    if reference == 0.0:
        run_log.warning(spec, "Rescaling reference is zero, writing raw values.")
        return rows
    return [row.rescaled(reference) for row in rows]


def _check_coverage(spec: ExperimentSpec, rows: List[ResultRow]) -> bool:
    """Compare observed coverage with ``1 - alpha`` when trials allow it."""
    if spec.trials < COVERAGE_MIN_TRIALS:
        return True
    target = 1.0 - spec.alpha
    passed = True
    for row in rows:
        if abs(row.coverage - target) > COVERAGE_SLACK:
            run_log.warning(
                spec,
                f"Coverage {row.coverage:.3f} at s={row.s} is far from {target:.3f}.",
            )
            passed = False
    return passed


def write_csv(rows: Sequence[ResultRow], target: Union[str, TextIO]) -> None:
    """Write the result table; floats use their shortest round-trip form."""

    def emit(handle: TextIO) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(
                [row.s] + [repr(float(value)) for value in row.values()[1:]]
            )

    if not isinstance(target, str):
        emit(target)
        return
    try:
        with open(target, "w", newline="", encoding="utf-8") as handle:
            emit(handle)
    except OSError as exc:
        raise OutputError(f"Cannot write results: {exc.strerror}.", target) from exc


def _record(spec: ExperimentSpec, rows: Sequence[ResultRow]) -> ExperimentRun:
    database.connect(spec.db)
    run = ExperimentRun.add(
        task=spec.task.value,
        dataset=spec.dataset.value,
        kernel=spec.kernel.family.value,
        scale=spec.kernel.scale,
        alpha=spec.alpha,
        n_boot=spec.n_boot,
        trials=spec.trials,
        seed=spec.seed,
        s0=spec.s0,
    )
    for row in rows:
        ExperimentRow.add(run.idx, row.dump())
    run_log.info(spec, f"Recorded as run {run.idx}.")
    return run


def run_experiment(
    spec: ExperimentSpec,
    stream: Optional[TextIO] = None,
    instance: Optional[TargetInstance] = None,
) -> List[ResultRow]:
    """Run the grid sweep and write the CSV to ``spec.out`` or ``stream``.

    The output depends only on ``spec``: every trial and bootstrap iteration
    has its own seeded stream, whatever ``spec.workers`` is.
    """
    run_log.info(
        spec,
        f"Starting {spec.task.value}: grid {list(spec.s_grid)}, s0={spec.s0}, "
        f"trials={spec.trials}, N={spec.n_boot}, workers={spec.workers}.",
    )
    if instance is None:
        instance = build_instance(spec)
    check_feature_counts(instance, spec.s_grid)
    config = BootstrapConfig(n_boot=spec.n_boot, alpha=spec.alpha, seed=spec.seed)

    outcomes = {}
    for s in sorted(set(spec.s_grid) | {spec.s0}):
        outcomes[s] = joint_trials(
            instance, s, config, spec.trials, spec.seed, spec.workers
        )
        run_log.debug(spec, f"Finished s={s}.")

    initial = np.array([outcome.estimate for outcome in outcomes[spec.s0]])
    rows = []
    for s in spec.s_grid:
        errors = np.array([outcome.error for outcome in outcomes[s]])
        estimates = np.array([outcome.estimate for outcome in outcomes[s]])
        extrapolated = np.array([extrapolate(e, spec.s0, s) for e in initial])
        rows.append(
            ResultRow(
                s=s,
                oracle_quantile=empirical_quantile(errors, 1.0 - spec.alpha),
                mean_bootstrap_estimate=float(np.mean(estimates)),
                sd_bootstrap_estimate=float(np.std(estimates)),
                mean_extrapolated_estimate=float(np.mean(extrapolated)),
                sd_extrapolated_estimate=float(np.std(extrapolated)),
                coverage=float(np.mean(errors <= estimates)),
            )
        )
    rows = _rescale(rows, spec, instance)
    _check_coverage(spec, rows)

    write_csv(rows, spec.out if spec.out is not None else (stream or sys.stdout))
    if spec.record:
        _record(spec, rows)
    run_log.info(spec, "Finished.")
    return rows


def run_select(
    spec: ExperimentSpec,
    stream: Optional[TextIO] = None,
    instance: Optional[TargetInstance] = None,
) -> SelectionReport:
    """Recommend ``s1`` for ``spec.tol`` from one bootstrap run at ``s0``.

    A negative (signed) estimate already meets any tolerance.
    """
    if spec.tol is None:
        raise InvalidInput("Feature count selection needs --tol.")
    if instance is None:
        instance = build_instance(spec)
    check_feature_counts(instance, (spec.s0,))
    feature_map = instance.draw_map(spec.s0, trial_rng(spec.seed, spec.s0, 0))
    config = BootstrapConfig(
        n_boot=spec.n_boot,
        alpha=spec.alpha,
        seed=derive_seed(spec.seed, spec.s0, 0),
        workers=spec.workers,
    )
    result = run_bootstrap(instance.functional(feature_map), spec.s0, config)
    s1 = select_feature_count(max(result.estimate, 0.0), spec.s0, spec.tol)
    report = SelectionReport(
        s0=spec.s0,
        estimate=result.estimate,
        s1=s1,
        predicted=extrapolate(result.estimate, spec.s0, s1),
    )
    if spec.verify:
        errors = sample_errors(instance, s1, spec.trials, spec.seed, spec.workers)
        report = replace(
            report, oracle_quantile=empirical_quantile(errors, 1.0 - spec.alpha)
        )
        run_log.info(
            spec,
            f"Oracle quantile at s1={s1} is {report.oracle_quantile:.6g} "
            f"for tolerance {spec.tol:.6g}.",
        )

    stream = stream or sys.stdout
    stream.write("\n".join(report.lines()) + "\n")
    return report


def show_history(args: argparse.Namespace, stream: Optional[TextIO] = None) -> None:
    stream = stream or sys.stdout
    database.connect(args.db)
    if args.remove is not None:
        removed = ExperimentRun.remove(args.remove)
        if not removed:
            raise InvalidInput(f"Run {args.remove} not found.")
        run_log.info(None, f"Removed run {args.remove}.")
        return
    if args.show is not None:
        run = ExperimentRun.get(args.show)
        if run is None:
            raise InvalidInput(f"Run {args.show} not found.")
        rows = [ResultRow(**row.dump()) for row in ExperimentRow.get_all(run.idx)]
        write_csv(rows, stream)
        return
    for run in ExperimentRun.get_all():
        stream.write(HISTORY_LINE.format(**run.dump()))


#


def _int_list(value: str) -> Tuple[int, ...]:
    try:
        return tuple(int(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma separated integers, got {value!r}"
        ) from None


def _add_experiment_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--task",
        choices=[target.value for target in ErrorTarget],
        default=ErrorTarget.MATRIX_LINF.value,
        help="error to estimate (default: %(default)s)",
    )
    parser.add_argument(
        "--dataset",
        choices=[kind.value for kind in DatasetKind],
        default=DatasetKind.SWISS_ROLL.value,
        help="data source (default: %(default)s)",
    )
    parser.add_argument(
        "--kernel",
        choices=[family.value for family in KernelFamily],
        default=KernelFamily.GAUSSIAN.value,
        help="kernel family (default: %(default)s)",
    )
    parser.add_argument(
        "--scale",
        type=float,
        default=1.0,
        help="sigma for gaussian, gamma otherwise (default: %(default)s)",
    )
    parser.add_argument(
        "--s-grid",
        type=_int_list,
        default=(50, 100, 200, 400),
        help="comma separated feature counts (default: 50,100,200,400)",
    )
    parser.add_argument(
        "--s0",
        type=int,
        default=50,
        help="feature count extrapolated from (default: %(default)s)",
    )
    parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    parser.add_argument(
        "--n-boot",
        type=int,
        default=DEFAULT_EXPERIMENT_N_BOOT,
        help="bootstrap iterations N (default: %(default)s)",
    )
    parser.add_argument(
        "--trials",
        type=int,
        default=DEFAULT_ORACLE_TRIALS,
        help="independent feature maps per s (default: %(default)s)",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument(
        "--workers",
        type=int,
        default=DEFAULT_WORKERS,
        help="worker threads, RFFBOOT_WORKERS (default: %(default)s)",
    )
    parser.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=DEFAULT_LAMBDA,
        help="ridge parameter for krr (default: %(default)s)",
    )
    parser.add_argument(
        "--sqrt-y", action="store_true", help="krr: take square roots of the labels"
    )
    parser.add_argument(
        "--n", type=int, default=500, help="generated points (default: %(default)s)"
    )
    parser.add_argument("--dim", type=int, default=10, help="generated dimension")
    parser.add_argument("--csv", dest="csv_path", default=None, help="csv input")
    parser.add_argument(
        "--csv2", dest="csv_path2", default=None, help="second csv sample for mmd"
    )
    parser.add_argument("--has-header", action="store_true")
    parser.add_argument(
        "--labels", action="store_true", help="last csv column holds labels"
    )
    parser.add_argument("--rows", type=int, default=None, help="subsample rows")
    parser.add_argument("--cols", type=int, default=None, help="subsample columns")
    parser.add_argument("--minmax", action="store_true", help="min-max scale inputs")
    parser.add_argument(
        "--test-size",
        type=float,
        default=0.1,
        help="krr held-out fraction, or count when >= 1 (default: %(default)s)",
    )
    parser.add_argument("--noise", type=float, default=1.0, help="regression noise")
    parser.add_argument("--var1", type=float, default=0.1)
    parser.add_argument("--var2", type=float, default=0.1933)
    parser.add_argument(
        "--opnorm",
        choices=[method.value for method in OpnormMethod],
        default=OpnormMethod.POWER.value,
        help="bootstrap path for matrix-op (default: %(default)s)",
    )
    parser.add_argument("--power-tol", type=float, default=DEFAULT_POWER_TOL)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rffboot",
        description="Bootstrap error estimates for random Fourier features.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="sweep a grid of feature counts")
    _add_experiment_arguments(run)
    run.add_argument(
        "--rescale",
        choices=[rescale.value for rescale in Rescale],
        default=Rescale.NONE.value,
        help="divide by the initial oracle value or by psi(k)/T (default: none)",
    )
    run.add_argument("--record", action="store_true", help="store the run")
    run.add_argument("--db", default=None, help="SQLAlchemy URL, RFFBOOT_DB_STRING")

    select = commands.add_parser("select", help="choose s for an error tolerance")
    _add_experiment_arguments(select)
    select.add_argument("--tol", type=float, required=True)
    select.add_argument(
        "--verify", action="store_true", help="check the choice against the oracle"
    )

    history = commands.add_parser("history", help="list recorded runs")
    history.add_argument("--db", default=None, help="SQLAlchemy URL, RFFBOOT_DB_STRING")
    history.add_argument("--show", type=int, default=None, help="print a run as CSV")
    history.add_argument("--remove", type=int, default=None, help="delete a run")
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    return ExperimentSpec(
        task=ErrorTarget(args.task),
        dataset=DatasetKind(args.dataset),
        kernel=Kernel.from_name(args.kernel, args.scale),
        s_grid=args.s_grid,
        s0=args.s0,
        alpha=args.alpha,
        n_boot=args.n_boot,
        trials=args.trials,
        seed=args.seed,
        out=args.out,
        workers=args.workers,
        n=args.n,
        dim=args.dim,
        csv_path=args.csv_path,
        csv_path2=args.csv_path2,
        has_header=args.has_header,
        labels=args.labels,
        rows=args.rows,
        cols=args.cols,
        minmax=args.minmax,
        test_size=args.test_size,
        noise=args.noise,
        var1=args.var1,
        var2=args.var2,
        lam=args.lam,
        sqrt_y=args.sqrt_y,
        opnorm=OpnormMethod(args.opnorm),
        power_tol=args.power_tol,
        rescale=Rescale(getattr(args, "rescale", Rescale.NONE.value)),
        tol=getattr(args, "tol", None),
        verify=getattr(args, "verify", False),
        record=getattr(args, "record", False),
        db=getattr(args, "db", None),
    )


def _abort(spec: ExperimentSpec, exc: RffBootException) -> int:
    run_log.error(spec, f"Aborted: {exc}")
    sys.stderr.write(f"error: {exc}\n")
    return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logger.configure(args.verbose)

    if args.command == "history":
        try:
            show_history(args)
        except RffBootException as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 1
        return 0

    try:
        spec = spec_from_args(args)
    except InvalidInput as exc:
        parser.error(str(exc))

    try:
        instance = build_instance(spec)
    except RffBootException as exc:
        return _abort(spec, exc)
    counts = spec.s_grid if args.command == "run" else (spec.s0,)
    try:
        check_feature_counts(instance, counts)
    except InvalidInput as exc:
        parser.error(str(exc))

    try:
        if args.command == "run":
            run_experiment(spec, instance=instance)
        else:
            run_select(spec, instance=instance)
    except RffBootException as exc:
        return _abort(spec, exc)
    return 0
