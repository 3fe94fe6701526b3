from __future__ import annotations

import datetime
from typing import Dict, List, Optional

from sqlalchemy import Column, DateTime, Float, ForeignKey, Integer, String

from rffboot.database import database, session


class ExperimentRun(database.base):
    """One recorded ``run`` invocation.

    Rows of the result table live in :class:`ExperimentRow` and are removed
    together with their run.
    """

    __tablename__ = "rffboot_experiment_runs"

    idx = Column(Integer, primary_key=True, autoincrement=True)
    task = Column(String)
    dataset = Column(String)
    kernel = Column(String)
    scale = Column(Float)
    alpha = Column(Float)
    n_boot = Column(Integer)
    trials = Column(Integer)
    seed = Column(Integer)
    s0 = Column(Integer)
    timestamp = Column(DateTime)

    @staticmethod
    def add(
        task: str,
        dataset: str,
        kernel: str,
        scale: float,
        alpha: float,
        n_boot: int,
        trials: int,
        seed: int,
        s0: int,
    ) -> ExperimentRun:
        """Add new run.

        :return: New run.
        """
        run = ExperimentRun(
            task=task,
            dataset=dataset,
            kernel=kernel,
            scale=scale,
            alpha=alpha,
            n_boot=n_boot,
            trials=trials,
            seed=seed,
            s0=s0,
            timestamp=datetime.datetime.now(),
        )
        session.add(run)
        session.commit()
        return run

    @staticmethod
    def get(idx: int) -> Optional[ExperimentRun]:
        return session.query(ExperimentRun).filter_by(idx=idx).one_or_none()

    @staticmethod
    def get_all() -> List[ExperimentRun]:
        return session.query(ExperimentRun).order_by(ExperimentRun.idx).all()

    @staticmethod
    def remove(idx: int) -> int:
        """Remove run and its rows.

        :param idx: Run ID.
        :return: Number of deleted runs, always ``0`` or ``1``.
        """
        session.query(ExperimentRow).filter_by(run_idx=idx).delete()
        query = session.query(ExperimentRun).filter_by(idx=idx).delete()
        session.commit()
        return query

    def __repr__(self) -> str:
        return (
            f'<ExperimentRun idx="{self.idx}" task="{self.task}" '
            f'dataset="{self.dataset}" kernel="{self.kernel}" scale="{self.scale}" '
            f'alpha="{self.alpha}" n_boot="{self.n_boot}" trials="{self.trials}" '
            f'seed="{self.seed}" s0="{self.s0}" timestamp="{self.timestamp}">'
        )

    def dump(self) -> Dict:
        return {
            "idx": self.idx,
            "task": self.task,
            "dataset": self.dataset,
            "kernel": self.kernel,
            "scale": self.scale,
            "alpha": self.alpha,
            "n_boot": self.n_boot,
            "trials": self.trials,
            "seed": self.seed,
            "s0": self.s0,
            "timestamp": self.timestamp,
        }


class ExperimentRow(database.base):
    """One line of a recorded result table."""

    __tablename__ = "rffboot_experiment_rows"

    idx = Column(Integer, primary_key=True, autoincrement=True)
    run_idx = Column(Integer, ForeignKey("rffboot_experiment_runs.idx"))
    s = Column(Integer)
    oracle_quantile = Column(Float)
    mean_bootstrap_estimate = Column(Float)
    sd_bootstrap_estimate = Column(Float)
    mean_extrapolated_estimate = Column(Float)
    sd_extrapolated_estimate = Column(Float)
    coverage = Column(Float)

    @staticmethod
    def add(run_idx: int, values: Dict[str, float]) -> ExperimentRow:
        row = ExperimentRow(run_idx=run_idx, **values)
        session.add(row)
        session.commit()
        return row

    @staticmethod
    def get_all(run_idx: int) -> List[ExperimentRow]:
        return (
            session.query(ExperimentRow)
            .filter_by(run_idx=run_idx)
            .order_by(ExperimentRow.s)
            .all()
        )

    def __repr__(self) -> str:
        return (
            f'<ExperimentRow idx="{self.idx}" run_idx="{self.run_idx}" s="{self.s}" '
            f'oracle_quantile="{self.oracle_quantile}">'
        )

    def dump(self) -> Dict:
        return {
            "s": self.s,
            "oracle_quantile": self.oracle_quantile,
            "mean_bootstrap_estimate": self.mean_bootstrap_estimate,
            "sd_bootstrap_estimate": self.sd_bootstrap_estimate,
            "mean_extrapolated_estimate": self.mean_extrapolated_estimate,
            "sd_extrapolated_estimate": self.sd_extrapolated_estimate,
            "coverage": self.coverage,
        }
