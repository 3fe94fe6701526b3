"""Package loggers.

Two families exist. :class:`Library` is for numerical code that has no notion
of an experiment, :class:`Experiment` prefixes every record with the
experiment it belongs to::

    lib_log = logger.Library.logger()
    run_log = logger.Experiment.logger()

    run_log.info(spec, "Grid point finished.")

Handlers are never installed here, see :func:`configure`.
"""

from __future__ import annotations

import logging
from typing import Any, Optional

ROOT_NAME = "rffboot"
FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Library:
    """Logger for library-level events."""

    __instance: Optional[logging.Logger] = None

    @staticmethod
    def logger() -> logging.Logger:
        if Library.__instance is None:
            Library.__instance = logging.getLogger(f"{ROOT_NAME}.lib")
        return Library.__instance


class Experiment:
    """Logger for events tied to one experiment run.

    Every method takes the experiment context first. Any object with
    ``task``, ``dataset`` and ``seed`` attributes works; ``None`` means the
    event is not bound to a particular experiment.
    """

    __instance: Optional[Experiment] = None

    def __init__(self):
        self._logger = logging.getLogger(f"{ROOT_NAME}.experiment")

    @staticmethod
    def logger() -> Experiment:
        if Experiment.__instance is None:
            Experiment.__instance = Experiment()
        return Experiment.__instance

    @staticmethod
    def _prefix(context: Any) -> str:
        if context is None:
            return "[-]"
        task = getattr(getattr(context, "task", None), "value", "?")
        dataset = getattr(getattr(context, "dataset", None), "value", "?")
        seed = getattr(context, "seed", "?")
        return f"[{task}/{dataset}/{seed}]"

    def _log(self, level: int, context: Any, message: str) -> None:
        self._logger.log(level, "%s %s", self._prefix(context), message)

    def debug(self, context: Any, message: str) -> None:
        self._log(logging.DEBUG, context, message)

    def info(self, context: Any, message: str) -> None:
        self._log(logging.INFO, context, message)

    def warning(self, context: Any, message: str) -> None:
        self._log(logging.WARNING, context, message)

    def error(self, context: Any, message: str) -> None:
        self._log(logging.ERROR, context, message)


def configure(verbose: bool = False) -> None:
    """Attach a single stderr handler to the package root logger.

    Only the command line entry point calls this.
    """
    root = logging.getLogger(ROOT_NAME)
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(FORMAT))
        root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
