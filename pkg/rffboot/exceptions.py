from typing import Optional


class RffBootException(Exception):
    """Common base for everything this package raises on purpose."""

    pass


class InvalidInput(RffBootException, ValueError):
    """Raised when an input breaks a documented precondition."""

    pass


class DatasetError(InvalidInput):
    """Raised when a data file cannot be turned into a point set.

    :param message: Description of the problem.
    :param path: Path of the offending file.
    :param line: 1-based line number, if the problem is tied to one row.
    """

    def __init__(self, message: str, path: str, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = path if line is None else f"{path}:{line}"
        super().__init__(f"{location}: {message}")


class SolverError(RffBootException):
    """Raised when a linear solve fails or produces non-finite output."""

    pass


class IntegrationError(RffBootException):
    """Raised when a trajectory leaves the finite range."""

    pass


class BootstrapIterationError(RffBootException):
    """Raised when one bootstrap iteration fails.

    The original exception is chained as ``__cause__``.

    :param iteration: 0-based index of the failed iteration.
    """

    def __init__(self, iteration: int, error: Exception):
        self.iteration = iteration
        super().__init__(f"Bootstrap iteration {iteration} failed: {error}")


class ConfigException(RffBootException):
    """Raised when the environment holds an unusable setting."""

    pass


class OutputError(RffBootException):
    """Raised when a result file cannot be written.

    :param path: Path of the output file.
    """

    def __init__(self, message: str, path: str):
        self.path = path
        super().__init__(f"{path}: {message}")
