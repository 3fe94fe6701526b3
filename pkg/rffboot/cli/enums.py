import enum


class DatasetKind(enum.Enum):
    SWISS_ROLL: str = "swiss-roll"
    LORENZ: str = "lorenz"
    GAUSSIAN_PAIR: str = "gaussian-pair"
    REGRESSION: str = "regression"
    CSV: str = "csv"


class Rescale(enum.Enum):
    NONE: str = "none"
    INITIAL: str = "initial"
    FUNCTIONAL: str = "functional"
