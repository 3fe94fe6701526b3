import enum


class ErrorMode(enum.Enum):
    ABSOLUTE: str = "absolute"
    SIGNED: str = "signed"
