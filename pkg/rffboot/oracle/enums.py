import enum


class ErrorTarget(enum.Enum):
    MATRIX_LINF: str = "matrix-linf"
    MATRIX_OP: str = "matrix-op"
    KRR: str = "krr"
    MMD: str = "mmd"
