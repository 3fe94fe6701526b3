import enum


class KernelFamily(enum.Enum):
    GAUSSIAN: str = "gaussian"
    LAPLACIAN: str = "laplacian"
    CAUCHY: str = "cauchy"

    @classmethod
    def has_member(cls, value: str) -> bool:
        return value in {member.value for member in cls}
