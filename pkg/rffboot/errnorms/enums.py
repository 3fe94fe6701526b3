import enum


class OpnormMethod(enum.Enum):
    POWER: str = "power"
    QR: str = "qr"
