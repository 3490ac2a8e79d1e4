import math


class SizeGuardError(ValueError):
    """Raised when a request exceeds one of the configured size caps."""

    def __init__(self, what: str, value, cap):
        super().__init__(f"{what} {value} exceeds the cap {cap}")
        self.what = what
        self.value = value
        self.cap = cap


class UnitarityError(ValueError):
    pass


class UndefinedSensitivityError(ArithmeticError):
    pass


def check_cap(what: str, value, cap):
    if cap is not None and value > cap:
        raise SizeGuardError(what, value, cap)
    return value


def relative_error(a, b):
    # meaningful both near zero (HOM-like cancellations) and at n! scale
    return abs(a - b) / max(1.0, abs(a), abs(b))


def wrap_phase(phase: float):
    wrapped = math.fmod(phase, 2 * math.pi)
    if wrapped < 0:
        wrapped += 2 * math.pi
    # fmod may round up to exactly 2*pi for tiny negative inputs
    return 0.0 if wrapped >= 2 * math.pi else wrapped


def parse_int_range(text: str):
    """
    Parses '5', '2..10' or '2,4,8' into a list of integers
    """
    text = text.strip()
    if '..' in text:
        first, last = text.split('..', 1)
        first, last = int(first), int(last)
        if last < first:
            raise ValueError(f"Empty range: {text}")
        return list(range(first, last + 1))
    return [int(part) for part in text.split(',') if part.strip()]
