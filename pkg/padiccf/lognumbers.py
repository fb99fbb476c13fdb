from functools import total_ordering
from typing import Any, Dict, Union

import mpmath

# Working precision for the fractional part; the integer part is always exact.
FRACTION_DPS = 30
NEGLIGIBLE_GAP = 20
LARGEST_FRACTION = 1.0 - 2.0**-53


def decimal_digits(value: int) -> int:
    """
    An upper bound on the number of decimal digits, without converting to text.
    """
    return int(abs(value).bit_length() * 0.30103) + 2


@total_ordering
class LogNumber:
    """
    A positive quantity stored as 10^(log10_int + log10_frac) with an exact integer
    part and 0 <= log10_frac < 1, for bounds such as 10^(3601 * 2^3601) that no float
    can hold.
    """

    __slots__ = ["log10_int", "log10_frac"]

    def __init__(self, log10_int: int, log10_frac: float = 0.0):
        carry = int(log10_frac // 1)
        self.log10_int = int(log10_int) + carry
        self.log10_frac = float(log10_frac - carry)
        if self.log10_frac >= 1.0:
            self.log10_int += 1
            self.log10_frac = 0.0

    @classmethod
    def from_log10(cls, value: Any) -> "LogNumber":
        if isinstance(value, int):
            return cls(value, 0.0)
        with mpmath.workdps(FRACTION_DPS + decimal_digits(int(mpmath.mpf(value)))):
            value = mpmath.mpf(value)
            integer = int(mpmath.floor(value))
            return cls(integer, float(value - integer))

    @classmethod
    def from_ln(cls, value: Any) -> "LogNumber":
        with mpmath.workdps(FRACTION_DPS + 10):
            return cls.from_log10(mpmath.mpf(value) / mpmath.log(10))

    @classmethod
    def from_float(cls, value: float) -> "LogNumber":
        if value <= 0:
            raise ValueError("LogNumber represents positive quantities only")
        with mpmath.workdps(FRACTION_DPS):
            return cls.from_log10(mpmath.log10(mpmath.mpf(value)))

    @classmethod
    def from_int(cls, value: int) -> "LogNumber":
        """
        Exact integer part for integers of any size.

        Example:
        >>> LogNumber.from_int(1000).log10_int
        3
        """
        if value <= 0:
            raise ValueError("LogNumber represents positive quantities only")
        with mpmath.workdps(FRACTION_DPS):
            estimate = int(mpmath.floor(mpmath.log10(mpmath.mpf(value))))
        # The float estimate can be one off right at a power of ten.
        if 10**estimate > value:
            estimate -= 1
        elif 10 ** (estimate + 1) <= value:
            estimate += 1
        with mpmath.workdps(FRACTION_DPS):
            frac = float(max(mpmath.log10(mpmath.mpf(value)) - estimate, 0))
        # Just below a power of ten the fraction rounds up to 1.0.
        return cls(estimate, min(frac, LARGEST_FRACTION))

    @property
    def log10(self) -> mpmath.mpf:
        with mpmath.workdps(FRACTION_DPS + decimal_digits(self.log10_int)):
            return mpmath.mpf(self.log10_int) + self.log10_frac

    def _key(self):
        return self.log10_int, self.log10_frac

    def __repr__(self):
        return f"LogNumber({self.log10_int}, {self.log10_frac!r})"

    def __str__(self):
        return f"10^({self.log10_int} + {self.log10_frac:.12f})"

    def __reduce__(self):
        return (LogNumber, (self.log10_int, self.log10_frac))

    def __hash__(self):
        return hash(self._key())

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, LogNumber):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other: Any) -> bool:
        if not isinstance(other, LogNumber):
            return NotImplemented
        return self._key() < other._key()

    def __mul__(self, other: Union["LogNumber", int]) -> "LogNumber":
        if isinstance(other, int):
            other = LogNumber.from_int(other)
        return LogNumber(
            self.log10_int + other.log10_int, self.log10_frac + other.log10_frac
        )

    __rmul__ = __mul__

    def __add__(self, other: Union["LogNumber", int]) -> "LogNumber":
        if isinstance(other, int):
            other = LogNumber.from_int(other)
        big, small = (self, other) if other <= self else (other, self)
        gap = big.log10_int - small.log10_int
        if gap > NEGLIGIBLE_GAP:
            return big
        with mpmath.workdps(FRACTION_DPS):
            ratio = mpmath.power(10, small.log10_frac - big.log10_frac - gap)
            return LogNumber(
                big.log10_int, float(big.log10_frac + mpmath.log10(1 + ratio))
            )

    __radd__ = __add__

    def as_json(self) -> Dict[str, Any]:
        return {"log10_int": str(self.log10_int), "log10_frac": self.log10_frac}

    @classmethod
    def __get_validators__(cls):
        yield cls.validate

    @classmethod
    def validate(cls, value: Any) -> "LogNumber":
        if isinstance(value, LogNumber):
            return value
        if isinstance(value, dict):
            return cls(int(value["log10_int"]), float(value["log10_frac"]))
        raise TypeError("expected a LogNumber")
