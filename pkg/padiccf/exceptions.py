from typing import Optional, Tuple


class PadiccfError(Exception):
    """Generic padiccf error class."""

    pass


class ZeroInputError(PadiccfError):
    pass


class PrecisionExhaustedError(PadiccfError):
    """
    The certified digits of a square root did not suffice.

    :param exponent_range: The range of p-adic exponents that could not be certified.
    :param index: The expansion index at which precision ran out, if known.
    :param precision: The number of digits that were available.
    """

    def __init__(
        self,
        message: str,
        *,
        exponent_range: Optional[Tuple[int, int]] = None,
        index: Optional[int] = None,
        precision: Optional[int] = None,
    ):
        super().__init__(message)
        self.exponent_range = exponent_range
        self.index = index
        self.precision = precision


class NotASquareError(PadiccfError):
    pass


class DivisionByZeroError(PadiccfError):
    def __init__(self, message: str, *, depth: int):
        super().__init__(message)
        self.depth = depth


class NonzeroB0Error(PadiccfError):
    pass


class NotPalindromicError(PadiccfError):
    pass


class IndexOutOfRangeError(PadiccfError):
    pass


class EpsilonOutOfRangeError(PadiccfError):
    pass


class UnsortedInputError(PadiccfError):
    pass


class PolynomialError(PadiccfError):
    pass


class InvalidContextError(PadiccfError):
    pass


class InvariantViolationError(PadiccfError):
    """An identity that must always hold failed; this is always a bug."""

    pass


class ConfigError(PadiccfError):
    pass


class UsageError(PadiccfError):
    pass


class ParseError(PadiccfError, ValueError):
    pass


class InvalidSurdError(PadiccfError, ValueError):
    pass


class InvalidSequenceError(PadiccfError):
    pass
