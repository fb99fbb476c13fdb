import logging
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

from pydantic import validator
from sympy import isprime

from padiccf.configurations import CONF
from padiccf.exceptions import InvalidContextError, ZeroInputError
from padiccf.models import PadicModel
from padiccf.valuations import finite_vp

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    BROWKIN = "browkin"
    RUBAN = "ruban"


class PadicContext(PadicModel):
    """
    The prime, the digit convention and the number of certified square root digits.
    """

    p: int
    mode: Mode = Mode.BROWKIN
    precision: Optional[int] = None

    @validator("p")
    def p_must_be_odd_prime(cls, p: int) -> int:
        if p == 2 or not isprime(p):
            raise InvalidContextError(f"p must be an odd prime, got {p}")
        return p

    @validator("precision")
    def precision_must_be_positive(cls, precision: Optional[int]) -> Optional[int]:
        if precision is not None and precision < 1:
            raise InvalidContextError("precision must be a positive number of digits")
        return precision

    @property
    def digit_range(self) -> Tuple[int, int]:
        """
        Smallest and largest digit of the mode.
        """
        if self.mode == Mode.BROWKIN:
            half = (self.p - 1) // 2
            return -half, half
        return 0, self.p - 1

    def resolved_precision(self, max_terms: Optional[int] = None) -> int:
        if self.precision is not None:
            return self.precision
        return CONF.default_precision(max_terms)

    def with_precision(self, precision: int) -> "PadicContext":
        return self.copy(update={"precision": precision})

    def digit(self, residue: int) -> int:
        """
        The representative of a residue class modulo p in the mode's digit set.

        >>> PadicContext(p=5, mode="browkin").digit(9)
        -1
        """
        residue %= self.p
        if self.mode == Mode.BROWKIN and residue > (self.p - 1) // 2:
            return residue - self.p
        return residue


class PadicDigitExpansion(PadicModel):
    """
    The digits a_r, a_(r+1), ... of sum a_i p^i, starting at exponent r.
    """

    context: PadicContext
    start_exponent: int
    digits: Tuple[int, ...]

    @validator("digits")
    def digits_in_range(cls, digits: Tuple[int, ...], values: dict):
        context = values.get("context")
        if context is None:
            return digits
        low, high = context.digit_range
        for digit in digits:
            if not low <= digit <= high:
                raise ValueError(f"digit {digit} outside [{low}, {high}]")
        if digits and digits[0] == 0:
            raise ValueError("the leading digit must be nonzero")
        return digits

    def value(self) -> Fraction:
        """
        Reconstruct the truncated sum of the digits.
        """
        p = self.context.p
        total = Fraction(0)
        for offset, digit in enumerate(self.digits):
            exponent = self.start_exponent + offset
            if exponent >= 0:
                total += digit * p**exponent
            else:
                total += Fraction(digit, p ** (-exponent))
        return total


def _unit_digits(unit: Fraction, context: PadicContext, count: int) -> Tuple[int, ...]:
    p = context.p
    result = []
    for _ in range(count):
        residue = unit.numerator * pow(unit.denominator, -1, p)
        digit = context.digit(residue)
        result.append(digit)
        unit = (unit - digit) / p
    return tuple(result)


def digits(x: Fraction, context: PadicContext, count: int) -> PadicDigitExpansion:
    """
    The first digits of the p-adic expansion of a nonzero rational.

    Example:
    >>> digits(Fraction(1, 3), PadicContext(p=5, mode="ruban"), 3).digits
    (2, 3, 1)

    :param x: The rational to expand.
    :param context: The prime and digit convention.
    :param count: How many digits to emit, starting at exponent vp(x).
    :return: The digit expansion.
    :raise ZeroInputError: If x is zero.
    """
    x = Fraction(x)
    if x == 0:
        raise ZeroInputError("Zero has no leading digit")
    r = finite_vp(x, context.p)
    unit = x * Fraction(context.p) ** (-r)
    return PadicDigitExpansion(
        context=context,
        start_exponent=r,
        digits=_unit_digits(unit, context, count),
    )


def rational_floor(x: Fraction, context: PadicContext) -> Fraction:
    """
    The truncation s(x) = sum of a_i p^i for r <= i <= 0, zero when vp(x) > 0.

    :raise ZeroInputError: If x is zero.
    """
    x = Fraction(x)
    if x == 0:
        raise ZeroInputError("The floor of zero is undefined")
    r = finite_vp(x, context.p)
    if r > 0:
        return Fraction(0)
    return digits(x, context, 1 - r).value()
