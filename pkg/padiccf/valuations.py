from fractions import Fraction
from functools import total_ordering
from typing import Any, Union

from sympy import multiplicity

from padiccf.exceptions import ZeroInputError


@total_ordering
class Infinity:
    """
    The valuation of zero. Compares greater than every integer and absorbs addition.
    """

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"

    def __hash__(self):
        return hash("padiccf.INFINITY")

    def __eq__(self, other: Any) -> bool:
        return other is self

    def __lt__(self, other: Any) -> bool:
        if other is self or isinstance(other, int):
            return False
        return NotImplemented

    def __add__(self, other: Any) -> "Infinity":
        if other is self or isinstance(other, int):
            return self
        return NotImplemented

    __radd__ = __add__

    def __reduce__(self):
        return (Infinity, ())

    @classmethod
    def __get_validators__(cls):
        yield cls.validate

    @classmethod
    def validate(cls, value: Any) -> "Infinity":
        if value is INFINITY or value == "inf":
            return INFINITY
        raise TypeError("not the infinite valuation")


INFINITY = Infinity()

ExtendedValuation = Union[int, Infinity]


def vp(x: Union[int, Fraction], p: int) -> ExtendedValuation:
    """
    The p-adic valuation of a rational.

    Example:
    >>> vp(Fraction(50, 3), 5)
    2
    >>> vp(0, 7)
    INFINITY
    """
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return int(multiplicity(p, abs(x.numerator))) - int(
        multiplicity(p, x.denominator)
    )


def finite_vp(x: Union[int, Fraction], p: int) -> int:
    """
    Valuation of a value known to be nonzero.

    :raise ZeroInputError: If x is zero.
    """
    value = vp(x, p)
    if isinstance(value, Infinity):
        raise ZeroInputError("The valuation of zero is not finite")
    return value
