from fractions import Fraction
from typing import Any, Union

import pydantic

from padiccf.utils import parse_rational
from padiccf.valuations import Infinity


class Rational(Fraction):
    """
    Exact rational field type for pydantic models.

    Accepts fractions, integers and the "n/d" text format; floats are refused so that
    no inexact value slips into a verdict.
    """

    __slots__ = ()

    @classmethod
    def __get_validators__(cls):
        yield cls.validate

    @classmethod
    def validate(cls, value: Any) -> "Rational":
        if isinstance(value, bool) or isinstance(value, float):
            raise TypeError("floats are not accepted as exact rationals")
        if isinstance(value, (Fraction, int)):
            return cls(value)
        if isinstance(value, str):
            return cls(parse_rational(value))
        raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


Valuation = Union[Infinity, int]


class PadicModel(pydantic.BaseModel):
    """
    Base model for every value object of the package. Instances are immutable.
    """

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False
