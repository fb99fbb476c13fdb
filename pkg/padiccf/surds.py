import logging
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Tuple, Union

from sympy.ntheory import sqrt_mod
from sympy.ntheory.primetest import is_square

from padiccf.digits import PadicContext, rational_floor
from padiccf.exceptions import (
    InvalidSurdError,
    NotASquareError,
    PrecisionExhaustedError,
    ZeroInputError,
)
from padiccf.utils import format_surd
from padiccf.valuations import INFINITY, ExtendedValuation, finite_vp, vp

logger = logging.getLogger(__name__)


class Branch(str, Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def sign(self) -> int:
        return 1 if self == Branch.PLUS else -1


def split_square_part(d: int, p: int) -> Tuple[int, int]:
    """
    Write D = p^(2t) * D0 with D0 prime to p.

    :return: The tuple (t, D0).
    :raise NotASquareError: If vp(D) is odd.
    """
    v = finite_vp(d, p)
    if v % 2:
        raise NotASquareError(f"{d} has odd {p}-adic valuation {v}")
    return v // 2, d // p**v


@lru_cache(maxsize=512)
def _unit_root(d0: int, p: int, n: int, branch: Branch) -> int:
    roots = sqrt_mod(d0 % p, p, all_roots=True)
    if not roots:
        raise NotASquareError(f"{d0} is not a quadratic residue modulo {p}")
    root = min(roots)
    precision = 1
    while precision < n:
        precision = min(2 * precision, n)
        modulus = p**precision
        root = (root - (root * root - d0) * pow(2 * root, -1, modulus)) % modulus
    modulus = p**n
    root %= modulus
    if branch == Branch.MINUS:
        root = (-root) % modulus
    return root


def hensel_sqrt(d: int, p: int, n: int, branch: Branch = Branch.PLUS) -> int:
    """
    A square root of D modulo p^N lifted with Newton's iteration.

    PlusRoot is the lift of the smaller least nonnegative square root of D's unit
    part modulo p, MinusRoot is its negative.

    Example:
    >>> hensel_sqrt(101, 5, 3)
    51

    :param d: The integer whose root is taken.
    :param p: An odd prime.
    :param n: The number of digits to certify.
    :param branch: Which of the two roots to return.
    :return: x with x^2 = D modulo p^N, reduced into [0, p^N).
    :raise NotASquareError: If D has no square root in Q_p.
    """
    t, d0 = split_square_part(d, p)
    return (p**t * _unit_root(d0, p, n, branch)) % p**n


def sqrt_approximation(d: int, p: int, n: int, branch: Branch) -> Tuple[int, int]:
    """
    An integer congruent to the embedded square root of D together with the exponent
    up to which the congruence is certified.
    """
    t, d0 = split_square_part(d, p)
    return p**t * _unit_root(d0, p, n, branch), t + n


class SurdElement:
    """
    Exact element a + b*sqrt(D) of a real quadratic field, embedded into Q_p by the
    branch of the square root.
    """

    __slots__ = ["a", "b", "d", "branch"]

    def __init__(
        self,
        a: Union[int, Fraction],
        b: Union[int, Fraction],
        d: int,
        branch: Branch = Branch.PLUS,
    ):
        if d < 2 or is_square(d):
            raise InvalidSurdError(f"D must be a positive non-square integer, got {d}")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d
        self.branch = Branch(branch) if self.b != 0 else Branch.PLUS

    def __repr__(self):
        return (
            f"SurdElement({self.a!r}, {self.b!r}, {self.d}, branch={self.branch.value})"
        )

    def __str__(self):
        return format_surd(self.a, self.b, self.d)

    def __reduce__(self):
        return (SurdElement, (self.a, self.b, self.d, self.branch))

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d, self.branch))

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, SurdElement):
            if self.b == 0 or other.b == 0:
                return self.b == other.b and self.a == other.a
            return (self.a, self.b, self.d, self.branch) == (
                other.a,
                other.b,
                other.d,
                other.branch,
            )
        return NotImplemented

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def _coerce(self, other: Any) -> "SurdElement":
        if isinstance(other, SurdElement):
            if other.b != 0 and self.b != 0:
                if (other.d, other.branch) != (self.d, self.branch):
                    raise InvalidSurdError(
                        f"Cannot combine elements of Q(sqrt({self.d})) and "
                        f"Q(sqrt({other.d})) or of different embeddings"
                    )
            return other
        if isinstance(other, (int, Fraction)):
            return SurdElement(other, 0, self.d, self.branch)
        return NotImplemented

    def _result(self, other: "SurdElement", a: Fraction, b: Fraction) -> "SurdElement":
        carrier = self if self.b != 0 else other
        return SurdElement(a, b, carrier.d, carrier.branch)

    def __add__(self, other: Any):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._result(other, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return SurdElement(-self.a, -self.b, self.d, self.branch)

    def __sub__(self, other: Any):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._result(other, self.a - other.a, self.b - other.b)

    def __rsub__(self, other: Any):
        return (-self).__add__(other)

    def __mul__(self, other: Any):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.d if self.b != 0 else other.d
        a = self.a * other.a + self.b * other.b * d
        b = self.a * other.b + self.b * other.a
        return self._result(other, a, b)

    __rmul__ = __mul__

    def inverse(self) -> "SurdElement":
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError("SurdElement division by zero")
        return SurdElement(self.a / norm, -self.b / norm, self.d, self.branch)

    def __truediv__(self, other: Any):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other: Any):
        return self.inverse() * other

    def conjugate(self) -> "SurdElement":
        return SurdElement(self.a, -self.b, self.d, self.branch)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    @property
    def is_rational(self) -> bool:
        return self.b == 0


PadicNumber = Union[Fraction, SurdElement]


def check_embedding(d: int, context: PadicContext) -> None:
    """
    :raise NotASquareError: If sqrt(D) does not lie in Q_p.
    """
    t, d0 = split_square_part(d, context.p)
    _unit_root(d0, context.p, 1, Branch.PLUS)


def surd_valuation(z: PadicNumber, context: PadicContext) -> int:
    """
    The exact p-adic valuation of a nonzero element a + b*sqrt(D).

    When vp(a) and vp(b*sqrt(D)) differ the smaller one wins. Otherwise the norm
    identity v(z) + v(conj z) = vp(a^2 - b^2 D) is combined with the certified digits
    of sqrt(D): whichever of z and its conjugate is separated from zero by the
    available digits gives the answer.

    Example:
    >>> surd_valuation(SurdElement(76, -26, 101), PadicContext(p=5))
    6

    :raise ZeroInputError: If z is zero.
    :raise PrecisionExhaustedError: If the certified digits cannot separate z from 0.
    """
    p = context.p
    if not isinstance(z, SurdElement):
        return finite_vp(z, p)
    if not z:
        raise ZeroInputError("The valuation of zero is not finite")
    if z.b == 0:
        return finite_vp(z.a, p)
    check_embedding(z.d, context)

    t, _ = split_square_part(z.d, p)
    va = vp(z.a, p)
    vb = finite_vp(z.b, p) + t
    if va != vb:
        return min(va, vb)

    n = context.resolved_precision()
    root, accuracy = sqrt_approximation(z.d, p, n, z.branch)
    certified = finite_vp(z.b, p) + accuracy
    conjugate = z.a - z.b * root
    if conjugate != 0:
        v_conjugate = finite_vp(conjugate, p)
        if v_conjugate < certified:
            return finite_vp(z.norm(), p) - v_conjugate
    direct = z.a + z.b * root
    if direct != 0:
        v_direct = finite_vp(direct, p)
        if v_direct < certified:
            return v_direct
    raise PrecisionExhaustedError(
        f"{n} digits of sqrt({z.d}) cannot separate {z} from zero",
        exponent_range=(vb, certified),
        precision=n,
    )


def valuation(x: PadicNumber, context: PadicContext) -> ExtendedValuation:
    """
    Valuation of a rational or a surd, INFINITY for an exact zero.
    """
    if not x:
        return INFINITY
    return surd_valuation(x, context)


def padic_floor(x: PadicNumber, context: PadicContext) -> Fraction:
    """
    The Ruban or Browkin floor s(x) of a rational or an embedded surd.

    Example:
    >>> padic_floor(Fraction(-3, 5), PadicContext(p=5, mode="ruban"))
    Fraction(22, 5)

    :raise ZeroInputError: If x is zero.
    :raise PrecisionExhaustedError: If the certified digits of sqrt(D) do not reach
    exponent 0.
    """
    if not isinstance(x, SurdElement):
        return rational_floor(Fraction(x), context)
    if x.b == 0:
        return rational_floor(x.a, context)
    v = surd_valuation(x, context)
    if v > 0:
        return Fraction(0)
    n = context.resolved_precision()
    root, accuracy = sqrt_approximation(x.d, context.p, n, x.branch)
    certified = finite_vp(x.b, context.p) + accuracy
    if certified < 1:
        raise PrecisionExhaustedError(
            f"{n} digits of sqrt({x.d}) do not determine the digits of {x} "
            f"in exponents [{v}, 0]",
            exponent_range=(v, 0),
            precision=n,
        )
    return rational_floor(x.a + x.b * root, context)
