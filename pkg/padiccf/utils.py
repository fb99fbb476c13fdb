import re
from fractions import Fraction
from typing import Tuple

import mpmath

from padiccf.exceptions import ParseError

SurdParts = Tuple[Fraction, Fraction, int]

RATIONAL_PATTERN = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")
SURD_PATTERN = re.compile(
    r"^\(?\s*(?P<a>[+-]?\d+(?:/\d+)?)\s*(?P<sign>[+-])\s*"
    r"(?P<b>\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(?P<d>\d+)\s*\)\s*\)?$"
)
MINUS_SIGNS = ("−", "–")


def normalize_minus(text: str) -> str:
    """
    Replace typographic minus signs by the ASCII hyphen-minus.
    """
    for sign in MINUS_SIGNS:
        text = text.replace(sign, "-")
    return text


def parse_rational(text: str) -> Fraction:
    """
    Parse a rational written as "n/d" or "n".

    Example:
    >>> parse_rational("-3/5")
    Fraction(-3, 5)
    >>> parse_rational("−7")
    Fraction(-7, 1)

    :param text: The text to parse.
    :return: The reduced fraction.
    :raise ParseError: If the text is not a rational literal or has a zero denominator.
    """
    cleaned = normalize_minus(text.strip())
    match = RATIONAL_PATTERN.match(cleaned)
    if not match:
        raise ParseError(f"'{text}' is not a rational of the form n/d or n")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ParseError(f"'{text}' has a zero denominator")
    return Fraction(numerator, denominator)


def parse_epsilon(text: str) -> Fraction:
    """
    Parse an exponent tilt written as "u/w". Decimal notation is rejected so that every
    verdict stays exact.

    :raise ParseError: If the text is not an exact rational.
    """
    if "." in text or "e" in text.lower():
        raise ParseError(f"epsilon '{text}' must be an exact rational u/w, not a float")
    return parse_rational(text)


def parse_surd(text: str) -> SurdParts:
    """
    Parse a quadratic surd written as "(a + b*sqrt(D))".

    Example:
    >>> parse_surd("(-1/10 + 1/10*sqrt(101))")
    (Fraction(-1, 10), Fraction(1, 10), 101)

    :return: The tuple (a, b, D).
    :raise ParseError: If the text does not follow the surd format.
    """
    cleaned = normalize_minus(text.strip())
    match = SURD_PATTERN.match(cleaned)
    if not match:
        raise ParseError(f"'{text}' is not a surd of the form (a + b*sqrt(D))")
    a = parse_rational(match.group("a"))
    b = parse_rational(match.group("b"))
    if match.group("sign") == "-":
        b = -b
    return a, b, int(match.group("d"))


def parse_minpoly(text: str) -> Tuple[int, ...]:
    """
    Parse comma separated integer coefficients, leading coefficient first.

    Example:
    >>> parse_minpoly("1,0,-6")
    (1, 0, -6)
    """
    parts = [part.strip() for part in normalize_minus(text).split(",")]
    try:
        return tuple(int(part) for part in parts)
    except ValueError as e:
        raise ParseError(f"'{text}' is not a comma separated integer list") from e


def format_rational(value: Fraction) -> str:
    """
    Render a rational in the "n/d" text format, or "n" for integers.
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_surd(a: Fraction, b: Fraction, d: int) -> str:
    """
    Render a surd in the "(a + b*sqrt(D))" text format.

    >>> format_surd(Fraction(76), Fraction(-26), 101)
    '(76 - 26*sqrt(101))'
    """
    sign = "-" if b < 0 else "+"
    return f"({format_rational(a)} {sign} {format_rational(abs(b))}*sqrt({d}))"


def power(base: int, exponent: int) -> Fraction:
    """
    Exact integer power that allows negative exponents.
    """
    if exponent >= 0:
        return Fraction(base**exponent)
    return Fraction(1, base ** (-exponent))


def log_base(value: Fraction, base: int) -> float:
    """
    log_base(value) for a positive exact rational of any size.
    """
    value = Fraction(value)
    ln = mpmath.log(value.numerator) - mpmath.log(value.denominator)
    return float(ln / mpmath.log(base))
