from fractions import Fraction

import pytest

from padiccf import (
    INFINITY,
    ConfigError,
    InvalidContextError,
    Mode,
    PadicContext,
    ParseError,
    ZeroInputError,
    configure,
    digits,
    rational_floor,
    vp,
)
from padiccf.tests.conftest import browkin_quotient
from padiccf.utils import (
    format_rational,
    parse_epsilon,
    parse_minpoly,
    parse_rational,
    parse_surd,
)
from padiccf.valuations import finite_vp


def test_valuation():
    assert vp(Fraction(50, 3), 5) == 2
    assert vp(Fraction(3, 50), 5) == -2
    assert vp(7, 5) == 0
    assert vp(0, 7) is INFINITY

    with pytest.raises(ZeroInputError):
        finite_vp(0, 7)


def test_infinity_ordering():
    assert INFINITY > 10**100
    assert not 3 > INFINITY
    assert min(INFINITY, -1) == -1
    assert INFINITY + 5 is INFINITY


@pytest.mark.parametrize("p", [2, 4, 9, 1])
def test_context_needs_odd_prime(p: int):
    with pytest.raises(InvalidContextError):
        PadicContext(p=p)


def test_digits():
    ruban = PadicContext(p=5, mode=Mode.RUBAN)
    browkin = PadicContext(p=5, mode=Mode.BROWKIN)

    assert digits(Fraction(1, 3), ruban, 3).digits == (2, 3, 1)
    assert digits(Fraction(1, 3), browkin, 3).digits == (2, -2, 2)
    assert digits(Fraction(1, 3), browkin, 3).start_exponent == 0
    assert digits(Fraction(-3, 5), ruban, 2).start_exponent == -1

    with pytest.raises(ZeroInputError):
        digits(Fraction(0), browkin, 3)


def test_digit_expansion_value(rng):
    for p in (3, 5, 7, 11):
        for mode in Mode:
            context = PadicContext(p=p, mode=mode)
            for _ in range(50):
                x = Fraction(rng.randint(-(10**6), 10**6) or 1, rng.randint(1, 10**6))
                expansion = digits(x, context, 12)
                low, high = context.digit_range
                assert all(low <= d <= high for d in expansion.digits)
                # The truncated sum agrees with x up to p^(r + 12).
                rest = x - expansion.value()
                assert rest == 0 or vp(rest, p) >= expansion.start_exponent + 12


def test_rational_floor():
    ruban = PadicContext(p=5, mode=Mode.RUBAN)
    browkin = PadicContext(p=5, mode=Mode.BROWKIN)

    assert rational_floor(Fraction(-3, 5), ruban) == Fraction(22, 5)
    assert rational_floor(Fraction(-3, 5), browkin) == Fraction(-3, 5)
    assert rational_floor(Fraction(9), ruban) == 4
    assert rational_floor(Fraction(9), browkin) == -1
    assert rational_floor(Fraction(5), browkin) == 0
    assert rational_floor(Fraction(1, 3), browkin) == 2


def test_floor_leaves_positive_valuation(rng):
    for p in (3, 5, 7):
        for mode in Mode:
            context = PadicContext(p=p, mode=mode)
            for _ in range(100):
                x = Fraction(rng.randint(-999, 999) or 7, rng.randint(1, 999))
                rest = x - rational_floor(x, context)
                assert rest == 0 or vp(rest, p) > 0


def test_random_quotients_are_browkin_floors(rng):
    for p in (3, 5, 7):
        context = PadicContext(p=p)
        for _ in range(200):
            quotient = browkin_quotient(rng, p, 3)
            assert -3 <= vp(quotient, p) <= -1
            assert rational_floor(quotient, context) == quotient


def test_parse_rational():
    assert parse_rational("-3/5") == Fraction(-3, 5)
    assert parse_rational("−3/5") == Fraction(-3, 5)
    assert parse_rational("4") == 4
    assert format_rational(Fraction(22, 5)) == "22/5"
    assert format_rational(Fraction(-2)) == "-2"

    for bad in ("", "1/0", "0.5", "abc", "1/-2"):
        with pytest.raises(ParseError):
            parse_rational(bad)


def test_parse_epsilon():
    assert parse_epsilon("1/3") == Fraction(1, 3)

    for bad in ("0.3", "1e-2"):
        with pytest.raises(ParseError):
            parse_epsilon(bad)


def test_parse_surd():
    assert parse_surd("(-1/10 + 1/10*sqrt(101))") == (
        Fraction(-1, 10),
        Fraction(1, 10),
        101,
    )
    assert parse_minpoly("1,0,-6") == (1, 0, -6)

    with pytest.raises(ParseError):
        parse_minpoly("1,x,3")


def test_configure(restore_conf):
    configure(max_terms=50, threads=2)
    assert restore_conf.max_terms == 50
    assert restore_conf.threads == 2

    with pytest.raises(ConfigError):
        configure(max_terms=0)
    with pytest.raises(ConfigError):
        configure(unknown_option=1)
