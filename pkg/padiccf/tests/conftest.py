import random
from fractions import Fraction
from typing import List

import pytest

from padiccf import CONF, Mode, PadicContext, SurdElement
from padiccf.configurations import Configuration

SEED = 20240611


@pytest.fixture
def browkin5() -> PadicContext:
    return PadicContext(p=5, mode=Mode.BROWKIN)


@pytest.fixture
def ruban5() -> PadicContext:
    return PadicContext(p=5, mode=Mode.RUBAN)


@pytest.fixture
def alpha() -> SurdElement:
    """
    (-1 + sqrt(101)) / 10, whose Browkin expansion at p = 5 is [0, (1/5) repeated].
    """
    return SurdElement(Fraction(-1, 10), Fraction(1, 10), 101)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(SEED)


@pytest.fixture
def restore_conf():
    saved = {name: getattr(CONF, name) for name in Configuration.__fields__}

    yield CONF

    for name, value in saved.items():
        setattr(CONF, name, value)


def browkin_quotient(rng: random.Random, p: int, max_depth: int = 2) -> Fraction:
    """
    A random Browkin floor with negative valuation, usable as a partial quotient.

    :param rng: The random generator.
    :param p: The prime.
    :param max_depth: Largest power of p in the denominator.
    :return: sum of a_i p^i for -v <= i <= 0 with a_(-v) nonzero.
    """
    half = (p - 1) // 2
    depth = rng.randint(1, max_depth)
    lowest = rng.choice([d for d in range(-half, half + 1) if d != 0])
    digits = [lowest] + [rng.randint(-half, half) for _ in range(depth)]
    numerator = sum(digit * p**i for i, digit in enumerate(digits))
    return Fraction(numerator, p**depth)


def palindrome(rng: random.Random, p: int, length: int) -> List[Fraction]:
    half = [browkin_quotient(rng, p) for _ in range((length + 1) // 2)]
    return half + half[::-1][length % 2 :]
