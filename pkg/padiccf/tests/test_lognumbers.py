import pytest

from padiccf import LogNumber


def test_from_int():
    assert LogNumber.from_int(1000).log10_int == 3
    assert LogNumber.from_int(1000).log10_frac == pytest.approx(0, abs=1e-12)
    assert LogNumber.from_int(999).log10_int == 2
    assert LogNumber.from_int(10**5000).log10_int == 5000
    assert LogNumber.from_int(10**5000 - 1).log10_int == 4999

    with pytest.raises(ValueError):
        LogNumber.from_int(0)


def test_normalization():
    number = LogNumber(5, 1.25)
    assert number.log10_int == 6
    assert number.log10_frac == pytest.approx(0.25)
    assert LogNumber(5, -0.5).log10_int == 4


def test_ordering():
    assert LogNumber(5, 0.1) < LogNumber(5, 0.2) < LogNumber(6, 0.0)
    assert LogNumber(2, 0.5) == LogNumber(2, 0.5)
    assert max(LogNumber(1, 0.9), LogNumber(2, 0.1)) == LogNumber(2, 0.1)


def test_product_matches_integers(rng):
    for _ in range(2000):
        a, b = rng.randint(1, 10**9), rng.randint(1, 10**9)
        product = LogNumber.from_int(a) * LogNumber.from_int(b)
        assert abs(float(product.log10 - LogNumber.from_int(a * b).log10)) < 1e-9


def test_sum():
    total = LogNumber.from_int(300) + LogNumber.from_int(700)
    assert abs(float(total.log10) - 3) < 1e-12
    assert LogNumber(100, 0.5) + LogNumber(1, 0.0) == LogNumber(100, 0.5)
    scaled = 7 * LogNumber.from_int(2)
    assert abs(float(scaled.log10 - LogNumber.from_int(14).log10)) < 1e-12


def test_as_json():
    number = LogNumber(10**30, 0.25)
    assert number.as_json() == {"log10_int": str(10**30), "log10_frac": 0.25}
    assert LogNumber.validate(number.as_json()) == number
