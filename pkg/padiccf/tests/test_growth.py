from fractions import Fraction

import numpy as np
import pytest

from padiccf import (
    Branch,
    MinimalPolynomial,
    PadicContext,
    convergents,
    expand,
    expand_sequence,
    golden_bound_check,
    liouville_constant,
    liouville_scan,
    loglog_statistic,
)

SQRT6 = MinimalPolynomial(coefficients=(1, 0, -6))
SQRT101 = MinimalPolynomial(coefficients=(1, 0, -101))


def test_liouville_constant():
    constant = liouville_constant(SQRT6, 5)
    assert constant.c == Fraction(1, 7)
    assert constant.v_fprime == 0
    assert constant.degree == 2

    assert liouville_constant(SQRT101, 5).c == Fraction(1, 102)
    assert liouville_constant(SQRT6, 5, Branch.MINUS).c == Fraction(1, 7)


def test_liouville_constant_with_non_unit_derivative():
    # f'(alpha) = 2 sqrt(150) = 10 sqrt(6) has v_5 = 1.
    mp = MinimalPolynomial(coefficients=(1, 0, -150))
    constant = liouville_constant(mp, 5)
    assert constant.v_fprime == 1
    assert constant.c == Fraction(5, 151)

    assert liouville_scan(mp, 5, Branch.PLUS, 60).holds_on_range


def test_liouville_scan_small():
    report = liouville_scan(SQRT6, 5, Branch.PLUS, 1)
    assert report.extras["checked_pairs"] == 3
    assert report.holds_on_range
    assert report.criterion == "liouville-scan"
    assert report.summary == "3 coprime pairs checked, 0 violations"


@pytest.mark.parametrize("mp", [SQRT6, SQRT101])
def test_liouville_scan(mp: MinimalPolynomial):
    report = liouville_scan(mp, 5, Branch.PLUS, 500)
    assert report.holds_on_range
    assert report.ledger == []
    assert report.extras["min_slack"]["slack"] >= 1


def test_golden_bound(browkin5):
    pairs = convergents(expand_sequence([0, Fraction(1, 5), Fraction(1, 5)], browkin5))
    report = golden_bound_check(pairs, 5)
    assert report.holds_on_range
    assert report.ledger[2].values == {"margin": 0, "accounting_holds": True}
    assert report.extras["phi_bound_implied"]

    pairs = convergents(expand_sequence([0, Fraction(1, 125)], browkin5))
    report = golden_bound_check(pairs, 5)
    assert report.ledger[1].values["margin"] == 2


def test_loglog_statistic_values(browkin5):
    pairs = convergents(expand_sequence([0] + [Fraction(1, 5)] * 12, browkin5))
    report = loglog_statistic(pairs, 5)

    values = {entry.k: entry.s_k for entry in report.entries}
    assert sorted(values) == list(range(2, 13))
    assert values[2] == pytest.approx(0.48664, abs=1e-3)
    assert values[10] == pytest.approx(0.42161, abs=1e-3)
    assert report.maximum_index == 3
    assert report.maximum == pytest.approx(0.550085, abs=1e-4)
    assert report.decreasing_from == 3
    assert report.slope < 0
    assert report.rows()[0][:2] == (2, -2)


def test_loglog_statistic_of_quadratic(browkin5, alpha):
    pairs = convergents(expand(alpha, browkin5), count=200)
    report = loglog_statistic(pairs, 5)
    values = np.array([entry.s_k for entry in report.entries])

    assert np.all(np.isfinite(values))
    assert report.maximum_index <= 5
    tail = values[[entry.k >= 20 for entry in report.entries]]
    assert np.all(np.diff(tail) < 0)
    assert all(entry.flag_f_ge_e for entry in report.entries)


def test_loglog_statistic_empty():
    context = PadicContext(p=7)
    pairs = convergents(expand(Fraction(1, 3), context))
    report = loglog_statistic(pairs, 7)
    assert report.entries == ()
    assert report.maximum is None
