from fractions import Fraction
from math import gcd

import mpmath
import pydantic
import pytest

from padiccf import (
    Branch,
    CountVariant,
    EpsilonOutOfRangeError,
    MinimalPolynomial,
    PolynomialError,
    SolutionVariant,
    UnsortedInputError,
    c_hat,
    corollary_split,
    count_bound,
    enumerate_solutions,
    gap_law_check,
    ridout_params,
)
from padiccf.ridout import SolutionRecord, _inequality_holds, root_of
from padiccf.valuations import finite_vp

SQRT6 = MinimalPolynomial(coefficients=(1, 0, -6))
SQRT7 = MinimalPolynomial(coefficients=(1, 0, -7))


def test_minimal_polynomial():
    assert SQRT6.degree == 2
    assert SQRT6.a_bar == 6
    assert SQRT6.c_hat_sum == 7
    assert SQRT6.derivative == (2, 0)
    assert MinimalPolynomial(coefficients=(1, 0, 0, -2)).degree == 3

    for coefficients in ((1, 0, -4), (2, 0, -6), (1, 3), (1, 0, 0, -8), (1, 3, 2)):
        with pytest.raises(PolynomialError):
            MinimalPolynomial(coefficients=coefficients)


def test_root_of():
    alpha = root_of(SQRT6)
    assert (alpha.a, alpha.b, alpha.d) == (0, 1, 6)

    alpha = root_of(MinimalPolynomial(coefficients=(1, 1, -1)), Branch.MINUS)
    assert (alpha.a, alpha.b, alpha.d) == (Fraction(-1, 2), Fraction(1, 2), 5)
    assert alpha.branch == Branch.MINUS
    assert alpha * alpha + alpha - 1 == 0


def test_c_hat():
    assert c_hat(SQRT6) == pytest.approx(6.158883, abs=1e-6)
    assert c_hat(MinimalPolynomial(coefficients=(1, 0, -2))) == pytest.approx(
        4.772589, abs=1e-6
    )


def test_ridout_params():
    params = ridout_params(2, Fraction(1, 3))
    assert params.m == 3601
    assert params.log10_delta_inv == 3601 * 2**3601
    assert all(params.conditions)

    with mpmath.workdps(30):
        log10_l = mpmath.log10(3601) + 3601 * mpmath.log10(2)
        expected_k = log10_l + mpmath.log10(2 * mpmath.log(10) / mpmath.log(4 / 3.0))
        expected_l = log10_l + mpmath.log10(mpmath.log(10) / mpmath.log(4 / 3.0))
        assert abs(params.k.log10 - expected_k) < 1e-6
        assert abs(params.l.log10 - expected_l) < 1e-6

    assert ridout_params(2, Fraction(1, 4)).m == 6401

    for epsilon in (Fraction(1, 2), Fraction(0), Fraction(-1, 3)):
        with pytest.raises(EpsilonOutOfRangeError):
            ridout_params(2, epsilon)


def test_count_bound_decreases_with_epsilon():
    for variant in CountVariant:
        bounds = [
            count_bound(SQRT6, Fraction(1, d), variant).value for d in (3, 4, 5, 6)
        ]
        assert bounds == sorted(bounds)
        assert bounds[0] < bounds[-1]


def test_count_bound_constants():
    bound = count_bound(SQRT6, Fraction(1, 3), CountVariant.EXACT_KL)
    assert bound.constants["m"] == 3601

    bound = count_bound(SQRT6, Fraction(2, 3), CountVariant.COROLLARY_FULL)
    assert bound.first_term == pytest.approx(6 * float(mpmath.log(c_hat(SQRT6))))
    assert bound.constants["C1"] > bound.constants["C"]

    bound = count_bound(SQRT6, Fraction(2, 3), CountVariant.REMARK_SINGLE_EXP)
    assert bound.constants["c1"] > bound.constants["c1_printed"]

    with pytest.raises(EpsilonOutOfRangeError):
        count_bound(SQRT6, Fraction(1, 2), CountVariant.THEOREM_HALF)
    with pytest.raises(EpsilonOutOfRangeError):
        count_bound(SQRT6, Fraction(3, 4), CountVariant.COROLLARY_FULL)


def test_corollary_split():
    split = corollary_split(Fraction(1, 2))
    assert split.height_split.log10_int == 1
    assert float(split.height_split.log10) == pytest.approx(float(mpmath.log10(16)))
    assert split.small_pair_bound.log10_int == 3
    expected = float(mpmath.log10(1024))
    assert float(split.small_pair_bound.log10) == pytest.approx(expected)
    assert split.small_pair_bound < split.small_pair_exp_form


def test_enumerate_solutions():
    full = enumerate_solutions(
        SQRT6, 5, Branch.PLUS, Fraction(1, 2), 100, SolutionVariant.FULL
    )
    assert (full[0].a, full[0].b, full[0].defect_valuation) == (1, 1, 1)
    assert [(s.b, s.a) for s in full] == sorted((s.b, s.a) for s in full)
    for solution in full:
        assert solution.b % 5 != 0
        norm = solution.a**2 - 6 * solution.b**2
        assert finite_vp(norm, 5) >= solution.defect_valuation

    half = enumerate_solutions(SQRT6, 5, Branch.PLUS, Fraction(1, 2), 100)
    assert set((s.a, s.b) for s in half) <= set((s.a, s.b) for s in full)

    assert enumerate_solutions(SQRT6, 5, Branch.PLUS, Fraction(1, 2), 0) == []


@pytest.mark.parametrize("variant", list(SolutionVariant))
def test_enumerate_solutions_against_brute_force(variant: SolutionVariant):
    # sqrt(6) and -sqrt(6) differ by a unit, so at most one branch is close to A/B
    # and the norm valuation is the defect.
    epsilon, hmax = Fraction(1, 2), 60
    found = []
    for branch in Branch:
        for record in enumerate_solutions(SQRT6, 5, branch, epsilon, hmax, variant):
            norm = record.a**2 - 6 * record.b**2
            assert record.defect_valuation == finite_vp(norm, 5)
            found.append((record.a, record.b))

    expected = [
        (a, b)
        for b in range(1, hmax + 1)
        if b % 5
        for a in range(-b, b + 1)
        if gcd(a, b) == 1
        and _inequality_holds(finite_vp(a * a - 6 * b * b, 5), b, 5, epsilon, variant)
    ]
    assert len(found) == len(set(found))
    assert set(found) == set(expected)


def test_enumerate_solutions_in_parallel(restore_conf):
    serial = enumerate_solutions(SQRT7, 3, Branch.PLUS, Fraction(1, 2), 300)
    restore_conf.threads = 3
    parallel = enumerate_solutions(SQRT7, 3, Branch.PLUS, Fraction(1, 2), 300)
    assert parallel == serial


def test_solution_record():
    with pytest.raises(pydantic.ValidationError):
        SolutionRecord(
            a=2,
            b=1,
            defect_valuation=3,
            p=5,
            epsilon=Fraction(1, 2),
            variant=SolutionVariant.HALF,
        )
    with pytest.raises(pydantic.ValidationError):
        SolutionRecord(
            a=1,
            b=7,
            defect_valuation=1,
            p=5,
            epsilon=Fraction(1, 2),
            variant=SolutionVariant.HALF,
        )


def test_gap_law_check():
    assert gap_law_check([2, 9], Fraction(1, 2)).holds_on_range

    report = gap_law_check([4, 8], Fraction(1, 2))
    assert report.first_violation == 0
    assert report.criterion == "gap-law"

    report = gap_law_check([1, 3, 40], Fraction(1, 2))
    assert report.extras["excluded_pairs"] == [[1, 3]]
    assert report.holds_on_range

    assert gap_law_check([7], Fraction(1, 2)).holds_on_range

    with pytest.raises(UnsortedInputError):
        gap_law_check([3, 3], Fraction(1, 2))


@pytest.mark.parametrize("epsilon", [Fraction(1, 2), Fraction(2, 3)])
@pytest.mark.parametrize("mp,p", [(SQRT6, 5), (SQRT7, 3)])
def test_gap_law_on_enumerated_solutions(
    mp: MinimalPolynomial, p: int, epsilon: Fraction
):
    solutions = enumerate_solutions(mp, p, Branch.PLUS, epsilon, 10**4)
    assert gap_law_check(solutions, epsilon).holds_on_range
