from fractions import Fraction

import pytest

from padiccf import (
    EpsilonOutOfRangeError,
    IndexOutOfRangeError,
    NonzeroB0Error,
    NotPalindromicError,
    PadicContext,
    SurdElement,
    convergents,
    detect_repetitions,
    expand,
    expand_sequence,
    lemma_a2_check,
    linear_form_ledger,
    palindromic_prefixes,
    periodic_value,
    subspace_product,
    tail_quadratic,
    theorem_a_margin,
    theorem_b_check,
    vp,
)
from padiccf.criteria import (
    LedgerEntry,
    build_report,
    criterion_id,
    subspace_product_report,
)
from padiccf.tests.conftest import browkin_quotient, palindrome

FIFTH = Fraction(1, 5)


@pytest.mark.parametrize(
    "name,expected",
    [
        ("TheoremA", "theorem-a"),
        ("LemmaA2", "lemma-a2"),
        ("SubspaceProduct", "subspace-product"),
        ("GapLaw", "gap-law"),
    ],
)
def test_criterion_id(name: str, expected: str):
    assert criterion_id(name) == expected


def test_build_report():
    ledger = [
        LedgerEntry(index=3, holds=False, values={}),
        LedgerEntry(index=1, holds=True, values={}),
        LedgerEntry(index=2, holds=False, values={}),
    ]
    report = build_report("TheoremA", ledger)
    assert report.criterion == "theorem-a"
    assert not report.holds_on_range
    assert report.first_violation == 2
    assert report.summary == "first violation at index 2"

    report = build_report("TheoremA", ledger[1:2])
    assert report.holds_on_range
    assert report.summary == "holds at all 1 checked indices"


def test_theorem_a_margin(browkin5, alpha):
    pairs = convergents(expand(alpha, browkin5), count=40)
    report = theorem_a_margin(pairs, 5)
    assert report.holds_on_range
    assert report.first_violation is None
    assert [entry.index for entry in report.ledger] == list(range(1, 40))
    assert all(entry.values["p_adic_order_holds"] for entry in report.ledger)

    with pytest.raises(NonzeroB0Error):
        theorem_a_margin(convergents(expand(Fraction(1, 3), browkin5)), 5)


def test_theorem_a_margin_violation(browkin5):
    sequence = [0, Fraction(1001, 5), FIFTH]
    pairs = convergents(expand_sequence(sequence, browkin5))
    report = theorem_a_margin(pairs, 5, start_index=1)
    assert not report.holds_on_range
    assert report.first_violation == 1
    assert report.ledger[0].values["max_size"] == Fraction(1001, 5)
    assert report.summary == "first violation at index 1"


def test_lemma_a2(browkin5, alpha):
    pairs = convergents(expand(alpha, browkin5), count=12)
    report = palindromic_prefixes([pair.quotient for pair in pairs[1:]])
    result = lemma_a2_check(alpha, pairs, report, browkin5)

    assert result.holds_on_range
    first = result.ledger[0]
    assert first.index == 2
    assert first.values == {"lhs_valuation": 4, "threshold": 3}


def test_lemma_a2_on_palindromic_periods(rng):
    checked = 0
    for p in (3, 5, 7):
        context = PadicContext(p=p)
        for length in range(1, 5):
            for _ in range(5):
                period = palindrome(rng, p, length)
                x = periodic_value([], period, context)
                pairs = convergents(
                    expand_sequence([0, *period], context, preperiod=1), count=14
                )
                report = palindromic_prefixes([pair.quotient for pair in pairs[1:]])
                result = lemma_a2_check(x, pairs, report, context)
                assert result.holds_on_range
                checked += 1
    assert checked == 60


def test_subspace_product(browkin5, alpha):
    pairs = convergents(expand(alpha, browkin5), count=8)

    record = subspace_product(alpha, pairs, 2, browkin5, Fraction(1, 10))
    assert record.chain_exponent == Fraction(-1, 4)
    assert record.valuations["b_n"] == -2
    assert "total" in record.factors
    assert linear_form_ledger(alpha, pairs, 2, browkin5, Fraction(1, 10)) == (
        record.factors
    )

    report = palindromic_prefixes([pair.quotient for pair in pairs[1:]])
    result = subspace_product_report(alpha, pairs, report, browkin5)
    assert [entry.index for entry in result.ledger] == list(range(1, 8))

    with pytest.raises(EpsilonOutOfRangeError):
        subspace_product(alpha, pairs, 2, browkin5, FIFTH)
    with pytest.raises(IndexOutOfRangeError):
        subspace_product(alpha, pairs, 8, browkin5)


def test_subspace_product_needs_palindrome(browkin5):
    x = Fraction(1, 3)
    pairs = convergents(expand(x, browkin5))
    with pytest.raises(NotPalindromicError):
        subspace_product(x, pairs, 1, browkin5)


def test_tail_quadratic(browkin5):
    relation = tail_quadratic([FIFTH], 1, 1, browkin5)
    assert relation.p_coefficient == -1
    assert relation.q_coefficient == -FIFTH
    assert relation.r_coefficient == 1
    assert relation.height == 1
    assert relation.height_bound == 50
    assert relation.height_holds
    assert relation.discriminant == Fraction(101, 25)
    assert relation.eta == SurdElement(Fraction(-1, 10), Fraction(1, 50), 2525)
    assert relation.residual_is_zero
    assert len(relation.candidate_roots) == 2

    with pytest.raises(IndexOutOfRangeError):
        tail_quadratic([FIFTH], 1, 2, browkin5)
    with pytest.raises(IndexOutOfRangeError):
        tail_quadratic([FIFTH], 0, 1, browkin5)


def test_tail_quadratic_random_periods(rng):
    for p in (3, 5):
        context = PadicContext(p=p)
        for h in range(1, 4):
            for k in range(1, 4):
                quotients = palindrome(rng, p, h + k - 1)
                relation = tail_quadratic(quotients, h, k, context)
                assert relation.height_holds
                assert relation.residual_is_zero is not False


def test_tail_quadratic_random_sequences(rng):
    for p in (3, 5, 7):
        context = PadicContext(p=p)
        for _ in range(6):
            length = rng.randint(1, 40)
            quotients = [browkin_quotient(rng, p, 2) for _ in range(length)]
            assert all(vp(q, p) in (-1, -2) for q in quotients)
            for _ in range(25):
                h = rng.randint(1, len(quotients))
                k = rng.randint(1, len(quotients) - h + 1)
                relation = tail_quadratic(
                    quotients, h, k, context, construct_root=h + k <= 9
                )
                assert relation.height_holds
                assert relation.residual_is_zero is not False


def test_theorem_b(browkin5):
    sequence = [0, FIFTH, FIFTH, FIFTH]
    pairs = convergents(expand_sequence(sequence, browkin5))
    blocks = detect_repetitions(sequence[1:])

    report = theorem_b_check(pairs, blocks, Fraction(1), start_index=2)
    assert not report.holds_on_range
    assert report.first_violation == 3
    assert report.extras["not_evaluable"] == [1]

    report = theorem_b_check(pairs, blocks, Fraction(1), start_index=4)
    assert report.holds_on_range
    assert report.ledger == []


def test_theorem_b_without_blocks(browkin5):
    pairs = convergents(expand(Fraction(1, 3), browkin5))
    report = theorem_b_check(pairs, [], Fraction(2))
    assert report.summary == "no quasi-periodic structure detected"
