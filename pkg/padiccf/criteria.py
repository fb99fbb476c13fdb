import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from inflection import dasherize, underscore

from padiccf.configurations import CONF
from padiccf.digits import PadicContext
from padiccf.exceptions import (
    EpsilonOutOfRangeError,
    IndexOutOfRangeError,
    NonzeroB0Error,
    NotASquareError,
    NotPalindromicError,
)
from padiccf.expansions import (
    ConvergentPair,
    convergents,
    expand_sequence,
    periodic_value,
    quadratic_roots,
    tail_coefficients,
)
from padiccf.models import PadicModel, Rational, Valuation
from padiccf.structure import (
    PalindromeReport,
    RepetitionBlock,
    growth_statistic,
)
from padiccf.surds import PadicNumber, valuation
from padiccf.utils import log_base, power
from padiccf.valuations import INFINITY, finite_vp

logger = logging.getLogger(__name__)

MAX_SUBSPACE_EPSILON = Fraction(1, 5)


def criterion_id(name: str) -> str:
    """
    >>> criterion_id("LemmaA2")
    'lemma-a2'
    """
    return dasherize(underscore(name))


class LedgerEntry(PadicModel):
    index: int
    holds: bool
    values: Dict[str, Any] = {}


class CriterionReport(PadicModel):
    """
    Per-index verdicts of a check, the first failing index and a summary line.
    """

    criterion: str
    holds_on_range: bool
    first_violation: Optional[int]
    ledger: List[LedgerEntry]
    summary: str
    extras: Dict[str, Any] = {}


def build_report(
    name: str,
    ledger: List[LedgerEntry],
    summary: Optional[str] = None,
    extras: Optional[Dict[str, Any]] = None,
) -> CriterionReport:
    failing = [entry.index for entry in ledger if not entry.holds]
    first_violation = min(failing) if failing else None
    if summary is None:
        if first_violation is None:
            summary = f"holds at all {len(ledger)} checked indices"
        else:
            summary = f"first violation at index {first_violation}"
    return CriterionReport(
        criterion=criterion_id(name),
        holds_on_range=not failing,
        first_violation=first_violation,
        ledger=ledger,
        summary=summary,
        extras=extras or {},
    )


def _require_zero_b0(pairs: Sequence[ConvergentPair]) -> None:
    if not pairs or pairs[0].quotient != 0:
        raise NonzeroB0Error("The criterion needs an expansion [0, b_1, b_2, ...]")


def theorem_a_margin(
    pairs: Sequence[ConvergentPair], p: int, start_index: Optional[int] = None
) -> CriterionReport:
    """
    Check max(|A_i|, |B_i|)^4 < p^i for every i >= i0 with exact rationals.

    The ledger also records whether vp(A_i) > vp(B_i), the p-adic ordering the
    argument relies on.

    :raise NonzeroB0Error: If b_0 is not zero.
    """
    _require_zero_b0(pairs)
    i0 = max(1, CONF.start_index if start_index is None else start_index)
    ledger = []
    for pair in pairs[i0:]:
        size = max(pair.arch_a, pair.arch_b)
        lhs = Fraction(size) ** 4
        ledger.append(
            LedgerEntry(
                index=pair.index,
                holds=lhs < p**pair.index,
                values={
                    "max_size": size,
                    "max_size_pow4": lhs,
                    "exponent": pair.index,
                    "p_adic_order_holds": pair.vp_a > pair.vp_b,
                },
            )
        )
    return build_report("TheoremA", ledger, extras={"start_index": i0})


def lemma_a2_check(
    x: PadicNumber,
    pairs: Sequence[ConvergentPair],
    report: PalindromeReport,
    context: PadicContext,
) -> CriterionReport:
    """
    At each palindromic n >= 2 check vp(x^2 - A_(n-1)/B_n) > vp(b_1) - 2 vp(B_n),
    the valuation form of |x^2 - A_(n-1)/B_n|_p < |b_1|_p / |B_n|_p^2.

    :raise NonzeroB0Error: If b_0 is not zero.
    :raise PrecisionExhaustedError: If a surd cannot be separated from a convergent.
    """
    _require_zero_b0(pairs)
    ledger = []
    if len(pairs) >= 2:
        v_b1 = finite_vp(pairs[1].quotient, context.p)
        square = x * x
        for n in report.lengths:
            if n < 2:
                continue
            if n >= len(pairs):
                break
            target = Fraction(pairs[n - 1].a) / Fraction(pairs[n].b)
            lhs = valuation(square - target, context)
            threshold = v_b1 - 2 * pairs[n].vp_b
            ledger.append(
                LedgerEntry(
                    index=n,
                    holds=lhs > threshold,
                    values={"lhs_valuation": lhs, "threshold": threshold},
                )
            )
    return build_report("LemmaA2", ledger)


class SubspaceProductRecord(PadicModel):
    """
    The factors of the product of the six linear forms at (A_n, B_n, A_(n-1)),
    each as an exponent of p, and the exact comparison of the tilted product with 1.
    """

    index: int
    epsilon: Rational
    holds: bool
    factors: Dict[str, float]
    valuations: Dict[str, Valuation]
    chain_exponent: Rational


def subspace_product(
    x: PadicNumber,
    pairs: Sequence[ConvergentPair],
    n: int,
    context: PadicContext,
    epsilon: Optional[Fraction] = None,
) -> SubspaceProductRecord:
    """
    Evaluate |A_n B_n A_(n-1)| |B_n x - A_n|_p |A_(n-1) - x A_n|_p |B_n|_p
    H_inf^eps H_p^eps < 1 exactly, with H the largest size of the triple at each place.

    With eps = u/w the comparison is raised to the w-th power so that only integers
    and rationals are compared.

    :raise IndexOutOfRangeError: If n has no predecessor or no convergent.
    :raise NotPalindromicError: If A_n differs from B_(n-1).
    :raise EpsilonOutOfRangeError: Unless 0 <= eps < 1/5.
    """
    eps = Fraction(CONF.subspace_epsilon if epsilon is None else epsilon)
    if not 0 <= eps < MAX_SUBSPACE_EPSILON:
        raise EpsilonOutOfRangeError(f"epsilon must lie in [0, 1/5), got {eps}")
    if n < 1 or n >= len(pairs):
        raise IndexOutOfRangeError(f"No convergents for the triple at n = {n}")
    current, previous = pairs[n], pairs[n - 1]
    if current.a != previous.b:
        raise NotPalindromicError(f"A_{n} differs from B_{n - 1}")

    p = context.p
    a_n, b_n, a_prev = (Fraction(v) for v in (current.a, current.b, previous.a))
    v1 = valuation(x * b_n - a_n, context)
    v2 = valuation(a_prev - x * a_n, context)
    v3 = current.vp_b
    arch = abs(a_n * b_n * a_prev)
    h_inf = max(abs(a_n), abs(b_n), abs(a_prev))
    h_p = max(-finite_vp(v, p) for v in (a_n, b_n, a_prev) if v != 0)
    chain = (3 + eps) * n / 4 - (1 - eps) * n

    factors = {"tilt_p": float(eps * h_p), "linear_form_p_3": float(-v3)}
    if arch != 0:
        factors["archimedean"] = log_base(arch, p)
    if h_inf != 0:
        factors["tilt_infinity"] = float(eps) * log_base(h_inf, p)
    if v1 is INFINITY or v2 is INFINITY or arch == 0:
        holds = True
    else:
        factors["linear_form_p_1"] = float(-v1)  # type: ignore
        factors["linear_form_p_2"] = float(-v2)  # type: ignore
        u, w = eps.numerator, eps.denominator
        lhs = arch**w * h_inf**u
        holds = lhs < power(p, w * (v1 + v2 + v3) - u * h_p)  # type: ignore
    factors["total"] = sum(factors.values())
    return SubspaceProductRecord(
        index=n,
        epsilon=eps,
        holds=holds,
        factors=factors,
        valuations={"linear_form_1": v1, "linear_form_2": v2, "b_n": v3},
        chain_exponent=chain,
    )


def linear_form_ledger(
    x: PadicNumber,
    pairs: Sequence[ConvergentPair],
    n: int,
    context: PadicContext,
    epsilon: Optional[Fraction] = None,
) -> Dict[str, float]:
    """
    Each factor of the subspace product at n as a base-p logarithm.
    """
    return subspace_product(x, pairs, n, context, epsilon).factors


def subspace_product_report(
    x: PadicNumber,
    pairs: Sequence[ConvergentPair],
    report: PalindromeReport,
    context: PadicContext,
    epsilon: Optional[Fraction] = None,
) -> CriterionReport:
    """
    The product diagnostic at every palindromic length with a computed convergent.
    """
    ledger = []
    for n in report.lengths:
        if n >= len(pairs):
            break
        record = subspace_product(x, pairs, n, context, epsilon)
        ledger.append(
            LedgerEntry(
                index=n, holds=record.holds, values=record.dict(exclude={"index"})
            )
        )
    return build_report("SubspaceProduct", ledger)


class QuadraticRelation(PadicModel):
    """
    P eta^2 + Q eta + R = 0 for the periodic tail value eta, with its naive height and
    the bound 2 |B_(h+k-1)|_p^2.
    """

    h: int
    k: int
    p_coefficient: Rational
    q_coefficient: Rational
    r_coefficient: Rational
    height: Rational
    height_bound: Rational
    height_holds: bool
    discriminant: Rational
    candidate_roots: Tuple[Any, ...] = ()
    eta: Optional[Any] = None
    residual_is_zero: Optional[bool] = None


def tail_quadratic(
    quotients: Sequence[Fraction],
    h: int,
    k: int,
    context: PadicContext,
    construct_root: bool = True,
) -> QuadraticRelation:
    """
    The quadratic relation of eta = [0, b_1, ..., b_(h-1), (b_h, ..., b_(h+k-1))
    repeated].

    :param quotients: The quotients b_1, b_2, ..., without b_0.
    :param construct_root: Also build eta as an exact element and verify the relation.
    :raise IndexOutOfRangeError: If fewer than h + k - 1 quotients are given.
    """
    if h < 1 or k < 1:
        raise IndexOutOfRangeError("h and k must be positive")
    if len(quotients) < h + k - 1:
        raise IndexOutOfRangeError(
            f"Need quotients up to b_{h + k - 1}, got {len(quotients)}"
        )
    sequence = [Fraction(0), *(Fraction(q) for q in quotients[: h + k - 1])]
    pairs = convergents(expand_sequence(sequence, context))
    p_coef, q_coef, r_coef = tail_coefficients(pairs, h, k)
    height = max(abs(p_coef), abs(q_coef), abs(r_coef))
    bound = 2 * Fraction(context.p) ** (-2 * pairs[h + k - 1].vp_b)

    eta: Optional[PadicNumber] = None
    residual_is_zero = None
    roots: List[PadicNumber] = []
    if construct_root:
        try:
            roots = quadratic_roots(p_coef, q_coef, r_coef, context)
            eta = periodic_value(sequence[1:h], sequence[h:], context)
        except NotASquareError as e:
            logger.warning("Tail value for h=%d, k=%d not constructed: %s", h, k, e)
        else:
            residual_is_zero = not (p_coef * eta * eta + q_coef * eta + r_coef)
    return QuadraticRelation(
        h=h,
        k=k,
        p_coefficient=p_coef,
        q_coefficient=q_coef,
        r_coefficient=r_coef,
        height=height,
        height_bound=bound,
        height_holds=height < bound,
        discriminant=q_coef * q_coef - 4 * p_coef * r_coef,
        candidate_roots=tuple(roots),
        eta=eta,
        residual_is_zero=residual_is_zero,
    )


def theorem_b_check(
    pairs: Sequence[ConvergentPair],
    blocks: Sequence[RepetitionBlock],
    constant: Fraction,
    start_index: Optional[int] = None,
) -> CriterionReport:
    """
    Check |A_i| <= |B_i| for i >= i0 and k < C n for every block with n >= i0, and
    attach the growth statistic of the blocks.
    """
    i0 = CONF.start_index if start_index is None else start_index
    constant = Fraction(constant)
    ledger = [
        LedgerEntry(
            index=pair.index,
            holds=pair.arch_a <= pair.arch_b,
            values={"kind": "size", "arch_a": pair.arch_a, "arch_b": pair.arch_b},
        )
        for pair in pairs
        if pair.index >= i0
    ]
    for block in blocks:
        if block.n >= i0:
            ledger.append(
                LedgerEntry(
                    index=block.n,
                    holds=block.k < constant * block.n,
                    values={"kind": "block", "k": block.k, "lambda": block.repetitions},
                )
            )
    statistic = growth_statistic(blocks)
    extras = {
        "start_index": i0,
        "statistic": list(statistic.values),
        "slope": statistic.slope,
        "not_evaluable": [block.n for block in statistic.not_evaluable],
    }
    summary = None
    if not blocks:
        summary = "no quasi-periodic structure detected"
    report = build_report("TheoremB", ledger, summary, extras)
    if report.first_violation is None and blocks:
        return report.copy(update={"summary": "hypotheses hold on observed range"})
    return report
