import logging
from enum import Enum
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from pydantic import validator
from sympy.ntheory.primetest import is_square

from padiccf.configurations import CONF
from padiccf.digits import PadicContext
from padiccf.exceptions import (
    DivisionByZeroError,
    InvalidSequenceError,
    InvariantViolationError,
    NotASquareError,
    PrecisionExhaustedError,
)
from padiccf.models import PadicModel, Rational, Valuation
from padiccf.surds import (
    Branch,
    PadicNumber,
    SurdElement,
    check_embedding,
    padic_floor,
    valuation,
)
from padiccf.utils import parse_rational
from padiccf.valuations import INFINITY, ExtendedValuation, finite_vp, vp

logger = logging.getLogger(__name__)


class TerminationKind(str, Enum):
    FINITE = "finite"
    PERIODIC = "periodic"
    TRUNCATED = "truncated"
    PRECISION_EXHAUSTED = "precision-exhausted"


class Termination(PadicModel):
    kind: TerminationKind
    preperiod: Optional[int] = None
    period: Optional[int] = None
    max_terms: Optional[int] = None
    index: Optional[int] = None


class CFExpansion(PadicModel):
    """
    Partial quotients b_0, b_1, ... of a p-adic continued fraction.

    For periodic expansions only the quotients up to the first repetition are stored;
    terms() unrolls them.
    """

    context: PadicContext
    partial_quotients: Tuple[Rational, ...]
    termination: Termination
    complete_quotients: Optional[Tuple[Union[Rational, SurdElement], ...]] = None
    generated: bool = True
    precision: Optional[int] = None
    retries: int = 0

    @validator("partial_quotients")
    def quotients_have_negative_valuation(
        cls, quotients: Tuple[Rational, ...], values: dict
    ) -> Tuple[Rational, ...]:
        context = values.get("context")
        if context is None:
            return quotients
        if not quotients:
            raise InvalidSequenceError("An expansion needs at least one quotient")
        for index, quotient in enumerate(quotients[1:], start=1):
            if quotient == 0 or vp(quotient, context.p) >= 0:
                raise InvalidSequenceError(
                    f"Partial quotient b_{index} = {quotient} must have negative "
                    f"{context.p}-adic valuation"
                )
        return quotients

    @property
    def is_periodic(self) -> bool:
        return self.termination.kind == TerminationKind.PERIODIC

    def terms(self, count: Optional[int] = None) -> List[Fraction]:
        """
        The partial quotients, unrolling a periodic expansion to `count` terms.
        """
        quotients = [Fraction(q) for q in self.partial_quotients]
        if not self.is_periodic:
            return quotients if count is None else quotients[:count]
        if count is None:
            return quotients
        preperiod = self.termination.preperiod or 0
        period = quotients[preperiod:]
        result = quotients[:preperiod]
        while len(result) < count:
            result.extend(period)
        return result[:count]


class ConvergentPair(PadicModel):
    """
    The convergent A_i/B_i with cached valuations and Archimedean sizes.
    """

    index: int
    quotient: Rational
    a: Rational
    b: Rational
    vp_a: Valuation
    vp_b: int
    arch_a: Rational
    arch_b: Rational

    @property
    def value(self) -> Fraction:
        return Fraction(self.a) / Fraction(self.b)


class PadicDecomposition(PadicModel):
    """
    A = a_tilde / p^e and B = b_tilde / p^f with p prime to a_tilde * b_tilde.
    """

    a_tilde: int
    e: Optional[int]
    b_tilde: int
    f: int
    zero_numerator: bool = False
    f_ge_e: Optional[bool] = None
    arch_bound: Optional[bool] = None


def _termination(kind: TerminationKind, **kwargs) -> Termination:
    return Termination(kind=kind, **kwargs)


def _run_expansion(
    x: PadicNumber, context: PadicContext, max_terms: int, retries: int
) -> CFExpansion:
    quotients: List[Fraction] = []
    complete: List[PadicNumber] = []
    seen: Dict[PadicNumber, int] = {}
    alpha = x
    index = 0
    while True:
        if alpha in seen:
            start = seen[alpha]
            termination = _termination(
                TerminationKind.PERIODIC, preperiod=start, period=index - start
            )
            break
        if len(quotients) == max_terms:
            termination = _termination(TerminationKind.TRUNCATED, max_terms=max_terms)
            break
        seen[alpha] = index
        try:
            quotient = padic_floor(alpha, context) if alpha else Fraction(0)
        except PrecisionExhaustedError as e:
            if not quotients:
                # Nothing certified yet, so there is no expansion to return.
                raise PrecisionExhaustedError(
                    f"No partial quotient of {x} could be certified",
                    exponent_range=e.exponent_range,
                    index=0,
                    precision=context.precision,
                ) from e
            termination = _termination(
                TerminationKind.PRECISION_EXHAUSTED, index=index
            )
            break
        logger.debug("b_%d = %s", index, quotient)
        quotients.append(quotient)
        complete.append(alpha)
        rest = alpha - quotient
        if not rest:
            termination = _termination(TerminationKind.FINITE)
            break
        alpha = 1 / rest
        index += 1

    return CFExpansion(
        context=context,
        partial_quotients=tuple(quotients),
        termination=termination,
        complete_quotients=tuple(complete),
        generated=True,
        precision=context.precision,
        retries=retries,
    )


def expand(
    x: PadicNumber, context: PadicContext, max_terms: Optional[int] = None
) -> CFExpansion:
    """
    Expand a rational or an embedded surd with b_i = s(alpha_i) and
    alpha_(i+1) = 1/(alpha_i - b_i).

    The expansion stops when a remainder vanishes, when a complete quotient repeats
    exactly, after max_terms quotients, or when the certified square root digits run
    out even after the configured number of retries at doubled precision.

    :param x: The value to expand.
    :param context: The prime, digit mode and optional square root precision.
    :param max_terms: Upper bound on the number of quotients, CONF.max_terms if unset.
    :return: The expansion together with its termination status.
    :raise NotASquareError: If a surd's square root does not lie in Q_p.
    :raise PrecisionExhaustedError: If not even b_0 can be certified after the
    retries.
    """
    max_terms = max_terms or CONF.max_terms
    if isinstance(x, SurdElement) and x.is_rational:
        x = x.a
    if not isinstance(x, SurdElement):
        return _run_expansion(Fraction(x), context, max_terms, retries=0)

    check_embedding(x.d, context)
    precision = context.resolved_precision(max_terms)
    result: Optional[CFExpansion] = None
    error: Optional[PrecisionExhaustedError] = None
    index: Optional[int]
    for attempt in range(CONF.precision_retries + 1):
        try:
            result = _run_expansion(
                x, context.with_precision(precision), max_terms, retries=attempt
            )
        except PrecisionExhaustedError as e:
            result, error = None, e
            index = 0
        else:
            if result.termination.kind != TerminationKind.PRECISION_EXHAUSTED:
                return result
            index = result.termination.index
        logger.warning(
            "Precision of %d digits exhausted at index %s, retrying with %d",
            precision,
            index,
            2 * precision,
        )
        precision *= 2
    if result is None:
        logger.warning("Expansion of %s failed: square root precision exhausted", x)
        raise error  # type: ignore
    logger.warning("Expansion of %s stopped: square root precision exhausted", x)
    return result


def expand_sequence(
    quotients: Sequence[Union[int, Fraction]],
    context: PadicContext,
    *,
    preperiod: Optional[int] = None,
) -> CFExpansion:
    """
    Wrap a given quotient sequence b_0, b_1, ... as an expansion.

    :param preperiod: If given, quotients from this index on repeat forever.
    :raise InvalidSequenceError: If some b_i with i >= 1 has nonnegative valuation.
    """
    if preperiod is None:
        termination = _termination(TerminationKind.FINITE)
    else:
        if not 0 <= preperiod < len(quotients):
            raise InvalidSequenceError("The period must contain at least one quotient")
        termination = _termination(
            TerminationKind.PERIODIC,
            preperiod=preperiod,
            period=len(quotients) - preperiod,
        )
    return CFExpansion(
        context=context,
        partial_quotients=tuple(Fraction(q) for q in quotients),
        termination=termination,
        generated=False,
    )


def _expected_vp_a(
    index: int, quotient_valuations: List[ExtendedValuation], b0_is_zero: bool
) -> Optional[ExtendedValuation]:
    if b0_is_zero:
        if index == 0:
            return INFINITY
        return sum(quotient_valuations[2 : index + 1])  # type: ignore
    if quotient_valuations[0] > 0:
        # A b_0 in pZ_p is never a floor; vp(A_i) follows no closed formula then.
        return None
    return sum(quotient_valuations[: index + 1])  # type: ignore


def convergents(
    expansion: CFExpansion, count: Optional[int] = None
) -> List[ConvergentPair]:
    """
    The convergents A_i/B_i from the recurrences with seeds A_-2 = 0, A_-1 = 1,
    B_-2 = 1, B_-1 = 0.

    Every pair is checked against A_i B_(i-1) - B_i A_(i-1) = (-1)^(i+1), against
    vp(B_i) = sum of vp(b_j) for 1 <= j <= i and against the matching formula for
    vp(A_i). For expansions produced by expand() the Archimedean sizes are bounded by
    the p-adic ones.

    :param count: Number of convergents; periodic expansions are unrolled.
    :raise InvariantViolationError: If one of the identities fails.
    """
    p = expansion.context.p
    terms = expansion.terms(count)
    b0_is_zero = terms[0] == 0
    check_a_side = expansion.generated and vp(terms[0], p) != 0
    quotient_valuations: List[ExtendedValuation] = []

    a_prev2, a_prev1 = Fraction(0), Fraction(1)
    b_prev2, b_prev1 = Fraction(1), Fraction(0)
    vb_sum = 0
    pairs = []
    for i, quotient in enumerate(terms):
        a = quotient * a_prev1 + a_prev2
        b = quotient * b_prev1 + b_prev2
        if a * b_prev1 - b * a_prev1 != (-1) ** (i + 1):
            raise InvariantViolationError(f"Determinant identity fails at index {i}")

        quotient_valuations.append(vp(quotient, p))
        if i >= 1:
            vb_sum += finite_vp(quotient, p)
        vp_a = vp(a, p)
        vp_b = finite_vp(b, p)
        if vp_b != vb_sum:
            raise InvariantViolationError(f"vp(B_{i}) = {vp_b}, expected {vb_sum}")
        expected_vp_a = _expected_vp_a(i, quotient_valuations, b0_is_zero)
        if expected_vp_a is not None and vp_a != expected_vp_a:
            raise InvariantViolationError(
                f"vp(A_{i}) = {vp_a}, expected {expected_vp_a}"
            )

        arch_a, arch_b = abs(a), abs(b)
        if expansion.generated:
            if arch_b > Fraction(p) ** (-vp_b):
                raise InvariantViolationError(f"|B_{i}| exceeds |B_{i}|_p")
            if check_a_side and a != 0 and arch_a > Fraction(p) ** (-vp_a):
                raise InvariantViolationError(f"|A_{i}| exceeds |A_{i}|_p")

        pairs.append(
            ConvergentPair(
                index=i,
                quotient=quotient,
                a=a,
                b=b,
                vp_a=vp_a,
                vp_b=vp_b,
                arch_a=arch_a,
                arch_b=arch_b,
            )
        )
        a_prev2, a_prev1 = a_prev1, a
        b_prev2, b_prev1 = b_prev1, b
    return pairs


def evaluate(quotients: Sequence[Union[int, Fraction]]) -> Fraction:
    """
    The exact value of a finite continued fraction, folded from the right.

    Example:
    >>> evaluate([2, Fraction(-3, 5)])
    Fraction(1, 3)

    :raise DivisionByZeroError: If a tail evaluates to zero; its depth is the index of
    the quotient that starts the vanishing tail.
    """
    if not quotients:
        raise InvalidSequenceError("Cannot evaluate an empty continued fraction")
    value = Fraction(quotients[-1])
    for depth in range(len(quotients) - 2, -1, -1):
        if value == 0:
            raise DivisionByZeroError(
                f"The tail starting at index {depth + 1} is zero", depth=depth + 1
            )
        value = Fraction(quotients[depth]) + 1 / value
    return value


def approx_defect(
    x: PadicNumber, pair: ConvergentPair, context: PadicContext
) -> ExtendedValuation:
    """
    The exact valuation vp(x - A_i/B_i), INFINITY when the convergent equals x.
    """
    return valuation(x - pair.value, context)


def decompose(pair: ConvergentPair, p: int) -> PadicDecomposition:
    """
    Split A = a_tilde/p^e and B = b_tilde/p^f and evaluate the hypotheses f >= e and
    |a_tilde p^(f-e)| <= |b_tilde|.

    :raise InvariantViolationError: If A or B is not in Z[1/p].
    """
    f = -pair.vp_b
    b_tilde = Fraction(pair.b) * Fraction(p) ** f
    if b_tilde.denominator != 1:
        raise InvariantViolationError(f"B_{pair.index} is not in Z[1/{p}]")
    if pair.a == 0:
        return PadicDecomposition(
            a_tilde=0, e=None, b_tilde=b_tilde.numerator, f=f, zero_numerator=True
        )
    e = -int(pair.vp_a)  # type: ignore
    a_tilde = Fraction(pair.a) * Fraction(p) ** e
    if a_tilde.denominator != 1:
        raise InvariantViolationError(f"A_{pair.index} is not in Z[1/{p}]")
    arch_bound = abs(a_tilde) * Fraction(p) ** (f - e) <= abs(b_tilde)
    return PadicDecomposition(
        a_tilde=a_tilde.numerator,
        e=e,
        b_tilde=b_tilde.numerator,
        f=f,
        f_ge_e=f >= e,
        arch_bound=arch_bound,
    )


def check_complete_quotient_identity(
    expansion: CFExpansion, pairs: Sequence[ConvergentPair]
) -> List[bool]:
    """
    Check alpha_0 = (alpha_(i+1) A_i + A_(i-1)) / (alpha_(i+1) B_i + B_(i-1)) for every
    index whose next complete quotient is stored.
    """
    complete = expansion.complete_quotients or ()
    if not complete:
        return []
    alpha = complete[0]
    results = []
    a_prev, b_prev = Fraction(1), Fraction(0)
    for pair in pairs:
        if pair.index + 1 >= len(complete):
            break
        tail = complete[pair.index + 1]
        value = (tail * pair.a + a_prev) / (tail * pair.b + b_prev)
        results.append(value == alpha)
        a_prev, b_prev = Fraction(pair.a), Fraction(pair.b)
    return results


def _seeded(pairs: Sequence[ConvergentPair], index: int) -> Tuple[Fraction, Fraction]:
    if index == -1:
        return Fraction(1), Fraction(0)
    return Fraction(pairs[index].a), Fraction(pairs[index].b)


def tail_coefficients(
    pairs: Sequence[ConvergentPair], h: int, k: int
) -> Tuple[Fraction, Fraction, Fraction]:
    """
    Coefficients of P*eta^2 + Q*eta + R = 0 for
    eta = [0, b_1, ..., b_(h-1), (b_h, ..., b_(h+k-1)) repeated].
    """
    a_h2, b_h2 = _seeded(pairs, h - 2)
    a_h1, b_h1 = _seeded(pairs, h - 1)
    a_t2, b_t2 = _seeded(pairs, h + k - 2)
    a_t1, b_t1 = _seeded(pairs, h + k - 1)
    p_coef = b_h2 * b_t1 - b_h1 * b_t2
    q_coef = b_h1 * a_t2 + a_h1 * b_t2 - a_h2 * b_t1 - b_h2 * a_t1
    r_coef = a_h2 * a_t1 - a_h1 * a_t2
    return p_coef, q_coef, r_coef


def quadratic_roots(
    p_coef: Fraction, q_coef: Fraction, r_coef: Fraction, context: PadicContext
) -> List[PadicNumber]:
    """
    The roots of P*x^2 + Q*x + R in Q_p, exact rationals or conjugate surds.

    :raise NotASquareError: If the discriminant is negative or not a square in Q_p.
    """
    if p_coef == 0:
        return [-r_coef / q_coef]
    disc = q_coef * q_coef - 4 * p_coef * r_coef
    if disc < 0:
        raise NotASquareError("The tail quadratic has a negative discriminant")
    if is_square(disc.numerator) and is_square(disc.denominator):
        root = Fraction(isqrt(disc.numerator), isqrt(disc.denominator))
        return [(-q_coef + root) / (2 * p_coef), (-q_coef - root) / (2 * p_coef)]
    d = disc.numerator * disc.denominator
    check_embedding(d, context)
    scale = 1 / (2 * p_coef * disc.denominator)
    return [
        SurdElement(-q_coef / (2 * p_coef), scale, d, Branch.PLUS),
        SurdElement(-q_coef / (2 * p_coef), -scale, d, Branch.PLUS),
    ]


def periodic_value(
    prefix: Sequence[Union[int, Fraction]],
    period: Sequence[Union[int, Fraction]],
    context: PadicContext,
) -> PadicNumber:
    """
    The exact value of [0, prefix, (period) repeated] in Q_p.

    The value is a root of the tail quadratic; the root the continued fraction
    converges to is the one approximated by a convergent deep enough to separate the
    two roots.

    :param prefix: The quotients b_1, ..., b_(h-1).
    :param period: The repeating quotients b_h, ..., b_(h+k-1).
    :raise NotASquareError: If the tail quadratic has no real root.
    """
    if not period:
        raise InvalidSequenceError("The period must contain at least one quotient")
    h, k = len(prefix) + 1, len(period)
    expansion = expand_sequence([0, *prefix, *period], context, preperiod=h)
    pairs = convergents(expansion)
    roots = quadratic_roots(*tail_coefficients(pairs, h, k), context=context)
    if len(roots) == 1:
        return roots[0]

    gap = valuation(roots[0] - roots[1], context)
    depth = max(h + k - 1, int(gap) // 2 + 1)  # type: ignore
    deep = convergents(expansion, count=depth + 1)[-1]
    threshold = -2 * deep.vp_b
    converging = [
        root for root in roots if valuation(root - deep.value, context) > threshold
    ]
    if len(converging) != 1:
        raise InvariantViolationError(
            "Exactly one root of the tail quadratic must be approximated by the "
            "convergents"
        )
    return converging[0]


def read_sequence_file(path: Union[str, Path]) -> List[Fraction]:
    """
    Read partial quotients b_0, b_1, ... from a UTF-8 file with one rational per line.
    Lines starting with '#' and blank lines are skipped.
    """
    quotients = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            quotients.append(parse_rational(line))
    return quotients
