import logging
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import sympy
from pydantic import root_validator, validator
from sympy.ntheory.primetest import is_square

from padiccf.configurations import CONF
from padiccf.criteria import CriterionReport, LedgerEntry, build_report
from padiccf.digits import PadicContext
from padiccf.exceptions import (
    EpsilonOutOfRangeError,
    PolynomialError,
    UnsortedInputError,
)
from padiccf.lognumbers import LogNumber, decimal_digits
from padiccf.models import PadicModel, Rational
from padiccf.surds import (
    Branch,
    SurdElement,
    check_embedding,
    hensel_sqrt,
    surd_valuation,
)

logger = logging.getLogger(__name__)

THEOREM_MAX_EPSILON = Fraction(1, 3)
COROLLARY_MAX_EPSILON = Fraction(2, 3)
# Exponent cap for the conservative stand-in of delta in the parameter conditions.
DELTA_EXPONENT_CAP = 60
SQRT_SCALE = 10**6
EXTRA_DPS = 40
CONSTANT_DPS = 30


class MinimalPolynomial(PadicModel):
    """
    A monic irreducible integer polynomial, coefficients from the leading 1 down to
    the constant term.
    """

    coefficients: Tuple[int, ...]

    @validator("coefficients")
    def monic_irreducible(cls, coefficients: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(coefficients) < 3:
            raise PolynomialError("The degree must be at least 2")
        if coefficients[0] != 1:
            raise PolynomialError("The polynomial must be monic")
        if len(coefficients) == 3:
            disc = coefficients[1] ** 2 - 4 * coefficients[2]
            if disc >= 0 and is_square(disc):
                raise PolynomialError(f"{coefficients} factors over the rationals")
        else:
            x = sympy.Symbol("x")
            if not sympy.Poly(list(coefficients), x).is_irreducible:
                raise PolynomialError(f"{coefficients} factors over the rationals")
        return coefficients

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def a_bar(self) -> int:
        return max(1, *(abs(c) for c in self.coefficients[1:]))

    @property
    def c_hat_sum(self) -> int:
        return sum(abs(c) for c in self.coefficients)

    @property
    def derivative(self) -> Tuple[int, ...]:
        n = self.degree
        return tuple(c * (n - i) for i, c in enumerate(self.coefficients[:-1]))


def c_hat(mp: MinimalPolynomial) -> float:
    """
    2 + 2 log(2 + A_bar) with the natural logarithm.
    """
    return float(2 + 2 * mpmath.log(2 + mp.a_bar))


def root_of(mp: MinimalPolynomial, branch: Branch = Branch.PLUS) -> SurdElement:
    """
    The root of a quadratic x^2 + a_1 x + a_2 whose square root is taken on `branch`.

    Example:
    >>> root_of(MinimalPolynomial(coefficients=(1, 0, -6)))
    SurdElement(Fraction(0, 1), Fraction(1, 1), 6, branch=+)

    :raise PolynomialError: If the degree is not 2 or the roots are not real.
    """
    if mp.degree != 2:
        raise PolynomialError("Roots are only available for quadratic polynomials")
    _, a1, a2 = mp.coefficients
    if a1 % 2 == 0:
        a, b, d = Fraction(-a1, 2), Fraction(1), a1 * a1 // 4 - a2
    else:
        a, b, d = Fraction(-a1, 2), Fraction(1, 2), a1 * a1 - 4 * a2
    if d < 2:
        raise PolynomialError(f"{mp.coefficients} has no real irrational root")
    return SurdElement(a, b, d, branch)


def _check_epsilon(epsilon: Union[Fraction, int], upper: Fraction) -> Fraction:
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= upper:
        raise EpsilonOutOfRangeError(f"epsilon must lie in (0, {upper}], got {epsilon}")
    return epsilon


def _parameter_m(n: int, epsilon: Fraction) -> int:
    return (100 * n * n * epsilon.denominator**2) // epsilon.numerator**2 + 1


class RidoutParams(PadicModel):
    """
    The parameters m, delta = 10^(-m 2^m), k and l of the quantitative argument.
    """

    n: int
    epsilon: Rational
    m: int
    log10_delta_inv: int
    c_hat: float
    k: LogNumber
    l: LogNumber
    conditions: Tuple[bool, bool, bool]


def _sqrt_upper(m: int) -> Fraction:
    root, _ = sympy.integer_nthroot(m * SQRT_SCALE**2, 2)
    return Fraction(int(root) + 1, SQRT_SCALE)


def _parameter_conditions(
    n: int, epsilon: Fraction, m: int, log10_delta_inv: int
) -> Tuple[bool, bool, bool]:
    # delta_bar >= delta and s_bar >= sqrt(m), so a True verdict also holds exactly.
    delta_bar = Fraction(1, 10 ** min(log10_delta_inv, DELTA_EXPONENT_CAP))
    s_bar = _sqrt_upper(m)
    eta = 1
    first = log10_delta_inv >= DELTA_EXPONENT_CAP or 10**log10_delta_inv > m
    margin = m - 4 * (1 + 3 * delta_bar) * n * s_bar - 2 * eta
    second = margin > 0 and 2 * m * (1 + 5 * delta_bar) < (2 + epsilon) * margin
    third = 2 * eta + 4 * (1 + 3 * delta_bar) * n * s_bar < m
    return first, second, third


def _kl_integers(
    epsilon: Fraction, m: int, log10_delta_inv: int, c_hat_value: float
) -> Tuple[int, int]:
    with mpmath.workdps(decimal_digits(log10_delta_inv) + EXTRA_DPS):
        ln_delta_inv = mpmath.mpf(log10_delta_inv) * mpmath.log(10)
        ln_step = mpmath.log(1 + mpmath.mpf(epsilon.numerator) / epsilon.denominator)
        k_bound = (
            mpmath.log(c_hat_value)
            + mpmath.log(m)
            + 2 * ln_delta_inv
            - mpmath.log(mpmath.log(2))
        ) / ln_step
        l_bound = (mpmath.log(2) + ln_delta_inv) / ln_step
        return int(mpmath.floor(k_bound)) + 3, int(mpmath.floor(l_bound)) + 1


def ridout_params(
    n: int, epsilon: Union[Fraction, int], c_hat_value: Optional[float] = None
) -> RidoutParams:
    """
    Compute m = floor(100 n^2 / eps^2) + 1, log10(1/delta) = m 2^m and the smallest k
    and l with (1 + eps)^(k-2) log 2 > C_hat m / delta^2 and (1 + eps)^l > 2 / delta.

    delta is never materialized: k and l come from the exact integer m 2^m with enough
    working digits to pin down their integer parts.

    Example:
    >>> ridout_params(2, Fraction(1, 3)).m
    3601

    :param n: Degree of the algebraic number.
    :param epsilon: Exponent excess, 0 < eps <= 1/3.
    :param c_hat_value: C_hat of the polynomial, that of A_bar = 1 if unset.
    :raise EpsilonOutOfRangeError: Unless 0 < eps <= 1/3.
    """
    if n < 2:
        raise PolynomialError("The degree must be at least 2")
    epsilon = _check_epsilon(epsilon, THEOREM_MAX_EPSILON)
    if c_hat_value is None:
        c_hat_value = float(2 + 2 * mpmath.log(3))
    m = _parameter_m(n, epsilon)
    log10_delta_inv = m * 2**m
    k, l = _kl_integers(epsilon, m, log10_delta_inv, c_hat_value)
    logger.debug("m = %d, k has about %d digits", m, decimal_digits(k))
    return RidoutParams(
        n=n,
        epsilon=epsilon,
        m=m,
        log10_delta_inv=log10_delta_inv,
        c_hat=c_hat_value,
        k=LogNumber.from_int(k),
        l=LogNumber.from_int(l),
        conditions=_parameter_conditions(n, epsilon, m, log10_delta_inv),
    )


class CountVariant(str, Enum):
    THEOREM_HALF = "theorem-half"
    COROLLARY_FULL = "corollary-full"
    REMARK_SINGLE_EXP = "remark-single-exp"
    EXACT_KL = "exact-kl"


VARIANT_MAX_EPSILON = {
    CountVariant.THEOREM_HALF: THEOREM_MAX_EPSILON,
    CountVariant.EXACT_KL: THEOREM_MAX_EPSILON,
    CountVariant.COROLLARY_FULL: COROLLARY_MAX_EPSILON,
    CountVariant.REMARK_SINGLE_EXP: COROLLARY_MAX_EPSILON,
}


class CountBound(PadicModel):
    """
    An upper bound on the number of solutions with the constants that make it
    concrete. Only exact-kl follows the argument step by step; the other variants
    are audit forms of the closed expressions.
    """

    variant: CountVariant
    epsilon: Rational
    value: LogNumber
    first_term: Optional[float] = None
    constants: Dict[str, Any] = {}


def theorem_constants(n: int, epsilon: Fraction) -> Dict[str, float]:
    """
    The smallest constants making each step of the chain
    k + (m - 1) l <= 2 log(C_hat) / eps + exp(C n^2 / eps^2) hold, C included.
    """
    m = _parameter_m(n, epsilon)
    with mpmath.workdps(CONSTANT_DPS):
        scale = mpmath.mpf(n * n * epsilon.denominator**2) / epsilon.numerator**2
        c1 = 2 + 2 * mpmath.log(10)
        c2 = 2 + 4 * mpmath.log(10)
        c3 = (c2 + (m - 1) * c1) / m
        c4 = mpmath.log(m) / scale
        c5 = max(mpmath.mpf(0), mpmath.log(c3) / scale)
        constant = 2 * c4 + 101 * mpmath.log(2) + 1 + c5
        return {
            "m": m,
            "c1": float(c1),
            "c2": float(c2),
            "c3": float(c3),
            "c4": float(c4),
            "c5": float(c5),
            "C": float(constant),
        }


def corollary_constants(n: int, epsilon: Fraction) -> Dict[str, float]:
    """
    The theorem applied at eps/2 gives c1 = 4 C; small heights contribute
    exp(4 log 4 / eps), and C1 = log 2 + max(c1, c2).
    """
    theorem = theorem_constants(n, epsilon / 2)
    c1 = 4 * theorem["C"]
    c2 = float(4 * mpmath.log(4))
    c3 = max(c1, c2)
    return {
        "C": theorem["C"],
        "c1": c1,
        "c2": c2,
        "c3": c3,
        "C1": float(mpmath.log(2)) + c3,
    }


def count_bound(
    mp: MinimalPolynomial,
    epsilon: Union[Fraction, int],
    variant: CountVariant = CountVariant.EXACT_KL,
) -> CountBound:
    """
    Upper bound on the number of solutions of the Ridout inequality as a LogNumber.

    :param mp: The minimal polynomial of the algebraic number.
    :param epsilon: 0 < eps <= 1/3 for theorem-half and exact-kl, <= 2/3 otherwise.
    :param variant: Which form of the bound to evaluate.
    :raise EpsilonOutOfRangeError: If eps is out of the variant's range.
    """
    variant = CountVariant(variant)
    epsilon = _check_epsilon(epsilon, VARIANT_MAX_EPSILON[variant])
    n = mp.degree
    c_hat_value = c_hat(mp)
    inverse = Fraction(1) / epsilon
    scale = n * n * inverse * inverse

    with mpmath.workdps(CONSTANT_DPS):
        log_c_hat = float(mpmath.log(c_hat_value))
        if variant == CountVariant.EXACT_KL:
            m = _parameter_m(n, epsilon)
            k, l = _kl_integers(epsilon, m, m * 2**m, c_hat_value)
            return CountBound(
                variant=variant,
                epsilon=epsilon,
                value=LogNumber.from_int(k + (m - 1) * l),
                constants={
                    "m": m,
                    "k": LogNumber.from_int(k),
                    "l": LogNumber.from_int(l),
                },
            )
        if variant == CountVariant.THEOREM_HALF:
            constants = theorem_constants(n, epsilon)
            first = float(2 * inverse) * log_c_hat
            value = LogNumber.from_float(first) + LogNumber.from_ln(
                mpmath.mpf(constants["C"])
                * mpmath.mpf(scale.numerator)
                / scale.denominator
            )
            return CountBound(
                variant=variant,
                epsilon=epsilon,
                value=value,
                first_term=first,
                constants=constants,
            )

        constants = corollary_constants(n, epsilon)
        if variant == CountVariant.COROLLARY_FULL:
            first = float(4 * inverse) * log_c_hat
            value = LogNumber.from_float(first) + LogNumber.from_ln(
                mpmath.mpf(constants["C1"])
                * mpmath.mpf(scale.numerator)
                / scale.denominator
            )
            return CountBound(
                variant=variant,
                epsilon=epsilon,
                value=value,
                first_term=first,
                constants=constants,
            )

        # The single exponential needs n^2 (log 2 + c3); the printed recipe
        # n^2 log 2 + c3 is kept next to it for comparison.
        c2 = 4 * log_c_hat
        c3 = max(c2, constants["C1"])
        c1 = n * n * (float(mpmath.log(2)) + c3)
        exponent = mpmath.mpf(c1 * inverse.numerator**2) / inverse.denominator**2
        return CountBound(
            variant=variant,
            epsilon=epsilon,
            value=LogNumber.from_ln(exponent),
            constants={
                "C1": constants["C1"],
                "c1": c1,
                "c1_printed": n * n * float(mpmath.log(2)) + c3,
                "c2": c2,
                "c3": c3,
            },
        )


class CorollarySplit(PadicModel):
    epsilon: Rational
    height_split: LogNumber
    small_pair_bound: LogNumber
    small_pair_exp_form: LogNumber


def corollary_split(epsilon: Union[Fraction, int]) -> CorollarySplit:
    """
    Solutions with |B| < 4^(1/eps) number at most (2 * 4^(1/eps))^2 = 4 * 4^(2/eps),
    itself below exp(4 log 4 / eps).
    """
    epsilon = _check_epsilon(epsilon, COROLLARY_MAX_EPSILON)
    inverse = Fraction(1) / epsilon
    with mpmath.workdps(CONSTANT_DPS):
        log10_four = mpmath.log10(4)
        ratio = mpmath.mpf(inverse.numerator) / inverse.denominator
        return CorollarySplit(
            epsilon=epsilon,
            height_split=LogNumber.from_log10(log10_four * ratio),
            small_pair_bound=LogNumber.from_log10(log10_four * (1 + 2 * ratio)),
            small_pair_exp_form=LogNumber.from_ln(4 * mpmath.log(4) * ratio),
        )


class SolutionVariant(str, Enum):
    HALF = "half"
    FULL = "full"


def _inequality_holds(
    defect_valuation: int,
    b: int,
    p: int,
    epsilon: Fraction,
    variant: SolutionVariant,
) -> bool:
    # |alpha - A/B|_p < 1 / (c |B|^(2+eps)) raised to the w-th power, eps = u/w.
    u, w = epsilon.numerator, epsilon.denominator
    lhs = b ** (2 * w + u)
    if variant == SolutionVariant.HALF:
        lhs *= 2**w
    exponent = defect_valuation * w
    return exponent > 0 and lhs < p**exponent


class SolutionRecord(PadicModel):
    """
    A coprime pair (A, B) with B > 0, |A| <= B and vp(alpha - A/B) = defect_valuation
    large enough for the inequality of `variant`.
    """

    a: int
    b: int
    defect_valuation: int
    p: int
    epsilon: Rational
    variant: SolutionVariant

    @root_validator(skip_on_failure=True)
    def satisfies_inequality(cls, values: dict) -> dict:
        a, b = values["a"], values["b"]
        if b <= 0 or abs(a) > b or gcd(a, b) != 1:
            raise ValueError(f"({a}, {b}) is not a reduced pair with |A| <= B")
        if not _inequality_holds(
            values["defect_valuation"],
            b,
            values["p"],
            Fraction(values["epsilon"]),
            values["variant"],
        ):
            raise ValueError(f"({a}, {b}) does not satisfy the inequality")
        return values


def root_residue(alpha: SurdElement, p: int, digits: int) -> int:
    """
    The integer in [0, p^digits) congruent to the embedded surd, which must be a
    p-adic integer.
    """
    modulus = p**digits
    root = hensel_sqrt(alpha.d, p, digits, alpha.branch)
    value = alpha.a + alpha.b * root
    return value.numerator * pow(value.denominator, -1, modulus) % modulus


def _minimal_valuation(
    b: int, p: int, epsilon: Fraction, variant: SolutionVariant, start: int
) -> int:
    v = max(start, 1)
    while not _inequality_holds(v, b, p, epsilon, variant):
        v += 1
    return v


def _enumerate_range(
    coefficients: Tuple[int, ...],
    p: int,
    branch: Branch,
    epsilon: Fraction,
    variant: SolutionVariant,
    precision: Optional[int],
    first: int,
    last: int,
) -> List[SolutionRecord]:
    mp = MinimalPolynomial(coefficients=coefficients)
    alpha = root_of(mp, branch)
    context = PadicContext(p=p, precision=precision)
    top = _minimal_valuation(last, p, epsilon, variant, 1)
    residue = root_residue(alpha, p, top)
    logger.debug("Enumerating B in [%d, %d] modulo %d^%d", first, last, p, top)

    solutions = []
    v = _minimal_valuation(first, p, epsilon, variant, 1)
    for b in range(first, last + 1):
        if b % p == 0:
            continue
        v = _minimal_valuation(b, p, epsilon, variant, v)
        modulus = p**v
        center = b * residue % modulus
        a = center - ((center + b) // modulus) * modulus
        while a <= b:
            if gcd(a, b) == 1:
                defect = surd_valuation(alpha - Fraction(a, b), context)
                if _inequality_holds(defect, b, p, epsilon, variant):
                    solutions.append(
                        SolutionRecord(
                            a=a,
                            b=b,
                            defect_valuation=defect,
                            p=p,
                            epsilon=epsilon,
                            variant=variant,
                        )
                    )
            a += modulus
    return solutions


def _partitions(hmax: int, parts: int) -> List[Tuple[int, int]]:
    size = -(-hmax // parts)
    return [(lo, min(lo + size - 1, hmax)) for lo in range(1, hmax + 1, size)]


def enumerate_solutions(
    mp: MinimalPolynomial,
    p: int,
    branch: Branch,
    epsilon: Union[Fraction, int],
    hmax: int,
    variant: SolutionVariant = SolutionVariant.HALF,
    precision: Optional[int] = None,
) -> List[SolutionRecord]:
    """
    All coprime (A, B) with 1 <= B <= hmax and |A| <= B satisfying
    |alpha - A/B|_p < 1/(2 B^(2+eps)) (half) or < 1/B^(2+eps) (full).

    For each B prime to p the inequality forces vp(alpha - A/B) >= v for the smallest
    admissible v, so only A = B * alpha modulo p^v need to be tried. Every candidate is
    verified with the exact valuation. With CONF.threads > 1 the B range is split over
    worker processes; results are always ordered by (B, A).

    :raise NotASquareError: If the chosen root does not lie in Q_p.
    """
    branch = Branch(branch)
    variant = SolutionVariant(variant)
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise EpsilonOutOfRangeError(f"epsilon must be positive, got {epsilon}")
    if hmax < 1:
        return []
    alpha = root_of(mp, branch)
    check_embedding(alpha.d, PadicContext(p=p))

    args = (mp.coefficients, p, branch, epsilon, variant, precision)
    threads = min(CONF.threads, hmax)
    if threads <= 1:
        solutions = _enumerate_range(*args, 1, hmax)
    else:
        ranges = _partitions(hmax, threads)
        with ProcessPoolExecutor(max_workers=threads) as executor:
            chunks = executor.map(
                _enumerate_range,
                *zip(*[(*args, lo, hi) for lo, hi in ranges]),
            )
            solutions = [record for chunk in chunks for record in chunk]
    return sorted(solutions, key=lambda record: (record.b, record.a))


def gap_law_check(
    solutions: Sequence[Union[SolutionRecord, int]], epsilon: Union[Fraction, int]
) -> CriterionReport:
    """
    Check B_(i+1) > B_i^(1+eps) for consecutive solutions as B_(i+1)^w > B_i^(w+u).
    Pairs starting at B = 1 are listed in the extras instead of being checked.

    :param solutions: Records or bare denominators, strictly increasing in B.
    :raise UnsortedInputError: If the denominators do not strictly increase.
    """
    epsilon = Fraction(epsilon)
    heights = [s.b if isinstance(s, SolutionRecord) else int(s) for s in solutions]
    if any(b <= a for a, b in zip(heights, heights[1:])):
        raise UnsortedInputError("Solutions must be sorted by strictly increasing B")
    u, w = epsilon.numerator, epsilon.denominator
    ledger = []
    excluded = []
    for index, (low, high) in enumerate(zip(heights, heights[1:])):
        if low < 2:
            excluded.append([low, high])
            continue
        ledger.append(
            LedgerEntry(
                index=index,
                holds=high**w > low ** (w + u),
                values={"b": low, "next_b": high},
            )
        )
    return build_report("GapLaw", ledger, extras={"excluded_pairs": excluded})
