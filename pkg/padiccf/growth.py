import logging
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

import numpy as np

from padiccf.criteria import CriterionReport, LedgerEntry, build_report
from padiccf.digits import PadicContext
from padiccf.expansions import ConvergentPair, decompose
from padiccf.models import PadicModel, Rational
from padiccf.ridout import MinimalPolynomial, root_of, root_residue
from padiccf.structure import trend_slope
from padiccf.surds import Branch, PadicNumber, SurdElement, surd_valuation
from padiccf.utils import power
from padiccf.valuations import finite_vp

logger = logging.getLogger(__name__)

GROWTH_CSV_COLUMNS = ("k", "vpB", "s_k", "flag_f_ge_e", "flag_arch")
# Digits of the root residue used by the scan before falling back to exact valuations.
SCAN_DIGITS = 24


class LiouvilleConstant(PadicModel):
    """
    c = p^v / c_hat with v = vp(f'(alpha)) and c_hat the sum of the absolute values of
    the coefficients, so that |alpha - a/b|_p >= c / max(|a|, |b|)^n.
    """

    c: Rational
    degree: int
    v_fprime: int
    c_hat_sum: int


def _horner(coefficients: Sequence[int], x: PadicNumber) -> PadicNumber:
    result: PadicNumber = Fraction(0)
    for coefficient in coefficients:
        result = result * x + coefficient
    return result


def liouville_constant(
    mp: MinimalPolynomial,
    p: int,
    branch: Branch = Branch.PLUS,
    precision: Optional[int] = None,
) -> LiouvilleConstant:
    """
    :raise NotASquareError: If the root is not in Q_p.
    :raise PrecisionExhaustedError: If f'(alpha) cannot be separated from zero.
    """
    alpha = root_of(mp, branch)
    context = PadicContext(p=p, precision=precision)
    fprime = _horner(mp.derivative, alpha)
    v = surd_valuation(fprime, context)
    return LiouvilleConstant(
        c=Fraction(p) ** v / mp.c_hat_sum,
        degree=mp.degree,
        v_fprime=v,
        c_hat_sum=mp.c_hat_sum,
    )


def _scan_valuation(
    a: int,
    b: int,
    p: int,
    residue: int,
    alpha: SurdElement,
    context: PadicContext,
) -> int:
    if b % p == 0:
        return -finite_vp(b, p)
    rest = (b * residue - a) % p**SCAN_DIGITS
    if rest % p:
        return 0
    if rest:
        return finite_vp(rest, p)
    return surd_valuation(alpha - Fraction(a, b), context)


def liouville_scan(
    mp: MinimalPolynomial,
    p: int,
    branch: Branch,
    hmax: int,
    precision: Optional[int] = None,
) -> CriterionReport:
    """
    Verify c_hat * max(|a|, |b|)^n >= p^(vp(alpha - a/b) + vp(f'(alpha))) for every
    coprime pair with 1 <= b <= hmax and |a| <= hmax.

    Residues of alpha modulo p^24 settle most valuations; only pairs congruent to
    alpha at that depth go through the exact valuation. The ledger lists violations,
    the extras hold the pair with the smallest slack.
    """
    constant = liouville_constant(mp, p, branch, precision)
    alpha = root_of(mp, branch)
    context = PadicContext(p=p, precision=precision)
    residue = root_residue(alpha, p, SCAN_DIGITS)

    checked = 0
    ledger: List[LedgerEntry] = []
    minimum: Optional[Tuple[Fraction, int, int]] = None
    for b in range(1, hmax + 1):
        for a in range(-hmax, hmax + 1):
            if gcd(a, b) != 1:
                continue
            checked += 1
            v = _scan_valuation(a, b, p, residue, alpha, context)
            lhs = constant.c_hat_sum * max(abs(a), b) ** constant.degree
            slack = lhs / power(p, v + constant.v_fprime)
            if minimum is None or slack < minimum[0]:
                minimum = (slack, a, b)
            if slack < 1:
                ledger.append(
                    LedgerEntry(
                        index=b, holds=False, values={"a": a, "defect_valuation": v}
                    )
                )
    extras = {"c": constant.c, "v_fprime": constant.v_fprime, "checked_pairs": checked}
    if minimum is not None:
        extras["min_slack"] = {"a": minimum[1], "b": minimum[2], "slack": minimum[0]}
    if ledger:
        logger.error("Liouville bound violated by %d pairs", len(ledger))
    summary = f"{checked} coprime pairs checked, {len(ledger)} violations"
    return build_report("LiouvilleScan", ledger, summary, extras)


def golden_bound_check(pairs: Sequence[ConvergentPair], p: int) -> CriterionReport:
    """
    The sufficient integer check -vp(B_n) >= n, from which |B_n|_p >= p^n > phi^(n-1)
    follows for every p >= 3. The ledger also flags indices where vp(B_n) differs
    from the sum of vp(b_j), which would point to wrong convergents.
    """
    ledger = []
    total = 0
    for pair in pairs:
        if pair.index >= 1:
            total += finite_vp(pair.quotient, p)
        margin = -pair.vp_b - pair.index
        accounting = pair.vp_b == total
        ledger.append(
            LedgerEntry(
                index=pair.index,
                holds=margin >= 0 and accounting,
                values={"margin": margin, "accounting_holds": accounting},
            )
        )
    return build_report("GoldenBound", ledger, extras={"phi_bound_implied": p >= 3})


class GrowthEntry(PadicModel):
    k: int
    vp_b: int
    s_k: float
    flag_f_ge_e: Optional[bool]
    flag_arch: Optional[bool]


class GrowthReport(PadicModel):
    """
    s_k = log(-vp(B_k) log p) sqrt(log k) / k per index, natural logarithms.
    """

    entries: Tuple[GrowthEntry, ...]
    maximum: Optional[float] = None
    maximum_index: Optional[int] = None
    slope: Optional[float] = None
    decreasing_from: Optional[int] = None
    log_base: str = "e"

    def rows(self) -> List[Tuple]:
        return [
            (e.k, e.vp_b, e.s_k, e.flag_f_ge_e, e.flag_arch) for e in self.entries
        ]


def _decreasing_from(ks: Sequence[int], values: np.ndarray) -> Optional[int]:
    if len(values) < 2:
        return None
    steps = np.diff(values) < 0
    start = len(values) - 1
    while start > 0 and steps[start - 1]:
        start -= 1
    if start == len(values) - 1:
        return None
    return ks[start]


def loglog_statistic(pairs: Sequence[ConvergentPair], p: int) -> GrowthReport:
    """
    The statistic for every k >= 2 with vp(B_k) < 0, each with the decomposition
    flags f_k >= e_k and |a_tilde p^(f-e)| <= |b_tilde|.
    """
    usable = [pair for pair in pairs if pair.index >= 2 and pair.vp_b < 0]
    if not usable:
        return GrowthReport(entries=())
    ks = np.array([pair.index for pair in usable], dtype=float)
    heights = np.array([-pair.vp_b for pair in usable], dtype=float)
    values = np.log(heights * np.log(p)) * np.sqrt(np.log(ks)) / ks

    entries = []
    for pair, value in zip(usable, values):
        parts = decompose(pair, p)
        entries.append(
            GrowthEntry(
                k=pair.index,
                vp_b=pair.vp_b,
                s_k=float(value),
                flag_f_ge_e=parts.f_ge_e,
                flag_arch=parts.arch_bound,
            )
        )
    top = int(np.argmax(values))
    indices = [pair.index for pair in usable]
    return GrowthReport(
        entries=tuple(entries),
        maximum=float(values[top]),
        maximum_index=indices[top],
        slope=trend_slope(list(ks), list(values)),
        decreasing_from=_decreasing_from(indices, values),
    )

