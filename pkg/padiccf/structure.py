import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import root_validator, validator

from padiccf.expansions import ConvergentPair
from padiccf.models import PadicModel

logger = logging.getLogger(__name__)


class PalindromeReport(PadicModel):
    """
    Lengths n for which (b_1, ..., b_n) reads the same in both directions.
    """

    lengths: Tuple[int, ...]

    @validator("lengths")
    def strictly_increasing(cls, lengths: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("palindrome lengths must be strictly increasing")
        return lengths


class RepetitionBlock(PadicModel):
    """
    b_(m+k) = b_m for n <= m <= n + (lambda - 1) k - 1, with 1-based indices.
    """

    n: int
    k: int
    repetitions: int

    @root_validator(skip_on_failure=True)
    def sensible_block(cls, values: dict) -> dict:
        if values["n"] < 1 or values["k"] < 1 or values["repetitions"] < 2:
            raise ValueError("a block needs n >= 1, k >= 1 and at least 2 repetitions")
        return values

    @property
    def end(self) -> int:
        """
        The last 1-based index covered by the repetitions.
        """
        return self.n + self.repetitions * self.k - 1

    def covers(self, other: "RepetitionBlock") -> bool:
        return self.n <= other.n and other.end <= self.end


class GrowthStatistic(PadicModel):
    blocks: Tuple[RepetitionBlock, ...]
    values: Tuple[float, ...]
    not_evaluable: Tuple[RepetitionBlock, ...] = ()
    slope: Optional[float] = None


def palindromic_prefixes(quotients: Sequence[Fraction]) -> PalindromeReport:
    """
    All n <= len(quotients) with a palindromic prefix (b_1, ..., b_n).

    :param quotients: The quotients b_1, b_2, ..., without b_0.
    """
    lengths = [
        n
        for n in range(1, len(quotients) + 1)
        if all(quotients[j] == quotients[n - 1 - j] for j in range(n // 2))
    ]
    return PalindromeReport(lengths=tuple(lengths))


def verify_matrix_symmetry(
    pairs: Sequence[ConvergentPair], report: PalindromeReport
) -> Dict[int, bool]:
    """
    Check A_n = B_(n-1) at every palindromic length with a computed convergent.
    A False entry means the convergents are wrong, not that the input is unusual.
    """
    result = {}
    for n in report.lengths:
        if n >= len(pairs):
            break
        result[n] = pairs[n].a == pairs[n - 1].b
        if not result[n]:
            logger.error("A_%d differs from B_%d on a palindromic prefix", n, n - 1)
    return result


def detect_repetitions(
    quotients: Sequence[Fraction], min_repetitions: int = 2
) -> List[RepetitionBlock]:
    """
    Maximal blocks of a period k repeated at least min_repetitions times.

    A run of indices m with b_(m+k) = b_m spans run + k quotients, which hold
    lambda = run // k + 1 whole repetitions. When the span is not a multiple of k
    the blocks at every offset 0, ..., run % k are maximal, so all of them are
    reported. A block is dropped when an already accepted block with a smaller period
    dividing k covers it.

    :param quotients: The quotients b_1, b_2, ..., without b_0.
    :return: Blocks ordered by (n, k).
    """
    length = len(quotients)
    accepted: List[RepetitionBlock] = []
    for k in range(1, length // 2 + 1):
        m = 0
        while m + k < length:
            if quotients[m + k] != quotients[m]:
                m += 1
                continue
            start = m
            while m + k < length and quotients[m + k] == quotients[m]:
                m += 1
            run = m - start
            repetitions = run // k + 1
            if repetitions < min_repetitions:
                continue
            for offset in range(run % k + 1):
                block = RepetitionBlock(
                    n=start + offset + 1, k=k, repetitions=repetitions
                )
                if any(
                    other.k < k and k % other.k == 0 and other.covers(block)
                    for other in accepted
                ):
                    continue
                accepted.append(block)
    return sorted(accepted, key=lambda block: (block.n, block.k))


def growth_value(n: int, repetitions: float) -> float:
    """
    log(lambda) * sqrt(log n) / n.
    """
    return float(np.log(repetitions) * np.sqrt(np.log(n)) / n)


def trend_slope(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """
    Least-squares slope of ys against xs, None with fewer than two points.
    """
    if len(xs) < 2:
        return None
    slope, _ = np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)
    return float(slope)


def growth_statistic(blocks: Sequence[RepetitionBlock]) -> GrowthStatistic:
    """
    The statistic log(lambda_i) * sqrt(log n_i) / n_i for every block with n_i >= 2.
    Blocks starting at n = 1 are returned separately since log 1 = 0.
    """
    ordered = sorted(blocks, key=lambda block: (block.n, block.k))
    evaluable = [block for block in ordered if block.n >= 2]
    values = [growth_value(block.n, block.repetitions) for block in evaluable]
    return GrowthStatistic(
        blocks=tuple(evaluable),
        values=tuple(values),
        not_evaluable=tuple(block for block in ordered if block.n < 2),
        slope=trend_slope([block.n for block in evaluable], values),
    )
