import argparse
import io
import logging
import sys
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import pydantic
from inflection import dasherize
from pydantic import root_validator, validator
from sympy import isprime

from padiccf.configurations import CONF
from padiccf.criteria import (
    CriterionReport,
    lemma_a2_check,
    subspace_product_report,
    tail_quadratic,
    theorem_a_margin,
    theorem_b_check,
)
from padiccf.digits import Mode, PadicContext
from padiccf.exceptions import (
    InvariantViolationError,
    PadiccfError,
    PrecisionExhaustedError,
    UsageError,
)
from padiccf.expansions import (
    CFExpansion,
    TerminationKind,
    approx_defect,
    convergents,
    decompose,
    evaluate,
    expand,
    expand_sequence,
    read_sequence_file,
)
from padiccf.growth import (
    GROWTH_CSV_COLUMNS,
    golden_bound_check,
    liouville_constant,
    liouville_scan,
    loglog_statistic,
)
from padiccf.models import PadicModel, Rational
from padiccf.reports import Report, dumps, environment_metadata, write_csv
from padiccf.ridout import (
    COROLLARY_MAX_EPSILON,
    THEOREM_MAX_EPSILON,
    CountVariant,
    MinimalPolynomial,
    SolutionVariant,
    c_hat,
    corollary_split,
    count_bound,
    enumerate_solutions,
    gap_law_check,
    ridout_params,
)
from padiccf.structure import (
    PalindromeReport,
    detect_repetitions,
    growth_statistic,
    palindromic_prefixes,
    verify_matrix_symmetry,
)
from padiccf.surds import Branch, PadicNumber, SurdElement
from padiccf.utils import parse_epsilon, parse_minpoly, parse_rational, parse_surd

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT_ERROR = 2
EXIT_PRECISION = 3
EXIT_INTERNAL = 4


class Subcommand(str, Enum):
    EXPAND = "expand"
    CONVERGENTS = "convergents"
    ANALYZE = "analyze"
    CHECK = "check"
    RIDOUT_BOUND = "ridout-bound"
    RIDOUT_ENUMERATE = "ridout-enumerate"
    LIOUVILLE = "liouville"
    GROWTH = "growth"


class Criterion(str, Enum):
    THEOREM_A = "theorem-a"
    LEMMA_A2 = "lemma-a2"
    SUBSPACE_PRODUCT = "subspace-product"
    TAIL_QUADRATIC = "tail-quadratic"
    THEOREM_B = "theorem-b"
    GOLDEN_BOUND = "golden-bound"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


NUMBER_INPUTS = ("value", "surd", "sequence")
POLYNOMIAL_COMMANDS = (
    Subcommand.RIDOUT_BOUND,
    Subcommand.RIDOUT_ENUMERATE,
    Subcommand.LIOUVILLE,
)


class CommandConfig(PadicModel):
    """
    A validated command line: one subcommand, exactly one input and its knobs.
    """

    subcommand: Subcommand
    p: Optional[int] = None
    mode: Mode = Mode.BROWKIN
    value: Optional[Rational] = None
    surd: Optional[SurdElement] = None
    sequence: Optional[str] = None
    minpoly: Optional[Tuple[int, ...]] = None
    branch: Branch = Branch.PLUS
    epsilon: Optional[Rational] = None
    hmax: Optional[int] = None
    max_terms: Optional[int] = None
    precision: Optional[int] = None
    count: Optional[int] = None
    variant: Optional[str] = None
    criterion: Optional[Criterion] = None
    h: Optional[int] = None
    k: Optional[int] = None
    constant: Optional[Rational] = None
    start_index: Optional[int] = None
    indices: Optional[Tuple[int, ...]] = None
    format: OutputFormat = OutputFormat.JSON
    output: Optional[str] = None
    verbose: int = 0
    metadata: bool = False

    @validator("p")
    def p_must_be_odd_prime(cls, p: Optional[int]) -> Optional[int]:
        if p is not None and (p == 2 or not isprime(p)):
            raise UsageError("p must be an odd prime")
        return p

    @root_validator(skip_on_failure=True)
    def one_input(cls, values: dict) -> dict:
        command = values["subcommand"]
        if command in POLYNOMIAL_COMMANDS:
            if values.get("minpoly") is None:
                raise UsageError(f"{command.value} needs --minpoly")
            given = [name for name in NUMBER_INPUTS if values.get(name) is not None]
            if given:
                raise UsageError(f"{command.value} does not accept --{given[0]}")
        else:
            given = [name for name in NUMBER_INPUTS if values.get(name) is not None]
            if len(given) != 1:
                raise UsageError(
                    "Exactly one of --value, --surd, --sequence is required"
                )
            if values.get("minpoly") is not None:
                raise UsageError(f"{command.value} does not accept --minpoly")
        if command != Subcommand.RIDOUT_BOUND and values.get("p") is None:
            raise UsageError(f"{command.value} needs --p")
        if command == Subcommand.CHECK and values.get("criterion") is None:
            raise UsageError("check needs --criterion")
        if command in (Subcommand.RIDOUT_BOUND, Subcommand.RIDOUT_ENUMERATE):
            if values.get("epsilon") is None:
                raise UsageError(f"{command.value} needs --epsilon")
        if command in (Subcommand.RIDOUT_ENUMERATE, Subcommand.LIOUVILLE):
            if values.get("hmax") is None:
                raise UsageError(f"{command.value} needs --hmax")
        return values

    @property
    def context(self) -> PadicContext:
        return PadicContext(p=self.p, mode=self.mode, precision=self.precision)

    def echo(self) -> Dict[str, Any]:
        return self.dict(
            exclude={"format", "output", "verbose", "metadata"}, exclude_none=True
        )


class CommandOutcome(PadicModel):
    results: Any
    exit_code: int = EXIT_OK
    warnings: List[str] = []
    csv_header: Tuple[str, ...] = ()
    csv_rows: List[Tuple[Any, ...]] = []
    text: Optional[str] = None


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _argument_type(parse: Callable[[str], Any]) -> Callable[[str], Any]:
    def convert(text: str) -> Any:
        try:
            return parse(text)
        except PadiccfError as e:
            raise argparse.ArgumentTypeError(str(e))

    convert.__name__ = parse.__name__
    return convert


def _indices(text: str) -> Tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="padiccf",
        description="Exact p-adic continued fractions and transcendence criteria",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for command in Subcommand:
        sub = subparsers.add_parser(command.value)
        sub.add_argument("--p", type=int)
        sub.add_argument("--mode", choices=[m.value for m in Mode], default="browkin")
        sub.add_argument("--value", type=_argument_type(parse_rational))
        sub.add_argument("--surd", type=_argument_type(parse_surd))
        sub.add_argument("--branch", choices=[b.value for b in Branch], default="+")
        sub.add_argument("--sequence")
        sub.add_argument("--minpoly", type=_argument_type(parse_minpoly))
        sub.add_argument("--epsilon", type=_argument_type(parse_epsilon))
        sub.add_argument("--hmax", type=int)
        sub.add_argument("--max-terms", type=int)
        sub.add_argument("--precision", type=int)
        sub.add_argument("--count", type=int)
        sub.add_argument(
            "--variant",
            choices=[v.value for v in (*CountVariant, *SolutionVariant)],
        )
        sub.add_argument(
            "--format", choices=[f.value for f in OutputFormat], default="json"
        )
        sub.add_argument("--output")
        sub.add_argument("--verbose", "-v", action="count", default=0)
        sub.add_argument("--metadata", action="store_true")
        if command == Subcommand.CHECK:
            sub.add_argument("--criterion", choices=[c.value for c in Criterion])
            sub.add_argument("--h", type=int)
            sub.add_argument("--k", type=int)
            sub.add_argument(
                "--C", dest="constant", type=_argument_type(parse_rational)
            )
            sub.add_argument("--i0", dest="start_index", type=int)
            sub.add_argument("--indices", type=_indices)
    return parser


def parse_args(argv: Sequence[str]) -> CommandConfig:
    """
    Parse and validate a command line.

    :raise UsageError: Naming the offending flag.
    """
    namespace = vars(build_parser().parse_args(list(argv)))
    surd = namespace.pop("surd")
    if surd is not None:
        try:
            namespace["surd"] = SurdElement(*surd, branch=namespace["branch"])
        except PadiccfError as e:
            raise UsageError(f"argument --surd: {e}") from e
    try:
        return CommandConfig(**namespace)
    except pydantic.ValidationError as e:
        raise UsageError(str(e)) from e


HANDLERS: Dict[str, Callable[[CommandConfig], CommandOutcome]] = {}


def handler(func: Callable[[CommandConfig], CommandOutcome]):
    HANDLERS[dasherize(func.__name__[len("run_") :])] = func
    return func


def _number(config: CommandConfig) -> Optional[PadicNumber]:
    if config.value is not None:
        return Fraction(config.value)
    if config.surd is not None:
        return config.surd
    return None


def _expansion(config: CommandConfig) -> CFExpansion:
    context = config.context
    if config.sequence is not None:
        quotients = read_sequence_file(Path(config.sequence))
        return expand_sequence(quotients, context)
    expansion = expand(_number(config), context, config.max_terms)  # type: ignore
    logger.info(
        "Expansion finished: %d quotients, %s",
        len(expansion.partial_quotients),
        expansion.termination.kind.value,
    )
    return expansion


def _target(config: CommandConfig, expansion: CFExpansion) -> PadicNumber:
    number = _number(config)
    if number is not None:
        return number
    return evaluate(expansion.partial_quotients)


def _expansion_warnings(expansion: CFExpansion) -> List[str]:
    warnings = []
    if expansion.retries:
        warnings.append(
            f"square root precision was doubled {expansion.retries} time(s)"
        )
    if expansion.termination.kind == TerminationKind.PRECISION_EXHAUSTED:
        warnings.append(
            f"precision exhausted at index {expansion.termination.index}"
        )
    return warnings


def _pairs(config: CommandConfig, expansion: CFExpansion):
    count = config.count
    if count is None and expansion.is_periodic:
        count = config.max_terms or CONF.max_terms
    return convergents(expansion, count)


def _report_exit(report: CriterionReport) -> int:
    return EXIT_OK if report.holds_on_range else EXIT_VIOLATION


def _expansion_exit(expansion: CFExpansion, exit_code: int) -> int:
    """
    EXIT_PRECISION for an expansion cut short by the square root precision,
    exit_code otherwise.
    """
    if expansion.termination.kind == TerminationKind.PRECISION_EXHAUSTED:
        return EXIT_PRECISION
    return exit_code


@handler
def run_expand(config: CommandConfig) -> CommandOutcome:
    expansion = _expansion(config)
    termination = expansion.termination
    results = {
        "quotients": expansion.partial_quotients,
        "termination": termination.kind,
        "preperiod": termination.preperiod,
        "period": termination.period,
        "precision": expansion.precision,
        "retries": expansion.retries,
    }
    quotients = ", ".join(str(Fraction(q)) for q in expansion.partial_quotients)
    return CommandOutcome(
        results=results,
        exit_code=_expansion_exit(expansion, EXIT_OK),
        warnings=_expansion_warnings(expansion),
        csv_header=("index", "quotient"),
        csv_rows=list(enumerate(expansion.partial_quotients)),
        text=f"[{quotients}] ({termination.kind.value})",
    )


@handler
def run_convergents(config: CommandConfig) -> CommandOutcome:
    expansion = _expansion(config)
    pairs = _pairs(config, expansion)
    target = _target(config, expansion)
    context = config.context
    rows = []
    for pair in pairs:
        defect = approx_defect(target, pair, context)
        rows.append(
            {
                "index": pair.index,
                "quotient": pair.quotient,
                "a": pair.a,
                "b": pair.b,
                "vp_a": pair.vp_a,
                "vp_b": pair.vp_b,
                "defect_valuation": defect,
            }
        )
    columns = ("index", "quotient", "a", "b", "vp_a", "vp_b", "defect_valuation")
    return CommandOutcome(
        results={"convergents": rows, "termination": expansion.termination.kind},
        exit_code=_expansion_exit(expansion, EXIT_OK),
        warnings=_expansion_warnings(expansion),
        csv_header=columns,
        csv_rows=[tuple(row[column] for column in columns) for row in rows],
    )


@handler
def run_analyze(config: CommandConfig) -> CommandOutcome:
    expansion = _expansion(config)
    pairs = _pairs(config, expansion)
    tail = [pair.quotient for pair in pairs[1:]]
    palindromes = palindromic_prefixes(tail)
    symmetry = verify_matrix_symmetry(pairs, palindromes)
    if not all(symmetry.values()):
        raise InvariantViolationError(
            "A_n differs from B_(n-1) on a palindromic prefix"
        )
    blocks = detect_repetitions(tail)
    statistic = growth_statistic(blocks)
    golden = golden_bound_check(pairs, config.p)  # type: ignore
    results = {
        "termination": expansion.termination.kind,
        "palindromic_lengths": palindromes.lengths,
        "repetitions": blocks,
        "statistic": statistic,
        "decompositions": [decompose(pair, config.p) for pair in pairs],  # type: ignore
        "golden_bound": golden,
    }
    return CommandOutcome(
        results=results,
        exit_code=_expansion_exit(expansion, _report_exit(golden)),
        warnings=_expansion_warnings(expansion),
        csv_header=("n", "k", "repetitions"),
        csv_rows=[(block.n, block.k, block.repetitions) for block in blocks],
    )


def _palindromes(config: CommandConfig, tail: Sequence[Fraction]) -> PalindromeReport:
    if config.indices:
        return PalindromeReport(lengths=tuple(sorted(set(config.indices))))
    return palindromic_prefixes(tail)


@handler
def run_check(config: CommandConfig) -> CommandOutcome:
    expansion = _expansion(config)
    pairs = _pairs(config, expansion)
    context = config.context
    tail = [Fraction(pair.quotient) for pair in pairs[1:]]
    criterion = config.criterion

    if criterion == Criterion.TAIL_QUADRATIC:
        if config.h is None or config.k is None:
            raise UsageError("tail-quadratic needs --h and --k")
        relation = tail_quadratic(tail, config.h, config.k, context)
        holds = relation.height_holds and relation.residual_is_zero is not False
        return CommandOutcome(
            results=relation,
            exit_code=_expansion_exit(
                expansion, EXIT_OK if holds else EXIT_VIOLATION
            ),
            warnings=_expansion_warnings(expansion),
        )

    if criterion == Criterion.THEOREM_A:
        report = theorem_a_margin(pairs, config.p, config.start_index)  # type: ignore
    elif criterion == Criterion.LEMMA_A2:
        target = _target(config, expansion)
        report = lemma_a2_check(target, pairs, _palindromes(config, tail), context)
    elif criterion == Criterion.SUBSPACE_PRODUCT:
        target = _target(config, expansion)
        report = subspace_product_report(
            target, pairs, _palindromes(config, tail), context, config.epsilon
        )
    elif criterion == Criterion.THEOREM_B:
        if config.constant is None:
            raise UsageError("theorem-b needs --C")
        blocks = detect_repetitions(tail)
        report = theorem_b_check(pairs, blocks, config.constant, config.start_index)
    else:
        report = golden_bound_check(pairs, config.p)  # type: ignore
    return CommandOutcome(
        results=report,
        exit_code=_expansion_exit(expansion, _report_exit(report)),
        warnings=_expansion_warnings(expansion),
        csv_header=("index", "holds"),
        csv_rows=[(entry.index, entry.holds) for entry in report.ledger],
        text=report.summary,
    )


def _polynomial(config: CommandConfig) -> MinimalPolynomial:
    return MinimalPolynomial(coefficients=config.minpoly)


@handler
def run_ridout_bound(config: CommandConfig) -> CommandOutcome:
    mp = _polynomial(config)
    epsilon = Fraction(config.epsilon)  # type: ignore
    variant = CountVariant(config.variant or CountVariant.EXACT_KL)
    params = None
    if epsilon <= THEOREM_MAX_EPSILON:
        params = ridout_params(mp.degree, epsilon, c_hat(mp))
    split = corollary_split(epsilon) if epsilon <= COROLLARY_MAX_EPSILON else None
    bound = count_bound(mp, epsilon, variant)
    conditions_hold = params is None or all(params.conditions)
    return CommandOutcome(
        results={
            "c_hat": c_hat(mp),
            "params": params,
            "bound": bound,
            "corollary_split": split,
        },
        exit_code=EXIT_OK if conditions_hold else EXIT_VIOLATION,
        text=f"{variant.value}: {bound.value}",
    )


@handler
def run_ridout_enumerate(config: CommandConfig) -> CommandOutcome:
    mp = _polynomial(config)
    variant = SolutionVariant(config.variant or SolutionVariant.HALF)
    solutions = enumerate_solutions(
        mp,
        config.p,  # type: ignore
        config.branch,
        config.epsilon,  # type: ignore
        config.hmax,  # type: ignore
        variant,
        config.precision,
    )
    gap_law = None
    exit_code = EXIT_OK
    if variant == SolutionVariant.HALF:
        gap_law = gap_law_check(solutions, config.epsilon)  # type: ignore
        exit_code = _report_exit(gap_law)
    return CommandOutcome(
        results={"solutions": solutions, "count": len(solutions), "gap_law": gap_law},
        exit_code=exit_code,
        csv_header=("a", "b", "defect_valuation"),
        csv_rows=[(s.a, s.b, s.defect_valuation) for s in solutions],
    )


@handler
def run_liouville(config: CommandConfig) -> CommandOutcome:
    mp = _polynomial(config)
    constant = liouville_constant(
        mp, config.p, config.branch, config.precision  # type: ignore
    )
    report = liouville_scan(
        mp, config.p, config.branch, config.hmax, config.precision  # type: ignore
    )
    return CommandOutcome(
        results={"constant": constant, "scan": report},
        exit_code=_report_exit(report),
        text=report.summary,
    )


@handler
def run_growth(config: CommandConfig) -> CommandOutcome:
    expansion = _expansion(config)
    pairs = _pairs(config, expansion)
    report = loglog_statistic(pairs, config.p)  # type: ignore
    return CommandOutcome(
        results=report,
        exit_code=_expansion_exit(expansion, EXIT_OK),
        warnings=_expansion_warnings(expansion),
        csv_header=GROWTH_CSV_COLUMNS,
        csv_rows=report.rows(),
    )


def _render(config: CommandConfig, outcome: CommandOutcome) -> str:
    if config.format == OutputFormat.CSV:
        if not outcome.csv_header:
            raise UsageError(
                f"csv output is not available for {config.subcommand.value}"
            )
        stream = io.StringIO()
        write_csv(stream, outcome.csv_header, outcome.csv_rows)
        return stream.getvalue()
    if config.format == OutputFormat.TEXT and outcome.text is not None:
        return outcome.text + "\n"
    report = Report(
        command=config.echo(),
        results=outcome.results,
        warnings=outcome.warnings,
        metadata=environment_metadata() if config.metadata else None,
    )
    return dumps(report)


def _emit(config: CommandConfig, payload: str) -> None:
    if config.output:
        Path(config.output).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def run(config: CommandConfig) -> int:
    """
    Execute a command and write its report.

    :return: 0 when output was produced and every check passed, 1 when a check
    reported violations, 2 for input errors, 3 when square root precision ran out
    after the retry and 4 when an internal identity failed.
    """
    try:
        outcome = HANDLERS[config.subcommand.value](config)
        _emit(config, _render(config, outcome))
        return outcome.exit_code
    except PrecisionExhaustedError as e:
        logger.error("Precision exhausted: %s", e)
        return EXIT_PRECISION
    except InvariantViolationError as e:
        logger.error("Internal identity failed: %s", e)
        return EXIT_INTERNAL
    except PadiccfError as e:
        logger.error("%s", e)
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error("%s", e)
        return EXIT_INPUT_ERROR


def configure_logging(verbose: int) -> None:
    level = max(logging.DEBUG, logging.WARNING - 10 * verbose)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as e:
        sys.stderr.write(f"padiccf: {e}\n")
        return EXIT_INPUT_ERROR
    configure_logging(config.verbose)
    return run(config)
