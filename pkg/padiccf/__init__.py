# flake8: noqa
from padiccf.configurations import CONF, configure
from padiccf.criteria import (
    CriterionReport,
    LedgerEntry,
    QuadraticRelation,
    lemma_a2_check,
    linear_form_ledger,
    subspace_product,
    tail_quadratic,
    theorem_a_margin,
    theorem_b_check,
)
from padiccf.digits import Mode, PadicContext, digits, rational_floor
from padiccf.exceptions import *
from padiccf.expansions import (
    CFExpansion,
    ConvergentPair,
    approx_defect,
    convergents,
    decompose,
    evaluate,
    expand,
    expand_sequence,
    periodic_value,
)
from padiccf.growth import (
    golden_bound_check,
    liouville_constant,
    liouville_scan,
    loglog_statistic,
)
from padiccf.lognumbers import LogNumber
from padiccf.ridout import (
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
    detect_repetitions,
    growth_statistic,
    palindromic_prefixes,
    verify_matrix_symmetry,
)
from padiccf.surds import (
    Branch,
    SurdElement,
    hensel_sqrt,
    padic_floor,
    surd_valuation,
    valuation,
)
from padiccf.valuations import INFINITY, vp

__version__ = "0.1.0"
