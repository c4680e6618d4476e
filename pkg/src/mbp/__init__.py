"""School-choice matching toolkit: mechanisms, mutually-best-pairs
conditions, allocation diagnostics, and a reproducible simulation harness."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .market import (
    OUTSIDE,
    Allocation,
    CardinalMatrices,
    Market,
    MarketFormatError,
    ordinal_from_cardinal,
    read_market,
    restrict_priorities,
    validate_market,
    write_market,
)
from .mechanisms import MECHANISMS, ia, run_mechanism, school_da, student_da, ttc
from .conditions import (
    InputTooLargeError,
    SeqMbpCertificate,
    SimplifiedMarket,
    check_ergin_acyclicity,
    check_gmbp,
    check_mbp_everywhere,
    check_sequential_mbp,
    simplify,
    verify_seq_mbp_certificate,
)
from .analysis import (
    PRIORITY,
    VACANCY,
    BlockingPair,
    blocking_pairs,
    enumerate_envyfree,
    enumerate_ia_nash_outcomes,
    envyfree_unique,
    is_pareto_efficient,
    justified_envy_students,
    pareto_improvable_students,
)
from .simgen import GENERATOR_NAME, CardinalParams, build_market, draw, subseed
from .harness import (
    CellResult,
    ExperimentConfig,
    ImplicationViolationError,
    PRESETS,
    evaluate_market,
    run_cell,
    run_examples,
    run_sweep,
)

__all__ = [
    "__version__",
    "BACKEND",
    "OUTSIDE",
    "Allocation",
    "CardinalMatrices",
    "Market",
    "MarketFormatError",
    "ordinal_from_cardinal",
    "read_market",
    "restrict_priorities",
    "validate_market",
    "write_market",
    "MECHANISMS",
    "ia",
    "run_mechanism",
    "school_da",
    "student_da",
    "ttc",
    "InputTooLargeError",
    "SeqMbpCertificate",
    "SimplifiedMarket",
    "check_ergin_acyclicity",
    "check_gmbp",
    "check_mbp_everywhere",
    "check_sequential_mbp",
    "simplify",
    "verify_seq_mbp_certificate",
    "PRIORITY",
    "VACANCY",
    "BlockingPair",
    "blocking_pairs",
    "enumerate_envyfree",
    "enumerate_ia_nash_outcomes",
    "envyfree_unique",
    "is_pareto_efficient",
    "justified_envy_students",
    "pareto_improvable_students",
    "GENERATOR_NAME",
    "CardinalParams",
    "build_market",
    "draw",
    "subseed",
    "CellResult",
    "ExperimentConfig",
    "ImplicationViolationError",
    "PRESETS",
    "evaluate_market",
    "run_cell",
    "run_examples",
    "run_sweep",
]
