"""Relative-entropy regularized empirical risk minimization over finite model sets."""
from .errors import ErmRerError
from .measure import (
    DiscreteMeasure,
    RiskProfile,
    RiskSummary,
    build_measure,
    load_fixture,
    rashomon_mass,
    risk_summary,
)
from .type1 import Type1Solution, log_partition, solve_type1
from .type2 import (
    ASetKind,
    SolvabilityReport,
    SolverConfig,
    Type2Solution,
    classify_solvability,
    kbar_inverse,
    kbar_inverse_derivative,
    solve_type2,
)

__all__ = [
    "ASetKind",
    "DiscreteMeasure",
    "ErmRerError",
    "RiskProfile",
    "RiskSummary",
    "SolvabilityReport",
    "SolverConfig",
    "Type1Solution",
    "Type2Solution",
    "build_measure",
    "classify_solvability",
    "kbar_inverse",
    "kbar_inverse_derivative",
    "load_fixture",
    "log_partition",
    "rashomon_mass",
    "risk_summary",
    "solve_type1",
    "solve_type2",
]
