from .functionals import (
    Direction,
    FunctionalReport,
    expected_log_risk,
    expected_risk,
    functional_report,
    kl,
    kl_between,
    kl_between_log,
    kl_from_log,
    log_risk_values,
    log_sensitivity,
    sensitivity,
)
from .optimality import find_lambda_delta_eps, rashomon_probability
from .quadrature import Example, OracleReport, adaptive_simpson, run_oracle
from .transforms import (
    TransformedRisk,
    TransformKind,
    transform_risk,
    type1_via_type2,
    type2_via_type1,
)

__all__ = [
    "Direction",
    "Example",
    "FunctionalReport",
    "OracleReport",
    "TransformKind",
    "TransformedRisk",
    "adaptive_simpson",
    "expected_log_risk",
    "expected_risk",
    "find_lambda_delta_eps",
    "functional_report",
    "kl",
    "kl_between",
    "kl_between_log",
    "kl_from_log",
    "log_risk_values",
    "log_sensitivity",
    "rashomon_probability",
    "run_oracle",
    "sensitivity",
    "transform_risk",
    "type1_via_type2",
    "type2_via_type1",
]
