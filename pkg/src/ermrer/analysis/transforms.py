"""Risk transforms that let one regularizer reproduce the other's minimizer.

* ``V``: the log-risk ``log(K̄(lam) + L)``.  The forward-KL problem with risk
  ``V`` and factor one has the reverse-KL solution at ``lam`` as minimizer.
* ``W``: ``lam / p_i - K̄(lam)`` with ``p`` the forward-KL density at ``lam``.
  The reverse-KL problem with risk ``W`` and factor ``lam`` has the forward-KL
  solution as minimizer, with normalization constant ``K̄(lam)`` again.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidRisk
from ..measure import DiscreteMeasure, RiskProfile, as_values, check_aligned
from ..type1 import Type1Solution, solve_type1
from ..type2 import DEFAULT_CONFIG, SolverConfig, Type2Solution, solve_type2

# exp() overflows just past 709; keep headroom for the lam factor
MAX_EXPONENT = 600.0


class TransformKind(enum.Enum):
    V = "V"
    W = "W"


@dataclass(frozen=True, eq=False)
class TransformedRisk:
    values: np.ndarray
    kind: TransformKind
    lam: float


def w_path_exponent(Q: DiscreteMeasure, L: RiskProfile | np.ndarray, lam: float) -> float:
    """Largest exponent ``L_i/lam + K(-1/lam)`` appearing in the W transform."""
    return float(np.max(-solve_type1(Q, L, lam).log_rn))


def transform_risk(
    Q: DiscreteMeasure,
    L: RiskProfile | np.ndarray,
    lam: float,
    kind: TransformKind | str,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> TransformedRisk:
    kind = TransformKind(kind)
    v = as_values(L)
    check_aligned(Q, v)
    sol2 = solve_type2(Q, v, lam, cfg)
    if kind is TransformKind.V:
        out = np.log(sol2.shifted_risk(v))
    else:
        neg_log_p = -solve_type1(Q, v, lam).log_rn
        if neg_log_p.max() > MAX_EXPONENT:
            raise InvalidRisk(
                f"W transform overflows: exponent {neg_log_p.max():.1f} exceeds {MAX_EXPONENT}"
            )
        out = lam * np.exp(neg_log_p) - sol2.beta
    out.setflags(write=False)
    return TransformedRisk(out, kind, float(lam))


def type2_via_type1(
    Q: DiscreteMeasure, L: RiskProfile | np.ndarray, lam: float, cfg: SolverConfig = DEFAULT_CONFIG
) -> Type1Solution:
    """Forward-KL solution at factor one for the log-risk ``V``."""
    V = transform_risk(Q, L, lam, TransformKind.V, cfg)
    return solve_type1(Q, V.values, 1.0)


def type1_via_type2(
    Q: DiscreteMeasure, L: RiskProfile | np.ndarray, lam: float, cfg: SolverConfig = DEFAULT_CONFIG
) -> Type2Solution:
    """Reverse-KL solution at factor ``lam`` for the transformed risk ``W``."""
    W = transform_risk(Q, L, lam, TransformKind.W, cfg)
    return solve_type2(Q, W.values, lam, cfg)
