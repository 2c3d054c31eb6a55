"""Functionals of measures given by their density with respect to the reference.

All functions take the density vector ``rn`` (one entry per atom of ``Q``) so
forward-KL solutions, reverse-KL solutions and arbitrary perturbations share
one code path.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import LengthMismatch, NotNormalized, ZeroDerivativeEntry
from ..measure import DiscreteMeasure, RiskProfile, as_values, check_aligned
from ..type1 import solve_type1
from ..type2 import DEFAULT_CONFIG, SolverConfig, Type2Solution, solve_type2

NORMALIZATION_TOL = 1e-8


class Direction(enum.Enum):
    P_TO_Q = "P_to_Q"  # KL(P || Q)
    Q_TO_P = "Q_to_P"  # KL(Q || P)


def _density(rn, Q: DiscreteMeasure) -> np.ndarray:
    p = np.asarray(rn, dtype=float).reshape(-1)
    if p.shape[0] != Q.size:
        raise LengthMismatch(f"density of length {p.shape[0]} for a support of size {Q.size}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise NotNormalized("density entries must be finite and nonnegative")
    total = float(Q.weights @ p)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"density integrates to {total!r}, not 1")
    return p


def expected_risk(rn, Q: DiscreteMeasure, L: RiskProfile | np.ndarray) -> float:
    p = _density(rn, Q)
    v = as_values(L)
    check_aligned(Q, v)
    return float((Q.weights * p) @ v)


def kl_from_log(log_rn, Q: DiscreteMeasure, direction: Direction) -> float:
    """Relative entropy from a log-density, which stays finite where the
    density itself underflows."""
    lp = np.asarray(log_rn, dtype=float).reshape(-1)
    if lp.shape[0] != Q.size:
        raise LengthMismatch(f"density of length {lp.shape[0]} for a support of size {Q.size}")
    if direction is Direction.Q_TO_P:
        if np.any(np.isneginf(lp)):
            raise ZeroDerivativeEntry("KL(Q||P) is infinite: density vanishes on the support")
        return float(-(Q.weights @ lp))
    p = np.exp(lp)
    mask = p > 0
    return float(Q.weights[mask] @ (p[mask] * lp[mask]))


def kl(rn, Q: DiscreteMeasure, direction: Direction = Direction.P_TO_Q) -> float:
    """``KL(P||Q)`` or ``KL(Q||P)`` for ``P`` given by its density ``rn``."""
    p = np.asarray(rn, dtype=float).reshape(-1)
    if p.shape[0] != Q.size:
        raise LengthMismatch(f"density of length {p.shape[0]} for a support of size {Q.size}")
    if direction is Direction.Q_TO_P and np.any(p == 0):
        raise ZeroDerivativeEntry("KL(Q||P) is infinite: density vanishes on the support")
    with np.errstate(divide="ignore"):
        lp = np.log(p)
    return kl_from_log(lp, Q, direction)


def kl_between(rn_a, rn_b, Q: DiscreteMeasure) -> float:
    """``KL(A || B)`` for two measures dominated by ``Q``."""
    a = np.asarray(rn_a, dtype=float)
    b = np.asarray(rn_b, dtype=float)
    mask = a > 0
    if np.any(b[mask] == 0):
        return math.inf
    return float(Q.weights[mask] @ (a[mask] * (np.log(a[mask]) - np.log(b[mask]))))


def kl_between_log(log_a, log_b, Q: DiscreteMeasure) -> float:
    """``KL(A || B)`` from log-densities, for densities that underflow."""
    la = np.asarray(log_a, dtype=float)
    lb = np.asarray(log_b, dtype=float)
    a = np.exp(la)
    mask = a > 0
    if np.any(np.isneginf(lb[mask])):
        return math.inf
    return float(Q.weights[mask] @ (a[mask] * (la[mask] - lb[mask])))


def _type2(Q, L, lam, solution: Type2Solution | None, cfg: SolverConfig) -> Type2Solution:
    if solution is not None:
        return solution
    return solve_type2(Q, L, lam, cfg)


def log_risk_values(
    Q: DiscreteMeasure,
    L: RiskProfile | np.ndarray,
    lam: float,
    solution: Type2Solution | None = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Log-empirical risk ``log(K̄(lam) + L_i)`` of every atom."""
    sol = _type2(Q, L, lam, solution, cfg)
    return np.log(sol.shifted_risk(L))


def expected_log_risk(
    rn,
    Q: DiscreteMeasure,
    L: RiskProfile | np.ndarray,
    lam: float,
    solution: Type2Solution | None = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> float:
    p = _density(rn, Q)
    v = log_risk_values(Q, L, lam, solution, cfg)
    return float((Q.weights * p) @ v)


def sensitivity(Q: DiscreteMeasure, L: RiskProfile | np.ndarray, lam: float, rn) -> float:
    """Change in expected risk when moving from the forward-KL solution to ``rn``."""
    ref = solve_type1(Q, L, lam).rn_derivative
    return expected_risk(rn, Q, L) - expected_risk(ref, Q, L)


def log_sensitivity(
    Q: DiscreteMeasure,
    L: RiskProfile | np.ndarray,
    lam: float,
    rn,
    solution: Type2Solution | None = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> float:
    """Change in expected log-risk when moving from the reverse-KL solution to ``rn``."""
    sol = _type2(Q, L, lam, solution, cfg)
    return expected_log_risk(rn, Q, L, lam, sol) - expected_log_risk(
        sol.rn_derivative, Q, L, lam, sol
    )


@dataclass(frozen=True)
class FunctionalReport:
    expected_risk: float
    kl_p_q: float
    kl_q_p: float
    jeffreys: float
    expected_log_risk: float


def functional_report(
    rn,
    Q: DiscreteMeasure,
    L: RiskProfile | np.ndarray,
    lam: float,
    solution: Type2Solution | None = None,
) -> FunctionalReport:
    sol = _type2(Q, L, lam, solution, DEFAULT_CONFIG)
    kpq = kl(rn, Q, Direction.P_TO_Q)
    kqp = kl(rn, Q, Direction.Q_TO_P) if np.all(np.asarray(rn) > 0) else math.inf
    return FunctionalReport(
        expected_risk=expected_risk(rn, Q, L),
        kl_p_q=kpq,
        kl_q_p=kqp,
        jeffreys=kpq + kqp,
        expected_log_risk=expected_log_risk(rn, Q, L, lam, sol),
    )
