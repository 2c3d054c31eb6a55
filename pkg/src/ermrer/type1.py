"""Gibbs posterior of the forward-KL regularized problem.

Minimizes ``R(P) + lam * KL(P || Q)``; the minimizer reweights the reference by
``exp(-L / lam)`` and normalizes with the log-partition function.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveLambda
from .measure import DiscreteMeasure, RiskProfile, as_values, check_aligned


def _logsumexp(a: np.ndarray, log_w: np.ndarray) -> float:
    z = a + log_w
    m = float(z.max())
    return m + float(np.log(np.exp(z - m).sum()))


def log_partition(Q: DiscreteMeasure, L: RiskProfile | np.ndarray, t: float) -> float:
    """``log sum_i q_i exp(t * L_i)`` with max-subtraction."""
    v = as_values(L)
    check_aligned(Q, v)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    return _logsumexp(t * v, np.log(Q.weights))


@dataclass(frozen=True, eq=False)
class Type1Solution:
    lam: float
    log_partition: float
    log_rn: np.ndarray

    @property
    def rn_derivative(self) -> np.ndarray:
        return np.exp(self.log_rn)


def solve_type1(Q: DiscreteMeasure, L: RiskProfile | np.ndarray, lam: float) -> Type1Solution:
    if not lam > 0 or not np.isfinite(lam):
        raise NonPositiveLambda(f"lambda must be positive and finite, got {lam!r}")
    v = as_values(L)
    check_aligned(Q, v)
    if v.max() == v.min():
        # constant risk: the reference itself is optimal
        log_rn = np.zeros_like(v)
        k = -float(v[0]) / lam
    else:
        k = log_partition(Q, v, -1.0 / lam)
        log_rn = -k - v / lam
    log_rn.setflags(write=False)
    return Type1Solution(lam=float(lam), log_partition=k, log_rn=log_rn)
