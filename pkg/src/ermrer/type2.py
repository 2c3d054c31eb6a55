"""Reverse-KL regularized problem: minimize ``R(P) + lam * KL(Q || P)``.

The minimizer has density ``lam / (beta + L)`` with respect to the reference,
where the scalar ``beta`` is fixed by normalization.  The map ``beta -> lam``
is explicit,

    lam = 1 / sum_i q_i / (beta + L_i),

so ``beta`` is recovered by safeguarded Newton iteration on that inverse.

Internally everything is expressed in the margin ``u = beta + delta_star``
(``delta_star`` the smallest risk on the support) and the risk excesses
``d_i = L_i - delta_star``.  Denominators become ``u + d_i``, which avoids the
cancellation in ``beta + L_i`` when ``beta`` sits just above ``-delta_star``
for tiny ``lam``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BetaOutOfDomain, NoConvergence, NonPositiveLambda
from .measure import DiscreteMeasure, RiskProfile, as_values, check_aligned


@dataclass(frozen=True)
class SolverConfig:
    abs_tol: float = 1e-12
    max_iter: int = 200
    bracket_growth: float = 2.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.max_iter >= 1:
            raise ValueError("max_iter must be a positive integer")
        if not self.bracket_growth > 1:
            raise ValueError("bracket_growth must exceed 1")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True, eq=False)
class Type2Solution:
    lam: float
    beta: float
    margin: float  # beta + delta_star, strictly positive
    delta_star: float
    rn_derivative: np.ndarray  # lam / (margin + excess); exact lam / margin on minimizers
    residual: float
    iterations: int = 0

    @property
    def log_rn(self) -> np.ndarray:
        return np.log(self.rn_derivative)

    def shifted_risk(self, L: RiskProfile | np.ndarray) -> np.ndarray:
        """``beta + L_i`` evaluated without cancellation."""
        return self.margin + (as_values(L) - self.delta_star)


class ASetKind(enum.Enum):
    OPEN_FROM_ZERO = "OpenFromZero"
    CLOSED_FROM_LAMBDA_STAR = "ClosedFromLambdaStar"


@dataclass(frozen=True)
class SolvabilityReport:
    a_set_kind: ASetKind
    lambda_star: float
    c_lower_open: bool
    divergence_integral: float


def _excess(Q: DiscreteMeasure, L) -> tuple[np.ndarray, float]:
    v = as_values(L)
    check_aligned(Q, v)
    lo = float(v.min())
    return v - lo, lo


def _harmonic_terms(q: np.ndarray, d: np.ndarray, u: float) -> tuple[float, float]:
    """Return ``sum q/(u+d)`` and ``sum q/(u+d)**2``."""
    r = 1.0 / (u + d)
    qr = q * r
    return float(qr.sum()), float((qr * r).sum())


def kbar_inverse(Q: DiscreteMeasure, L: RiskProfile | np.ndarray, beta: float) -> float:
    """Regularization factor whose normalization constant is ``beta``."""
    d, lo = _excess(Q, L)
    u = beta + lo
    if not u > 0:
        raise BetaOutOfDomain(f"beta={beta!r} must exceed -delta_star={-lo!r}")
    if not np.any(d > 0):
        return u
    h, _ = _harmonic_terms(Q.weights, d, u)
    return 1.0 / h


def kbar_inverse_derivative(Q: DiscreteMeasure, L: RiskProfile | np.ndarray, beta: float) -> float:
    """Derivative of :func:`kbar_inverse` in ``beta``; never below one."""
    d, lo = _excess(Q, L)
    u = beta + lo
    if not u > 0:
        raise BetaOutOfDomain(f"beta={beta!r} must exceed -delta_star={-lo!r}")
    if not np.any(d > 0):
        return 1.0  # a single denominator: exact equality case
    h, h2 = _harmonic_terms(Q.weights, d, u)
    return h2 / (h * h)


def _solve_margin(
    q: np.ndarray, d: np.ndarray, lam: float, cfg: SolverConfig, delta_star: float = 0.0
) -> tuple[float, float, int]:
    """Find ``u > 0`` with ``1 / sum q/(u+d) == lam``.

    Returns ``(u, residual, iterations)``.  ``d`` must be nonnegative with a
    zero entry.  The map is increasing and concave in ``u`` with slope at
    least one, so Newton from the left endpoint climbs monotonically; the
    bracket only matters when rounding pushes an iterate outside it.
    """
    tol = cfg.abs_tol * lam

    def g(u: float) -> tuple[float, float]:
        h, h2 = _harmonic_terms(q, d, u)
        return 1.0 / h - lam, h2 / (h * h)

    lo = max(1e-300, 1e-12 * (1.0 + abs(delta_star)))
    glo, dlo = g(lo)
    # very small lam can sit below the default left end; shrink until it brackets
    while glo >= 0 and lo > 1e-300:
        if abs(glo) <= tol:
            return lo, abs(glo), 0
        lo = max(lo / 1e3, 1e-300)
        glo, dlo = g(lo)
    hi = max(1.0, 1.0 - delta_star) + delta_star
    ghi, _ = g(hi)
    while ghi < 0:
        lo, glo, dlo = hi, ghi, None
        hi *= cfg.bracket_growth
        ghi, _ = g(hi)
    if glo >= 0:
        raise NoConvergence(f"could not bracket the normalization root for lambda={lam!r}")

    u, gu, du = lo, glo, dlo
    if du is None:
        gu, du = g(u)
    best_u, best_g = u, gu
    for it in range(1, cfg.max_iter + 1):
        step = gu / du
        cand = u - step
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if cand == u:
            break
        u = cand
        gu, du = g(u)
        if abs(gu) < abs(best_g):
            best_u, best_g = u, gu
        if abs(gu) <= tol:
            return u, abs(gu), it
        if gu < 0:
            lo = u
        else:
            hi = u
        if hi - lo <= 4 * math.ulp(hi):
            break
    if abs(best_g) <= tol:
        return best_u, abs(best_g), cfg.max_iter
    raise NoConvergence(
        f"normalization residual {abs(best_g):.3e} above {tol:.3e} for lambda={lam!r}"
    )


def solve_type2(
    Q: DiscreteMeasure,
    L: RiskProfile | np.ndarray,
    lam: float,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> Type2Solution:
    """Minimizer of ``R(P) + lam * KL(Q || P)`` over measures dominating ``Q``."""
    if not lam > 0 or not math.isfinite(lam):
        raise NonPositiveLambda(f"lambda must be positive and finite, got {lam!r}")
    d, lo = _excess(Q, L)
    if not np.any(d > 0):
        # nonseparable: the reference is the solution for every lambda
        rn = np.ones_like(d)
        rn.setflags(write=False)
        return Type2Solution(lam, lam - lo, lam, lo, rn, 0.0, 0)
    u, residual, iters = _solve_margin(Q.weights, d, float(lam), cfg, lo)
    rn = lam / (u + d)
    rn.setflags(write=False)
    return Type2Solution(float(lam), u - lo, u, lo, rn, residual, iters)


def classify_solvability(Q: DiscreteMeasure, L: RiskProfile | np.ndarray) -> SolvabilityReport:
    """Shape of the admissible regularization factors.

    On a finite support the minimizing atoms carry positive mass, so
    ``integral 1/(L - delta_star) dQ`` diverges and every ``lam > 0`` is
    admissible.
    """
    d, _ = _excess(Q, L)
    mass_at_min = float(Q.weights[d == 0].sum())
    if mass_at_min > 0:
        return SolvabilityReport(ASetKind.OPEN_FROM_ZERO, 0.0, True, math.inf)
    # unreachable for stored supports; kept for completeness of the report type
    integral = float((Q.weights / d).sum())
    lam_star = 1.0 / integral
    return SolvabilityReport(ASetKind.CLOSED_FROM_LAMBDA_STAR, lam_star, False, integral)
