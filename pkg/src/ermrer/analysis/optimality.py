from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidDelta, NoConvergence
from ..measure import DiscreteMeasure, RiskProfile, as_values, check_aligned
from ..type2 import DEFAULT_CONFIG, SolverConfig, solve_type2


def rashomon_probability(
    Q: DiscreteMeasure, L: RiskProfile | np.ndarray, rn, delta: float
) -> float:
    """Mass that the measure with density ``rn`` puts on ``{L <= delta}``."""
    v = as_values(L)
    check_aligned(Q, v)
    p = np.asarray(rn, dtype=float)
    mask = v <= delta
    return math.fsum(Q.weights[mask] * p[mask])


def find_lambda_delta_eps(
    Q: DiscreteMeasure,
    L: RiskProfile | np.ndarray,
    delta: float,
    eps: float,
    shrink: float = 0.5,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> float:
    """Regularization factor whose reverse-KL solution puts more than
    ``1 - eps`` of its mass on the models with risk at most ``delta``.

    Starts at ``lam = 1`` and shrinks geometrically.  On a finite support the
    solution concentrates on the minimizers as ``lam -> 0``, so the loop ends.
    """
    v = as_values(L)
    check_aligned(Q, v)
    lo = float(v.min())
    if not delta > lo:
        raise InvalidDelta(f"delta={delta!r} must exceed the minimum risk {lo!r}")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not 0 < shrink < 1:
        raise ValueError("shrink must lie in (0, 1)")
    lam = 1.0
    while lam > 1e-300:
        sol = solve_type2(Q, v, lam, cfg)
        if rashomon_probability(Q, v, sol.rn_derivative, delta) > 1.0 - eps:
            return lam
        lam *= shrink
    raise NoConvergence("no regularization factor above 1e-300 meets the mass requirement")
