"""Deterministic quadrature checks on continuous reference measures.

The continuous cases use the Gamma-type density ``4 t^2 exp(-2 t)`` on
``[0, inf)``, truncated to ``[0, 40]`` where the neglected tail is below
``1e-30``.  The discrete two-atom case has a closed-form normalization
constant and is checked against the finite-support solver.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..measure import build_measure
from ..type2 import DEFAULT_CONFIG, SolverConfig, solve_type2

UPPER = 40.0
DIVERGENCE_THRESHOLD = 1e6


class Example(enum.Enum):
    Ex1 = "Ex1"
    Ex2 = "Ex2"
    Ex3 = "Ex3"


@dataclass(frozen=True)
class OracleReport:
    example: Example
    passed: bool
    values: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        status = "PASS" if self.passed else "FAIL"
        parts = " ".join(f"{k}={_fmt(v)}" for k, v in self.values.items())
        return [f"{self.example.value} {status} {parts}".rstrip()]


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)


def _safe(f: Callable[[float], float], a: float, b: float) -> Callable[[float], float]:
    # integrable endpoint singularities (0/0 forms) are sampled just inside
    nudge = 1e-12 * (b - a)

    def g(x: float) -> float:
        try:
            y = f(x)
        except ZeroDivisionError:
            y = math.nan
        if math.isfinite(y):
            return y
        x2 = x + nudge if x <= a else x - nudge
        return f(x2)

    return g


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-8,
    rel_tol: float = 0.0,
    max_depth: int = 60,
) -> float:
    """Adaptive Simpson rule with a per-panel tolerance.

    A panel is accepted when the two half-panel estimates agree with the whole
    panel to ``15 * max(tol, rel_tol * |estimate|)``; the accepted value carries
    the Richardson correction.
    """
    if b <= a:
        return 0.0
    g = _safe(f, a, b)
    fa, fm, fb = g(a), g(0.5 * (a + b)), g(b)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    total = []
    stack = [(a, b, fa, fm, fb, whole, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = g(lm), g(rm)
        left = (mid - lo) / 6.0 * (flo + 4 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4 * frm + fhi)
        both = left + right
        err = both - est
        if depth >= max_depth or abs(err) <= 15.0 * max(tol, rel_tol * abs(both)):
            total.append(both + err / 15.0)
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
    return math.fsum(total)


def reference_density(t: float) -> float:
    return 4.0 * t * t * math.exp(-2.0 * t)


def continuous_kbar_inverse(
    risk: Callable[[float], float], beta: float, tol: float = 1e-10, rel_tol: float = 1e-12
) -> float:
    """``1 / integral q(t) / (beta + L(t)) dt`` over the truncated support."""
    integral = adaptive_simpson(
        lambda t: reference_density(t) / (beta + risk(t)), 0.0, UPPER, tol, rel_tol
    )
    return 1.0 / integral


def bisect_increasing(
    g: Callable[[float], float], lo: float, hi: float, width: float = 1e-9
) -> float:
    """Root of an increasing function on ``[lo, hi]``; returns the midpoint."""
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def example1() -> OracleReport:
    """Quadratic risk: the singular integral converges, so the smallest
    admissible factor is positive and attained at ``beta = 0``."""
    risk = lambda t: t * t  # noqa: E731
    integral = adaptive_simpson(lambda t: reference_density(t) / risk(t), 0.0, UPPER, 1e-8)
    lam_star = 1.0 / integral
    kbar_half = bisect_increasing(lambda b: continuous_kbar_inverse(risk, b) - 0.5, 0.0, 1.0)
    passed = abs(integral - 2.0) <= 1e-4 and abs(kbar_half) <= 1e-6
    return OracleReport(
        Example.Ex1,
        passed,
        {
            "divergence_integral": integral,
            "lambda_star": lam_star,
            "a_set_kind": "ClosedFromLambdaStar",
            "kbar_at_half": kbar_half,
        },
    )


def example2(max_k: int = 7) -> OracleReport:
    """Risk ``(t - 1)^2``: the integral of ``q / L`` diverges at ``t = 1``.

    The excluded window ``(1 - h, 1 + h)`` shrinks by decades; divergence is
    declared once the estimate passes ``1e6`` while still growing.
    """
    f = lambda t: reference_density(t) / ((t - 1.0) ** 2)  # noqa: E731
    estimates = []
    for k in range(1, max_k + 1):
        h = 10.0 ** (-k)
        est = adaptive_simpson(f, 0.0, 1.0 - h, 1e-8, 1e-10) + adaptive_simpson(
            f, 1.0 + h, UPPER, 1e-8, 1e-10
        )
        estimates.append(est)
    growing = all(b > a for a, b in zip(estimates, estimates[1:]))
    divergent = growing and estimates[-1] > DIVERGENCE_THRESHOLD
    return OracleReport(
        Example.Ex2,
        divergent,
        {
            "divergent": divergent,
            "a_set_kind": "OpenFromZero" if divergent else "ClosedFromLambdaStar",
            "estimates": estimates,
        },
    )


C_GRID = (0.5, 1.0, 2.0)
EPS_GRID = (0.1, 0.5, 0.9)
LAMBDA_GRID = (0.01, 0.1, 1.0, 10.0)


def two_atom_beta(c: float, eps: float, lam: float) -> float:
    """Closed-form normalization constant for risks ``{0, c}`` with mass
    ``eps`` on the zero-risk atom."""
    half = 0.5 * (c - lam)
    return -half + math.sqrt(half * half + lam * c * eps)


def example3(cfg: SolverConfig = DEFAULT_CONFIG, tol: float = 1e-10) -> OracleReport:
    worst = 0.0
    for c in C_GRID:
        for eps in EPS_GRID:
            Q = build_measure([eps, 1.0 - eps])
            L = np.array([0.0, c])
            for lam in LAMBDA_GRID:
                sol = solve_type2(Q, L, lam, cfg)
                worst = max(worst, abs(sol.beta - two_atom_beta(c, eps, lam)))
    return OracleReport(Example.Ex3, worst <= tol, {"max_abs_error": worst, "tolerance": tol})


def run_oracle(which: Example | str) -> OracleReport:
    which = Example(which)
    return {Example.Ex1: example1, Example.Ex2: example2, Example.Ex3: example3}[which]()
