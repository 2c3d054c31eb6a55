"""Randomized property suite for both solvers and the derived functionals.

Each property reduces to a nonnegative error that passes when it is at most
the property's tolerance.  Inequalities report their worst violation (zero
when the inequality holds with room to spare).
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from ..measure import DiscreteMeasure, build_measure, risk_summary
from ..type1 import solve_type1
from ..type2 import DEFAULT_CONFIG, SolverConfig, Type2Solution, kbar_inverse, solve_type2
from .functionals import (
    Direction,
    expected_log_risk,
    expected_risk,
    kl,
    kl_between,
    kl_between_log,
    kl_from_log,
    log_sensitivity,
    sensitivity,
)
from .transforms import MAX_EXPONENT, type1_via_type2, type2_via_type1, w_path_exponent

DEFAULT_SIZES = (2, 3, 5, 10, 50, 100)


@dataclass(frozen=True, eq=False)
class Instance:
    Q: DiscreteMeasure
    L: np.ndarray
    lam: float


@dataclass
class PropertyResult:
    name: str
    tolerance: float
    max_err: float = 0.0
    checks: int = 0

    @property
    def passed(self) -> bool:
        return self.checks > 0 and self.max_err <= self.tolerance

    def record(self, err: float) -> None:
        self.checks += 1
        if not err <= self.max_err:  # also catches NaN
            self.max_err = err if math.isfinite(err) else math.inf

    def line(self) -> str:
        status = "PASS" if self.passed else ("SKIP" if self.checks == 0 else "FAIL")
        return f"{self.name} {status} {self.max_err:.3e} {self.tolerance:.3e}"


def random_instance(
    rng: np.random.Generator, size: int, lam: float | None = None, risk_scale: float = 10.0
) -> Instance:
    """Positive weights bounded away from zero and risks on a coarse grid.

    Risks are multiples of ``risk_scale / 100`` so ties occur and the minimum
    is always separated from the rest by a non-negligible gap.
    """
    w = rng.uniform(0.05, 1.0, size)
    Q = build_measure(w)
    L = np.round(rng.uniform(0.0, risk_scale, size) * 100 / risk_scale) * risk_scale / 100
    if size >= 2 and L.max() == L.min():
        L[rng.integers(size)] += risk_scale / 100
    if lam is None:
        lam = float(10.0 ** rng.uniform(-3, 3))
    return Instance(Q, L, lam)


def random_density(rng: np.random.Generator, Q: DiscreteMeasure) -> np.ndarray:
    """Density of a random measure mutually absolutely continuous with ``Q``."""
    r = rng.uniform(0.05, 1.0, Q.size)
    return r / float(Q.weights @ r)


def perturbed(sol: Type2Solution, shift: float) -> Type2Solution:
    """Same densities with a shifted normalization constant (fault injection)."""
    if shift == 0:
        return sol
    return dataclasses.replace(sol, beta=sol.beta + shift, margin=sol.margin + shift)


class Suite:
    def __init__(self):
        self.results: dict[str, PropertyResult] = {}

    def prop(self, name: str, tolerance: float) -> PropertyResult:
        if name not in self.results:
            self.results[name] = PropertyResult(name, tolerance)
        return self.results[name]

    def check(self, name: str, tolerance: float, err: float) -> None:
        self.prop(name, tolerance).record(float(err))

    def check_scaled(self, name: str, tolerance: float, err: float, scale: float) -> None:
        # the tolerance line reports the unscaled budget; errors are normalized to it
        self.prop(name, tolerance).record(float(err) / scale)

    @property
    def passed(self) -> bool:
        return all(r.passed or r.checks == 0 for r in self.results.values())

    def lines(self) -> list[str]:
        return [r.line() for r in self.results.values()]


def _violation(lhs: float, rhs: float, slack: float = 0.0) -> float:
    """How far ``lhs >= rhs`` is from holding; zero when it does."""
    return max(0.0, rhs - lhs - slack)


def check_solver_properties(suite: Suite, inst: Instance, sol: Type2Solution) -> None:
    Q, L, lam = inst.Q, inst.L, inst.lam
    rn = sol.rn_derivative
    summ = risk_summary(Q, L)
    suite.check("NORMALIZATION_TYPE2", 1e-10, abs(float(Q.weights @ rn) - 1.0))
    t1 = solve_type1(Q, L, lam).rn_derivative
    suite.check("NORMALIZATION_TYPE1", 1e-10, abs(float(Q.weights @ t1) - 1.0))
    suite.check(
        "KBAR_INVERSE_ROUND_TRIP", 1e-10, abs(kbar_inverse(Q, L, sol.beta) - lam) / lam
    )
    ok = bool(np.all(np.isfinite(rn)) and np.all(rn > 0))
    suite.check("DENSITY_POSITIVE_FINITE", 0.0, 0.0 if ok else 1.0)
    suite.check("BETA_ABOVE_MINUS_MIN_RISK", 0.0, 0.0 if sol.beta > -summ.delta_star else 1.0)

    order = np.argsort(L, kind="stable")
    Ls, rs = L[order], rn[order]
    bad = 0
    for a, b, ra, rb in zip(Ls, Ls[1:], rs, rs[1:]):
        if a == b and ra != rb:
            bad += 1
        if a < b and not ra > rb:
            bad += 1
    suite.check("DENSITY_ORDER_REVERSES_RISK_ORDER", 0.0, float(bad))
    for name, dens in (("TYPE1", t1),):
        ds = dens[order]
        bad1 = sum(
            1 for a, b, ra, rb in zip(Ls, Ls[1:], ds, ds[1:]) if (a < b and not ra >= rb)
        )
        suite.check(f"DENSITY_ORDER_REVERSES_RISK_ORDER_{name}", 0.0, float(bad1))

    cap = lam / sol.margin
    ids = np.array(sorted(summ.lstar_ids))
    others = np.setdiff1d(np.arange(Q.size), ids)
    err = float(np.max(np.abs(rn[ids] - cap))) / cap
    if others.size:
        err = max(err, float(np.max(rn[others] - cap)) / cap if np.any(rn[others] >= cap) else 0.0)
    suite.check("DENSITY_CAP_ATTAINED_ON_MINIMIZERS", 1e-12, err)
    suite.check("KBAR_AT_MOST_LAMBDA", 1e-12, max(0.0, sol.beta - lam) / max(1.0, lam))


def check_risk_identities(
    suite: Suite, inst: Instance, sol: Type2Solution, rng: np.random.Generator, n_perturb: int = 5
) -> None:
    Q, L, lam = inst.Q, inst.L, inst.lam
    rn = sol.rn_derivative
    ones = np.ones(Q.size)
    r_sol = expected_risk(rn, Q, L)
    r_ref = expected_risk(ones, Q, L)
    summ = risk_summary(Q, L)

    suite.check_scaled(
        "RISK_EQUALS_LAMBDA_MINUS_KBAR", 1e-9, abs(r_sol - (lam - sol.beta)), max(1.0, lam)
    )
    kl_qp = kl(rn, Q, Direction.Q_TO_P)
    kl_pq = kl(rn, Q, Direction.P_TO_Q)
    suite.check(
        "RISK_DROP_EXCEEDS_EXP_KL_BOUND",
        1e-9,
        _violation(r_ref - r_sol, lam * math.expm1(kl_qp)),
    )
    if summ.separable:
        suite.check("RISK_BELOW_REFERENCE_RISK", 0.0, 0.0 if r_sol < r_ref else 1.0)
    suite.check("RISK_AT_LEAST_MIN_RISK", 1e-9, _violation(r_sol, summ.delta_star))
    suite.check(
        "RISK_BELOW_MIN_RISK_PLUS_LAMBDA",
        1e-9,
        0.0 if r_sol < lam + summ.delta_star else r_sol - lam - summ.delta_star,
    )

    log_lam = math.log(lam)
    suite.check(
        "LOG_LAMBDA_FROM_SOLUTION",
        1e-8,
        abs(expected_log_risk(rn, Q, L, lam, sol) + kl_pq - log_lam),
    )
    suite.check(
        "LOG_LAMBDA_FROM_REFERENCE",
        1e-8,
        abs(expected_log_risk(ones, Q, L, lam, sol) - kl_qp - log_lam),
    )
    suite.check(
        "LOG_SENSITIVITY_OF_REFERENCE_IS_JEFFREYS",
        1e-8,
        abs(log_sensitivity(Q, L, lam, ones, sol) - (kl_qp + kl_pq)),
    )
    for _ in range(n_perturb):
        p = random_density(rng, Q)
        closed = kl_between(p, rn, Q) - kl(p, Q) + kl_pq
        suite.check(
            "LOG_SENSITIVITY_CLOSED_FORM", 1e-8, abs(log_sensitivity(Q, L, lam, p, sol) - closed)
        )


def check_cross_identities(
    suite: Suite, Q: DiscreteMeasure, L: np.ndarray, lam: float, alpha: float, cfg: SolverConfig,
    shift: float = 0.0,
) -> None:
    """Compare the forward-KL solution at ``lam`` with the reverse-KL solution
    at ``alpha``."""
    s1 = solve_type1(Q, L, lam)
    s2 = perturbed(solve_type2(Q, L, alpha, cfg), shift)
    p1, p2 = s1.rn_derivative, s2.rn_derivative
    k = s1.log_partition
    offset = math.log(alpha) + k
    # log-domain throughout: the forward-KL density underflows for small lam
    kl1 = kl_from_log(s1.log_rn, Q, Direction.P_TO_Q)
    kl2 = kl_from_log(s2.log_rn, Q, Direction.P_TO_Q)
    kl12 = kl_between_log(s1.log_rn, s2.log_rn, Q)
    kl21 = kl_between_log(s2.log_rn, s1.log_rn, Q)

    # stated forms: relative-entropy difference and the two cross sensitivities
    suite.check("KL_DIFFERENCE_TYPE1_TYPE2", 1e-8, abs((kl1 - kl2) - offset))
    suite.check(
        "CROSS_LOG_SENSITIVITY",
        1e-8,
        abs(log_sensitivity(Q, L, alpha, p1, s2) - (kl12 - offset)),
    )
    suite.check(
        "CROSS_RISK_SENSITIVITY",
        1e-8,
        abs(sensitivity(Q, L, lam, p2) / lam - (kl21 + offset)),
    )

    # forms that follow from the two closed-form densities
    lhs_a = expected_risk(p2, Q, L) / lam - expected_log_risk(p2, Q, L, alpha, s2)
    suite.check("CROSS_RISK_IDENTITY_AT_TYPE2", 1e-8, abs(lhs_a - (kl21 - offset)))
    lhs_b = expected_risk(p1, Q, L) / lam - expected_log_risk(p1, Q, L, alpha, s2)
    suite.check("CROSS_RISK_IDENTITY_AT_TYPE1", 1e-8, abs(lhs_b - (-kl12 - offset)))
    suite.check(
        "CROSS_LOG_SENSITIVITY_VIA_KL",
        1e-8,
        abs(log_sensitivity(Q, L, alpha, p1, s2) - (kl12 + kl2 - kl1)),
    )
    suite.check(
        "CROSS_RISK_SENSITIVITY_VIA_KL",
        1e-8,
        abs(sensitivity(Q, L, lam, p2) / lam - (kl21 - kl2 + kl1)),
    )


def check_equivalence(suite: Suite, inst: Instance, cfg: SolverConfig) -> None:
    Q, L, lam = inst.Q, inst.L, inst.lam
    t2 = solve_type2(Q, L, lam, cfg).rn_derivative
    via = type2_via_type1(Q, L, lam, cfg).rn_derivative
    suite.check("LOG_RISK_TRANSFORM_REPRODUCES_TYPE2", 1e-9, float(np.max(np.abs(via - t2))))
    if w_path_exponent(Q, L, lam) <= MAX_EXPONENT:
        t1 = solve_type1(Q, L, lam).rn_derivative
        via1 = type1_via_type2(Q, L, lam, cfg).rn_derivative
        suite.check("EXP_RISK_TRANSFORM_REPRODUCES_TYPE1", 1e-9, float(np.max(np.abs(via1 - t1))))


def check_monotone_in_lambda(suite: Suite, Q: DiscreteMeasure, L: np.ndarray, cfg: SolverConfig,
                             grid: Sequence[float]) -> None:
    sols = [solve_type2(Q, L, lam, cfg) for lam in sorted(grid)]
    betas = [s.beta for s in sols]
    risks = [expected_risk(s.rn_derivative, Q, L) for s in sols]
    suite.check(
        "KBAR_STRICTLY_INCREASING",
        0.0,
        float(sum(1 for a, b in zip(betas, betas[1:]) if not b > a)),
    )
    # allow rounding-level dips between neighbouring factors
    worst = max((a - b for a, b in zip(risks, risks[1:])), default=0.0)
    suite.check("EXPECTED_RISK_NONDECREASING_IN_LAMBDA", 1e-12, max(0.0, worst))


def check_asymptotics(suite: Suite, Q: DiscreteMeasure, L: np.ndarray, cfg: SolverConfig) -> None:
    big = solve_type2(Q, L, 1e6, cfg).rn_derivative
    suite.check("LARGE_LAMBDA_APPROACHES_REFERENCE", 1e-4, float(np.max(np.abs(big - 1.0))))
    small = solve_type2(Q, L, 1e-6, cfg)
    summ = risk_summary(Q, L)
    ids = np.array(sorted(summ.lstar_ids))
    q_star = float(Q.weights[ids].sum())
    mass = float(Q.weights[ids] @ small.rn_derivative[ids])
    suite.check("SMALL_LAMBDA_MASS_ON_MINIMIZERS", 1e-4, max(0.0, 1.0 - mass))
    suite.check(
        "SMALL_LAMBDA_DENSITY_ON_MINIMIZERS",
        1e-4,
        float(np.max(np.abs(small.rn_derivative[ids] * q_star - 1.0))),
    )
    r_small = expected_risk(small.rn_derivative, Q, L)
    suite.check("SMALL_LAMBDA_RISK_NEAR_MIN_RISK", 1e-4, abs(r_small - summ.delta_star))


def run_suite(
    seed: int = 0,
    instances: int = 50,
    sizes: Iterable[int] = DEFAULT_SIZES,
    lambdas: Sequence[float] | None = None,
    perturb_beta: float = 0.0,
    cfg: SolverConfig = DEFAULT_CONFIG,
    progress: Callable[[int], None] | None = None,
) -> Suite:
    """Run every property over ``instances`` random instances.

    Instance ``i`` has support size ``sizes[i % len(sizes)]``.  With
    ``lambdas`` given, every instance is checked at each listed factor;
    otherwise one log-uniform factor in ``[1e-3, 1e3]`` is drawn per instance.
    ``perturb_beta`` shifts every reverse-KL normalization constant before
    the identities are evaluated, which must make them fail.
    """
    sizes = list(sizes)
    if not sizes or any(n < 1 for n in sizes):
        raise ValueError("sizes must be positive integers")
    rng = np.random.default_rng(seed)
    suite = Suite()
    for i in range(instances):
        n = sizes[i % len(sizes)]
        base = random_instance(rng, n)
        if n < 2:
            continue
        lam_list = list(lambdas) if lambdas else [base.lam]
        for lam in lam_list:
            inst = Instance(base.Q, base.L, float(lam))
            sol = perturbed(solve_type2(inst.Q, inst.L, inst.lam, cfg), perturb_beta)
            check_solver_properties(suite, inst, sol)
            check_risk_identities(suite, inst, sol, rng)
            check_equivalence(suite, inst, cfg)
        pairs = [float(10.0 ** x) for x in rng.uniform(-2, 2, 3)]
        alphas = [float(10.0 ** x) for x in rng.uniform(-2, 2, 3)]
        for lam in pairs:
            for alpha in alphas:
                check_cross_identities(suite, base.Q, base.L, lam, alpha, cfg, perturb_beta)
        check_monotone_in_lambda(suite, base.Q, base.L, cfg, np.logspace(-3, 3, 13))
        check_asymptotics(suite, base.Q, base.L, cfg)
        if progress is not None:
            progress(i)
    return suite
