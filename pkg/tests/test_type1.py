import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ermrer import build_measure, log_partition, solve_type1
from ermrer.errors import LengthMismatch, NonPositiveLambda
from oracles import gibbs_direct, log_partition_direct, simplex_grid, type1_objective_grid


def test_log_partition_constant_risk():
    Q = build_measure([0.3, 0.7])
    assert log_partition(Q, [2.5, 2.5], -0.4) == pytest.approx(-1.0, abs=1e-15)


def test_log_partition_examples():
    Q = build_measure([0.5, 0.5])
    assert log_partition(Q, [0.0, 1.0], 0.0) == 0.0
    expected = math.log(0.5 + 0.5 * math.exp(-1))
    assert log_partition(Q, [0.0, 1.0], -1.0) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(-0.37989, abs=1e-5)


def test_log_partition_survives_large_exponents():
    Q = build_measure([0.5, 0.5])
    k = log_partition(Q, [0.0, 1000.0], -1e6)
    assert k == pytest.approx(math.log(0.5), abs=1e-15)
    assert log_partition(Q, [0.0, 1000.0], 1e3) == pytest.approx(1e6 + math.log(0.5))


def test_log_partition_length_mismatch():
    with pytest.raises(LengthMismatch):
        log_partition(build_measure([1.0]), [0.0, 1.0], -1.0)


def test_solve_type1_examples():
    Q = build_measure([0.4, 0.6])
    assert solve_type1(Q, [3.0, 3.0], 0.1).rn_derivative.tolist() == [1.0, 1.0]
    Q = build_measure([0.5, 0.5])
    sol = solve_type1(Q, [0.0, 1.0], 1.0)
    np.testing.assert_allclose(sol.rn_derivative, gibbs_direct([0.5, 0.5], [0, 1], 1.0), atol=1e-15)
    np.testing.assert_allclose(sol.rn_derivative, [1.46212, 0.53788], atol=1e-5)
    big = solve_type1(Q, [0.0, 1.0], 1e6)
    assert np.max(np.abs(big.rn_derivative - 1)) <= 1e-5


def test_solve_type1_rejects_bad_lambda():
    Q = build_measure([0.5, 0.5])
    for lam in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(NonPositiveLambda):
            solve_type1(Q, [0.0, 1.0], lam)


def test_small_lambda_stays_finite():
    Q = build_measure([0.5, 0.5])
    sol = solve_type1(Q, [0.0, 1000.0], 1e-6)
    assert np.all(np.isfinite(sol.log_rn))
    assert sol.rn_derivative[0] == pytest.approx(2.0)


instances = st.integers(2, 40).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n),
        st.lists(st.floats(0.0, 10.0), min_size=n, max_size=n),
        st.floats(-3, 3),
    )
)


@settings(max_examples=100, deadline=None)
@given(instances)
def test_normalization_and_ordering(inst):
    w, L, loglam = inst
    lam = 10.0 ** loglam
    Q = build_measure(w)
    sol = solve_type1(Q, L, lam)
    rn = sol.rn_derivative
    assert abs(float(Q.weights @ rn) - 1.0) <= 1e-10
    order = np.argsort(L, kind="stable")
    for i, j in zip(order, order[1:]):
        if L[i] == L[j]:
            assert rn[i] == rn[j]
        else:
            assert rn[i] >= rn[j]


@settings(max_examples=30, deadline=None)
@given(instances)
def test_matches_direct_sum_oracle(inst):
    w, L, loglam = inst
    lam = 10.0 ** max(loglam, 0.0)  # keep exp(-L/lam) representable for the oracle
    Q = build_measure(w)
    got = solve_type1(Q, L, lam)
    ref = gibbs_direct(Q.weights.tolist(), L, lam)
    np.testing.assert_allclose(got.rn_derivative, ref, rtol=1e-12)
    assert got.log_partition == pytest.approx(
        log_partition_direct(Q.weights.tolist(), L, -1 / lam), abs=1e-12
    )


def test_large_support_normalization():
    rng = np.random.default_rng(3)
    Q = build_measure(rng.uniform(0.01, 1.0, 10_000))
    L = rng.uniform(0, 1000, 10_000)
    for lam in (1e-3, 1.0, 1e3):
        rn = solve_type1(Q, L, lam).rn_derivative
        assert abs(float(Q.weights @ rn) - 1.0) <= 1e-10


@pytest.mark.parametrize("n_atoms,steps", [(3, 1412), (4, 178)])
def test_brute_force_optimality(n_atoms, steps):
    rng = np.random.default_rng(n_atoms)
    grid = simplex_grid(n_atoms, steps)
    for _ in range(3):
        Q = build_measure(rng.uniform(0.1, 1.0, n_atoms))
        L = rng.uniform(0, 5, n_atoms)
        lam = float(10 ** rng.uniform(-1, 1))
        rn = solve_type1(Q, L, lam).rn_derivative
        p = Q.weights * rn
        at_solution = type1_objective_grid(p[None, :], Q.weights, L, lam)[0]
        grid_min = type1_objective_grid(grid, Q.weights, L, lam).min()
        assert at_solution <= grid_min + 1e-6
