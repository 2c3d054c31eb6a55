import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ermrer.errors import DegenerateCovariance, LengthMismatch
from ermrer.experiment.pca import covariance, pca_fit, pca_project
from oracles import power_iteration_top2


def test_covariance_uses_unbiased_scaling():
    X = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]])
    mu = X.mean(axis=0)
    manual = sum(np.outer(x - mu, x - mu) for x in X) / (len(X) - 1)
    np.testing.assert_allclose(covariance(X), manual, atol=1e-15)


def test_isotropic_plane_preserves_distances():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((50, 2))
    X = (X - X.mean(0)) @ np.linalg.inv(np.linalg.cholesky(np.cov(X, rowvar=False))).T
    proj = pca_fit(X)
    Y = pca_project(proj, X)
    d0 = np.linalg.norm(X[:, None] - X[None], axis=-1)
    d1 = np.linalg.norm(Y[:, None] - Y[None], axis=-1)
    np.testing.assert_allclose(d0, d1, atol=1e-9)


def test_rank_one_is_degenerate():
    t = np.linspace(0, 1, 10)
    X = np.column_stack([t, 2 * t, -t])
    with pytest.raises(DegenerateCovariance):
        pca_fit(X)


def test_too_few_patterns():
    with pytest.raises(DegenerateCovariance):
        pca_fit(np.eye(2))


def test_projection_dimension_check():
    proj = pca_fit(np.random.default_rng(1).standard_normal((10, 5)))
    with pytest.raises(LengthMismatch):
        pca_project(proj, np.ones(4))


def test_projection_does_not_center():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((20, 4)) + 5.0
    proj = pca_fit(X)
    np.testing.assert_allclose(pca_project(proj, X[0]), proj.basis.T @ X[0], atol=1e-15)


def test_random_matrix_against_power_iteration():
    X = np.random.default_rng(7).standard_normal((10, 5))
    proj = pca_fit(X)
    vals, vecs = power_iteration_top2(covariance(X))
    np.testing.assert_allclose(proj.eigenvalues, vals, rtol=1e-9)
    for j in range(2):
        assert abs(abs(proj.basis[:, j] @ vecs[:, j]) - 1.0) <= 1e-9
    Y = pca_project(proj, X)
    assert np.var(Y, axis=0, ddof=1).sum() == pytest.approx(vals.sum(), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 30), st.integers(3, 8), st.integers(0, 2**32 - 1))
def test_basis_orthonormal_and_truncation_monotone(n, d, seed):
    X = np.random.default_rng(seed).standard_normal((n, d)) * np.arange(1, d + 1)
    proj = pca_fit(X)
    np.testing.assert_allclose(proj.basis.T @ proj.basis, np.eye(2), atol=1e-10)
    Y = pca_project(proj, X)
    v2 = np.var(Y, axis=0, ddof=1).sum()
    v1 = np.var(Y[:, 0], ddof=1)
    total = np.var(X, axis=0, ddof=1).sum()
    assert v1 <= v2 + 1e-12 <= total + 2e-12
