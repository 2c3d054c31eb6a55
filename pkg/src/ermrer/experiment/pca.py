from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateCovariance, LengthMismatch

RANK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Projection:
    """Two leading principal directions as the columns of ``basis``."""

    basis: np.ndarray  # shape (d, 2)
    eigenvalues: np.ndarray  # top two, descending
    mean: np.ndarray


def covariance(patterns) -> np.ndarray:
    X = np.asarray(patterns, dtype=float)
    if X.ndim != 2:
        raise LengthMismatch("patterns must form a 2-D array")
    return np.cov(X, rowvar=False, ddof=1)


def pca_fit(patterns) -> Projection:
    """Top-2 eigenvectors of the sample covariance (``1/(n-1)`` scaling).

    Raises ``DegenerateCovariance`` unless two eigenvalues exceed
    ``RANK_TOL`` relative to the largest.
    """
    X = np.asarray(patterns, dtype=float)
    if X.ndim != 2 or X.shape[0] < 3:
        raise DegenerateCovariance("need at least 3 patterns of equal dimension")
    if X.shape[1] < 2:
        raise DegenerateCovariance("patterns must have at least 2 coordinates")
    C = np.atleast_2d(covariance(X))
    vals, vecs = np.linalg.eigh(C)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    scale = max(float(vals[0]), 0.0)
    if scale == 0.0 or not vals[1] > RANK_TOL * scale:
        raise DegenerateCovariance("fewer than two positive covariance eigenvalues")
    basis = vecs[:, :2].copy()
    # deterministic sign: largest-magnitude entry of each column is positive
    for j in range(2):
        k = int(np.argmax(np.abs(basis[:, j])))
        if basis[k, j] < 0:
            basis[:, j] = -basis[:, j]
    basis.setflags(write=False)
    return Projection(basis, vals[:2].copy(), X.mean(axis=0))


def pca_project(proj: Projection, pattern) -> np.ndarray:
    """``basis^T x`` for one pattern or each row of a matrix; no centering."""
    x = np.asarray(pattern, dtype=float)
    if x.shape[-1] != proj.basis.shape[0]:
        raise LengthMismatch(f"pattern of dimension {x.shape[-1]}, expected {proj.basis.shape[0]}")
    return x @ proj.basis
