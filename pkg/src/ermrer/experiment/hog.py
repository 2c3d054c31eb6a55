"""Histogram-of-oriented-gradients features for 28x28 grayscale images.

Layout conventions (image stored as ``img[row, col]``):

* the horizontal gradient ``gw`` differences along columns, the vertical
  gradient ``gh`` along rows; central differences inside, one-sided at borders;
* orientation is ``atan(gh / gw)`` in degrees folded into ``[0, 180)``;
* 7x7 cells of 4x4 pixels, 9 half-open 20-degree bins per cell;
* 6x6 overlapping blocks of 2x2 cells, each normalized by
  ``sqrt(|v|^2 + eps^2)``;
* blocks are concatenated with the horizontal cell index varying fastest, and
  inside a block the four cells are ordered ``(w, h), (w, h+1), (w+1, h),
  (w+1, h+1)``.
"""
from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch

SIDE = 28
CELL = 4
N_CELLS = SIDE // CELL  # 7
N_BLOCKS = N_CELLS - 1  # 6
N_BINS = 9
BIN_WIDTH = 180.0 / N_BINS
EPS = 1e-4
LENGTH = N_BLOCKS * N_BLOCKS * 4 * N_BINS  # 1296


def check_image(img) -> np.ndarray:
    a = np.asarray(img, dtype=float)
    if a.shape != (SIDE, SIDE):
        raise DimensionMismatch(f"expected a {SIDE}x{SIDE} image, got shape {a.shape}")
    if not np.all((a >= 0) & (a <= 1)):
        raise ValueError("pixel values must lie in [0, 1]")
    return a


def gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(gw, gh)``: differences along columns and along rows."""
    gw = np.empty_like(img)
    gh = np.empty_like(img)
    gw[:, 1:-1] = img[:, 2:] - img[:, :-2]
    gw[:, 0] = img[:, 1] - img[:, 0]
    gw[:, -1] = img[:, -1] - img[:, -2]
    gh[1:-1, :] = img[2:, :] - img[:-2, :]
    gh[0, :] = img[1, :] - img[0, :]
    gh[-1, :] = img[-1, :] - img[-2, :]
    return gw, gh


def magnitude_orientation(gw: np.ndarray, gh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mag = np.sqrt(gw * gw + gh * gh)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        phi = np.degrees(np.arctan(gh / gw))
    phi = np.where(gw == 0, np.where(gh == 0, 0.0, 90.0), phi)
    phi = np.where(phi < 0, phi + 180.0, phi)
    phi = np.where(phi >= 180.0, 0.0, phi)
    return mag, phi


def orientation_bin(phi: np.ndarray) -> np.ndarray:
    return np.minimum((phi // BIN_WIDTH).astype(int), N_BINS - 1)


def cell_histograms(img) -> np.ndarray:
    """Magnitude-weighted orientation histograms, indexed ``[w, h, bin]``."""
    a = check_image(img)
    mag, phi = magnitude_orientation(*gradients(a))
    bins = orientation_bin(phi)
    hist = np.zeros((N_CELLS, N_CELLS, N_BINS))
    rows, cols = np.indices(a.shape)
    np.add.at(hist, (cols // CELL, rows // CELL, bins), mag)
    return hist


def block_vectors(hist: np.ndarray) -> np.ndarray:
    """Unnormalized 36-entry block vectors, indexed ``[s, m, :]`` (``m`` fastest)."""
    out = np.empty((N_BLOCKS, N_BLOCKS, 4 * N_BINS))
    for s in range(N_BLOCKS):
        for m in range(N_BLOCKS):
            out[s, m] = np.concatenate(
                [hist[m, s], hist[m, s + 1], hist[m + 1, s], hist[m + 1, s + 1]]
            )
    return out


def hog(img) -> np.ndarray:
    blocks = block_vectors(cell_histograms(img))
    norms = np.sqrt((blocks * blocks).sum(axis=-1, keepdims=True) + EPS * EPS)
    return (blocks / norms).reshape(LENGTH)
