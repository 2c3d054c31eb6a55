import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ermrer.errors import DimensionMismatch
from ermrer.experiment.hog import (
    EPS,
    LENGTH,
    block_vectors,
    cell_histograms,
    gradients,
    hog,
    magnitude_orientation,
    orientation_bin,
)
from oracles import edge_cell_histograms

images = arrays(np.float64, (28, 28), elements=st.floats(0.0, 1.0))


def edge_image():
    img = np.zeros((28, 28))
    img[:, 14:] = 1.0
    return img


def test_zero_and_constant_images_give_zero_vector():
    assert np.all(hog(np.zeros((28, 28))) == 0)
    assert np.all(hog(np.full((28, 28), 0.37)) == 0)
    assert hog(np.zeros((28, 28))).shape == (LENGTH,)


def test_rejects_wrong_shape_and_range():
    with pytest.raises(DimensionMismatch):
        hog(np.zeros((27, 28)))
    with pytest.raises(ValueError):
        hog(np.full((28, 28), 1.5))


def test_boundary_differences():
    img = np.zeros((28, 28))
    img[:, 1] = 1.0
    gw, gh = gradients(img)
    assert gw[0, 0] == 1.0  # forward difference at the left border
    assert gw[0, 2] == -1.0  # central difference, no halving
    assert gw[0, 1] == 0.0
    assert np.all(gh == 0)
    img = np.zeros((28, 28))
    img[27, :] = 1.0
    _, gh = gradients(img)
    assert gh[27, 0] == 1.0 and gh[26, 0] == 1.0


def test_orientation_folding_and_bins():
    gw = np.array([1.0, -1.0, 0.0, 0.0, 1.0, -1.0])
    gh = np.array([0.0, 1.0, 1.0, 0.0, -1.0, 0.0])
    mag, phi = magnitude_orientation(gw, gh)
    np.testing.assert_allclose(phi, [0.0, 135.0, 90.0, 0.0, 135.0, 0.0], atol=1e-12)
    assert mag[3] == 0.0
    assert orientation_bin(np.array([0.0, 19.999, 20.0, 179.9, 160.0])).tolist() == [0, 0, 1, 8, 8]


def test_vertical_edge_matches_hand_trace():
    H = cell_histograms(edge_image())
    np.testing.assert_array_equal(H, edge_cell_histograms())


def test_vertical_edge_feature_vector():
    v = hog(edge_image()).reshape(6, 6, 4, 9)  # [s, m, cell-in-block, bin]
    val = 8.0 / np.sqrt(2 * 64 + EPS**2)
    expected = np.zeros((6, 6, 4, 9))
    # cell column 3 is the right half of blocks m=2 and the left half of blocks m=3
    expected[:, 2, 2:, 0] = val
    expected[:, 3, :2, 0] = val
    np.testing.assert_array_equal(v, expected)


def test_block_order():
    H = np.arange(7 * 7 * 9, dtype=float).reshape(7, 7, 9)
    B = block_vectors(H)
    np.testing.assert_array_equal(B[0, 0], np.concatenate([H[0, 0], H[0, 1], H[1, 0], H[1, 1]]))
    np.testing.assert_array_equal(B[0, 1], np.concatenate([H[1, 0], H[1, 1], H[2, 0], H[2, 1]]))
    np.testing.assert_array_equal(B[5, 5], np.concatenate([H[5, 5], H[5, 6], H[6, 5], H[6, 6]]))


@settings(max_examples=25, deadline=None)
@given(images)
def test_deterministic_and_block_norms(img):
    v = hog(img)
    assert v.tobytes() == hog(img.copy()).tobytes()
    assert np.all(v >= 0)
    blocks = v.reshape(36, 36)
    raw = block_vectors(cell_histograms(img)).reshape(36, 36)
    raw_norm = np.linalg.norm(raw, axis=1)
    norms = np.linalg.norm(blocks, axis=1)
    assert np.all(norms <= 1 + 1e-6)
    np.testing.assert_allclose(norms, raw_norm / np.sqrt(raw_norm**2 + EPS**2), rtol=1e-12, atol=1e-15)
