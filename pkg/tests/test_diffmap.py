import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from actr.diffmap import (
    cosine_cell_similarity,
    crop_to_mask,
    difference_map,
)
from actr.errors import EmptyMaskError, ShapeMismatchError


def loop_cosine(a, b):
    """Scalar double-loop oracle for the per-cell cosine similarity."""
    _, h, w = a.shape
    out = np.zeros((h, w))
    for j in range(h):
        for k in range(w):
            va, vb = a[:, j, k], b[:, j, k]
            na, nb = np.linalg.norm(va), np.linalg.norm(vb)
            if na > 0 and nb > 0:
                out[j, k] = float(va @ vb) / (na * nb)
    return out


class TestCosineCellSimilarity:
    def test_self_similarity_is_one(self, rng):
        a = rng.normal(size=(8, 3, 3)) + 0.1
        np.testing.assert_allclose(cosine_cell_similarity(a, a), 1.0, atol=1e-12)

    def test_negated_map_is_minus_one(self, rng):
        a = rng.normal(size=(8, 3, 3)) + 0.1
        np.testing.assert_allclose(cosine_cell_similarity(a, -a), -1.0, atol=1e-12)

    def test_matches_loop_oracle(self, rng):
        a = rng.normal(size=(4, 2, 2))
        b = rng.normal(size=(4, 2, 2))
        np.testing.assert_allclose(
            cosine_cell_similarity(a, b), loop_cosine(a, b), atol=1e-9
        )

    def test_zero_norm_cell_gives_zero(self, rng):
        a = rng.normal(size=(4, 2, 2))
        b = rng.normal(size=(4, 2, 2))
        a[:, 0, 1] = 0.0
        sim = cosine_cell_similarity(a, b)
        assert sim[0, 1] == 0.0

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatchError):
            cosine_cell_similarity(rng.normal(size=(4, 2, 2)), rng.normal(size=(4, 2, 3)))

    def test_rejects_nan(self, rng):
        a = rng.normal(size=(4, 2, 2))
        b = a.copy()
        b[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            cosine_cell_similarity(a, b)


class TestDifferenceMap:
    def test_identical_inputs_give_zero(self, rng):
        a = rng.normal(size=(16, 7, 7))
        np.testing.assert_allclose(difference_map(a, a), 0.0, atol=1e-12)

    def test_negated_inputs_give_one(self, rng):
        a = rng.normal(size=(16, 7, 7)) + 0.2
        np.testing.assert_allclose(difference_map(a, -a), 1.0, atol=1e-12)

    def test_equals_half_one_minus_cosine(self, rng):
        a = rng.normal(size=(4, 2, 2))
        b = rng.normal(size=(4, 2, 2))
        expected = (1.0 - loop_cosine(a, b)) / 2.0
        np.testing.assert_allclose(difference_map(a, b), expected, atol=1e-9)

    def test_raw_cosine_mode(self, rng):
        a = rng.normal(size=(4, 2, 2))
        b = rng.normal(size=(4, 2, 2))
        expected = np.clip(loop_cosine(a, b), 0.0, 1.0)
        np.testing.assert_allclose(difference_map(a, b, mode="raw-cosine"),
                                   expected, atol=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(
        a=arrays(float, (3, 2, 2), elements=st.floats(-5, 5)),
        b=arrays(float, (3, 2, 2), elements=st.floats(-5, 5)),
        scale=st.floats(0.01, 100.0),
    )
    def test_symmetry_and_scale_invariance(self, a, b, scale):
        d_ab = difference_map(a, b)
        d_ba = difference_map(b, a)
        np.testing.assert_allclose(d_ab, d_ba, atol=1e-9)
        np.testing.assert_allclose(difference_map(a * scale, b), d_ab, atol=1e-9)
        assert np.all(d_ab >= 0.0) and np.all(d_ab <= 1.0)


class TestCropToMask:
    def test_full_mask_is_identity(self, rng):
        d = rng.random((7, 7))
        crop = crop_to_mask(d, np.ones((7, 7), dtype=bool))
        assert crop.crop_offset == (0, 0)
        np.testing.assert_array_equal(crop.values, d)

    def test_single_cell(self, rng):
        d = rng.random((7, 7))
        mask = np.zeros((7, 7), dtype=bool)
        mask[3, 4] = True
        crop = crop_to_mask(d, mask)
        assert crop.crop_offset == (3, 4)
        assert crop.values.shape == (1, 1)
        assert crop.values[0, 0] == d[3, 4]

    def test_rectangle_crop(self, rng):
        d = rng.random((7, 7))
        mask = np.zeros((7, 7), dtype=bool)
        mask[2:6, 1:7] = True
        crop = crop_to_mask(d, mask)
        assert crop.crop_offset == (2, 1)
        assert crop.values.shape == (4, 6)
        np.testing.assert_array_equal(crop.values, d[2:6, 1:7])

    def test_irregular_mask_keeps_all_true_cells(self, rng):
        d = rng.random((7, 7))
        mask = rng.random((7, 7)) > 0.7
        if not mask.any():
            mask[5, 2] = True
        crop = crop_to_mask(d, mask)
        r0, c0 = crop.crop_offset
        h, w = crop.values.shape
        # re-embedding the crop reproduces the original at mask positions
        rebuilt = np.zeros_like(d)
        rebuilt[r0 : r0 + h, c0 : c0 + w] = crop.values
        np.testing.assert_array_equal(rebuilt[mask], d[mask])
        assert crop.mask.sum() == mask.sum()

    def test_empty_mask_raises(self):
        with pytest.raises(EmptyMaskError):
            crop_to_mask(np.zeros((7, 7)), np.zeros((7, 7), dtype=bool))

    def test_resolution_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            crop_to_mask(np.zeros((7, 7)), np.ones((6, 7), dtype=bool))
