"""Per-cell semantic difference maps between encoder feature grids.

A feature map is a (channels, height, width) array; the input image and
each slice image contribute one.  Cells are compared by cosine similarity
of their channel vectors, rescaled to a difference weight in [0, 1], and
the resulting map is cropped to the object mask's bounding rectangle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyMaskError, ShapeMismatchError


def validate_feature_map(values: np.ndarray, name: str = "feature map") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise ShapeMismatchError(
            f"{name} must be (channels, height, width) with positive dims, got {arr.shape}"
        )
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or Inf values")
    return arr


@dataclass(frozen=True, eq=False)
class CroppedDifferenceMap:
    """Difference map restricted to the mask's bounding rectangle.

    ``mask`` flags which cells of the rectangle belong to the object; cells
    outside keep their values here and are discarded downstream by the
    slice-occupancy test.
    """

    values: np.ndarray
    crop_offset: tuple[int, int]
    mask: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.mask.shape or self.values.ndim != 2:
            raise ShapeMismatchError("crop values and mask must share a 2D shape")


def cosine_cell_similarity(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cosine similarity of the channel vectors at each spatial cell.

    Cells where either vector has zero norm get similarity 0.  The
    denominator is sqrt(|a|^2 * |b|^2) so that identical inputs land on
    exactly 1.0, keeping the difference of a map with itself exactly zero.
    """
    a = validate_feature_map(a, "first feature map")
    b = validate_feature_map(b, "second feature map")
    if a.shape != b.shape:
        raise ShapeMismatchError(f"feature shapes differ: {a.shape} vs {b.shape}")
    dot = np.einsum("chw,chw->hw", a, b)
    norms = np.sqrt(np.einsum("chw,chw->hw", a, a) * np.einsum("chw,chw->hw", b, b))
    return np.divide(dot, norms, out=np.zeros_like(dot), where=norms > 0.0)


def difference_map(a: np.ndarray, b: np.ndarray, mode: str = "difference") -> np.ndarray:
    """Per-cell difference weights in [0, 1].

    ``difference`` (default) maps cosine similarity s to (1 - s) / 2, so
    identical cells score 0 and opposed cells score 1.  ``raw-cosine``
    keeps the similarity itself clamped to [0, 1], an ablation mode for
    treating similarity directly as the block weight.
    """
    sim = cosine_cell_similarity(a, b)
    if mode == "difference":
        return np.clip((1.0 - sim) / 2.0, 0.0, 1.0)
    if mode == "raw-cosine":
        return np.clip(sim, 0.0, 1.0)
    raise ValueError(f"unknown difference mode {mode!r}")


def crop_to_mask(d: np.ndarray, mask: np.ndarray) -> CroppedDifferenceMap:
    """Tight bounding-rectangle crop of ``d`` covering all true mask cells."""
    d = np.asarray(d, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if d.ndim != 2 or d.shape != mask.shape:
        raise ShapeMismatchError(
            f"difference map {d.shape} and mask {mask.shape} must share a 2D shape"
        )
    if not mask.any():
        raise EmptyMaskError("object mask has no foreground cells")
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    r0, r1 = rows[0], rows[-1] + 1
    c0, c1 = cols[0], cols[-1] + 1
    return CroppedDifferenceMap(
        values=d[r0:r1, c0:c1].copy(),
        crop_offset=(int(r0), int(c0)),
        mask=mask[r0:r1, c0:c1].copy(),
    )
