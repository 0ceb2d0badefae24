"""Shared fixtures and independent test oracles.

The oracles here deliberately avoid the library's slab/Moller-Trumbore
code paths: segment/box questions are answered by dense midpoint sampling
and box containment, written in plain numpy.
"""

import math

import numpy as np
import pytest

from actr.blocks import BoundingBoxEstimate, grid_from_cells


def sampled_box_hit(origin, target, bmin, bmax, n=10000):
    """Dense-sampling oracle for open-segment/box intersection."""
    origin = np.asarray(origin, dtype=float)
    d = np.asarray(target, dtype=float) - origin
    s = (np.arange(n) + 0.5) / n
    pts = origin + s[:, None] * d
    inside = np.all((pts >= np.asarray(bmin)) & (pts <= np.asarray(bmax)), axis=1)
    return bool(inside.any())


def oracle_visible_indices(cam, grid, limit_deg, n=4000):
    """Brute-force visibility: arccos FOV test plus per-pair dense sampling."""
    forward = -cam / np.linalg.norm(cam)
    out = []
    for i in range(len(grid)):
        v = grid.centers[i] - cam
        ang = math.degrees(math.acos(np.clip(forward @ (v / np.linalg.norm(v)), -1, 1)))
        if ang > limit_deg:
            continue
        occluded = False
        for j in range(len(grid)):
            if j == i:
                continue
            if sampled_box_hit(cam, grid.centers[i], grid.box_min[j],
                               grid.box_max[j], n=n):
                occluded = True
                break
        if not occluded:
            out.append(grid.indices[i])
    return frozenset(out)


def make_grid(occupancy, weights, bbox=None, elevation=0.0):
    """Grid from (M, H, W) occupancy and weight arrays."""
    occupancy = np.asarray(occupancy, dtype=bool)
    weights = np.asarray(weights, dtype=float)
    assert occupancy.shape == weights.shape
    if bbox is None:
        bbox = BoundingBoxEstimate(1.0, 1.0, 1.0)
    cells = [
        ((i + 1, j + 1, k + 1), float(weights[i, j, k]))
        for i in range(occupancy.shape[0])
        for j in range(occupancy.shape[1])
        for k in range(occupancy.shape[2])
        if occupancy[i, j, k]
    ]
    return grid_from_cells(occupancy.shape, bbox, cells, input_elevation_deg=elevation)


def bowl_grid():
    """Block-grid analogue of an upright open bowl, dims (M=4, H'=3, W'=5).

    Row j=1 is the wall ring around an empty cavity, row j=2 the floor and
    row j=3 a solid base.  Interior floor cells carry nearly all the weight:
    they are occluded from the equator by the wall ring, shielded from below
    by the base, and reachable only from above through the opening (the
    flat bbox makes the rim clear from roughly 25 degrees of elevation up).
    """
    m, h, w = 4, 3, 5
    occupancy = np.zeros((m, h, w), dtype=bool)
    weights = np.zeros((m, h, w))
    for i in range(m):
        for k in range(w):
            on_ring = i in (0, m - 1) or k in (0, w - 1)
            occupancy[i, 0, k] = on_ring
            weights[i, 0, k] = 0.05
            occupancy[i, 1:, k] = True
            weights[i, 1, k] = 0.05 if on_ring else 0.9
            weights[i, 2, k] = 0.05
    bbox = BoundingBoxEstimate(1.2, 0.36, 1.2)
    return make_grid(occupancy, weights, bbox)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
