"""Weighted 3D block grids built from cropped difference maps.

The estimated object bounding box is partitioned into M depth slabs (one
per slice, front to rear along the input-view axis) by H' rows by W'
columns.  A cell is retained as a block only where the slice occupancy
grid is true; each retained block carries the difference weight of its
cell.

Grid frame: axes follow the input-view camera (x = image right, y = image
down, z = viewing direction), origin at the world origin.  With input
elevation 0 this is a pure permutation of world axes; a nonzero input
elevation tilts the grid, and ``world_to_grid`` maps world points into it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .diffmap import CroppedDifferenceMap
from .errors import ShapeMismatchError
from .geometry import AABB, SphericalPose, pose_to_transform

BlockIndex = tuple[int, int, int]


@dataclass(frozen=True)
class BoundingBoxEstimate:
    """Estimated object box: edge lengths (width, height, length) and an
    optional center offset from the origin, all in grid-frame units."""

    width: float
    height: float
    length: float
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if min(self.width, self.height, self.length) <= 0:
            raise ValueError("bounding box edge lengths must be positive")

    @property
    def edges(self) -> np.ndarray:
        # grid axes: x spans width (columns), y height (rows), z length (slices)
        return np.array([self.width, self.height, self.length])

    @property
    def min_corner(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float) - 0.5 * self.edges


@dataclass(frozen=True, eq=False)
class SemanticBlock:
    index: BlockIndex  # (i, j, k), 1-based: slice, row, column
    box: AABB
    weight: float

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"block weight must lie in [0, 1], got {self.weight}")


@dataclass(eq=False)
class BlockGrid:
    """Immutable set of weighted blocks plus cached geometry arrays."""

    blocks: tuple[SemanticBlock, ...]
    dims: tuple[int, int, int]  # (M, H', W')
    bbox: BoundingBoxEstimate
    input_elevation_deg: float = 0.0
    world_to_grid: np.ndarray = field(init=False)
    centers: np.ndarray = field(init=False)
    box_min: np.ndarray = field(init=False)
    box_max: np.ndarray = field(init=False)
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        indices = [b.index for b in self.blocks]
        if len(set(indices)) != len(indices):
            raise ValueError("block indices must be unique")
        m, h, w = self.dims
        for i, j, k in indices:
            if not (1 <= i <= m and 1 <= j <= h and 1 <= k <= w):
                raise ValueError(f"block index {(i, j, k)} outside grid dims {self.dims}")
        rot = pose_to_transform(
            SphericalPose(0.0, self.input_elevation_deg, 1.0)
        ).rotation
        self.world_to_grid = rot
        n = len(self.blocks)
        self.centers = np.zeros((n, 3))
        self.box_min = np.zeros((n, 3))
        self.box_max = np.zeros((n, 3))
        self.weights = np.zeros(n)
        for idx, b in enumerate(self.blocks):
            self.centers[idx] = b.box.center
            self.box_min[idx] = b.box.min_corner
            self.box_max[idx] = b.box.max_corner
            self.weights[idx] = b.weight

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def indices(self) -> tuple[BlockIndex, ...]:
        return tuple(b.index for b in self.blocks)

    def camera_position(self, pose: SphericalPose) -> np.ndarray:
        """Pose's camera position expressed in the grid frame."""
        return self.world_to_grid @ pose.position()


def _cell_box(bbox: BoundingBoxEstimate, dims: tuple[int, int, int],
              i: int, j: int, k: int) -> AABB:
    m, h, w = dims
    lo = bbox.min_corner
    ex, ey, ez = bbox.width / w, bbox.height / h, bbox.length / m
    mn = lo + np.array([(k - 1) * ex, (j - 1) * ey, (i - 1) * ez])
    return AABB(mn, mn + np.array([ex, ey, ez]))


def grid_from_cells(dims: tuple[int, int, int], bbox: BoundingBoxEstimate,
                    cells: Iterable[tuple[BlockIndex, float]],
                    input_elevation_deg: float = 0.0) -> BlockGrid:
    """Build a grid directly from (index, weight) pairs (deserialization)."""
    blocks = tuple(
        SemanticBlock(index=idx, box=_cell_box(bbox, dims, *idx), weight=float(wt))
        for idx, wt in cells
    )
    return BlockGrid(blocks=blocks, dims=dims, bbox=bbox,
                     input_elevation_deg=input_elevation_deg)


def build_block_grid(diffs: Sequence[CroppedDifferenceMap],
                     occupancy: np.ndarray,
                     bbox: BoundingBoxEstimate,
                     input_elevation_deg: float = 0.0) -> BlockGrid:
    """Partition ``bbox`` and emit one weighted block per occupied cell.

    ``diffs`` holds M cropped maps of identical H'xW' shape; ``occupancy``
    is the (M, H', W') slice-emptiness grid.  Slice index i runs front to
    rear along the grid z axis, row j down the image, column k rightward.
    """
    if len(diffs) == 0:
        raise ShapeMismatchError("need at least one cropped difference map")
    hw = diffs[0].values.shape
    for n, d in enumerate(diffs):
        if d.values.shape != hw:
            raise ShapeMismatchError(
                f"cropped map {n} has shape {d.values.shape}, expected {hw}"
            )
    occupancy = np.asarray(occupancy, dtype=bool)
    dims = (len(diffs), hw[0], hw[1])
    if occupancy.shape != dims:
        raise ShapeMismatchError(
            f"occupancy shape {occupancy.shape} does not match grid dims {dims}"
        )
    cells = []
    for i in range(1, dims[0] + 1):
        values = diffs[i - 1].values
        for j in range(1, dims[1] + 1):
            for k in range(1, dims[2] + 1):
                if occupancy[i - 1, j - 1, k - 1]:
                    weight = float(np.clip(values[j - 1, k - 1], 0.0, 1.0))
                    cells.append(((i, j, k), weight))
    return grid_from_cells(dims, bbox, cells, input_elevation_deg)
