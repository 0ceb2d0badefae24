"""Surface-coverage evaluation of trajectories on known geometry.

Coverage is the fraction of area-weighted surface samples seen from at
least one pose of a trajectory, where "seen" means inside the camera's
acceptance cone and not cut off by the occluder geometry.  This replaces
texture-space bookkeeping with point sampling: the sampled fraction
converges to the same area fraction without needing a UV atlas, and no
rendering is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from ._kernels import _fallback
from .geometry import CameraModel, SphericalPose
from .planner import Trajectory
from .shapes import SyntheticShape

SELF_HIT_OFFSET = 1e-6  # endpoint pull-back toward the camera, world units


class TriangleOccluder:
    """Triangle-mesh occluder with precomputed edge vectors."""

    def __init__(self, vertices: np.ndarray, faces: np.ndarray):
        vertices = np.asarray(vertices, dtype=float)
        faces = np.asarray(faces, dtype=np.intp)
        tri = vertices[faces]
        self.v0 = np.ascontiguousarray(tri[:, 0])
        self.e1 = np.ascontiguousarray(tri[:, 1] - tri[:, 0])
        self.e2 = np.ascontiguousarray(tri[:, 2] - tri[:, 0])

    def blocked(self, cam: np.ndarray, points: np.ndarray,
                offset: float = SELF_HIT_OFFSET) -> np.ndarray:
        return _kernels.blocked_by_triangles(
            np.ascontiguousarray(cam, dtype=float),
            np.ascontiguousarray(points, dtype=float),
            self.v0, self.e1, self.e2, offset,
        )


class BoxOccluder:
    """Axis-aligned-box occluder (e.g. a block grid standing in for a mesh)."""

    def __init__(self, box_min: np.ndarray, box_max: np.ndarray):
        self.box_min = np.asarray(box_min, dtype=float)
        self.box_max = np.asarray(box_max, dtype=float)

    def blocked(self, cam: np.ndarray, points: np.ndarray,
                offset: float = SELF_HIT_OFFSET) -> np.ndarray:
        cam = np.asarray(cam, dtype=float)
        points = np.asarray(points, dtype=float)
        d = points - cam
        length = np.linalg.norm(d, axis=1)
        shrink = 1.0 - offset / np.where(length == 0.0, np.inf, length)
        hits = _fallback._slab_hits(cam, d * shrink[:, None],
                                    self.box_min, self.box_max)
        return hits.any(axis=1)


@dataclass(frozen=True, eq=False)
class SurfaceSamples:
    points: np.ndarray  # (n, 3)
    normals: np.ndarray | None
    occluder: TriangleOccluder | BoxOccluder

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 1:
            raise ValueError("need at least one 3D sample point")
        if self.normals is not None:
            nrm = np.asarray(self.normals, dtype=float)
            if nrm.shape != pts.shape:
                raise ValueError("normals must match points in shape")
            lengths = np.linalg.norm(nrm, axis=1)
            if np.max(np.abs(lengths - 1.0)) > 1e-6:
                raise ValueError("normals must be unit length")
            object.__setattr__(self, "normals", nrm)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CoverageReport:
    trajectory_tag: str
    covered_fraction: float
    per_pose_counts: tuple[int, ...]
    n_samples: int

    @property
    def covered(self) -> int:
        return round(self.covered_fraction * self.n_samples)


def sample_surface(shape: SyntheticShape, n: int, seed: int) -> SurfaceSamples:
    """Area-weighted uniform surface samples, deterministic per seed."""
    if n < 1:
        raise ValueError("need at least one sample")
    areas = shape.triangle_areas()
    total = areas.sum()
    if not total > 0:
        raise ValueError("shape has zero surface area")
    rng = np.random.default_rng(seed)
    cum = np.cumsum(areas)
    face_idx = np.searchsorted(cum, rng.random(n) * total)
    face_idx = np.minimum(face_idx, len(areas) - 1)
    tri = shape.vertices[shape.faces[face_idx]]
    # sqrt trick: uniform density over each triangle
    r1 = np.sqrt(rng.random(n))[:, None]
    r2 = rng.random(n)[:, None]
    pts = (1.0 - r1) * tri[:, 0] + r1 * (1.0 - r2) * tri[:, 1] + r1 * r2 * tri[:, 2]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    normals = cross / np.linalg.norm(cross, axis=1, keepdims=True)
    return SurfaceSamples(points=pts, normals=normals,
                          occluder=TriangleOccluder(shape.vertices, shape.faces))


def _fov_mask(cam: np.ndarray, points: np.ndarray, cos_limit: float) -> np.ndarray:
    forward = -cam / np.linalg.norm(cam)
    v = points - cam
    vn = np.linalg.norm(v, axis=1)
    return v @ forward >= cos_limit * vn


def _pose_visible(pose: SphericalPose, points: np.ndarray,
                  occluder, cos_limit: float) -> np.ndarray:
    cam = pose.position()
    mask = _fov_mask(cam, points, cos_limit)
    if mask.any():
        idx = np.flatnonzero(mask)
        blocked = occluder.blocked(cam, points[idx])
        mask[idx[blocked]] = False
    return mask


def point_visible(pose: SphericalPose, point: np.ndarray,
                  samples: SurfaceSamples, camera: CameraModel,
                  fov_mode: str = "half") -> bool:
    """Is one surface point seen from ``pose``?

    The point must be in the view cone and the camera-to-point segment,
    shortened by 1e-6 toward the camera to avoid hitting the point's own
    triangle, must clear the occluder geometry.
    """
    cos_limit = math.cos(math.radians(camera.fov_limit_deg(fov_mode)))
    pts = np.asarray(point, dtype=float).reshape(1, 3)
    return bool(_pose_visible(pose, pts, samples.occluder, cos_limit)[0])


def coverage(traj: Trajectory | Sequence[SphericalPose], samples: SurfaceSamples,
             camera: CameraModel, fov_mode: str = "half") -> CoverageReport:
    """Fraction of samples seen from at least one pose of the trajectory."""
    if isinstance(traj, Trajectory):
        poses = traj.poses
        tag = traj.kind
    else:
        poses = tuple(traj)
        tag = "custom"
    cos_limit = math.cos(math.radians(camera.fov_limit_deg(fov_mode)))
    seen = np.zeros(len(samples), dtype=bool)
    counts = []
    for pose in poses:
        mask = _pose_visible(pose, samples.points, samples.occluder, cos_limit)
        counts.append(int(mask.sum()))
        seen |= mask
    return CoverageReport(
        trajectory_tag=tag,
        covered_fraction=float(seen.sum()) / len(samples),
        per_pose_counts=tuple(counts),
        n_samples=len(samples),
    )
