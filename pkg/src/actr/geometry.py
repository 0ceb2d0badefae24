"""Camera model, spherical poses, rigid transforms and ray-box tests.

Conventions (documented here and in every trajectory file header):

* world up is +Z;
* azimuth is measured counterclockwise in the XY plane, zero pointing along
  the input-view direction (+X toward the camera);
* elevation is measured from the horizontal plane toward +Z;
* the camera always looks at the world origin;
* camera frames are x=right, y=down, z=forward (looking direction), so the
  world origin maps to (0, 0, radius) in any camera's own frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

ORTHONORMAL_TOL = 1e-9


@dataclass(frozen=True)
class SphericalPose:
    """Camera position on a look-at-origin sphere."""

    azimuth_deg: float
    elevation_deg: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not -90.0 <= self.elevation_deg <= 90.0:
            raise ValueError(
                f"elevation must lie in [-90, 90] degrees, got {self.elevation_deg}"
            )

    def position(self) -> np.ndarray:
        """World-frame camera position."""
        az = math.radians(self.azimuth_deg)
        el = math.radians(self.elevation_deg)
        return self.radius * np.array(
            [math.cos(el) * math.cos(az), math.cos(el) * math.sin(az), math.sin(el)]
        )


@dataclass(frozen=True)
class CameraModel:
    """Pinhole camera pointing at the world origin with a full-angle FOV."""

    fov_deg: float = 33.8

    def __post_init__(self):
        if not 0.0 < self.fov_deg < 180.0:
            raise ValueError(f"fov must lie in (0, 180) degrees, got {self.fov_deg}")

    def fov_limit_deg(self, mode: str = "half") -> float:
        """Angular acceptance limit for the view-cone test.

        ``half`` (default) admits directions within fov/2 of the view axis,
        the standard pinhole cone; ``full`` admits the whole fov as a
        half-angle, kept as an ablation switch.
        """
        if mode == "half":
            return self.fov_deg / 2.0
        if mode == "full":
            return self.fov_deg
        raise ValueError(f"unknown fov-check mode {mode!r}")


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """World-to-camera transform: x_cam = rotation @ x_world + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=float)
        tra = np.asarray(self.translation, dtype=float)
        if rot.shape != (3, 3) or tra.shape != (3,):
            raise ValueError("rotation must be 3x3 and translation a 3-vector")
        if np.max(np.abs(rot @ rot.T - np.eye(3))) > ORTHONORMAL_TOL:
            raise ValueError("rotation is not orthonormal")
        if abs(np.linalg.det(rot) - 1.0) > ORTHONORMAL_TOL:
            raise ValueError("rotation must have determinant +1")
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", tra)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one point (3,) or a stack of points (n, 3)."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation


@dataclass(frozen=True, eq=False)
class AABB:
    """Axis-aligned box, corners in the block-grid frame."""

    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.min_corner, dtype=float)
        hi = np.asarray(self.max_corner, dtype=float)
        if lo.shape != (3,) or hi.shape != (3,):
            raise ValueError("corners must be 3-vectors")
        if np.any(lo > hi):
            raise ValueError("min_corner must be <= max_corner componentwise")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.min_corner + self.max_corner)

    @property
    def edges(self) -> np.ndarray:
        return self.max_corner - self.min_corner


def pose_to_transform(pose: SphericalPose) -> RigidTransform:
    """World-to-camera transform of a pose looking at the origin.

    Rows of the rotation are the camera's right / down / forward axes in
    world coordinates, so the origin maps to (0, 0, radius).  At the poles
    the up reference degenerates and +X is used instead of +Z.
    """
    eye = pose.position()
    forward = -eye / pose.radius
    up = np.array([0.0, 0.0, 1.0])
    if abs(forward @ up) > 1.0 - 1e-12:
        up = np.array([1.0, 0.0, 0.0])
    right = np.cross(forward, up)
    right = right / np.linalg.norm(right)
    down = np.cross(forward, right)
    rotation = np.stack([right, down, forward])
    return RigidTransform(rotation=rotation, translation=-rotation @ eye)


def ray_aabb_intersect(origin: np.ndarray, target: np.ndarray, box: AABB) -> bool:
    """True iff the open segment origin->target passes through the box.

    Slab test clipped to the segment.  Grazing contact with a face or edge
    counts as a hit (conservative occlusion); contact confined to exactly
    the origin or target endpoint does not.
    """
    origin = np.ascontiguousarray(origin, dtype=float)
    target = np.ascontiguousarray(target, dtype=float)
    if np.array_equal(origin, target):
        raise ValueError("origin and target must differ")
    return bool(
        _kernels.segment_box_hit(origin, target, box.min_corner, box.max_corner)
    )


def angle_to_block(pose: SphericalPose, block_center: np.ndarray) -> float:
    """Angle in degrees between the view axis and the camera-to-center ray."""
    eye = pose.position()
    forward = -eye / pose.radius
    v = np.asarray(block_center, dtype=float) - eye
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("block center coincides with the camera position")
    cosang = float(np.clip(forward @ (v / norm), -1.0, 1.0))
    return math.degrees(math.acos(cosang))
