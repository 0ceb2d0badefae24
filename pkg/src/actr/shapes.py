"""Synthetic watertight test shapes (triangle meshes).

Desk-scale stand-ins for scanned objects: a box, a tube (annular ring), an
open bowl whose floor is hidden from low viewpoints, and an L-shaped
extrusion.  All generators return consistent outward-oriented triangles
and are watertight (every edge shared by exactly two faces).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class SyntheticShape:
    kind: str
    parameters: dict
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray  # (F, 3) int

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        f = np.asarray(self.faces, dtype=np.intp)
        if v.ndim != 2 or v.shape[1] != 3 or f.ndim != 2 or f.shape[1] != 3:
            raise ValueError("vertices must be (V, 3) and faces (F, 3)")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise ValueError("face index out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    def triangle_areas(self) -> np.ndarray:
        tri = self.vertices[self.faces]
        cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        return 0.5 * np.linalg.norm(cross, axis=1)


def make_box(size=(1.0, 1.0, 1.0), center=(0.0, 0.0, 0.0)) -> SyntheticShape:
    sx, sy, sz = (s / 2.0 for s in size)
    cx, cy, cz = center
    corners = np.array([
        [x, y, z]
        for x in (cx - sx, cx + sx)
        for y in (cy - sy, cy + sy)
        for z in (cz - sz, cz + sz)
    ])
    # two triangles per face, outward orientation
    quads = [
        (0, 1, 3, 2),  # -x
        (4, 6, 7, 5),  # +x
        (0, 4, 5, 1),  # -y
        (2, 3, 7, 6),  # +y
        (0, 2, 6, 4),  # -z
        (1, 5, 7, 3),  # +z
    ]
    faces = []
    for a, b, c, d in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return SyntheticShape("box", {"size": tuple(size), "center": tuple(center)},
                          corners, np.array(faces))


def _ring(radius: float, z: float, n: int) -> np.ndarray:
    ang = 2.0 * np.pi * np.arange(n) / n
    return np.stack([radius * np.cos(ang), radius * np.sin(ang),
                     np.full(n, float(z))], axis=1)


def _strip(lower: np.ndarray, upper: np.ndarray, faces: list, flip: bool = False):
    """Triangulate the band between two same-length index rings."""
    n = len(lower)
    for i in range(n):
        j = (i + 1) % n
        if flip:
            faces.append((lower[i], upper[i], lower[j]))
            faces.append((lower[j], upper[i], upper[j]))
        else:
            faces.append((lower[i], lower[j], upper[i]))
            faces.append((lower[j], upper[j], upper[i]))


def _fan(center: int, ring: np.ndarray, faces: list, flip: bool = False):
    n = len(ring)
    for i in range(n):
        j = (i + 1) % n
        if flip:
            faces.append((center, ring[j], ring[i]))
        else:
            faces.append((center, ring[i], ring[j]))


def make_bowl(outer_radius: float = 0.55, height: float = 0.5,
              wall: float = 0.1, floor: float = 0.1,
              segments: int = 48) -> SyntheticShape:
    """Open cylindrical bowl: the inner floor is visible only from above."""
    if not 0 < wall < outer_radius or not 0 < floor < height:
        raise ValueError("wall and floor must be positive and thinner than the bowl")
    ri = outer_radius - wall
    z0, z1 = -height / 2.0, height / 2.0
    zf = z0 + floor
    verts = [np.array([[0.0, 0.0, z0]]), _ring(outer_radius, z0, segments),
             _ring(outer_radius, z1, segments), _ring(ri, z1, segments),
             _ring(ri, zf, segments), np.array([[0.0, 0.0, zf]])]
    offsets = np.cumsum([0] + [len(v) for v in verts])
    bc = 0
    ob = offsets[1] + np.arange(segments)
    ot = offsets[2] + np.arange(segments)
    it = offsets[3] + np.arange(segments)
    ifl = offsets[4] + np.arange(segments)
    fc = offsets[5]
    faces: list = []
    _fan(bc, ob, faces, flip=True)        # bottom disk, faces -z
    _strip(ob, ot, faces)                 # outer wall
    _strip(ot, it, faces)                 # rim annulus, faces +z
    _strip(it, ifl, faces)                # inner wall, faces the cavity
    _fan(fc, ifl, faces)                  # inner floor, faces +z
    return SyntheticShape(
        "bowl",
        {"outer_radius": outer_radius, "height": height, "wall": wall,
         "floor": floor, "segments": segments},
        np.concatenate(verts), np.array(faces),
    )


def make_tube(outer_radius: float = 0.5, inner_radius: float = 0.3,
              height: float = 0.4, segments: int = 48) -> SyntheticShape:
    """Annular ring (tape-roll): a through-hole along the z axis."""
    if not 0 < inner_radius < outer_radius:
        raise ValueError("need 0 < inner_radius < outer_radius")
    z0, z1 = -height / 2.0, height / 2.0
    verts = [_ring(outer_radius, z0, segments), _ring(outer_radius, z1, segments),
             _ring(inner_radius, z0, segments), _ring(inner_radius, z1, segments)]
    ob = np.arange(segments)
    ot = segments + np.arange(segments)
    ib = 2 * segments + np.arange(segments)
    it = 3 * segments + np.arange(segments)
    faces: list = []
    _strip(ob, ot, faces)              # outer wall
    _strip(it, ib, faces)              # inner wall, faces the hole
    _strip(ot, it, faces)              # top annulus
    _strip(ib, ob, faces)              # bottom annulus
    return SyntheticShape(
        "tube",
        {"outer_radius": outer_radius, "inner_radius": inner_radius,
         "height": height, "segments": segments},
        np.concatenate(verts), np.array(faces),
    )


def make_l_shape(width: float = 0.8, depth: float = 0.8, height: float = 0.5,
                 notch_width: float = 0.4, notch_depth: float = 0.4) -> SyntheticShape:
    """L-shaped extrusion: a box with one quadrant removed along its height."""
    if not (0 < notch_width < width and 0 < notch_depth < depth):
        raise ValueError("notch must be smaller than the footprint")
    a, b = width, depth
    d, c = width - notch_width, depth - notch_depth
    profile = np.array([
        [0.0, 0.0], [a, 0.0], [a, c], [d, c], [d, b], [0.0, b]
    ]) - np.array([a / 2.0, b / 2.0])
    z0, z1 = -height / 2.0, height / 2.0
    bottom = np.column_stack([profile, np.full(6, z0)])
    top = np.column_stack([profile, np.full(6, z1)])
    verts = np.concatenate([bottom, top])
    lo = np.arange(6)
    hi = 6 + np.arange(6)
    faces: list = []
    # the profile is star-shaped from vertex 0, so a fan triangulates it
    for i in range(1, 5):
        faces.append((0, lo[i + 1], lo[i]))          # bottom, faces -z
        faces.append((6, hi[i], hi[i + 1]))          # top, faces +z
    _strip(lo, hi, faces)                            # side walls
    return SyntheticShape(
        "l-shape",
        {"width": width, "depth": depth, "height": height,
         "notch_width": notch_width, "notch_depth": notch_depth},
        verts, np.array(faces),
    )


SHAPE_BUILDERS = {
    "box": make_box,
    "bowl": make_bowl,
    "tube": make_tube,
    "l-shape": make_l_shape,
}
