"""File formats: binary tensors, trajectory files, meshes, block dumps.

Tensors are raw little-endian float32 behind a short ASCII header, large
enough for feature maps yet hexdump-debuggable.  Trajectory files are
structured text with an explicit axis-convention block so downstream
consumers can remap.  All writes go through a temp-file-then-rename so
partially written files never appear under the target name.
"""

from __future__ import annotations

import os
import tempfile
from typing import Iterable

import numpy as np

from .blocks import BlockGrid, BoundingBoxEstimate, grid_from_cells
from .coverage import CoverageReport
from .errors import MalformedFileError
from .planner import Trajectory

# Axis conventions stamped into every trajectory file so pose-conditioned
# consumers can remap into their own frames.
CONVENTION_LINES = (
    "up_axis = +Z",
    "azimuth_zero = input view direction",
    "azimuth_sense = counterclockwise in the XY plane seen from +Z",
    "elevation_sense = positive toward +Z",
    "angle_unit = degrees",
)

TENSOR_MAGIC = "ACTR-TENSOR v1"
TRAJECTORY_MAGIC = "ACTR-TRAJECTORY v1"
BLOCKS_MAGIC = "ACTR-BLOCKS v1"
COVERAGE_MAGIC = "ACTR-COVERAGE v1"

ANGLE_FMT = "%.6f"  # fixed print precision for all angles and lengths


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".actr-tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- tensors

def write_tensor(path: str, values: np.ndarray, meta: dict | None = None) -> None:
    """Write a float32 tensor; optional key/value sidecar at ``path.meta``."""
    arr = np.ascontiguousarray(values, dtype="<f4")
    header = (
        f"{TENSOR_MAGIC}\n"
        f"dtype f32\n"
        f"ndim {arr.ndim}\n"
        f"dims {' '.join(str(d) for d in arr.shape)}\n"
        f"data\n"
    ).encode("ascii")
    _atomic_write(path, header + arr.tobytes(order="C"))
    if meta is not None:
        lines = "".join(f"{k} = {v}\n" for k, v in meta.items())
        _atomic_write(path + ".meta", lines.encode("utf-8"))


def read_tensor(path: str, require_finite: bool = True) -> np.ndarray:
    """Read a tensor file back into a float32 array."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise MalformedFileError(f"{path}: cannot read ({exc})") from exc

    def fail(msg: str):
        raise MalformedFileError(f"{path}: {msg}")

    lines = []
    pos = 0
    for _ in range(4):
        end = blob.find(b"\n", pos)
        if end < 0:
            fail("truncated header")
        lines.append(blob[pos:end].decode("ascii", errors="replace"))
        pos = end + 1
    if lines[0] != TENSOR_MAGIC:
        fail(f"bad magic {lines[0]!r}")
    if lines[1] != "dtype f32":
        fail(f"unsupported dtype line {lines[1]!r}")
    if not lines[2].startswith("ndim "):
        fail("missing ndim")
    try:
        ndim = int(lines[2][5:])
        dims = tuple(int(tok) for tok in lines[3].split()[1:])
    except ValueError:
        fail("unparseable dimensions")
    if not lines[3].startswith("dims ") or len(dims) != ndim or any(d < 1 for d in dims):
        fail(f"bad dims {lines[3]!r} for ndim {ndim}")
    end = blob.find(b"\n", pos)
    if end < 0 or blob[pos:end] != b"data":
        fail("missing data marker")
    payload = blob[end + 1:]
    count = int(np.prod(dims))
    if len(payload) != 4 * count:
        fail(f"payload holds {len(payload)} bytes, expected {4 * count}")
    arr = np.frombuffer(payload, dtype="<f4").reshape(dims)
    if require_finite and not np.isfinite(arr).all():
        fail("tensor contains NaN or Inf values")
    return arr.copy()


def read_tensor_meta(path: str) -> dict:
    meta = {}
    meta_path = path + ".meta"
    if os.path.exists(meta_path):
        with open(meta_path, "r", encoding="utf-8") as fh:
            for line in fh:
                if "=" in line:
                    key, _, value = line.partition("=")
                    meta[key.strip()] = value.strip()
    return meta


# ------------------------------------------------------------ trajectories

def write_trajectory(path: str, traj: Trajectory, score: float | None = None) -> None:
    lines = [TRAJECTORY_MAGIC, "[convention]", *CONVENTION_LINES, "[orbit]"]
    lines.append(f"radius = {ANGLE_FMT % traj.radius}")
    lines.append(f"initial_elevation = {ANGLE_FMT % traj.elevation_deg[0]}")
    lines.append(f"frames = {traj.n_frames}")
    step = traj.azimuth_deg[1] - traj.azimuth_deg[0] if traj.n_frames > 1 else 0.0
    lines.append(f"azimuth_step = {ANGLE_FMT % step}")
    lines.append("[provenance]")
    lines.append(f"kind = {traj.kind}")
    if traj.steps is not None:
        lines.append(f"delta1 = {ANGLE_FMT % traj.steps[0]}")
        lines.append(f"delta2 = {ANGLE_FMT % traj.steps[1]}")
    if traj.seed is not None:
        lines.append(f"seed = {traj.seed}")
    if score is not None:
        lines.append(f"score = {score:.9f}")
    lines.append("[frames]")
    for idx, (az, el) in enumerate(zip(traj.azimuth_deg, traj.elevation_deg)):
        lines.append(f"{idx} {ANGLE_FMT % az} {ANGLE_FMT % el}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode("ascii"))


def _sectioned_lines(path: str, magic: str):
    try:
        with open(path, "r", encoding="ascii") as fh:
            raw = fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise MalformedFileError(f"{path}: cannot read ({exc})") from exc
    if not raw or raw[0] != magic:
        raise MalformedFileError(f"{path}: missing magic line {magic!r}")
    section = None
    for line in raw[1:]:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            continue
        yield section, line


def read_trajectory(path: str, validate: bool = True,
                    max_step_deg: float = 5.0) -> tuple[Trajectory, dict]:
    """Parse a trajectory file; returns the trajectory and its metadata.

    Validation enforces closure and the per-step elevation bound with a
    slack matching the printed precision; pass ``validate=False`` to load
    open trajectories anyway.
    """
    meta: dict = {}
    frames: list[tuple[int, float, float]] = []
    for section, line in _sectioned_lines(path, TRAJECTORY_MAGIC):
        if section == "frames":
            toks = line.split()
            if len(toks) != 3:
                raise MalformedFileError(f"{path}: bad frame line {line!r}")
            try:
                frames.append((int(toks[0]), float(toks[1]), float(toks[2])))
            except ValueError as exc:
                raise MalformedFileError(f"{path}: bad frame line {line!r}") from exc
        elif "=" in line:
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    if not frames:
        raise MalformedFileError(f"{path}: no frames")
    if [f[0] for f in frames] != list(range(len(frames))):
        raise MalformedFileError(f"{path}: frame indices must be 0..N-1 in order")
    az = np.array([f[1] for f in frames])
    el = np.array([f[2] for f in frames])
    kind = meta.get("kind", "candidate")
    steps = None
    if "delta1" in meta and "delta2" in meta:
        steps = (float(meta["delta1"]), float(meta["delta2"]))
    seed = int(meta["seed"]) if "seed" in meta else None
    try:
        radius = float(meta["radius"])
    except (KeyError, ValueError) as exc:
        raise MalformedFileError(f"{path}: missing or bad radius") from exc
    traj = Trajectory(az, el, radius, kind=kind, steps=steps, seed=seed)
    if validate:
        try:
            azimuth_step = float(meta["azimuth_step"]) if "azimuth_step" in meta else None
            traj.validate(max_step_deg=max_step_deg, step_slack=2e-6,
                          azimuth_step_deg=azimuth_step)
        except ValueError as exc:
            raise MalformedFileError(f"{path}: {exc}") from exc
    if "score" in meta:
        meta["score"] = float(meta["score"])
    return traj, meta


# ----------------------------------------------------------------- meshes

def write_mesh(path: str, vertices: np.ndarray, faces: np.ndarray) -> None:
    lines = [f"v {ANGLE_FMT % x} {ANGLE_FMT % y} {ANGLE_FMT % z}"
             for x, y, z in np.asarray(vertices, dtype=float)]
    lines += [f"f {a + 1} {b + 1} {c + 1}"
              for a, b, c in np.asarray(faces, dtype=int)]
    _atomic_write(path, ("\n".join(lines) + "\n").encode("ascii"))


def read_point_cloud(path: str) -> np.ndarray:
    """Vertices of a mesh file as an (n, 3) point cloud; faces optional."""
    points: list = []
    try:
        with open(path, "r", encoding="ascii") as fh:
            raw = fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise MalformedFileError(f"{path}: cannot read ({exc})") from exc
    for n, line in enumerate(raw, start=1):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("f "):
            continue
        toks = line.split()
        if toks[0] != "v" or len(toks) != 4:
            raise MalformedFileError(f"{path}:{n}: bad point line {line!r}")
        try:
            points.append([float(t) for t in toks[1:]])
        except ValueError as exc:
            raise MalformedFileError(f"{path}:{n}: bad point line {line!r}") from exc
    if not points:
        raise MalformedFileError(f"{path}: no points")
    return np.array(points)


def read_mesh(path: str) -> tuple[np.ndarray, np.ndarray]:
    vertices: list = []
    faces: list = []
    try:
        with open(path, "r", encoding="ascii") as fh:
            raw = fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise MalformedFileError(f"{path}: cannot read ({exc})") from exc
    for n, line in enumerate(raw, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        try:
            if toks[0] == "v" and len(toks) == 4:
                vertices.append([float(t) for t in toks[1:]])
            elif toks[0] == "f" and len(toks) == 4:
                faces.append([int(t) - 1 for t in toks[1:]])
            else:
                raise ValueError
        except ValueError:
            raise MalformedFileError(f"{path}:{n}: bad mesh line {line!r}") from None
    if not vertices or not faces:
        raise MalformedFileError(f"{path}: mesh needs vertices and faces")
    v = np.array(vertices)
    f = np.array(faces)
    if f.min() < 0 or f.max() >= len(v):
        raise MalformedFileError(f"{path}: face index out of range")
    return v, f


# -------------------------------------------------------------- block dumps

def write_blocks(path: str, grid: BlockGrid) -> None:
    bbox = grid.bbox
    lines = [
        BLOCKS_MAGIC,
        f"dims = {grid.dims[0]} {grid.dims[1]} {grid.dims[2]}",
        f"edges = {ANGLE_FMT % bbox.width} {ANGLE_FMT % bbox.height} {ANGLE_FMT % bbox.length}",
        f"center = {' '.join(ANGLE_FMT % c for c in bbox.center)}",
        f"input_elevation = {ANGLE_FMT % grid.input_elevation_deg}",
        "[cells]",
    ]
    for block in grid.blocks:
        i, j, k = block.index
        lines.append(f"{i} {j} {k} {block.weight:.9f}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode("ascii"))


def read_blocks(path: str) -> BlockGrid:
    meta: dict = {}
    cells: list = []
    for section, line in _sectioned_lines(path, BLOCKS_MAGIC):
        if section == "cells":
            toks = line.split()
            if len(toks) != 4:
                raise MalformedFileError(f"{path}: bad cell line {line!r}")
            try:
                cells.append(((int(toks[0]), int(toks[1]), int(toks[2])),
                              float(toks[3])))
            except ValueError as exc:
                raise MalformedFileError(f"{path}: bad cell line {line!r}") from exc
        elif "=" in line:
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    try:
        dims = tuple(int(t) for t in meta["dims"].split())
        edges = tuple(float(t) for t in meta["edges"].split())
        center = tuple(float(t) for t in meta.get("center", "0 0 0").split())
        elevation = float(meta.get("input_elevation", "0"))
        if len(dims) != 3 or len(edges) != 3 or len(center) != 3:
            raise ValueError
    except (KeyError, ValueError) as exc:
        raise MalformedFileError(f"{path}: bad or missing grid header") from exc
    bbox = BoundingBoxEstimate(width=edges[0], height=edges[1], length=edges[2],
                               center=center)
    try:
        return grid_from_cells(dims, bbox, cells, input_elevation_deg=elevation)
    except ValueError as exc:
        raise MalformedFileError(f"{path}: {exc}") from exc


# --------------------------------------------------------- reports, tables

def write_coverage_report(path: str, report: CoverageReport) -> None:
    lines = [
        COVERAGE_MAGIC,
        f"trajectory = {report.trajectory_tag}",
        f"samples = {report.n_samples}",
        f"covered_fraction = {report.covered_fraction:.6f}",
        f"per_pose_counts = {' '.join(str(c) for c in report.per_pose_counts)}",
    ]
    _atomic_write(path, ("\n".join(lines) + "\n").encode("ascii"))


def write_score_table(path: str, rows: Iterable[tuple[float, float, float]]) -> None:
    """Tab-separated (delta1, delta2, score) table for every candidate."""
    lines = ["# delta1\tdelta2\tscore"]
    for d1, d2, score in rows:
        lines.append(f"{d1:g}\t{d2:g}\t{score:.9f}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode("ascii"))
