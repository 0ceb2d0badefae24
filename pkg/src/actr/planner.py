"""Closed-orbit candidate family, visibility scoring, and orbit selection.

A trajectory is N poses (default 21) on a fixed-radius look-at-origin
orbit.  Azimuth advances by a constant step (default 18 degrees, one full
revolution); the 20 inter-frame elevation increments split into four equal
segments.  A candidate applies increment d1 over segment one and d2 over
segment two; segments three and four negate d2 and d1, so every candidate
closes exactly.  With the default step set {-5..5} this yields the 11x11 =
121 candidate orbits searched by :func:`select_best`.

Scoring: a block is visible from a pose iff its center lies within the
camera's acceptance cone and no other block's box cuts the camera-to-center
segment.  A trajectory scores the sum over its poses of visible-block
weights, so a block seen from many poses counts once per pose.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .blocks import BlockGrid, BlockIndex
from .errors import ActrError
from .geometry import CameraModel, SphericalPose

N_FRAMES = 21
AZIMUTH_STEP_DEG = 18.0
DEFAULT_STEP_SET = tuple(range(-5, 6))
MAX_STEP_DEG = 5.0
SEGMENTS = 4
STEP_TOL = 1e-9  # float-rounding slack on the per-step bound


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Pose sequence plus how it was constructed.

    ``kind`` is one of candidate / static / random; ``steps`` carries the
    (d1, d2) per-step increments for candidate-family orbits.
    """

    azimuth_deg: np.ndarray
    elevation_deg: np.ndarray
    radius: float
    kind: str = "candidate"
    steps: tuple[float, float] | None = None
    seed: int | None = None

    def __post_init__(self):
        az = np.asarray(self.azimuth_deg, dtype=float)
        el = np.asarray(self.elevation_deg, dtype=float)
        if az.ndim != 1 or az.shape != el.shape or az.size < 1:
            raise ValueError("azimuth and elevation must be equal-length 1D arrays")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if el.min() < -90.0 or el.max() > 90.0:
            raise ValueError(
                "elevation leaves [-90, 90]; lower the initial elevation or the step set"
            )
        object.__setattr__(self, "azimuth_deg", az)
        object.__setattr__(self, "elevation_deg", el)

    @property
    def n_frames(self) -> int:
        return int(self.azimuth_deg.size)

    @cached_property
    def poses(self) -> tuple[SphericalPose, ...]:
        return tuple(
            SphericalPose(float(a), float(e), self.radius)
            for a, e in zip(self.azimuth_deg, self.elevation_deg)
        )

    def validate(self, max_step_deg: float = MAX_STEP_DEG,
                 azimuth_step_deg: float | None = None,
                 step_slack: float = STEP_TOL) -> None:
        """Raise if the closed-orbit invariants do not hold."""
        el = self.elevation_deg
        if el[0] != el[-1]:
            raise ValueError("trajectory is not closed: first and last elevation differ")
        dsteps = np.abs(np.diff(el))
        if dsteps.size and float(dsteps.max()) > max_step_deg + step_slack:
            raise ValueError(
                f"per-step elevation change {dsteps.max():.9f} exceeds {max_step_deg}"
            )
        az = self.azimuth_deg
        if azimuth_step_deg is not None and self.n_frames > 1:
            expected = azimuth_step_deg * np.arange(self.n_frames)
            if not np.allclose(az, expected, atol=1e-6):
                raise ValueError("azimuths must advance by a constant step from 0")


@dataclass(frozen=True)
class CandidateSet:
    trajectories: tuple[Trajectory, ...]

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self):
        return iter(self.trajectories)


@dataclass(frozen=True, eq=False)
class ScoredTrajectory:
    trajectory: Trajectory
    score: float
    visibility: tuple[tuple[BlockIndex, ...], ...]  # per pose


def _segment_length(n_frames: int) -> int:
    if n_frames < 2 or (n_frames - 1) % SEGMENTS != 0:
        raise ValueError(
            f"frame count must be 1 + {SEGMENTS}*k for equal segments, got {n_frames}"
        )
    return (n_frames - 1) // SEGMENTS


def _step_counts(n_frames: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame net counts of d1 and d2 steps.

    Closure comes for free: both counts are exactly zero at the last frame,
    so the elevation profile e0 + d1*c1 + d2*c2 ends exactly at e0 even in
    floats (no running sum is involved).
    """
    s = _segment_length(n_frames)
    t = np.arange(n_frames)
    c1 = np.minimum(t, s) - np.maximum(t - 3 * s, 0)
    c2 = np.minimum(np.maximum(t - s, 0), s) - np.minimum(np.maximum(t - 2 * s, 0), s)
    return c1.astype(float), c2.astype(float)


def _candidate_elevations(initial: float, d1: float, d2: float, n_frames: int) -> np.ndarray:
    """Elevation profile for steps (d1, d2)."""
    c1, c2 = _step_counts(n_frames)
    return initial + d1 * c1 + d2 * c2


def _azimuths(n_frames: int, azimuth_step: float) -> np.ndarray:
    return azimuth_step * np.arange(n_frames, dtype=float)


def enumerate_candidates(initial_elevation: float, radius: float,
                         n_frames: int = N_FRAMES,
                         azimuth_step: float = AZIMUTH_STEP_DEG,
                         step_set: tuple[float, ...] = DEFAULT_STEP_SET) -> CandidateSet:
    """All (d1, d2) orbits over the step set; |step_set|^2 trajectories."""
    az = _azimuths(n_frames, azimuth_step)
    c1, c2 = _step_counts(n_frames)
    d1s = np.repeat(np.asarray(step_set, dtype=float), len(step_set))
    d2s = np.tile(np.asarray(step_set, dtype=float), len(step_set))
    profiles = initial_elevation + d1s[:, None] * c1 + d2s[:, None] * c2
    out = []
    for row, d1, d2 in zip(profiles, d1s, d2s):
        try:
            traj = Trajectory(az, row, radius, kind="candidate",
                              steps=(float(d1), float(d2)))
        except ValueError as exc:
            raise ValueError(f"candidate ({d1:g}, {d2:g}): {exc}") from exc
        out.append(traj)
    return CandidateSet(trajectories=tuple(out))


def static_trajectory(initial_elevation: float, radius: float,
                      n_frames: int = N_FRAMES,
                      azimuth_step: float = AZIMUTH_STEP_DEG) -> Trajectory:
    """Fixed-elevation orbit, the generic baseline (equals candidate (0, 0))."""
    _segment_length(n_frames)
    return Trajectory(
        _azimuths(n_frames, azimuth_step),
        np.full(n_frames, float(initial_elevation)),
        radius,
        kind="static",
        steps=(0.0, 0.0),
    )


def random_trajectory(initial_elevation: float, radius: float, seed: int,
                      n_frames: int = N_FRAMES,
                      azimuth_step: float = AZIMUTH_STEP_DEG) -> Trajectory:
    """Closed orbit with uniformly random elevation increments.

    Increments for the first two segments are drawn from [-5, 5]; the last
    two segments mirror the first half (elevation[t] = elevation[N-1-t]),
    which negates the drawn increments in reverse order and guarantees
    exact closure.
    """
    s = _segment_length(n_frames)
    rng = np.random.default_rng(seed)
    increments = rng.uniform(-MAX_STEP_DEG, MAX_STEP_DEG, size=2 * s)
    el = np.empty(n_frames)
    el[0] = initial_elevation
    for t in range(1, 2 * s + 1):
        el[t] = el[t - 1] + increments[t - 1]
    for t in range(2 * s + 1, n_frames):
        el[t] = el[n_frames - 1 - t]
    return Trajectory(_azimuths(n_frames, azimuth_step), el, radius,
                      kind="random", seed=seed)


def _cos_limit(camera: CameraModel, fov_mode: str) -> float:
    return math.cos(math.radians(camera.fov_limit_deg(fov_mode)))


def visible_set(pose: SphericalPose, grid: BlockGrid, camera: CameraModel,
                fov_mode: str = "half") -> frozenset[BlockIndex]:
    """Indices of blocks visible from ``pose``: inside the view cone and
    with no other block cutting the camera-to-center segment."""
    if len(grid) == 0:
        return frozenset()
    cam = np.ascontiguousarray(grid.camera_position(pose))
    mask = _kernels.visible_mask(cam, grid.centers, grid.box_min, grid.box_max,
                                 _cos_limit(camera, fov_mode))
    indices = grid.indices
    return frozenset(indices[i] for i in np.flatnonzero(mask))


class _PoseEvaluator:
    """Caches per-pose visibility across the candidates of one search.

    Frames at azimuth 0 and 360 share a key (same camera position), as do
    equal elevations reached by different candidates.
    """

    def __init__(self, grid: BlockGrid, camera: CameraModel, radius: float,
                 fov_mode: str):
        self._grid = grid
        self._cos_limit = _cos_limit(camera, fov_mode)
        self._radius = radius
        self._cache: dict[tuple[float, float], tuple[tuple[BlockIndex, ...], float, np.ndarray]] = {}

    @staticmethod
    def key(azimuth: float, elevation: float) -> tuple[float, float]:
        return (azimuth % 360.0, elevation)

    def evaluate(self, key: tuple[float, float]) -> None:
        grid = self._grid
        if len(grid) == 0:
            self._cache[key] = ((), 0.0, np.zeros(0, dtype=np.intp))
            return
        pose = SphericalPose(key[0], key[1], self._radius)
        cam = np.ascontiguousarray(grid.camera_position(pose))
        mask = _kernels.visible_mask(cam, grid.centers, grid.box_min,
                                     grid.box_max, self._cos_limit)
        where = np.flatnonzero(mask)
        indices = tuple(grid.indices[i] for i in where)
        self._cache[key] = (indices, float(grid.weights[where].sum()), where)

    def ensure(self, keys, threads: int) -> None:
        # Each worker writes a distinct key, so plain dict stores suffice.
        missing = [k for k in keys if k not in self._cache]
        if threads > 1 and len(missing) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(self.evaluate, missing))
        else:
            for k in missing:
                self.evaluate(k)

    def lookup(self, key):
        return self._cache[key]


def resolve_thread_count(value: str | int | None = None) -> int:
    """Thread cap from ACTR_THREADS (0 or unset = auto)."""
    if value is None:
        value = os.environ.get("ACTR_THREADS", "0")
    try:
        n = int(value)
    except (TypeError, ValueError):
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, min(n, 32))


def _score_from_cache(traj: Trajectory, evaluator: _PoseEvaluator,
                      grid: BlockGrid, mode: str) -> ScoredTrajectory:
    keys = [evaluator.key(a, e) for a, e in zip(traj.azimuth_deg, traj.elevation_deg)]
    entries = [evaluator.lookup(k) for k in keys]
    visibility = tuple(entry[0] for entry in entries)
    if mode == "per-frame":
        score = float(sum(entry[1] for entry in entries))
    elif mode == "unique":
        seen: set[int] = set()
        for entry in entries:
            seen.update(entry[2].tolist())
        score = float(grid.weights[sorted(seen)].sum()) if seen else 0.0
    else:
        raise ValueError(f"unknown score mode {mode!r}")
    return ScoredTrajectory(trajectory=traj, score=score, visibility=visibility)


def score_trajectory(traj: Trajectory, grid: BlockGrid, camera: CameraModel,
                     fov_mode: str = "half", mode: str = "per-frame") -> ScoredTrajectory:
    """Cumulative visible weight of one trajectory.

    ``per-frame`` (default) counts a block once per pose that sees it;
    ``unique`` counts each block at most once over the whole orbit.
    """
    evaluator = _PoseEvaluator(grid, camera, traj.radius, fov_mode)
    keys = {evaluator.key(a, e) for a, e in zip(traj.azimuth_deg, traj.elevation_deg)}
    evaluator.ensure(keys, threads=1)
    return _score_from_cache(traj, evaluator, grid, mode)


def score_candidates(candidates: CandidateSet, grid: BlockGrid,
                     camera: CameraModel, fov_mode: str = "half",
                     mode: str = "per-frame",
                     threads: int | None = None) -> list[ScoredTrajectory]:
    """Score every candidate, sharing per-pose visibility across them."""
    trajectories = list(candidates)
    if not trajectories:
        return []
    radius = trajectories[0].radius
    evaluator = _PoseEvaluator(grid, camera, radius, fov_mode)
    keys = {
        evaluator.key(a, e)
        for traj in trajectories
        for a, e in zip(traj.azimuth_deg, traj.elevation_deg)
    }
    evaluator.ensure(sorted(keys), threads=resolve_thread_count(threads))
    return [_score_from_cache(t, evaluator, grid, mode) for t in trajectories]


def _tie_break_key(scored: ScoredTrajectory):
    d1, d2 = scored.trajectory.steps if scored.trajectory.steps else (math.inf, math.inf)
    return (-scored.score, abs(d1) + abs(d2), d1, d2)


def select_best(candidates: CandidateSet, grid: BlockGrid, camera: CameraModel,
                fov_mode: str = "half", mode: str = "per-frame",
                threads: int | None = None) -> ScoredTrajectory:
    """Maximum-score candidate; ties prefer the flattest orbit
    (smallest |d1|+|d2|, then d1, then d2)."""
    if len(candidates) == 0:
        raise ActrError("candidate set is empty")
    scored = score_candidates(candidates, grid, camera, fov_mode, mode, threads)
    return min(scored, key=_tie_break_key)
