"""Command-line pipeline: plan / baseline / coverage / score / validate.

Exit codes are a stable scripting contract: 0 success, 2 malformed input,
3 shape mismatch, 4 empty mask or block grid.  ACTR_THREADS caps internal
parallelism (0 or unset = auto).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import formats
from .blocks import BoundingBoxEstimate, build_block_grid
from .coverage import coverage as run_coverage
from .coverage import sample_surface
from .diffmap import crop_to_mask, difference_map
from .errors import (
    ActrError,
    EmptyGridError,
    EmptyMaskError,
    MalformedFileError,
    ShapeMismatchError,
)
from .geometry import CameraModel
from .planner import (
    AZIMUTH_STEP_DEG,
    N_FRAMES,
    enumerate_candidates,
    random_trajectory,
    score_candidates,
    score_trajectory,
    select_best,
    static_trajectory,
)
from .shapes import SyntheticShape

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_SHAPE = 3
EXIT_EMPTY = 4


def downsample_any(mask: np.ndarray, shape: tuple[int, int],
                   name: str = "mask") -> np.ndarray:
    """Any-covered downsampling: a grid cell is true when any of the pixels
    mapping onto it is true.  Equal resolutions pass through."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ShapeMismatchError(f"{name} must be 2D, got shape {mask.shape}")
    big_h, big_w = mask.shape
    h, w = shape
    if (big_h, big_w) == (h, w):
        return mask.astype(bool)
    if big_h < h or big_w < w:
        raise ShapeMismatchError(
            f"{name} resolution {mask.shape} is below the grid resolution {shape}"
        )
    rows = (np.arange(big_h) * h) // big_h
    cols = (np.arange(big_w) * w) // big_w
    out = np.zeros(shape, dtype=bool)
    np.logical_or.at(out, (rows[:, None], cols[None, :]), mask.astype(bool))
    return out


def _parse_bbox(text: str) -> BoundingBoxEstimate:
    try:
        w, h, l = (float(tok) for tok in text.split(","))
    except ValueError as exc:
        raise MalformedFileError(
            f"--bbox expects three comma-separated edge lengths, got {text!r}"
        ) from exc
    return BoundingBoxEstimate(width=w, height=h, length=l)


def _load_features(path: str, expected_shape=None) -> np.ndarray:
    arr = formats.read_tensor(path)
    if arr.ndim != 3:
        raise ShapeMismatchError(f"{path}: feature tensors must be 3D, got {arr.shape}")
    if expected_shape is not None and arr.shape != expected_shape:
        raise ShapeMismatchError(
            f"{path}: shape {arr.shape} does not match input features {expected_shape}"
        )
    return np.asarray(arr, dtype=float)


def cmd_plan(args) -> int:
    feats = _load_features(args.input_features)
    slices = [_load_features(p, feats.shape) for p in args.slice_features]
    grid_hw = feats.shape[1:]

    mask_raw = formats.read_tensor(args.mask)
    if mask_raw.ndim != 2:
        raise ShapeMismatchError(f"{args.mask}: mask must be 2D, got {mask_raw.shape}")
    mask = downsample_any(mask_raw > 0.5, grid_hw, name=args.mask)

    occ_raw = formats.read_tensor(args.occupancy)
    if occ_raw.ndim != 3 or occ_raw.shape[0] != len(slices):
        raise ShapeMismatchError(
            f"{args.occupancy}: occupancy must be ({len(slices)}, H, W), got {occ_raw.shape}"
        )
    occupancy = np.stack(
        [downsample_any(s > 0.5, grid_hw, name=args.occupancy) for s in occ_raw]
    )

    diffs = [crop_to_mask(difference_map(feats, s, mode=args.diff_mode), mask)
             for s in slices]
    r0, c0 = diffs[0].crop_offset
    hh, ww = diffs[0].values.shape
    occ_crop = occupancy[:, r0 : r0 + hh, c0 : c0 + ww]

    grid = build_block_grid(diffs, occ_crop, _parse_bbox(args.bbox),
                            input_elevation_deg=args.elevation)
    if len(grid) == 0:
        raise EmptyGridError("no blocks retained: every occupancy cell is empty")

    camera = CameraModel(fov_deg=args.fov)
    candidates = enumerate_candidates(args.elevation, args.radius,
                                      n_frames=args.frames,
                                      azimuth_step=args.azimuth_step)
    scored = score_candidates(candidates, grid, camera,
                              fov_mode=args.fov_check, mode=args.score_mode)
    best = select_best(candidates, grid, camera,
                       fov_mode=args.fov_check, mode=args.score_mode)
    formats.write_trajectory(args.out, best.trajectory, score=best.score)
    rows = sorted(
        (s.trajectory.steps[0], s.trajectory.steps[1], s.score) for s in scored
    )
    formats.write_score_table(args.scores_out or args.out + ".scores", rows)
    if args.blocks_debug_dump:
        formats.write_blocks(args.blocks_debug_dump, grid)
    d1, d2 = best.trajectory.steps
    print(f"selected orbit: delta1={d1:g} delta2={d2:g} score={best.score:.9f} "
          f"blocks={len(grid)} -> {args.out}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    if args.kind == "static":
        traj = static_trajectory(args.elevation, args.radius,
                                 n_frames=args.frames,
                                 azimuth_step=args.azimuth_step)
    else:
        traj = random_trajectory(args.elevation, args.radius, args.seed,
                                 n_frames=args.frames,
                                 azimuth_step=args.azimuth_step)
    formats.write_trajectory(args.out, traj)
    print(f"{args.kind} orbit with {traj.n_frames} frames -> {args.out}")
    return EXIT_OK


_TAGS = {"static": "static", "random": "random", "candidate": "adaptive"}


def cmd_coverage(args) -> int:
    vertices, faces = formats.read_mesh(args.mesh)
    try:
        traj, _ = formats.read_trajectory(args.trajectory)
    except MalformedFileError:
        if not args.allow_open:
            raise
        traj, _ = formats.read_trajectory(args.trajectory, validate=False)
        print(f"warning: {args.trajectory} failed validation, continuing "
              f"(--allow-open)", file=sys.stderr)
    shape = SyntheticShape("mesh", {"source": args.mesh}, vertices, faces)
    samples = sample_surface(shape, args.samples, args.seed)
    report = run_coverage(traj, samples, CameraModel(fov_deg=args.fov),
                          fov_mode=args.fov_check)
    report = type(report)(
        trajectory_tag=_TAGS.get(report.trajectory_tag, report.trajectory_tag),
        covered_fraction=report.covered_fraction,
        per_pose_counts=report.per_pose_counts,
        n_samples=report.n_samples,
    )
    if args.out:
        formats.write_coverage_report(args.out, report)
    print(f"coverage = {report.covered_fraction:.6f} "
          f"({report.covered}/{report.n_samples} samples)")
    return EXIT_OK


def cmd_score(args) -> int:
    grid = formats.read_blocks(args.blocks)
    traj, meta = formats.read_trajectory(args.trajectory,
                                         validate=not args.allow_open)
    camera = CameraModel(fov_deg=args.fov)
    scored = score_trajectory(traj, grid, camera,
                              fov_mode=args.fov_check, mode=args.score_mode)
    print(f"score = {scored.score:.9f}")
    if "score" in meta:
        recorded = float(meta["score"])
        print(f"provenance_score = {recorded:.9f}")
        if args.check and abs(recorded - scored.score) > 1e-6:
            print("score mismatch against provenance", file=sys.stderr)
            return 1
    return EXIT_OK


def cmd_validate(args) -> int:
    for path in args.paths:
        with open(path, "rb") as fh:
            head = fh.readline().strip()
        if head == formats.TENSOR_MAGIC.encode():
            arr = formats.read_tensor(path)
            print(f"OK: {path} tensor dims={'x'.join(map(str, arr.shape))}")
        elif head == formats.TRAJECTORY_MAGIC.encode():
            traj, _ = formats.read_trajectory(path)
            print(f"OK: {path} trajectory frames={traj.n_frames} closed")
        elif head == formats.BLOCKS_MAGIC.encode():
            grid = formats.read_blocks(path)
            print(f"OK: {path} blocks n={len(grid)} dims={grid.dims}")
        elif head[:2] in (b"v ", b"f ", b"# "):
            vertices, faces = formats.read_mesh(path)
            print(f"OK: {path} mesh v={len(vertices)} f={len(faces)}")
        else:
            raise MalformedFileError(f"{path}: unrecognized file type")
    return EXIT_OK


def _add_orbit_args(p, with_elevation=True):
    if with_elevation:
        p.add_argument("--elevation", type=float, default=0.0,
                       help="input-view elevation in degrees")
    p.add_argument("--radius", type=float, default=2.0,
                   help="orbit radius in world units")
    p.add_argument("--frames", type=int, default=N_FRAMES)
    p.add_argument("--azimuth-step", type=float, default=AZIMUTH_STEP_DEG)


def _add_camera_args(p):
    p.add_argument("--fov", type=float, default=33.8,
                   help="full field-of-view angle in degrees")
    p.add_argument("--fov-check", choices=("half", "full"), default="half")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actr",
        description="Plan closed camera orbits that maximize weighted "
                    "visibility of occluded object regions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="run the full planning pipeline")
    p.add_argument("--input-features", required=True)
    p.add_argument("--slice-features", action="append", required=True,
                   help="repeat once per slice, front to rear")
    p.add_argument("--mask", required=True)
    p.add_argument("--occupancy", required=True)
    p.add_argument("--bbox", required=True, metavar="W,H,L")
    _add_orbit_args(p)
    _add_camera_args(p)
    p.add_argument("--diff-mode", choices=("difference", "raw-cosine"),
                   default="difference")
    p.add_argument("--score-mode", choices=("per-frame", "unique"),
                   default="per-frame")
    p.add_argument("--out", required=True)
    p.add_argument("--scores-out", default=None,
                   help="candidate score table (default: OUT.scores)")
    p.add_argument("--blocks-debug-dump", default=None)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("baseline", help="write a static or random orbit")
    p.add_argument("--kind", choices=("static", "random"), required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_orbit_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("coverage", help="surface coverage of a trajectory")
    p.add_argument("--mesh", required=True)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    _add_camera_args(p)
    p.add_argument("--allow-open", action="store_true",
                   help="accept trajectories that fail validation")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("score", help="rescore a trajectory against a block dump")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--blocks", "--blocks-debug-dump", dest="blocks", required=True,
                   help="block dump written by plan --blocks-debug-dump")
    _add_camera_args(p)
    p.add_argument("--score-mode", choices=("per-frame", "unique"),
                   default="per-frame")
    p.add_argument("--allow-open", action="store_true")
    p.add_argument("--check", action="store_true",
                   help="fail when the provenance score disagrees")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("validate", help="check files against their formats")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MalformedFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ShapeMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (EmptyMaskError, EmptyGridError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (ActrError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
