"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot paths (per-pose block visibility and segment/triangle
occlusion casting) on planner-scale workloads, runs both backends, and
prints a speedup table.  Usage:

    python benchmarks/bench_kernels.py [--poses 200] [--samples 4000]
"""

import argparse
import math
import time

import numpy as np

from actr._kernels import _fallback

try:
    from actr._kernels import _core
except ImportError:
    _core = None

from actr.blocks import BoundingBoxEstimate
from actr.geometry import CameraModel, SphericalPose
from actr.planner import _cos_limit
from actr.shapes import make_bowl


def build_grid_arrays(dims=(4, 7, 7), edges=(1.0, 1.0, 1.0)):
    m, h, w = dims
    bbox = BoundingBoxEstimate(*edges)
    lo = bbox.min_corner
    cell = np.array([edges[0] / w, edges[1] / h, edges[2] / m])
    mins = []
    for i in range(m):
        for j in range(h):
            for k in range(w):
                mins.append(lo + cell * np.array([k, j, i]))
    box_min = np.ascontiguousarray(mins)
    box_max = np.ascontiguousarray(box_min + cell)
    centers = np.ascontiguousarray(box_min + 0.5 * cell)
    return centers, box_min, box_max


def bench(fn, repeats=3):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_visibility(impl, poses, centers, box_min, box_max, cos_limit):
    def run():
        for cam in poses:
            impl.visible_mask(cam, centers, box_min, box_max, cos_limit)
    return bench(run)


def bench_triangles(impl, cams, points, v0, e1, e2):
    def run():
        for cam in cams:
            impl.blocked_by_triangles(cam, points, v0, e1, e2, 1e-6)
    return bench(run)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--poses", type=int, default=200)
    parser.add_argument("--samples", type=int, default=4000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    centers, box_min, box_max = build_grid_arrays()
    cos_limit = _cos_limit(CameraModel(), "half")
    poses = [
        np.ascontiguousarray(SphericalPose(float(az), float(el), 3.5).position())
        for az, el in zip(rng.uniform(0, 360, args.poses),
                          rng.uniform(-50, 50, args.poses))
    ]

    bowl = make_bowl(segments=48)
    tri = bowl.vertices[bowl.faces]
    v0 = np.ascontiguousarray(tri[:, 0])
    e1 = np.ascontiguousarray(tri[:, 1] - tri[:, 0])
    e2 = np.ascontiguousarray(tri[:, 2] - tri[:, 0])
    points = np.ascontiguousarray(rng.uniform(-0.6, 0.6, (args.samples, 3)))
    cams = poses[: max(1, args.poses // 10)]

    rows = []
    for name, n_blocks in (("visible_mask", len(centers)),):
        fb = bench_visibility(_fallback, poses, centers, box_min, box_max, cos_limit)
        rows.append((f"{name} ({args.poses} poses x {n_blocks} blocks)", fb,
                     bench_visibility(_core, poses, centers, box_min, box_max,
                                      cos_limit) if _core else None))
    fb = bench_triangles(_fallback, cams, points, v0, e1, e2)
    rows.append((f"blocked_by_triangles ({len(cams)} poses x {args.samples} "
                 f"points x {len(v0)} tris)", fb,
                 bench_triangles(_core, cams, points, v0, e1, e2) if _core else None))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>9}  {'compiled':>9}  {'speedup':>8}")
    for name, fb, cc in rows:
        if cc is None:
            print(f"{name:<{width}}  {fb * 1e3:8.1f}ms  {'n/a':>9}  {'n/a':>8}")
        else:
            print(f"{name:<{width}}  {fb * 1e3:8.1f}ms  {cc * 1e3:8.1f}ms  "
                  f"{fb / cc:7.1f}x")
    if _core is None:
        print("compiled core not built; showing fallback only")


if __name__ == "__main__":
    main()
