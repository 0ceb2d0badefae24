"""Pure-numpy kernels, signature-compatible with ``actr._kernels._core``.

Selected at import when the compiled extension is unavailable (or when
ACTR_FORCE_FALLBACK is set).  Decision arithmetic mirrors the compiled
code so both backends return identical masks away from exact float ties.
"""

import math

import numpy as np

SLAB_EPS = 1e-9
MT_EPS = 1e-9
T_MIN = 1e-9


def _slab_hits(origin, d, bmin, bmax):
    """Slab intervals of segments origin->origin+d against boxes.

    origin: (3,), d: (n, 3), bmin/bmax: (m, 3).  Returns (n, m) bools.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (bmin[None, :, :] - origin) / d[:, None, :]
        b = (bmax[None, :, :] - origin) / d[:, None, :]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    parallel = (d == 0.0)[:, None, :]
    inside = ((origin >= bmin) & (origin <= bmax))[None, :, :]
    lo = np.where(parallel, np.where(inside, -np.inf, np.inf), lo)
    hi = np.where(parallel, np.where(inside, np.inf, -np.inf), hi)
    tmin = lo.max(axis=2)
    tmax = hi.min(axis=2)
    return (tmin <= tmax + SLAB_EPS) & (tmax > 0.0) & (tmin < 1.0)


def segment_box_hit(origin, target, bmin, bmax):
    origin = np.asarray(origin, dtype=float)
    d = np.asarray(target, dtype=float) - origin
    hits = _slab_hits(
        origin,
        d[None, :],
        np.asarray(bmin, dtype=float)[None, :],
        np.asarray(bmax, dtype=float)[None, :],
    )
    return bool(hits[0, 0])


def sampled_segment_box_hit(origin, target, bmin, bmax, n_samples):
    origin = np.asarray(origin, dtype=float)
    d = np.asarray(target, dtype=float) - origin
    s = (np.arange(n_samples) + 0.5) / n_samples
    pts = origin + s[:, None] * d
    inside = np.all((pts >= np.asarray(bmin)) & (pts <= np.asarray(bmax)), axis=1)
    return bool(inside.any())


def _fov_ok(cam, centers, cos_limit):
    cr = math.sqrt(cam[0] ** 2 + cam[1] ** 2 + cam[2] ** 2)
    f = -cam / cr
    v = centers - cam
    vn = np.sqrt(v[:, 0] ** 2 + v[:, 1] ** 2 + v[:, 2] ** 2)
    dot = v[:, 0] * f[0] + v[:, 1] * f[1] + v[:, 2] * f[2]
    return dot >= cos_limit * vn, v


def visible_mask(cam, centers, bmin, bmax, cos_limit):
    cam = np.asarray(cam, dtype=float)
    centers = np.asarray(centers, dtype=float)
    n = centers.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    fov, v = _fov_ok(cam, centers, cos_limit)
    hit = _slab_hits(cam, v, np.asarray(bmin, dtype=float), np.asarray(bmax, dtype=float))
    np.fill_diagonal(hit, False)
    return fov & ~hit.any(axis=1)


def visible_mask_sampled(cam, centers, bmin, bmax, cos_limit, n_samples):
    cam = np.asarray(cam, dtype=float)
    centers = np.asarray(centers, dtype=float)
    bmin = np.asarray(bmin, dtype=float)
    bmax = np.asarray(bmax, dtype=float)
    n = centers.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    fov, v = _fov_ok(cam, centers, cos_limit)
    s = (np.arange(n_samples) + 0.5) / n_samples
    out = np.zeros(n, dtype=bool)
    for i in range(n):
        if not fov[i]:
            continue
        pts = cam + s[:, None] * v[i]  # (n_samples, 3)
        occluded = False
        for j in range(n):
            if j == i:
                continue
            inside = np.all((pts >= bmin[j]) & (pts <= bmax[j]), axis=1)
            if inside.any():
                occluded = True
                break
        out[i] = not occluded
    return out


def blocked_by_triangles(cam, points, v0, e1, e2, offset, chunk=512):
    cam = np.asarray(cam, dtype=float)
    points = np.asarray(points, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    n = points.shape[0]
    out = np.zeros(n, dtype=bool)
    if n == 0 or v0.shape[0] == 0:
        return out
    tvec = cam - v0  # (m, 3), shared by every segment
    for lo in range(0, n, chunk):
        d = points[lo : lo + chunk] - cam  # (c, 3)
        length = np.linalg.norm(d, axis=1)
        tlim = 1.0 - offset / np.where(length == 0.0, np.inf, length)
        pvec = np.cross(d[:, None, :], e2[None, :, :])  # (c, m, 3)
        det = np.einsum("mk,cmk->cm", e1, pvec)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / det
            u = np.einsum("mk,cmk->cm", tvec, pvec) * inv
            qvec = np.cross(tvec[None, :, :], e1[None, :, :])  # (1, m, 3)
            vpar = np.einsum("ck,cmk->cm", d, np.broadcast_to(qvec, pvec.shape)) * inv
            t = np.einsum("mk,cmk->cm", e2, np.broadcast_to(qvec, pvec.shape)) * inv
        hit = (
            (np.abs(det) >= MT_EPS)
            & (u >= 0.0)
            & (u <= 1.0)
            & (vpar >= 0.0)
            & (u + vpar <= 1.0)
            & (t > T_MIN)
            & (t < tlim[:, None])
        )
        out[lo : lo + chunk] = hit.any(axis=1)
    return out
