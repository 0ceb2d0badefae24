# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Slab-method segment/box tests and per-pose visibility masks drive the orbit
search; Moller-Trumbore segment/triangle tests drive the coverage metric.
The ``*_sampled`` variants decide occlusion by dense midpoint sampling
instead of slab arithmetic and exist as independent cross-checks (and for
the backend benchmark).  ``actr._kernels._fallback`` mirrors every signature
in numpy; keep decision arithmetic in the two files identical.
"""

from libc.math cimport INFINITY, sqrt

import numpy as np

cdef double SLAB_EPS = 1e-9   # boundary grazes count as intersection
cdef double MT_EPS = 1e-9     # near-parallel determinant cutoff
cdef double T_MIN = 1e-9      # ignore hits essentially at the camera


cdef inline bint _seg_box(double ox, double oy, double oz,
                          double dx, double dy, double dz,
                          double bx0, double by0, double bz0,
                          double bx1, double by1, double bz1) noexcept nogil:
    cdef double tmin = -INFINITY
    cdef double tmax = INFINITY
    cdef double inv, a, b, tmp

    if dx == 0.0:
        if ox < bx0 or ox > bx1:
            return False
    else:
        inv = 1.0 / dx
        a = (bx0 - ox) * inv
        b = (bx1 - ox) * inv
        if a > b:
            tmp = a; a = b; b = tmp
        if a > tmin:
            tmin = a
        if b < tmax:
            tmax = b

    if dy == 0.0:
        if oy < by0 or oy > by1:
            return False
    else:
        inv = 1.0 / dy
        a = (by0 - oy) * inv
        b = (by1 - oy) * inv
        if a > b:
            tmp = a; a = b; b = tmp
        if a > tmin:
            tmin = a
        if b < tmax:
            tmax = b

    if dz == 0.0:
        if oz < bz0 or oz > bz1:
            return False
    else:
        inv = 1.0 / dz
        a = (bz0 - oz) * inv
        b = (bz1 - oz) * inv
        if a > b:
            tmp = a; a = b; b = tmp
        if a > tmin:
            tmin = a
        if b < tmax:
            tmax = b

    return tmin <= tmax + SLAB_EPS and tmax > 0.0 and tmin < 1.0


cdef inline bint _sampled_hit(double ox, double oy, double oz,
                              double dx, double dy, double dz,
                              double bx0, double by0, double bz0,
                              double bx1, double by1, double bz1,
                              Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t k
    cdef double s, px, py, pz
    for k in range(n):
        s = (k + 0.5) / n
        px = ox + s * dx
        if px < bx0 or px > bx1:
            continue
        py = oy + s * dy
        if py < by0 or py > by1:
            continue
        pz = oz + s * dz
        if pz < bz0 or pz > bz1:
            continue
        return True
    return False


def segment_box_hit(double[::1] origin, double[::1] target,
                    double[::1] bmin, double[::1] bmax):
    """Open segment origin->target versus one closed box (slab method)."""
    return bool(_seg_box(origin[0], origin[1], origin[2],
                         target[0] - origin[0],
                         target[1] - origin[1],
                         target[2] - origin[2],
                         bmin[0], bmin[1], bmin[2],
                         bmax[0], bmax[1], bmax[2]))


def sampled_segment_box_hit(double[::1] origin, double[::1] target,
                            double[::1] bmin, double[::1] bmax,
                            Py_ssize_t n_samples):
    """Dense-sampling counterpart of ``segment_box_hit`` (n midpoints)."""
    return bool(_sampled_hit(origin[0], origin[1], origin[2],
                             target[0] - origin[0],
                             target[1] - origin[1],
                             target[2] - origin[2],
                             bmin[0], bmin[1], bmin[2],
                             bmax[0], bmax[1], bmax[2],
                             n_samples))


def visible_mask(double[::1] cam, double[:, ::1] centers,
                 double[:, ::1] bmin, double[:, ::1] bmax,
                 double cos_limit):
    """Per-block visibility from a camera at ``cam`` looking at the origin.

    A block is visible iff the angle between the view axis and the ray to
    its center stays within acos(cos_limit) and no other block's box cuts
    the segment from camera to center.
    """
    cdef Py_ssize_t n = centers.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    if n == 0:
        return out.astype(bool)
    cdef unsigned char[::1] res = out
    cdef double cx = cam[0], cy = cam[1], cz = cam[2]
    cdef double cr = sqrt(cx * cx + cy * cy + cz * cz)
    cdef double fx = -cx / cr, fy = -cy / cr, fz = -cz / cr
    cdef Py_ssize_t i, j
    cdef double vx, vy, vz, vn
    cdef bint occluded
    with nogil:
        for i in range(n):
            vx = centers[i, 0] - cx
            vy = centers[i, 1] - cy
            vz = centers[i, 2] - cz
            vn = sqrt(vx * vx + vy * vy + vz * vz)
            if fx * vx + fy * vy + fz * vz < cos_limit * vn:
                continue
            occluded = False
            for j in range(n):
                if j == i:
                    continue
                if _seg_box(cx, cy, cz, vx, vy, vz,
                            bmin[j, 0], bmin[j, 1], bmin[j, 2],
                            bmax[j, 0], bmax[j, 1], bmax[j, 2]):
                    occluded = True
                    break
            if not occluded:
                res[i] = 1
    return out.astype(bool)


def visible_mask_sampled(double[::1] cam, double[:, ::1] centers,
                         double[:, ::1] bmin, double[:, ::1] bmax,
                         double cos_limit, Py_ssize_t n_samples):
    """``visible_mask`` with occlusion decided by dense midpoint sampling."""
    cdef Py_ssize_t n = centers.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    if n == 0:
        return out.astype(bool)
    cdef unsigned char[::1] res = out
    cdef double cx = cam[0], cy = cam[1], cz = cam[2]
    cdef double cr = sqrt(cx * cx + cy * cy + cz * cz)
    cdef double fx = -cx / cr, fy = -cy / cr, fz = -cz / cr
    cdef Py_ssize_t i, j
    cdef double vx, vy, vz, vn
    cdef bint occluded
    with nogil:
        for i in range(n):
            vx = centers[i, 0] - cx
            vy = centers[i, 1] - cy
            vz = centers[i, 2] - cz
            vn = sqrt(vx * vx + vy * vy + vz * vz)
            if fx * vx + fy * vy + fz * vz < cos_limit * vn:
                continue
            occluded = False
            for j in range(n):
                if j == i:
                    continue
                if _sampled_hit(cx, cy, cz, vx, vy, vz,
                                bmin[j, 0], bmin[j, 1], bmin[j, 2],
                                bmax[j, 0], bmax[j, 1], bmax[j, 2],
                                n_samples):
                    occluded = True
                    break
            if not occluded:
                res[i] = 1
    return out.astype(bool)


def blocked_by_triangles(double[::1] cam, double[:, ::1] points,
                         double[:, ::1] v0, double[:, ::1] e1,
                         double[:, ::1] e2, double offset):
    """Which segments cam->point are cut by a triangle before the endpoint.

    Triangles are given as a base vertex plus two edge vectors.  The target
    endpoint is pulled back by ``offset`` world units toward the camera so a
    point lying on the mesh does not occlude itself.
    """
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t m = v0.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    if n == 0 or m == 0:
        return out.astype(bool)
    cdef unsigned char[::1] res = out
    cdef double cx = cam[0], cy = cam[1], cz = cam[2]
    cdef Py_ssize_t i, j
    cdef double dx, dy, dz, length, tlim
    cdef double px, py, pz, det, inv, tx, ty, tz, u, qx, qy, qz, v, th
    with nogil:
        for i in range(n):
            dx = points[i, 0] - cx
            dy = points[i, 1] - cy
            dz = points[i, 2] - cz
            length = sqrt(dx * dx + dy * dy + dz * dz)
            if length == 0.0:
                continue
            tlim = 1.0 - offset / length
            for j in range(m):
                px = dy * e2[j, 2] - dz * e2[j, 1]
                py = dz * e2[j, 0] - dx * e2[j, 2]
                pz = dx * e2[j, 1] - dy * e2[j, 0]
                det = e1[j, 0] * px + e1[j, 1] * py + e1[j, 2] * pz
                if -MT_EPS < det < MT_EPS:
                    continue
                inv = 1.0 / det
                tx = cx - v0[j, 0]
                ty = cy - v0[j, 1]
                tz = cz - v0[j, 2]
                u = (tx * px + ty * py + tz * pz) * inv
                if u < 0.0 or u > 1.0:
                    continue
                qx = ty * e1[j, 2] - tz * e1[j, 1]
                qy = tz * e1[j, 0] - tx * e1[j, 2]
                qz = tx * e1[j, 1] - ty * e1[j, 0]
                v = (dx * qx + dy * qy + dz * qz) * inv
                if v < 0.0 or u + v > 1.0:
                    continue
                th = (e2[j, 0] * qx + e2[j, 1] * qy + e2[j, 2] * qz) * inv
                if T_MIN < th < tlim:
                    res[i] = 1
                    break
    return out.astype(bool)
