# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_kernels_py``."""
import numpy as np
from libc.math cimport sqrt, acos, atan2, floor, cos, sin, INFINITY, M_PI

cdef double TWO_PI = 2.0 * M_PI


def pairwise_sum(values):
    cdef double[::1] x = np.array(values, dtype=np.float64).ravel()
    cdef Py_ssize_t m = x.shape[0]
    if m == 0:
        return 0.0
    cdef Py_ssize_t size = 1
    while size < m:
        size <<= 1
    cdef double[::1] buf = np.zeros(size)
    cdef Py_ssize_t i, width
    for i in range(m):
        buf[i] = x[i]
    width = size
    while width > 1:
        width >>= 1
        for i in range(width):
            buf[i] = buf[2 * i] + buf[2 * i + 1]
    return buf[0]


def ray_ball_exit_min(rays, centers, double radius):
    cdef double[:, ::1] w = np.ascontiguousarray(rays, dtype=np.float64)
    cdef double[:, ::1] z = np.ascontiguousarray(centers, dtype=np.float64)
    cdef Py_ssize_t m = w.shape[0], k = z.shape[0], n = w.shape[1]
    cdef double[::1] c = np.empty(k)
    cdef double[::1] out = np.empty(m)
    cdef Py_ssize_t i, j, a
    cdef double b, best, e, disc
    for j in range(k):
        b = 0.0
        for a in range(n):
            b += z[j, a] * z[j, a]
        c[j] = b - radius * radius
    for i in range(m):
        best = INFINITY
        for j in range(k):
            if c[j] >= 0.0:
                best = 0.0
                break
            b = 0.0
            for a in range(n):
                b += w[i, a] * z[j, a]
            disc = b * b - c[j]
            if disc < 0.0:
                disc = 0.0
            e = b + sqrt(disc)
            if e < best:
                best = e
        out[i] = best
    return np.asarray(out)


cdef inline double _wrap(double x):
    return x - TWO_PI * floor((x + M_PI) / TWO_PI)


def family_arcs_2d(centers, thetas, double radius):
    cdef double[:, ::1] z = np.ascontiguousarray(centers, dtype=np.float64)
    cdef double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef Py_ssize_t m = z.shape[0]
    cdef double[::1] lo = np.empty(m)
    cdef double[::1] hi = np.empty(m)
    cdef Py_ssize_t j, k
    cdef double dx, dy, dist, half, rel, low, high, two_r = 2.0 * radius
    for j in range(m):
        low = -M_PI
        high = M_PI
        for k in range(m):
            dx = z[k, 0] - z[j, 0]
            dy = z[k, 1] - z[j, 1]
            dist = sqrt(dx * dx + dy * dy)
            if dist == 0.0:
                continue
            if dist >= two_r:
                low = INFINITY
                high = -INFINITY
                break
            half = acos(dist / two_r)
            rel = _wrap(atan2(dy, dx) - th[j])
            if rel - half > low:
                low = rel - half
            if rel + half < high:
                high = rel + half
        lo[j] = low
        hi[j] = high
    return np.asarray(lo), np.asarray(hi)


def family_support_2d(psi, centers, thetas, lo, hi, double radius):
    cdef double[::1] p = np.ascontiguousarray(psi, dtype=np.float64)
    cdef double[:, ::1] z = np.ascontiguousarray(centers, dtype=np.float64)
    cdef double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef double[::1] l = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[::1] h = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t m = p.shape[0], k = z.shape[0]
    cdef double[::1] out = np.empty(m)
    # arc endpoints of the live disks, computed once
    cdef double[:, ::1] arc = np.empty((k, 7))
    cdef Py_ssize_t i, j, live = 0
    cdef double vx, vy, best, val, rel
    for j in range(k):
        if l[j] > h[j]:
            continue
        arc[live, 0] = z[j, 0] + radius * cos(th[j] + l[j])
        arc[live, 1] = z[j, 1] + radius * sin(th[j] + l[j])
        arc[live, 2] = z[j, 0] + radius * cos(th[j] + h[j])
        arc[live, 3] = z[j, 1] + radius * sin(th[j] + h[j])
        arc[live, 4] = th[j]
        arc[live, 5] = l[j]
        arc[live, 6] = h[j]
        live += 1
    for i in range(m):
        vx = cos(p[i])
        vy = sin(p[i])
        best = -INFINITY
        for j in range(live):
            val = arc[j, 0] * vx + arc[j, 1] * vy
            if val > best:
                best = val
            val = arc[j, 2] * vx + arc[j, 3] * vy
            if val > best:
                best = val
        for j in range(k):
            if l[j] > h[j]:
                continue
            rel = _wrap(p[i] - th[j])
            if rel >= l[j] and rel <= h[j]:
                val = z[j, 0] * vx + z[j, 1] * vy + radius
                if val > best:
                    best = val
        out[i] = best
    return np.asarray(out)
