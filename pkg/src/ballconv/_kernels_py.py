"""Pure numpy implementations of the hot kernels.

Every function here has a drop-in twin in ``_kernels_c.pyx``; the two must
agree to rounding (and bit-for-bit for :func:`pairwise_sum`).
"""
import numpy as np

_CHUNK = 256
_TWO_PI = 2.0 * np.pi


def pairwise_sum(values):
    """Sum by a fixed binary tree over node indices.

    The array is zero-padded to a power of two and adjacent pairs are added
    level by level, so the result depends only on the values and their
    positions, never on evaluation order.
    """
    x = np.array(values, dtype=np.float64).ravel()
    m = x.size
    if m == 0:
        return 0.0
    size = 1 << (m - 1).bit_length()
    if size != m:
        x = np.concatenate([x, np.zeros(size - m)])
    while x.size > 1:
        x = x[0::2] + x[1::2]
    return float(x[0])


def ray_ball_exit_min(rays, centers, radius):
    """For each unit ray, the distance at which it leaves the intersection of balls.

    Rays start at the origin. A ball not containing the origin forces the
    value to zero.
    """
    rays = np.asarray(rays, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    c = np.einsum("ij,ij->i", centers, centers) - radius * radius
    out = np.empty(rays.shape[0])
    for start in range(0, rays.shape[0], _CHUNK):
        b = rays[start:start + _CHUNK] @ centers.T
        disc = np.maximum(b * b - c, 0.0)
        exit_ = np.where(c < 0.0, b + np.sqrt(disc), 0.0)
        out[start:start + _CHUNK] = exit_.min(axis=1)
    return out


def _wrap(x):
    return x - _TWO_PI * np.floor((x + np.pi) / _TWO_PI)


def family_arcs_2d(centers, thetas, radius):
    """Angular extent of each circle's arc on the boundary of the disk intersection.

    Angles are relative to ``thetas[j]`` (the outer normal of disk ``j``).
    Returns ``(lo, hi)``; ``lo > hi`` marks a redundant disk.
    """
    centers = np.asarray(centers, dtype=np.float64)
    thetas = np.asarray(thetas, dtype=np.float64)
    m = centers.shape[0]
    lo = np.empty(m)
    hi = np.empty(m)
    two_r = 2.0 * radius
    for start in range(0, m, _CHUNK):
        zj = centers[start:start + _CHUNK]
        d = centers[None, :, :] - zj[:, None, :]
        dist = np.hypot(d[..., 0], d[..., 1])
        same = dist == 0.0
        half = np.arccos(np.clip(dist / two_r, -1.0, 1.0))
        rel = _wrap(np.arctan2(d[..., 1], d[..., 0]) - thetas[start:start + _CHUNK, None])
        low = np.where(same, -np.pi, rel - half)
        high = np.where(same, np.pi, rel + half)
        low = np.where(dist >= two_r, np.inf, low)
        high = np.where(dist >= two_r, -np.inf, high)
        lo[start:start + _CHUNK] = np.maximum(low.max(axis=1), -np.pi)
        hi[start:start + _CHUNK] = np.minimum(high.min(axis=1), np.pi)
    return lo, hi


def family_support_2d(psi, centers, thetas, lo, hi, radius):
    """Support function of the disk intersection described by ``family_arcs_2d``."""
    psi = np.asarray(psi, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    thetas = np.asarray(thetas, dtype=np.float64)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    live = lo <= hi
    z, th, lo, hi = centers[live], thetas[live], lo[live], hi[live]
    ends = np.concatenate([
        z + radius * np.stack([np.cos(th + lo), np.sin(th + lo)], axis=1),
        z + radius * np.stack([np.cos(th + hi), np.sin(th + hi)], axis=1),
    ])
    out = np.empty(psi.size)
    for start in range(0, psi.size, _CHUNK):
        p = psi[start:start + _CHUNK]
        v = np.stack([np.cos(p), np.sin(p)], axis=1)
        best = (v @ ends.T).max(axis=1)
        rel = _wrap(p[:, None] - th[None, :])
        inside = (rel >= lo[None, :]) & (rel <= hi[None, :])
        arc = np.where(inside, v @ z.T + radius, -np.inf).max(axis=1)
        out[start:start + _CHUNK] = np.maximum(best, arc)
    return out
