"""Convex bodies with support, inverse Gauss map, curvature and radial evaluation.

Every body is an immutable value. Methods are vectorised over directions:
an ``(m, n)`` array of unit vectors gives length-``m`` results, a single
``(n,)`` vector gives scalars (or unbatched arrays).
"""
from __future__ import annotations

from functools import cached_property
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy.optimize import minimize_scalar

from .errors import CornerError, GeometryError, ParameterError
from .quadrature import SphereRule, ball_volume, build_rule, integrate

TWO_PI = 2.0 * np.pi
SLACK_SNAP = 1e-12


def _as_dirs(u) -> tuple[np.ndarray, bool]:
    u = np.asarray(u, dtype=float)
    single = u.ndim == 1
    return np.atleast_2d(u), single


def _out(value, single):
    if single:
        return value[0] if np.ndim(value) >= 1 else value
    return value


def _angle_of(u: np.ndarray) -> np.ndarray:
    return np.arctan2(u[:, 1], u[:, 0])


def wrap_angle(x):
    """Map angles to ``[-pi, pi)``."""
    return x - TWO_PI * np.floor((np.asarray(x) + np.pi) / TWO_PI)


@dataclass(frozen=True)
class BoundarySample:
    """Boundary points with given outer normals.

    Attributes
    ----------
    x : ndarray, shape (m, n)
    normal : ndarray, shape (m, n)
    kappas : ndarray, shape (m, n-1)
        Principal curvatures (1/length).
    support_dot : ndarray, shape (m,)
        ``<x, N(x)>``, equal to the support value at the normal.
    clamped : ndarray of bool, shape (m,)
        Nodes that were moved away from a curvature singularity.
    """

    x: np.ndarray
    normal: np.ndarray
    kappas: np.ndarray
    support_dot: np.ndarray
    clamped: np.ndarray

    @property
    def gauss_curvature(self) -> np.ndarray:
        return np.prod(self.kappas, axis=-1)

    @property
    def curvature_function(self) -> np.ndarray:
        """Product of principal radii, the density of surface measure against the sphere."""
        return 1.0 / self.gauss_curvature


@dataclass(frozen=True)
class BallConvexityReport:
    """Outcome of a ball-convexity check at radius ``R``."""

    R: float
    min_slack: float
    all_strict: bool
    witness: np.ndarray


class ConvexBody:
    """Interface shared by all body variants."""

    dim: int

    def support(self, u):
        raise NotImplementedError

    def inverse_gauss(self, u) -> BoundarySample:
        raise NotImplementedError

    def radial(self, w):
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def normal_at_ray(self, w):
        """Outer unit normal at the boundary point hit by each ray ``w``."""
        raise NotImplementedError

    def scaled(self, a: float) -> "ConvexBody":
        raise NotImplementedError

    @property
    def smooth(self) -> bool:
        return True


# ---------------------------------------------------------------- Ball


@dataclass(frozen=True)
class Ball(ConvexBody):
    """Euclidean ball ``center + radius * B``."""

    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        if len(c) not in (2, 3):
            raise ParameterError(f"ball center must have 2 or 3 coordinates, got {len(c)}")
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise ParameterError(f"ball radius must be positive, got {self.radius}")
        if np.linalg.norm(c) >= self.radius:
            raise ParameterError("origin must lie in the interior of the ball")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return len(self.center)

    def support(self, u):
        u, single = _as_dirs(u)
        return _out(u @ np.asarray(self.center) + self.radius, single)

    def inverse_gauss(self, u) -> BoundarySample:
        u, _ = _as_dirs(u)
        m = u.shape[0]
        c = np.asarray(self.center)
        return BoundarySample(
            x=c + self.radius * u,
            normal=u.copy(),
            kappas=np.full((m, self.dim - 1), 1.0 / self.radius),
            support_dot=u @ c + self.radius,
            clamped=np.zeros(m, dtype=bool),
        )

    def radial(self, w):
        w, single = _as_dirs(w)
        c = np.asarray(self.center)
        b = w @ c
        return _out(b + np.sqrt(b * b - c @ c + self.radius**2), single)

    def volume(self) -> float:
        return ball_volume(self.dim) * self.radius**self.dim

    def normal_at_ray(self, w):
        w, single = _as_dirs(w)
        y = self.radial(w)[:, None] * w - np.asarray(self.center)
        return _out(y / self.radius, single)

    def scaled(self, a: float) -> "Ball":
        return Ball(tuple(a * v for v in self.center), a * self.radius)


# ---------------------------------------------------------------- Ellipsoid


@dataclass(frozen=True)
class Ellipsoid(ConvexBody):
    """Axis-aligned ellipsoid with semi-axes ``axes`` centred at ``center``."""

    axes: tuple
    center: Optional[tuple] = None

    def __post_init__(self):
        a = tuple(float(v) for v in self.axes)
        if len(a) not in (2, 3):
            raise ParameterError(f"ellipsoid needs 2 or 3 semi-axes, got {len(a)}")
        if any(not np.isfinite(v) or v <= 0 for v in a):
            raise ParameterError(f"semi-axes must be positive, got {a}")
        c = tuple(0.0 for _ in a) if self.center is None else tuple(float(v) for v in self.center)
        if len(c) != len(a):
            raise ParameterError("center and axes have different dimensions")
        if np.sum((np.asarray(c) / np.asarray(a)) ** 2) >= 1.0:
            raise ParameterError("origin must lie in the interior of the ellipsoid")
        object.__setattr__(self, "axes", a)
        object.__setattr__(self, "center", c)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def petty_constant(self) -> float:
        """``(prod a_i)^(-2/(n+1))``."""
        return float(np.prod(self.axes) ** (-2.0 / (self.dim + 1)))

    def _h0(self, u):
        return np.sqrt((u**2) @ (np.asarray(self.axes) ** 2))

    def support(self, u):
        u, single = _as_dirs(u)
        return _out(u @ np.asarray(self.center) + self._h0(u), single)

    def inverse_gauss(self, u) -> BoundarySample:
        u, _ = _as_dirs(u)
        a2 = np.asarray(self.axes) ** 2
        c = np.asarray(self.center)
        H = self._h0(u)
        a2u = u * a2
        x = c + a2u / H[:, None]
        if self.dim == 2:
            kappas = (H**3 / np.prod(a2))[:, None]
        else:
            # principal radii: eigenvalues of the support Hessian on the tangent plane
            hess = (np.diag(a2)[None] / H[:, None, None]
                    - a2u[:, :, None] * a2u[:, None, :] / H[:, None, None] ** 3)
            e1, e2 = _tangent_frame(u)
            frame = np.stack([e1, e2], axis=2)
            small = np.einsum("mia,mij,mjb->mab", frame, hess, frame)
            radii = np.linalg.eigvalsh(small)
            kappas = 1.0 / radii[:, ::-1]
        return BoundarySample(x, u.copy(), kappas, u @ c + H, np.zeros(u.shape[0], dtype=bool))

    def radial(self, w):
        w, single = _as_dirs(w)
        inv = 1.0 / np.asarray(self.axes) ** 2
        c = np.asarray(self.center)
        qa = (w**2) @ inv
        qb = (w * c) @ inv
        qc = (c**2) @ inv - 1.0
        return _out((qb + np.sqrt(qb * qb - qa * qc)) / qa, single)

    def volume(self) -> float:
        return ball_volume(self.dim) * float(np.prod(self.axes))

    def normal_at_ray(self, w):
        w, single = _as_dirs(w)
        g = (self.radial(w)[:, None] * w - np.asarray(self.center)) / np.asarray(self.axes) ** 2
        return _out(g / np.linalg.norm(g, axis=1, keepdims=True), single)

    def min_curvature(self) -> float:
        """Smallest normal curvature over the boundary, ``a_min / a_max**2``."""
        return min(self.axes) / max(self.axes) ** 2

    def scaled(self, a: float) -> "Ellipsoid":
        return Ellipsoid(tuple(a * v for v in self.axes), tuple(a * v for v in self.center))


def _tangent_frame(u: np.ndarray):
    """Orthonormal basis of the tangent plane at each unit vector in R^3."""
    ref = np.where(np.abs(u[:, [2]]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    e1 = np.cross(ref, u)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(u, e1)
    return e1, e2


# ---------------------------------------------------------------- SupportCurve2D


@dataclass(frozen=True)
class SupportCurve2D(ConvexBody):
    """Planar body whose support function is a finite trigonometric series.

    ``h(theta) = c0 + sum_m (cos[m-1] cos(m theta) + sin[m-1] sin(m theta))``.
    """

    c0: float
    cos: tuple = ()
    sin: tuple = ()
    check_points: int = field(default=4096, repr=False, compare=False)

    def __post_init__(self):
        a = tuple(float(v) for v in self.cos)
        b = tuple(float(v) for v in self.sin)
        m = max(len(a), len(b))
        a = a + (0.0,) * (m - len(a))
        b = b + (0.0,) * (m - len(b))
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "cos", a)
        object.__setattr__(self, "sin", b)
        theta = TWO_PI * np.arange(self.check_points) / self.check_points
        if np.min(self.h(theta)) <= 0:
            raise ParameterError("support values must be positive (origin interior)")
        rad = self.h(theta) + self.h(theta, 2)
        if np.min(rad) <= 0:
            raise ParameterError(
                f"h + h'' must be positive for strict convexity; min is {np.min(rad):.3g}")

    dim = 2

    def h(self, theta, deriv: int = 0):
        """Support function (or its ``deriv``-th derivative) at angle ``theta``."""
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.c0 if deriv == 0 else 0.0)
        for m, (a, b) in enumerate(zip(self.cos, self.sin), start=1):
            c, s = np.cos(m * theta), np.sin(m * theta)
            # d/dtheta cycles (c, s) -> (-s, c) -> (-c, -s) -> (s, -c)
            k = deriv % 4
            dc, ds = [(c, s), (-s, c), (-c, -s), (s, -c)][k]
            out = out + m**deriv * (a * dc + b * ds)
        return out

    def support(self, u):
        u, single = _as_dirs(u)
        return _out(self.h(_angle_of(u)), single)

    def point_at(self, theta):
        """Boundary point with outer normal angle ``theta``."""
        theta = np.asarray(theta, dtype=float)
        h, hp = self.h(theta), self.h(theta, 1)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([h * c - hp * s, h * s + hp * c], axis=-1)

    def inverse_gauss(self, u) -> BoundarySample:
        u, _ = _as_dirs(u)
        theta = _angle_of(u)
        radius = self.h(theta) + self.h(theta, 2)
        return BoundarySample(
            x=self.point_at(theta), normal=u.copy(), kappas=(1.0 / radius)[:, None],
            support_dot=self.h(theta), clamped=np.zeros(u.shape[0], dtype=bool))

    def normal_angle_of_ray(self, phi):
        """Normal angle of the boundary point hit by the ray at polar angle ``phi``."""
        phi = np.asarray(phi, dtype=float)
        lo = phi - np.pi / 2
        hi = phi + np.pi / 2
        # start from the tabulated inverse of the monotone map theta -> polar angle
        tab_theta, tab_phi = self._ray_table
        base = np.floor(phi / TWO_PI) * TWO_PI
        theta = base + np.interp(phi - base, tab_phi, tab_theta)
        theta = np.clip(theta, lo, hi)
        tol = 4e-16 * max(1.0, float(np.max(np.abs(phi)))) if phi.size else 0.0
        for _ in range(100):
            h, hp, hpp = self.h(theta), self.h(theta, 1), self.h(theta, 2)
            F = theta + np.arctan2(hp, h) - phi
            if F.size == 0 or np.max(np.abs(F)) <= tol:
                break
            lo = np.where(F < 0, theta, lo)
            hi = np.where(F > 0, theta, hi)
            dF = h * (h + hpp) / (h * h + hp * hp)
            step = theta - F / dF
            new = np.where((step >= lo) & (step <= hi), step, 0.5 * (lo + hi))
            # stop once Newton stalls at roundoff level
            moved = np.max(np.abs(new - theta))
            theta = new
            if moved <= tol:
                break
        return theta

    @cached_property
    def _ray_table(self):
        theta = np.linspace(-np.pi, 3 * np.pi, 8193)
        return theta, theta + np.arctan2(self.h(theta, 1), self.h(theta))

    def radial(self, w):
        w, single = _as_dirs(w)
        theta = self.normal_angle_of_ray(_angle_of(w))
        return _out(np.hypot(self.h(theta), self.h(theta, 1)), single)

    def normal_at_ray(self, w):
        w, single = _as_dirs(w)
        theta = self.normal_angle_of_ray(_angle_of(w))
        return _out(np.stack([np.cos(theta), np.sin(theta)], axis=1), single)

    def volume(self) -> float:
        a = np.asarray(self.cos)
        b = np.asarray(self.sin)
        m = np.arange(1, a.size + 1)
        return float(np.pi * self.c0**2 + 0.5 * np.pi * np.sum((a**2 + b**2) * (1 - m**2)))

    def scaled(self, a: float) -> "SupportCurve2D":
        return SupportCurve2D(a * self.c0, tuple(a * v for v in self.cos), tuple(a * v for v in self.sin))


# ---------------------------------------------------------------- PNormBall2D


@dataclass(frozen=True)
class PNormBall2D(ConvexBody):
    """The planar l_r unit ball ``|x|^r + |y|^r <= scale^r`` for ``1 < r < 2``.

    Curvature is infinite at the four axis points. Normals closer than
    ``axis_cutoff`` (radians) to an axis are moved to the cutoff and the
    move is flagged in ``BoundarySample.clamped``.
    """

    r: float
    scale: float = 1.0
    axis_cutoff: float = 1e-8

    def __post_init__(self):
        if not (1.0 < self.r < 2.0):
            raise ParameterError(f"exponent r must satisfy 1 < r < 2, got {self.r}")
        if self.scale <= 0:
            raise ParameterError("scale must be positive")
        if not (0.0 < self.axis_cutoff < 0.1):
            raise ParameterError("axis_cutoff must be in (0, 0.1)")

    dim = 2

    @property
    def dual_exponent(self) -> float:
        return self.r / (self.r - 1.0)

    @property
    def ball_convexity_threshold(self) -> float:
        """Smallest R for which the body is R-ball convex (curvature minimum on the diagonals)."""
        r = self.r
        return self.scale * 2.0 ** (-(2.0 - r) / (2.0 * r)) / (r - 1.0)

    def boundary_param(self, phi):
        """Superellipse parametrisation ``scale * (sgn cos |cos|^(2/r), sgn sin |sin|^(2/r))``."""
        phi = np.asarray(phi, dtype=float)
        c, s = np.cos(phi), np.sin(phi)
        e = 2.0 / self.r
        return self.scale * np.stack([np.sign(c) * np.abs(c) ** e, np.sign(s) * np.abs(s) ** e], axis=-1)

    def support(self, u):
        """Support by coarse grid plus golden-section maximisation over the parametrisation."""
        u, single = _as_dirs(u)
        m = u.shape[0]
        psi = _angle_of(u)
        # the maximiser lies in the quadrant of u
        q0 = np.floor(psi / (np.pi / 2)) * (np.pi / 2)
        grid = q0[:, None] + (np.pi / 2) * np.linspace(0.0, 1.0, 65)[None, :]
        vals = np.einsum("mkd,md->mk", self.boundary_param(grid), u)
        k = np.argmax(vals, axis=1)
        step = (np.pi / 2) / 64
        a = grid[np.arange(m), k] - step
        b = grid[np.arange(m), k] + step
        g = (np.sqrt(5.0) - 1.0) / 2.0

        def f(t):
            return np.einsum("md,md->m", self.boundary_param(t), u)

        x1 = b - g * (b - a)
        x2 = a + g * (b - a)
        f1, f2 = f(x1), f(x2)
        while np.max(b - a) > 1e-12:
            left = f1 > f2
            a, b = np.where(left, a, x1), np.where(left, x2, b)
            x1n = np.where(left, b - g * (b - a), x2)
            x2n = np.where(left, x1, a + g * (b - a))
            f1, f2 = np.where(left, f(x1n), f2), np.where(left, f1, f(x2n))
            x1, x2 = x1n, x2n
        best = np.maximum(f(0.5 * (a + b)), vals[np.arange(m), k])
        return _out(best, single)

    def support_closed_form(self, u):
        """Dual-norm support ``scale * ||u||_q`` with ``q = r / (r - 1)``."""
        u, single = _as_dirs(u)
        q = self.dual_exponent
        return _out(self.scale * np.sum(np.abs(u) ** q, axis=1) ** (1.0 / q), single)

    def clamp_normals(self, u):
        """Move normals away from the axes; returns ``(theta, clamped)``."""
        theta = _angle_of(np.atleast_2d(u))
        quarter = np.pi / 2
        axis = np.round(theta / quarter) * quarter
        off = theta - axis
        clamped = np.abs(off) < self.axis_cutoff
        sign = np.where(off >= 0, 1.0, -1.0)
        theta = np.where(clamped, axis + sign * self.axis_cutoff, theta)
        return theta, clamped

    def curvature_at(self, x):
        """Implicit-function curvature of ``|x|^r + |y|^r = scale^r`` at boundary points."""
        r = self.r
        ax, ay = np.abs(x[..., 0]), np.abs(x[..., 1])
        num = (r - 1.0) * (ax * ay) ** (r - 2.0) * self.scale**r
        den = (ax ** (2 * r - 2) + ay ** (2 * r - 2)) ** 1.5
        return num / den

    def inverse_gauss(self, u) -> BoundarySample:
        u, _ = _as_dirs(u)
        theta, clamped = self.clamp_normals(u)
        n = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        q = self.dual_exponent
        norm_q = np.sum(np.abs(n) ** q, axis=1) ** (1.0 / q)
        x = self.scale * np.sign(n) * (np.abs(n) / norm_q[:, None]) ** (q - 1.0)
        kappa = self.curvature_at(x)
        return BoundarySample(x, n, kappa[:, None], np.einsum("md,md->m", x, n), clamped)

    def radial(self, w):
        w, single = _as_dirs(w)
        return _out(self.scale / np.sum(np.abs(w) ** self.r, axis=1) ** (1.0 / self.r), single)

    def normal_at_ray(self, w):
        w, single = _as_dirs(w)
        y = self.radial(w)[:, None] * w
        g = np.sign(y) * np.abs(y) ** (self.r - 1.0)
        return _out(g / np.linalg.norm(g, axis=1, keepdims=True), single)

    def volume(self) -> float:
        """Area by the planimeter integral of ``radial**2 / 2`` over the first quadrant."""
        def half_r2(phi):
            return 0.5 * float(self.radial(np.array([np.cos(phi), np.sin(phi)]))) ** 2

        val, _ = sp_integrate.quad(half_r2, 0.0, np.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)
        return 4.0 * val

    def scaled(self, a: float) -> "PNormBall2D":
        return PNormBall2D(self.r, a * self.scale, self.axis_cutoff)


# ---------------------------------------------------------------- ArcBody2D


@dataclass(frozen=True)
class Arc:
    """Circular arc ``center + radius * (cos t, sin t)`` for normal angles ``t`` in ``[start, end]``."""

    center: tuple
    radius: float
    start: float
    end: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if len(self.center) != 2:
            raise ParameterError("arc center must be a planar point")
        if not self.radius > 0:
            raise ParameterError(f"arc radius must be positive, got {self.radius}")
        if not self.end >= self.start:
            raise ParameterError("arc end angle must not precede its start angle")

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.center) + self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)


@dataclass(frozen=True)
class ArcBody2D(ConvexBody):
    """Convex planar body bounded by circular arcs listed counter-clockwise.

    Normal angles increase along the list; a gap between one arc's end
    angle and the next arc's start angle is a corner whose normal cone
    is that gap.
    """

    arcs: tuple
    join_tol: float = field(default=1e-9, repr=False, compare=False)

    def __post_init__(self):
        arcs = tuple(self.arcs)
        if not arcs:
            raise ParameterError("arc body needs at least one arc")
        # unwrap start angles so that normal angles are nondecreasing
        fixed = []
        prev_end = None
        for arc in arcs:
            s, e = arc.start, arc.end
            if prev_end is not None:
                shift = TWO_PI * np.ceil((prev_end - s - 1e-12) / TWO_PI)
                s, e = s + shift, e + shift
            fixed.append(Arc(arc.center, arc.radius, s, e))
            prev_end = e
        total = fixed[-1].end - fixed[0].start
        if total > TWO_PI + 1e-9:
            raise ParameterError("outer normal angle turns by more than 2 pi")
        for i, arc in enumerate(fixed):
            nxt = fixed[(i + 1) % len(fixed)]
            gap = np.linalg.norm(arc.point(arc.end) - nxt.point(nxt.start))
            if gap > self.join_tol * max(1.0, arc.radius):
                raise ParameterError(f"arcs {i} and {(i + 1) % len(fixed)} do not join (gap {gap:.3g})")
        object.__setattr__(self, "arcs", tuple(fixed))
        h = self._support_angles(TWO_PI * np.arange(256) / 256)
        if np.min(h) <= 0:
            raise ParameterError("origin must lie in the interior")

    dim = 2

    @property
    def smooth(self) -> bool:
        return not self.corners()

    @classmethod
    def from_disks(cls, centers: Sequence, radii: Sequence) -> "ArcBody2D":
        """Boundary of the intersection of the given closed disks."""
        centers = np.asarray(centers, dtype=float).reshape(-1, 2)
        radii = np.asarray(radii, dtype=float).ravel()
        if centers.shape[0] != radii.size or radii.size == 0:
            raise ParameterError("need one radius per disk center")
        if np.any(radii <= 0):
            raise ParameterError("disk radii must be positive")
        pieces = []
        for j in range(radii.size):
            intervals = [(0.0, TWO_PI)]
            redundant = False
            for k in range(radii.size):
                if k == j:
                    continue
                d = centers[k] - centers[j]
                dist = float(np.hypot(*d))
                if dist == 0.0:
                    if radii[k] < radii[j] or (radii[k] == radii[j] and k < j):
                        redundant = True
                        break
                    continue
                gamma = (radii[j] ** 2 + dist**2 - radii[k] ** 2) / (2.0 * radii[j] * dist)
                if gamma <= -1.0:
                    continue
                if gamma >= 1.0:
                    if dist + radii[j] <= radii[k]:
                        continue
                    if dist + radii[k] <= radii[j]:
                        redundant = True
                        break
                    raise GeometryError("disks do not intersect")
                mid = np.arctan2(d[1], d[0]) % TWO_PI
                half = float(np.arccos(gamma))
                intervals = _intersect(intervals, _arc_intervals(mid - half, mid + half))
                if not intervals:
                    break
            if redundant:
                continue
            for lo, hi in _merge_wrap(intervals):
                if hi - lo > 1e-13:
                    pieces.append(Arc(tuple(centers[j]), float(radii[j]), lo, hi))
        if not pieces:
            raise GeometryError("disk intersection is empty or degenerate")
        pieces.sort(key=lambda a: a.start)
        return cls(tuple(pieces))

    def corners(self) -> list:
        """``(point, normal_lo, normal_hi)`` for each corner."""
        out = []
        for i, arc in enumerate(self.arcs):
            nxt = self.arcs[(i + 1) % len(self.arcs)]
            nstart = nxt.start + (TWO_PI if i == len(self.arcs) - 1 else 0.0)
            if nstart - arc.end > 1e-12:
                out.append((arc.point(arc.end), arc.end, nstart))
        return out

    def _locate(self, psi):
        """Index of the arc whose normal range contains ``psi``, or -1."""
        psi = np.asarray(psi, dtype=float)
        idx = np.full(psi.shape, -1)
        for i, arc in enumerate(self.arcs):
            rel = (psi - arc.start) % TWO_PI
            inside = rel <= (arc.end - arc.start) + 1e-15
            if arc.end - arc.start >= TWO_PI - 1e-15:
                inside = np.ones_like(inside)
            idx = np.where((idx < 0) & inside, i, idx)
        return idx

    def _support_angles(self, psi):
        psi = np.asarray(psi, dtype=float)
        v = np.stack([np.cos(psi), np.sin(psi)], axis=-1)
        best = np.full(psi.shape, -np.inf)
        for arc in self.arcs:
            for t in (arc.start, arc.end):
                best = np.maximum(best, v @ arc.point(t))
            rel = (psi - arc.start) % TWO_PI
            inside = (rel <= arc.end - arc.start) | (arc.end - arc.start >= TWO_PI - 1e-15)
            best = np.where(inside, np.maximum(best, v @ np.asarray(arc.center) + arc.radius), best)
        return best

    def support(self, u):
        u, single = _as_dirs(u)
        return _out(self._support_angles(_angle_of(u)), single)

    def inverse_gauss(self, u) -> BoundarySample:
        u, _ = _as_dirs(u)
        psi = _angle_of(u)
        idx = self._locate(psi)
        if np.any(idx < 0):
            j = int(np.flatnonzero(idx < 0)[0])
            corner = self.boundary_point_at_normal(psi[j])
            raise CornerError(f"normal angle {psi[j]:.6g} lies in the normal cone of a corner", corner)
        centers = np.array([self.arcs[i].center for i in idx])
        radii = np.array([self.arcs[i].radius for i in idx])
        x = centers + radii[:, None] * u
        return BoundarySample(x, u.copy(), (1.0 / radii)[:, None],
                              np.einsum("md,md->m", x, u), np.zeros(u.shape[0], dtype=bool))

    def boundary_point_at_normal(self, psi: float) -> np.ndarray:
        """Boundary point whose normal cone contains the angle ``psi`` (corner-aware)."""
        i = int(self._locate(np.array([psi]))[0])
        if i >= 0:
            arc = self.arcs[i]
            return np.asarray(arc.center) + arc.radius * np.array([np.cos(psi), np.sin(psi)])
        for point, lo, hi in self.corners():
            if (psi - lo) % TWO_PI <= hi - lo:
                return point
        raise GeometryError(f"no boundary point with normal angle {psi}")

    def kink_angles(self) -> list:
        """Normal-angle intervals of the corners."""
        return [(lo, hi) for _, lo, hi in self.corners()]

    def _radial_arcs(self, w):
        best = np.full(w.shape[0], np.inf)
        idx = np.full(w.shape[0], -1)
        for i, arc in enumerate(self.arcs):
            c = np.asarray(arc.center)
            b = w @ c
            disc = b * b - c @ c + arc.radius**2
            t = np.where(disc >= 0, b + np.sqrt(np.maximum(disc, 0.0)), np.inf)
            # the hit point must carry a normal inside the arc's range
            x = np.where(np.isfinite(t), t, 0.0)[:, None] * w
            psi = np.arctan2(x[:, 1] - c[1], x[:, 0] - c[0])
            rel = (psi - arc.start) % TWO_PI
            ok = (rel <= arc.end - arc.start + 1e-9) | (arc.end - arc.start >= TWO_PI - 1e-15)
            take = ok & np.isfinite(t) & (t < best)
            best = np.where(take, t, best)
            idx = np.where(take, i, idx)
        return best, idx

    def radial(self, w):
        w, single = _as_dirs(w)
        return _out(self._radial_arcs(w)[0], single)

    def normal_at_ray(self, w):
        """Normal of the arc hit by each ray (the incoming arc's end normal at a corner)."""
        w, single = _as_dirs(w)
        t, idx = self._radial_arcs(w)
        centers = np.array([self.arcs[i].center for i in idx])
        radii = np.array([self.arcs[i].radius for i in idx])
        return _out((t[:, None] * w - centers) / radii[:, None], single)

    def volume(self) -> float:
        total = 0.0
        for arc in self.arcs:
            cx, cy = arc.center
            s, e, rho = arc.start, arc.end, arc.radius
            total += rho * (cx * (np.sin(e) - np.sin(s)) - cy * (np.cos(e) - np.cos(s))) + rho**2 * (e - s)
        return 0.5 * total

    def scaled(self, a: float) -> "ArcBody2D":
        return ArcBody2D(tuple(Arc(tuple(a * v for v in arc.center), a * arc.radius, arc.start, arc.end)
                               for arc in self.arcs))


def _arc_intervals(lo: float, hi: float) -> list:
    width = hi - lo
    lo %= TWO_PI
    if width >= TWO_PI:
        return [(0.0, TWO_PI)]
    end = lo + width
    if end <= TWO_PI:
        return [(lo, end)]
    return [(lo, TWO_PI), (0.0, end - TWO_PI)]


def _intersect(a: list, b: list) -> list:
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if hi > lo:
                out.append((lo, hi))
    return sorted(out)


def _merge_wrap(intervals: list) -> list:
    """Join an interval ending at 2 pi with one starting at 0."""
    intervals = sorted(intervals)
    if len(intervals) >= 2 and intervals[0][0] == 0.0 and intervals[-1][1] == TWO_PI:
        first = intervals.pop(0)
        last = intervals.pop()
        intervals.append((last[0], first[1] + TWO_PI))
    return intervals


# ---------------------------------------------------------------- free functions


def support(body: ConvexBody, u):
    """Support function ``h_K(u)``."""
    return body.support(u)


def inverse_gauss(body: ConvexBody, u) -> BoundarySample:
    """Boundary points with outer normal ``u``."""
    return body.inverse_gauss(u)


def volume(body: ConvexBody) -> float:
    """Volume (area for planar bodies)."""
    return body.volume()


def _normal_grid(dim: int, resolution: int) -> np.ndarray:
    return build_rule(dim, resolution).nodes


def validate_ball_convex(body: ConvexBody, R: float, resolution: int = 512) -> BallConvexityReport:
    """Minimum over the boundary of ``min_i kappa_i - 1/R``.

    Sampled on a normal grid, then refined by bounded scalar minimisation
    for planar smooth bodies. Slacks within 1e-12 of zero are set to zero.
    """
    if not R > 0:
        raise ParameterError(f"R must be positive, got {R}")
    if isinstance(body, ArcBody2D):
        radii = np.array([a.radius for a in body.arcs])
        i = int(np.argmax(radii))
        arc = body.arcs[i]
        mid = 0.5 * (arc.start + arc.end)
        slack = 1.0 / radii[i] - 1.0 / R
        witness = np.array([np.cos(mid), np.sin(mid)])
    elif isinstance(body, Ball):
        slack = 1.0 / body.radius - 1.0 / R
        witness = np.eye(body.dim)[0]
    elif isinstance(body, Ellipsoid):
        slack = body.min_curvature() - 1.0 / R
        witness = np.eye(body.dim)[int(np.argmin(body.axes))]
    else:
        u = _normal_grid(body.dim, resolution)
        kmin = np.min(body.inverse_gauss(u).kappas, axis=1)
        j = int(np.argmin(kmin))
        witness = u[j]
        slack = kmin[j] - 1.0 / R
        if body.dim == 2:
            t0 = float(np.arctan2(u[j, 1], u[j, 0]))
            dt = TWO_PI / u.shape[0]

            def kap(t):
                return float(body.inverse_gauss(np.array([np.cos(t), np.sin(t)])).kappas[0, 0])

            res = minimize_scalar(kap, bounds=(t0 - dt, t0 + dt), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun - 1.0 / R < slack:
                slack = res.fun - 1.0 / R
                witness = np.array([np.cos(res.x), np.sin(res.x)])
    slack = float(slack)
    if abs(slack) <= SLACK_SNAP:
        slack = 0.0
    return BallConvexityReport(float(R), slack, slack > 0, np.asarray(witness, dtype=float))


def polar_volume(body: ConvexBody, rule: SphereRule) -> float:
    """Volume of the polar body, ``(1/n) * integral of h^(-n)`` over the sphere."""
    n = body.dim
    h = np.asarray(body.support(rule.nodes), dtype=float)
    if np.any(h <= 0):
        raise GeometryError("nonpositive support value: origin is not interior")
    return integrate(rule, lambda u: h ** (-float(n))).value / n


def petty_constant_diagnostic(body: ConvexBody, rule: SphereRule) -> tuple[float, float]:
    """Mean and maximal relative deviation of ``kappa^(1/(n+1)) / <x, N>`` over the rule's normals."""
    s = body.inverse_gauss(rule.nodes)
    g = s.gauss_curvature ** (1.0 / (body.dim + 1)) / s.support_dot
    mean = float(np.mean(g))
    return mean, float(np.max(np.abs(g - mean)) / mean)
