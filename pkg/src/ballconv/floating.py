"""Ball floating bodies, weighted cut measures and the small-cut convergence harnesses.

A cut ball of radius R is centred on the inner normal line at a boundary
point ``x(u)``: ``z(t) = x(u) - (R + t) u``. Its depth ``t`` is chosen so
that the weighted measure of ``K`` outside the ball equals ``delta``. The
floating body is stored as ``K`` intersected with the sampled cut balls,
through its radial function on the direction grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate

from .bodies import (ArcBody2D, Ball, ConvexBody, Ellipsoid, validate_ball_convex, wrap_angle)
from .errors import (CornerError, GeometryError, ParameterError, PreconditionError,
                     StarvationError, WeightError)
from .kernels import family_arcs_2d, family_support_2d, pairwise_sum, ray_ball_exit_min
from .measures import OmegaParams, _weight, omega_p_R
from .quadrature import SphereRule, ball_volume, build_rule, integrate, sphere_area

GL_PANELS = 4
GL_NODES = 24
RADIAL_NODES = 16
COMPONENT_CHECK = 512
DEPTH_RTOL = 1e-10
MC_SAMPLES = 200_000


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class CutBall:
    """Ball ``center + R * B``; ``depth`` records the solved cut depth, if any."""

    center: tuple
    R: float
    depth: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if not self.R > 0:
            raise ParameterError(f"cut ball radius must be positive, got {self.R}")


@dataclass(frozen=True)
class WeightFn:
    """Positive density ``f`` on ``K`` with a declared lower bound.

    ``func`` maps an ``(..., n)`` array of points to values. ``radial``
    declares that ``f`` is constant along rays from the origin, which lets
    cut measures integrate the radial direction exactly. ``constant`` is set
    for constant weights.
    """

    func: Callable[[np.ndarray], np.ndarray]
    lower_bound: float
    radial: bool = False
    label: str = "custom"
    constant: Optional[float] = None

    def __post_init__(self):
        if not self.lower_bound > 0:
            raise WeightError("declared lower bound must be positive")

    @classmethod
    def one(cls) -> "WeightFn":
        return cls.const(1.0, "one")

    @classmethod
    def const(cls, c: float, label: Optional[str] = None) -> "WeightFn":
        c = float(c)
        if not c > 0:
            raise WeightError(f"constant weight must be positive, got {c}")
        return cls(lambda x: np.full(np.shape(x)[:-1], c), c, True, label or f"constant:{c:g}", c)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def checked(self, x) -> np.ndarray:
        """Evaluate and enforce the declared lower bound."""
        v = self(x)
        if v.size and (not np.all(np.isfinite(v)) or np.min(v) < self.lower_bound * (1.0 - 1e-12)):
            raise WeightError(
                f"weight {self.label} drops below its declared bound {self.lower_bound:g} "
                f"(min sampled value {np.min(v):.6g})")
        return v


@dataclass(frozen=True)
class CutMeasureEstimate:
    """Cut measure with its standard error (zero for deterministic methods)."""

    value: float
    stderr: float
    method: str


@dataclass(frozen=True)
class FloatingBodyApprox:
    """Radial samples of a floating body on the directions of ``grid``."""

    grid: SphereRule
    radial: np.ndarray
    delta: float
    R: float
    centers: Optional[np.ndarray] = None
    depths: Optional[np.ndarray] = None
    normals: Optional[np.ndarray] = None
    body_radial: Optional[np.ndarray] = None

    @property
    def directions(self) -> np.ndarray:
        return self.grid.nodes


@dataclass(frozen=True)
class ConvergenceReport:
    """Normalised volume differences over a decreasing delta grid."""

    mode: str
    deltas: tuple
    vol_diffs: tuple
    ratios: tuple
    extrapolated: float
    constant: float
    integral: float
    target: float
    relative_error: float
    fitted_order: float
    diagnostics: tuple = field(default=())
    trimmed: tuple = field(default=())


# ---------------------------------------------------------------- helpers


def lens_area(rho: float, R: float, d: float) -> float:
    """Area of the intersection of disks of radii ``rho`` and ``R`` at centre distance ``d``."""
    if d >= rho + R:
        return 0.0
    if d <= abs(R - rho):
        return float(np.pi * min(rho, R) ** 2)
    a1 = np.arccos(np.clip((d * d + rho * rho - R * R) / (2 * d * rho), -1.0, 1.0))
    a2 = np.arccos(np.clip((d * d + R * R - rho * rho) / (2 * d * R), -1.0, 1.0))
    tri = 0.5 * np.sqrt(max((-d + rho + R) * (d + rho - R) * (d - rho + R) * (d + rho + R), 0.0))
    return float(rho * rho * a1 + R * R * a2 - tri)


def lens_volume(rho, R, d):
    """Volume of the intersection of balls of radii ``rho`` and ``R`` at centre distance ``d`` in R^3."""
    rho, R, d = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (rho, R, d)))
    small = np.minimum(rho, R)
    safe_d = np.where(d > 0, d, 1.0)
    mid = (np.pi * (rho + R - d) ** 2
           * (d * d + 2 * d * (rho + R) - 3 * (rho - R) ** 2) / (12.0 * safe_d))
    out = np.where(d >= rho + R, 0.0, np.where(d <= np.abs(R - rho), 4.0 * np.pi / 3.0 * small**3, mid))
    return out if out.ndim else float(out)


def primal_constant(n: int) -> float:
    """``(1/2) ((n + 1) / vol_{n-1}(B^{n-1}))^(2/(n+1))``."""
    return 0.5 * ((n + 1.0) / ball_volume(n - 1)) ** (2.0 / (n + 1))


def dual_constant(n: int) -> float:
    """``n^2 (n^2 - 1)^(2/(n+1)) / (2 sigma(S^{n-2})^(2/(n+1)))`` as stated for the polar limit."""
    return n * n * (n * n - 1.0) ** (2.0 / (n + 1)) / (2.0 * sphere_area(n - 1) ** (2.0 / (n + 1)))


def _boundary_points(body: ConvexBody, U: np.ndarray):
    """Boundary points and Gauss curvatures for normals ``U`` (corners get infinite curvature)."""
    try:
        s = body.inverse_gauss(U)
        return s.x, s.gauss_curvature
    except CornerError:
        if not isinstance(body, ArcBody2D):
            raise
    psi = np.arctan2(U[:, 1], U[:, 0])
    x = np.array([body.boundary_point_at_normal(a) for a in psi])
    kappa = np.full(U.shape[0], np.inf)
    located = body._locate(psi)
    for i, j in enumerate(located):
        if j >= 0:
            kappa[i] = 1.0 / body.arcs[j].radius
    return x, kappa


def _dirs2(phi):
    return np.stack([np.cos(phi), np.sin(phi)], axis=-1)


def _rK(body, phi):
    phi = np.asarray(phi, dtype=float)
    return np.asarray(body.radial(_dirs2(phi.reshape(-1)))).reshape(phi.shape)


def _rb(phi, z, R):
    """Exit distance from the origin of the ray at angle ``phi`` through balls centred at ``z``."""
    b = np.cos(phi) * z[..., 0] + np.sin(phi) * z[..., 1]
    c = z[..., 0] ** 2 + z[..., 1] ** 2 - R * R
    return b + np.sqrt(np.maximum(b * b - c, 0.0))


def illinois(F, a, b, fa, fb, xtol, ftol, maxiter=200):
    """Vectorised Illinois regula falsi on brackets ``[a, b]`` with ``fa * fb <= 0``.

    ``F(idx, x)`` evaluates rows ``idx`` at points ``x``. Rows stop once
    ``|f| <= ftol`` or the bracket is narrower than ``xtol``.
    """
    a, b, fa, fb = (np.array(v, dtype=float) for v in (a, b, fa, fb))
    ftol = np.broadcast_to(np.asarray(ftol, dtype=float), a.shape)
    active = ~((np.abs(fb) <= ftol) | (np.abs(b - a) <= xtol))
    for _ in range(maxiter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ai, bi, fai, fbi = a[idx], b[idx], fa[idx], fb[idx]
        c = np.where(fbi != fai, bi - fbi * (bi - ai) / (fbi - fai), 0.5 * (ai + bi))
        lo, hi = np.minimum(ai, bi), np.maximum(ai, bi)
        c = np.where((c > lo) & (c < hi), c, 0.5 * (ai + bi))
        fc = F(idx, c)
        flip = np.sign(fc) != np.sign(fbi)
        a[idx] = np.where(flip, bi, ai)
        fa[idx] = np.where(flip, fbi, 0.5 * fai)
        b[idx], fb[idx] = c, fc
        active[idx] = ~((np.abs(fc) <= ftol[idx]) | (np.abs(b[idx] - a[idx]) <= xtol))
    return a, b, fa, fb


def _crossing(body, z, R, phi0, side):
    """Angle where the cut circle meets the boundary, on one side of ``phi0``."""
    m = phi0.size
    steps = np.minimum(1e-6 * 2.0 ** np.arange(23), np.pi)
    phis = phi0[:, None] + side * steps[None, :]
    g = _rK(body, phis) - _rb(phis, z[:, None, :], R)
    neg = g <= 0
    if not np.all(neg.any(axis=1)):
        raise GeometryError("cut ball does not meet the boundary; the cap wraps the whole body")
    k = np.argmax(neg, axis=1)
    rows = np.arange(m)
    km = np.maximum(k - 1, 0)
    a = np.where(k > 0, steps[km], 0.0)
    ga = np.where(k > 0, g[rows, km], _rK(body, phi0) - _rb(phi0, z, R))

    def F(idx, off):
        ph = phi0[idx] + side * off
        return _rK(body, ph) - _rb(ph, z[idx], R)

    a, b, fa, fb = illinois(F, a, steps[k], ga, g[rows, k], 1e-15, 0.0)
    return phi0 + side * np.where(np.abs(fb) <= np.abs(fa), b, a)


def _kink_angles(body) -> np.ndarray:
    if isinstance(body, ArcBody2D):
        pts = np.array([a.point(a.end) for a in body.arcs])
        return np.arctan2(pts[:, 1], pts[:, 0])
    return np.zeros(0)


def _cut_2d(body: ConvexBody, z: np.ndarray, R: float, f: WeightFn, phi0: np.ndarray,
            check: bool = False) -> np.ndarray:
    """Weighted area of ``K`` outside each disk ``z_i + R B`` (vectorised over i)."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if np.any(np.hypot(z[:, 0], z[:, 1]) >= R):
        raise GeometryError("the origin must lie inside the cut ball")
    phi0 = np.asarray(phi0, dtype=float).reshape(-1)
    inside = _rK(body, phi0) <= _rb(phi0, z, R)
    out = np.zeros(phi0.size)
    if np.all(inside):
        return out
    rows = np.flatnonzero(~inside)
    zr, p0 = z[rows], phi0[rows]
    lo = _crossing(body, zr, R, p0, -1.0)
    hi = _crossing(body, zr, R, p0, 1.0)
    if check:
        grid = 2.0 * np.pi * (np.arange(COMPONENT_CHECK) + 0.5) / COMPONENT_CHECK
        rel = wrap_angle(grid[None, :] - p0[:, None]) + p0[:, None]
        outside = (rel < lo[:, None]) | (rel > hi[:, None])
        g = _rK(body, rel) - _rb(rel, zr[:, None, :], R)
        if np.any(outside & (g > 1e-12)):
            raise GeometryError("the cut region has more than one component")
    edges = np.linspace(0.0, 1.0, GL_PANELS + 1)[None, :] * (hi - lo)[:, None] + lo[:, None]
    kinks = _kink_angles(body)
    if kinks.size:
        kk = wrap_angle(kinks[None, :] - p0[:, None]) + p0[:, None]
        kk = np.clip(kk, lo[:, None], hi[:, None])
        edges = np.sort(np.concatenate([edges, kk], axis=1), axis=1)
    t, wt = np.polynomial.legendre.leggauss(GL_NODES)
    half = 0.5 * (edges[:, 1:] - edges[:, :-1])
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    phi = mid[:, :, None] + half[:, :, None] * t[None, None, :]
    wphi = half[:, :, None] * wt[None, None, :]
    rk = _rK(body, phi)
    rb = np.minimum(_rb(phi, zr[:, None, None, :], R), rk)
    if f.constant is not None:
        f.checked(np.zeros((1, 2)))
        inner = f.constant * 0.5 * (rk**2 - rb**2)
    elif f.radial:
        pts = rk[..., None] * _dirs2(phi)
        inner = f.checked(pts) * 0.5 * (rk**2 - rb**2)
    else:
        s, ws = np.polynomial.legendre.leggauss(RADIAL_NODES)
        hr = 0.5 * (rk - rb)
        r = 0.5 * (rk + rb)[..., None] + hr[..., None] * s
        pts = r[..., None] * _dirs2(phi)[..., None, :]
        inner = np.sum(f.checked(pts) * r * ws, axis=-1) * hr
    terms = (wphi * inner).reshape(rows.size, -1)
    out[rows] = [pairwise_sum(row) for row in terms]
    return out


def _cut_ball_3d(body: Ball, z: np.ndarray, R: float, f: WeightFn) -> np.ndarray:
    c = np.asarray(body.center)
    d = np.linalg.norm(z - c, axis=1)
    return f.constant * (body.volume() - lens_volume(body.radius, R, d))


def _cut_spheroid(body: Ellipsoid, center: np.ndarray, R: float, f: WeightFn) -> Optional[float]:
    """Rotationally reduced cut volume when the ball centre lies on an axis of revolution."""
    a = np.asarray(body.axes)
    rel = center - np.asarray(body.center)
    for k in range(3):
        others = [i for i in range(3) if i != k]
        if abs(a[others[0]] - a[others[1]]) > 1e-14 * a.max():
            continue
        if np.any(np.abs(rel[others]) > 1e-14 * a.max()):
            continue
        ak, ap, zc = a[k], a[others[0]], rel[k]

        def area(s):
            rk2 = ap * ap * max(1.0 - (s / ak) ** 2, 0.0)
            rb2 = max(R * R - (s - zc) ** 2, 0.0)
            return np.pi * max(rk2 - rb2, 0.0)

        lo, hi = -ak, ak
        # heights where the two slice disks have equal radius bound the cut band
        crossing = np.roots([1.0 - (ap / ak) ** 2, -2.0 * zc, ap * ap - R * R + zc * zc])
        crossing = [c.real for c in np.atleast_1d(crossing) if abs(c.imag) < 1e-12]
        pts = sorted(v for v in [zc - R, zc + R, *crossing] if lo < v < hi)
        val, _ = sp_integrate.quad(area, lo, hi, points=pts or None, epsabs=1e-15, epsrel=1e-12, limit=400)
        return f.constant * val
    return None


def _cut_monte_carlo(body: ConvexBody, center: np.ndarray, R: float, f: WeightFn, seed: int,
                     samples: int = MC_SAMPLES) -> CutMeasureEstimate:
    """Stratified Monte Carlo over the bounding box (4 strata per axis)."""
    rng = np.random.default_rng(seed)
    n = body.dim
    ext = np.array([body.support(e) for e in np.eye(n)])
    neg = np.array([-body.support(-e) for e in np.eye(n)])
    strata = 4
    cells = np.stack(np.meshgrid(*[np.arange(strata)] * n, indexing="ij"), axis=-1).reshape(-1, n)
    per = max(1, samples // cells.shape[0])
    width = (ext - neg) / strata
    box = float(np.prod(ext - neg))
    means, variances = [], []
    for cell in cells:
        pts = neg + (cell + rng.random((per, n))) * width
        norm = np.linalg.norm(pts, axis=1)
        w = pts / np.where(norm > 0, norm, 1.0)[:, None]
        in_k = norm <= body.radial(w)
        out_b = np.linalg.norm(pts - center, axis=1) > R
        vals = np.where(in_k & out_b, f(pts), 0.0)
        means.append(vals.mean())
        variances.append(vals.var(ddof=1) / per)
    cell_vol = box / cells.shape[0]
    value = cell_vol * float(np.sum(means))
    stderr = cell_vol * float(np.sqrt(np.sum(variances)))
    return CutMeasureEstimate(value, stderr, "stratified monte carlo")


def cut_measure_estimate(body: ConvexBody, ball: CutBall, f: Optional[WeightFn] = None,
                         seed: int = 0) -> CutMeasureEstimate:
    """Weighted measure of ``K`` outside ``ball`` with the method used and its standard error."""
    f = f or WeightFn.one()
    center = np.asarray(ball.center, dtype=float)
    if center.size != body.dim:
        raise ParameterError("cut ball and body have different dimensions")
    if body.dim == 2:
        if not np.any(center):
            # concentric: the cut region is an annulus-like band
            return CutMeasureEstimate(_annulus(body, ball.R, f), 0.0, "angular quadrature")
        phi0 = np.arctan2(-center[1], -center[0])
        val = _cut_2d(body, center[None, :], ball.R, f, np.atleast_1d(phi0), check=True)[0]
        return CutMeasureEstimate(float(val), 0.0, "angular quadrature")
    if np.linalg.norm(center) >= ball.R:
        raise GeometryError("the origin must lie inside the cut ball")
    if isinstance(body, Ball) and f.constant is not None:
        return CutMeasureEstimate(float(_cut_ball_3d(body, center[None, :], ball.R, f)[0]), 0.0,
                                  "sphere lens closed form")
    if isinstance(body, Ellipsoid) and f.constant is not None:
        val = _cut_spheroid(body, center, ball.R, f)
        if val is not None:
            return CutMeasureEstimate(float(val), 0.0, "rotational reduction")
    return _cut_monte_carlo(body, center, ball.R, f, seed)


def _annulus(body, R, f):
    grid = build_rule(2, 4096)
    rk = body.radial(grid.nodes)
    diff = np.maximum(rk**2 - R * R, 0.0) * 0.5
    if f.constant is None:
        raise ParameterError("concentric cut balls need a constant weight")
    return float(f.constant * pairwise_sum(grid.weights * diff))


def cut_measure(body: ConvexBody, ball: CutBall, f: Optional[WeightFn] = None, seed: int = 0) -> float:
    """Weighted measure ``int_{K minus ball} f``."""
    return cut_measure_estimate(body, ball, f, seed).value


# ---------------------------------------------------------------- depth solve


def _t_max(x: np.ndarray, U: np.ndarray, R: float) -> np.ndarray:
    hd = np.einsum("md,md->m", x, U)
    disc = hd * hd - np.einsum("md,md->m", x, x) + R * R
    return hd + np.sqrt(np.maximum(disc, 0.0)) - R


def _cuts(body, x, U, t, R, f, check=False):
    z = x - (R + t)[:, None] * U
    if body.dim == 2:
        phi0 = np.arctan2(x[:, 1], x[:, 0])
        return _cut_2d(body, z, R, f, phi0, check)
    if isinstance(body, Ball) and f.constant is not None:
        return _cut_ball_3d(body, z, R, f)
    raise ParameterError("three-dimensional floating bodies are supported for balls with constant weight")


def _solve_depths(body: ConvexBody, U: np.ndarray, delta: float, f: WeightFn, R: float,
                  rtol: float = DEPTH_RTOL):
    """Depths ``t`` with cut measure ``delta`` for every normal in ``U`` (solved in ``s = t^((n+1)/2)``)."""
    n = body.dim
    power = (n + 1) / 2.0
    x, kappa = _boundary_points(body, U)
    tmax = _t_max(x, U, R) * (1.0 - 1e-9)
    smax = tmax**power
    fx = f.checked(x)
    a = np.maximum(np.where(np.isfinite(kappa), kappa ** (1.0 / (n - 1)), 10.0 / R) - 1.0 / R, 1e-3 / R)
    if n == 2:
        s0 = delta * 3.0 * np.sqrt(a) / (4.0 * np.sqrt(2.0) * fx)
    else:
        s0 = delta * a / (np.pi * fx)
    s0 = np.minimum(s0, 0.5 * smax)

    def F(idx, s):
        return _cuts(body, x[idx], U[idx], np.maximum(s, 0.0) ** (1.0 / power), R, f) - delta

    every = np.arange(U.shape[0])
    lo = np.zeros(U.shape[0])
    flo = np.full(U.shape[0], -delta)
    hi = s0.copy()
    fhi = F(every, hi)
    for _ in range(60):
        need = np.flatnonzero(fhi < 0)
        if need.size == 0:
            break
        capped = need[hi[need] >= smax[need]]
        if capped.size:
            raise StarvationError(
                f"delta = {delta:g} exceeds the largest cut available in {capped.size} directions",
                directions=tuple(map(tuple, U[capped])))
        lo[need], flo[need] = hi[need], fhi[need]
        hi[need] = np.minimum(2.0 * hi[need], smax[need])
        fhi[need] = F(need, hi[need])
    lo, hi, flo, fhi = illinois(F, lo, hi, flo, fhi, 0.0, rtol * delta)
    best = np.where(np.abs(fhi) <= np.abs(flo), hi, lo)
    t = best ** (1.0 / power)
    cuts = _cuts(body, x, U, t, R, f, check=(n == 2))
    centers = x - (R + t)[:, None] * U
    return t, centers, cuts, x


def find_cut_depth(body: ConvexBody, u, delta: float, f: Optional[WeightFn] = None,
                   R: float = 2.0) -> CutBall:
    """Cut ball centred on the inner normal at ``x(u)`` removing weighted measure ``delta``.

    Raises
    ------
    StarvationError
        If no ball of the family removes ``delta`` with the origin inside it.
    """
    f = f or WeightFn.one()
    if not delta > 0:
        raise ParameterError("delta must be positive")
    U = np.atleast_2d(np.asarray(u, dtype=float))
    t, centers, _, _ = _solve_depths(body, U, delta, f, R)
    return CutBall(tuple(centers[0]), R, float(t[0]))


# ---------------------------------------------------------------- floating bodies


def floating_body(body: ConvexBody, delta: float, R: float, f: Optional[WeightFn] = None,
                  grid: Optional[SphereRule] = None) -> FloatingBodyApprox:
    """Radial samples of ``K`` intersected with the cut balls of all grid normals."""
    f = f or WeightFn.one()
    grid = grid or build_rule(body.dim, 1024 if body.dim == 2 else 16)
    if grid.n != body.dim:
        raise ParameterError("grid dimension does not match the body")
    if delta < 0:
        raise ParameterError("delta must be nonnegative")
    rk = np.asarray(body.radial(grid.nodes), dtype=float)
    if delta == 0:
        return FloatingBodyApprox(grid, rk.copy(), 0.0, float(R), body_radial=rk)
    if body.dim == 3 and not isinstance(body, Ball):
        raise ParameterError("three-dimensional floating bodies are supported for balls only")
    t, centers, _, _ = _solve_depths(body, grid.nodes, delta, f, R)
    exit_ = ray_ball_exit_min(grid.nodes, centers, float(R))
    radial = np.minimum(rk, exit_)
    return FloatingBodyApprox(grid, radial, float(delta), float(R), centers, t, grid.nodes, rk)


def floating_volume(approx: FloatingBodyApprox) -> float:
    """``(1/n) int r^n dsigma`` over the grid."""
    n = approx.grid.n
    if np.any(approx.radial <= 0):
        raise GeometryError("radial values must be positive")
    return pairwise_sum(approx.grid.weights * approx.radial**n) / n


def _intersection_support_2d(approx: FloatingBodyApprox, psi: np.ndarray) -> np.ndarray:
    thetas = np.arctan2(approx.normals[:, 1], approx.normals[:, 0])
    lo, hi = family_arcs_2d(approx.centers, thetas, approx.R)
    return family_support_2d(psi, approx.centers, thetas, lo, hi, approx.R)


def dual_floating_volume(approx: FloatingBodyApprox, rule: Optional[SphereRule] = None,
                         body: Optional[ConvexBody] = None, method: str = "auto") -> float:
    """Volume of the polar of the floating approximation.

    ``method="arcs"`` (the planar default) uses the exact support function of
    the sampled disk intersection; ``"rays"`` takes the maximum of
    ``r(w) <w, v>`` over grid rays. For ``delta = 0`` the support of ``body``
    is used when given.
    """
    rule = rule or approx.grid
    n = rule.n
    if approx.delta == 0 and body is not None:
        h = np.asarray(body.support(rule.nodes), dtype=float)
    else:
        if method == "auto":
            method = "arcs" if n == 2 and approx.centers is not None else "rays"
        if method == "arcs":
            if n != 2 or approx.centers is None:
                raise ParameterError("arc support needs a planar floating body with cut balls")
            psi = np.arctan2(rule.nodes[:, 1], rule.nodes[:, 0])
            h = _intersection_support_2d(approx, psi)
        elif method == "rays":
            pts = approx.radial[:, None] * approx.grid.nodes
            h = np.max(rule.nodes @ pts.T, axis=1)
        else:
            raise ParameterError(f"unknown support method {method!r}")
    if np.any(h <= 0):
        raise GeometryError("origin is not interior to the floating body")
    return integrate(rule, lambda u: h ** (-float(n))).value / n


def fp_weight(body: ConvexBody, p: float, u) -> np.ndarray:
    """``(<x,N>^(n(n+1)(p-1)) / kappa^(n(p-1)))^(1/(2(n+p)))`` at the boundary point with normal ``u``."""
    n = body.dim
    if p == -n:
        raise ParameterError(f"p = -n excluded (p = {p}, n = {n})")
    u = np.asarray(u, dtype=float)
    s = body.inverse_gauss(np.atleast_2d(u))
    a = 0.5 if np.isinf(p) else (p - 1.0) / (2.0 * (n + p))
    val = np.exp(a * (n * (n + 1) * np.log(s.support_dot) - n * np.log(s.gauss_curvature)))
    return val[0] if u.ndim == 1 else val


def fp_weight_fn(body: ConvexBody, p: float, resolution: int = 4096) -> WeightFn:
    """``f_p`` extended to ``K`` as a function constant along rays from the origin."""
    if p == -body.dim:
        raise ParameterError(f"p = -n excluded (p = {p}, n = {body.dim})")

    def func(x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, body.dim)
        norm = np.linalg.norm(flat, axis=1)
        w = flat / np.where(norm > 0, norm, 1.0)[:, None]
        w[norm == 0] = np.eye(body.dim)[0]
        return fp_weight(body, p, body.normal_at_ray(w)).reshape(x.shape[:-1])

    probe = build_rule(body.dim, resolution if body.dim == 2 else 64).nodes
    lower = float(np.min(fp_weight(body, p, probe))) * (1.0 - 1e-6)
    return WeightFn(func, lower, True, f"fp:{p:g}")


# ---------------------------------------------------------------- convergence


def default_deltas(body: ConvexBody, levels: int = 6, delta0: float = 1e-2) -> tuple:
    """``delta0 * vol(K) * 4^-k`` for ``k < levels``."""
    vol = body.volume()
    return tuple(delta0 * vol * 4.0**-k for k in range(levels))


def richardson(deltas: Sequence[float], ratios: Sequence[float], n: int) -> float:
    """Remove a first-order ``delta^(2/(n+1))`` correction using the two smallest deltas."""
    order = np.argsort(deltas)
    a, b = order[0], order[1]
    xa, xb = deltas[a] ** (2.0 / (n + 1)), deltas[b] ** (2.0 / (n + 1))
    return float((xa * ratios[b] - xb * ratios[a]) / (xa - xb))


def fitted_order(deltas: Sequence[float], diffs: Sequence[float], decades: float = 2.0) -> float:
    """Least-squares slope of ``log diff`` against ``log delta`` over the smallest ``decades``."""
    d = np.asarray(deltas, dtype=float)
    y = np.asarray(diffs, dtype=float)
    keep = (d <= d.min() * 10.0**decades * (1 + 1e-9)) & (y > 0)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(d[keep]), np.log(y[keep]), 1)[0])


def _check_grid(deltas):
    d = np.asarray(deltas, dtype=float)
    if d.ndim != 1 or d.size < 2 or np.any(d <= 0) or np.any(np.diff(d) >= 0):
        raise ParameterError("delta grid must be strictly decreasing, positive, with at least two points")
    return d


def primal_integral(body: ConvexBody, R: float, f: WeightFn, rule: Optional[SphereRule] = None) -> float:
    """``int f^(-2/(n+1)) prod (kappa_i - 1/R)^(1/(n+1)) dmu`` over the boundary."""
    n = body.dim
    if isinstance(body, ArcBody2D):
        t, wt = np.polynomial.legendre.leggauss(64)
        total = []
        for arc in body.arcs:
            slack = max(1.0 / arc.radius - 1.0 / R, 0.0)
            if abs(slack) <= 1e-12 or arc.end <= arc.start:
                continue
            phi = 0.5 * (arc.end - arc.start) * t + 0.5 * (arc.start + arc.end)
            fx = f.checked(arc.point(phi))
            total.append(0.5 * (arc.end - arc.start) * wt * fx ** (-2.0 / (n + 1))
                         * slack ** (1.0 / (n + 1)) * arc.radius)
        return pairwise_sum(np.concatenate(total)) if total else 0.0
    rule = rule or build_rule(n, 1024 if n == 2 else 64)

    def g(u):
        s = body.inverse_gauss(u)
        w = _weight(s.kappas, R)
        rel = w * s.gauss_curvature ** (1.0 / (n + 1))
        return f.checked(s.x) ** (-2.0 / (n + 1)) * rel / s.gauss_curvature

    return integrate(rule, g).value


def dual_integral(body: ConvexBody, R: float, rule: Optional[SphereRule] = None) -> float:
    """``int kappa / <x,N>^(n+1) prod (kappa_i - 1/R)^(1/(n+1)) dmu`` (the Omega integrand at p = -n/(n+2))."""
    n = body.dim
    rule = rule or build_rule(n, 1024 if n == 2 else 64)

    def g(u):
        s = body.inverse_gauss(u)
        w = _weight(s.kappas, R)
        rel = w * s.gauss_curvature ** (1.0 / (n + 1))
        return rel / s.support_dot ** (n + 1)

    return integrate(rule, g).value


def _lens_check(body, R, t, cuts):
    if not (isinstance(body, Ball) and body.dim == 2 and not any(body.center)):
        return None
    rho = body.radius
    exact = np.array([np.pi * rho * rho - lens_area(rho, R, R + ti - rho) for ti in t])
    return float(np.max(np.abs(cuts - exact) / exact))


def converge_primal(body: ConvexBody, R: float, f: Optional[WeightFn] = None,
                    deltas: Optional[Sequence[float]] = None, grid: Optional[SphereRule] = None,
                    rule: Optional[SphereRule] = None) -> ConvergenceReport:
    """Volume lost to the weighted floating body, normalised by ``delta^(2/(n+1))``.

    The target is ``c_n`` times :func:`primal_integral`. Deltas that starve
    are dropped and listed in ``trimmed``.
    """
    f = f or WeightFn.one()
    n = body.dim
    rep = validate_ball_convex(body, R)
    if rep.min_slack < 0:
        raise PreconditionError(f"body is not {R:g}-ball convex (min slack {rep.min_slack:.3g})")
    deltas = _check_grid(deltas if deltas is not None else default_deltas(body))
    grid = grid or build_rule(n, 1024 if n == 2 else 16)
    vol_k = floating_volume(floating_body(body, 0.0, R, f, grid))
    kept, diffs, diag, trimmed = [], [], [], []
    for d in deltas:
        try:
            approx = floating_body(body, float(d), R, f, grid)
        except StarvationError:
            trimmed.append(float(d))
            continue
        diff = vol_k - floating_volume(approx)
        cuts = _cuts(body, *_cut_inputs(body, approx), R, f)
        row = {"delta": float(d), "vol_diff": float(diff),
               "depth_min": float(approx.depths.min()), "depth_max": float(approx.depths.max()),
               "cut_residual": float(np.max(np.abs(cuts - d)) / d)}
        lens = _lens_check(body, R, approx.depths, cuts)
        if lens is not None:
            row["lens_oracle_deviation"] = lens
        kept.append(float(d))
        diffs.append(float(diff))
        diag.append(row)
    if len(kept) < 2:
        raise StarvationError("fewer than two deltas admit a floating body")
    ratios = [df / d ** (2.0 / (n + 1)) for d, df in zip(kept, diffs)]
    cn = primal_constant(n)
    integral = primal_integral(body, R, f, rule)
    return _report("primal", kept, diffs, ratios, n, cn, integral, diag, trimmed)


def _cut_inputs(body, approx):
    x, _ = _boundary_points(body, approx.normals)
    return x, approx.normals, approx.depths


def _report(mode, kept, diffs, ratios, n, cn, integral, diag, trimmed, extra=None):
    extrap = richardson(kept, ratios, n)
    target = cn * integral
    err = abs(extrap - target) / abs(target) if target != 0 else abs(extrap)
    if extra:
        diag = list(diag) + [extra]
    return ConvergenceReport(mode, tuple(kept), tuple(diffs), tuple(ratios), extrap, cn, integral,
                             target, float(err), fitted_order(kept, diffs), tuple(diag), tuple(trimmed))


def converge_dual(body: ConvexBody, R: float, deltas: Optional[Sequence[float]] = None,
                  grid: Optional[SphereRule] = None, rule: Optional[SphereRule] = None) -> ConvergenceReport:
    """Polar-volume growth of the ball floating body, normalised by ``delta^(2/(n+1))``.

    The target uses :func:`dual_constant`. The last diagnostics entry records
    the target with the constant divided by ``n^2``.
    """
    n = body.dim
    rep = validate_ball_convex(body, R)
    if not rep.all_strict:
        raise PreconditionError(f"body must have curvature strictly above 1/R = {1.0 / R:g}")
    deltas = _check_grid(deltas if deltas is not None else default_deltas(body))
    grid = grid or build_rule(n, 1024 if n == 2 else 16)
    rule = rule or grid
    f = WeightFn.one()
    polar_k = dual_floating_volume(floating_body(body, 0.0, R, f, grid), rule, body)
    kept, diffs, diag, trimmed = [], [], [], []
    for d in deltas:
        try:
            approx = floating_body(body, float(d), R, f, grid)
        except StarvationError:
            trimmed.append(float(d))
            continue
        diff = dual_floating_volume(approx, rule) - polar_k
        kept.append(float(d))
        diffs.append(float(diff))
        diag.append({"delta": float(d), "polar_diff": float(diff),
                     "depth_min": float(approx.depths.min()), "depth_max": float(approx.depths.max())})
    if len(kept) < 2:
        raise StarvationError("fewer than two deltas admit a floating body")
    ratios = [df / d ** (2.0 / (n + 1)) for d, df in zip(kept, diffs)]
    cn = dual_constant(n)
    integral = dual_integral(body, R, build_rule(n, 1024 if n == 2 else 64))
    alt = cn / n**2
    extrap = richardson(kept, ratios, n)
    extra = {"alternative_constant": alt, "alternative_target": alt * integral,
             "alternative_relative_error": abs(extrap - alt * integral) / abs(alt * integral)}
    return _report("dual", kept, diffs, ratios, n, cn, integral, diag, trimmed, extra)


# ---------------------------------------------------------------- cap asymptotics


def cap_volume_check(a: Sequence[float], R: float, h: float, seed: int = 0) -> tuple[float, float]:
    """Cap cut from the ellipsoid at the vertex ``a_n e_n`` by the ball of radius R at depth h.

    Returns the numerically computed cap volume and the small-cap
    asymptotic ``2^((n+1)/2) / ((n-1)(n+1)) h^((n+1)/2) int (sum (a_n/a_i^2 - 1/R) xi_i^2)^(-(n-1)/2)``.
    """
    a = np.asarray(a, dtype=float)
    n = a.size
    if n not in (2, 3) or np.any(a <= 0) or not h > 0:
        raise ParameterError("need 2 or 3 positive semi-axes and h > 0")
    coeff = a[-1] / a[:-1] ** 2 - 1.0 / R
    if np.any(coeff <= 0):
        raise ParameterError("cap curvatures a_n / a_i^2 must exceed 1/R")
    body = Ellipsoid(tuple(a))
    e = np.eye(n)[-1]
    center = a[-1] * e - (R + h) * e
    numeric = cut_measure(body, CutBall(tuple(center), R), WeightFn.one(), seed)
    if n == 2:
        sphere_int = 2.0 / np.sqrt(coeff[0])
    else:
        sphere_int = 2.0 * np.pi / np.sqrt(coeff[0] * coeff[1])
    asym = 2.0 ** ((n + 1) / 2.0) / ((n - 1.0) * (n + 1.0)) * h ** ((n + 1) / 2.0) * sphere_int
    return float(numeric), float(asym)
