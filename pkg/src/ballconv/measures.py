"""L_p relative surface areas, the classical L_p affine surface area and their checks.

For a body K, a radius R and an exponent p the relative surface area is the
boundary integral

    Omega_p^R(K) = int g^e * kappa^(1/(n+1)) * w dmu,

with ``g = kappa^(1/(n+1)) / <x, N>``, ``e = n (p - 1) / (n + p)`` and the
weight ``w = prod_i (1 - 1/(R kappa_i))^(1/(n+1))``. Setting ``w = 1``
gives the classical ``as_p``. Smooth bodies are integrated over the sphere
of normals (``dmu = dsigma / kappa``); arc bodies are integrated arc by arc.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate

from .bodies import (SLACK_SNAP, ArcBody2D, BoundarySample, ConvexBody, PNormBall2D,
                     validate_ball_convex)
from .errors import NotBallConvexError, ParameterError, PreconditionError
from .kernels import pairwise_sum
from .quadrature import SphereRule, ball_volume, build_rule, integrate

EXPONENT_CAP = 1e6
ARC_NODES = 64
PROBE_CUTOFFS = tuple(1e-2 * 10.0**-k for k in range(5))
PROBE_GROWTH = 1.1
PROBE_PLATEAU = 1e-3


@dataclass(frozen=True)
class OmegaParams:
    """Exponent ``p`` in [-inf, inf] (not -n) and radius ``R`` > 0 (``inf`` drops the weight)."""

    p: float
    R: float

    def __post_init__(self):
        if np.isnan(self.p):
            raise ParameterError("p must not be NaN")
        if not self.R > 0:
            raise ParameterError(f"R must be positive, got {self.R}")

    def check(self, n: int) -> None:
        if self.p == -n:
            raise ParameterError(f"p = -n excluded (p = {self.p}, n = {n})")

    def exponent(self, n: int) -> tuple[float, bool]:
        """``n (p - 1) / (n + p)`` with its limit ``n`` at ``p = +-inf``; returns ``(e, saturated)``."""
        self.check(n)
        if np.isinf(self.p):
            return float(n), False
        e = n * (self.p - 1.0) / (n + self.p)
        if abs(e) > EXPONENT_CAP:
            return float(np.copysign(EXPONENT_CAP, e)), True
        return float(e), False


@dataclass(frozen=True)
class MeasureResult:
    """Value of a boundary measure with provenance of the evaluation.

    ``divergent`` is set (and ``value`` is ``inf``) when truncated
    estimates keep growing under refinement; ``estimates`` then holds
    ``(cutoff, value)`` pairs.
    """

    value: float
    rule_size: int
    clamp_report: str = ""
    divergent: bool = False
    saturated: bool = False
    estimates: tuple = field(default=())


def _slack(kappas: np.ndarray, R: float) -> np.ndarray:
    s = kappas - 1.0 / R
    s = np.where(np.abs(s) <= SLACK_SNAP, 0.0, s)
    if np.any(s < 0):
        raise NotBallConvexError(
            f"curvature below 1/R = {1.0 / R:.6g} (slack {s.min():.3g})", min_slack=float(s.min()))
    return s


def _weight(kappas: np.ndarray, R: float) -> np.ndarray:
    n = kappas.shape[1] + 1
    if np.isinf(R):
        return np.ones(kappas.shape[0])
    s = _slack(kappas, R)
    return np.prod(s / kappas, axis=1) ** (1.0 / (n + 1))


def _density(kappa, hdot, e, n, w, per_sphere: bool):
    """Integrand against dmu (or against dsigma when ``per_sphere``), evaluated in logs."""
    power = (e + 1.0) / (n + 1.0) - (1.0 if per_sphere else 0.0)
    with np.errstate(divide="ignore"):
        logv = power * np.log(kappa) - e * np.log(hdot) + np.log(w)
    return np.where(w > 0, np.exp(logv), 0.0)


def weight_w(body: ConvexBody, u, R: float):
    """Relative-curvature weight ``prod_i (1 - 1/(R kappa_i))^(1/(n+1))`` at normals ``u``."""
    u = np.asarray(u, dtype=float)
    s = body.inverse_gauss(np.atleast_2d(u))
    w = _weight(s.kappas, R)
    return w[0] if u.ndim == 1 else w


def _clamp_text(s: BoundarySample, body: ConvexBody) -> str:
    count = int(np.count_nonzero(s.clamped))
    if not count:
        return ""
    return f"{count} normals clamped to {body.axis_cutoff:g} rad from the curvature singularities"


def _arc_integral(body: ArcBody2D, e: float, R: float) -> tuple[float, int]:
    data = boundary_data(body, R)
    return data.integral(_density(data.kappa, data.hdot, e, 2, data.w, False)), data.kappa.size


@dataclass(frozen=True)
class BoundaryData:
    """Boundary quadrature: ``sum(mu_weights * F(kappa, hdot, w))`` approximates ``int F dmu``."""

    mu_weights: np.ndarray
    kappa: np.ndarray
    hdot: np.ndarray
    w: np.ndarray
    n: int

    def integral(self, values) -> float:
        return pairwise_sum(self.mu_weights * values)

    def omega_log(self, p: float) -> float:
        """``log Omega_p`` on this sample, evaluated in log space."""
        e, _ = OmegaParams(p, np.inf).exponent(self.n)
        dens = _density(self.kappa, self.hdot, e, self.n, self.w, False)
        val = self.integral(dens)
        return float(np.log(val)) if val > 0 else float("-inf")


def boundary_data(body: ConvexBody, R: float, rule: Optional[SphereRule] = None) -> BoundaryData:
    """Curvature, support and weight samples with boundary-measure weights.

    Smooth bodies use the sphere rule (``dmu = dsigma / kappa``); arc bodies
    use Gauss-Legendre nodes on every arc.
    """
    n = body.dim
    if isinstance(body, ArcBody2D):
        t, wt = np.polynomial.legendre.leggauss(ARC_NODES)
        mu, kap, hd, ww = [], [], [], []
        for arc in body.arcs:
            length = arc.end - arc.start
            pieces = max(1, int(np.ceil(length / (np.pi / 2))))
            edges = np.linspace(arc.start, arc.end, pieces + 1)
            kappa = 1.0 / arc.radius
            w = _weight(np.array([[kappa]]), R)[0]
            for a, b in zip(edges[:-1], edges[1:]):
                phi = 0.5 * (b - a) * t + 0.5 * (a + b)
                mu.append(0.5 * (b - a) * wt * arc.radius)
                kap.append(np.full(phi.shape, kappa))
                hd.append(arc.center[0] * np.cos(phi) + arc.center[1] * np.sin(phi) + arc.radius)
                ww.append(np.full(phi.shape, w))
        return BoundaryData(*(np.concatenate(v) for v in (mu, kap, hd, ww)), n)
    if rule is None:
        rule = build_rule(n, 1024 if n == 2 else 64)
    s = body.inverse_gauss(rule.nodes)
    kappa = s.gauss_curvature
    return BoundaryData(rule.weights / kappa, kappa, s.support_dot, _weight(s.kappas, R), n)


def _sphere_integrand(body: ConvexBody, e: float, R: float):
    n = body.dim

    def f(u):
        s = body.inverse_gauss(u)
        w = _weight(s.kappas, R)
        return _density(s.gauss_curvature, s.support_dot, e, n, w, True)
    return f


def divergence_probe(body: PNormBall2D, params: OmegaParams,
                     cutoffs: Sequence[float] = PROBE_CUTOFFS) -> tuple[bool, tuple]:
    """Integrals over normals at angular distance >= cutoff from the curvature singularities.

    Returns ``(divergent, ((cutoff, value), ...))``; divergent means every
    refinement grew the estimate by at least ``PROBE_GROWTH``.
    """
    e, _ = params.exponent(2)
    f = _sphere_integrand(body, e, params.R)

    def at(theta):
        return float(f(np.array([[np.cos(theta), np.sin(theta)]]))[0])

    out = []
    for eps in cutoffs:
        total = 0.0
        for q in range(4):
            axis = q * np.pi / 2
            for sign, base in ((1.0, axis), (-1.0, axis + np.pi / 2)):
                val, _ = sp_integrate.quad(
                    lambda s: at(base + sign * np.exp(s)) * np.exp(s),
                    np.log(eps), np.log(np.pi / 4), epsabs=0.0, epsrel=1e-10, limit=200)
                total += val
        out.append((float(eps), total))
    vals = [v for _, v in out]
    growing = all(b >= PROBE_GROWTH * a for a, b in zip(vals[:-1], vals[1:]))
    return growing, tuple(out)


def omega_p_R(body: ConvexBody, params: OmegaParams, rule: Optional[SphereRule] = None) -> MeasureResult:
    """L_p relative surface area of ``body`` at radius ``params.R``.

    Raises
    ------
    ParameterError
        If ``p = -n``.
    NotBallConvexError
        If some principal curvature is below ``1/R``.
    """
    n = body.dim
    e, saturated = params.exponent(n)
    if not np.isinf(params.R):
        rep = validate_ball_convex(body, params.R, rule.resolution if rule is not None else 512)
        if rep.min_slack < 0:
            raise NotBallConvexError(
                f"body is not {params.R:g}-ball convex (min slack {rep.min_slack:.3g})",
                min_slack=rep.min_slack)
    if isinstance(body, ArcBody2D):
        value, size = _arc_integral(body, e, params.R)
        return MeasureResult(value, size, "", False, saturated)
    if rule is None:
        rule = build_rule(n, 1024 if n == 2 else 64)
    if rule.n != n:
        raise ParameterError(f"rule dimension {rule.n} does not match body dimension {n}")
    clamp = _clamp_text(body.inverse_gauss(rule.nodes), body)
    estimates = ()
    if isinstance(body, PNormBall2D) and params.p < -n:
        divergent, estimates = divergence_probe(body, params)
        if divergent:
            return MeasureResult(float("inf"), rule.size, clamp, True, saturated, estimates)
    value = integrate(rule, _sphere_integrand(body, e, params.R)).value
    return MeasureResult(value, rule.size, clamp, False, saturated, estimates)


def as_p(body: ConvexBody, p: float, rule: Optional[SphereRule] = None) -> MeasureResult:
    """Classical L_p affine surface area (no relative weight)."""
    return omega_p_R(body, OmegaParams(p, float("inf")), rule)


def homogeneity_degree(n: int, p: float) -> float:
    """Scaling degree ``n (n - p) / (n + p)``, equal to ``-n`` at ``p = +-inf``."""
    if np.isinf(p):
        return -float(n)
    return n * (n - p) / (n + p)


def _rel(lhs: float, rhs: float) -> float:
    if lhs == rhs:
        return 0.0
    return abs(lhs - rhs) / abs(rhs)


def verify_homogeneity(body: ConvexBody, a: float, params: OmegaParams,
                       rule: Optional[SphereRule] = None) -> float:
    """Relative gap between the relative area of ``a K`` at ``a R`` and ``a^deg`` times that of ``K``."""
    if not a > 0:
        raise ParameterError("scale factor must be positive")
    lhs = omega_p_R(body.scaled(a), OmegaParams(params.p, a * params.R), rule).value
    rhs = a ** homogeneity_degree(body.dim, params.p) * omega_p_R(body, params, rule).value
    return _rel(lhs, rhs)


def _check_arc_radii(body: ArcBody2D, R: float, name: str) -> None:
    big = max(a.radius for a in body.arcs)
    if big > R * (1.0 + 1e-12):
        raise PreconditionError(f"{name} has an arc of radius {big:g} > R = {R:g}")


def verify_valuation(K: ArcBody2D, L: ArcBody2D, union: ArcBody2D, inter: ArcBody2D,
                     params: OmegaParams) -> float:
    """Relative defect of inclusion-exclusion for the relative surface area.

    Returns ``|W(K u L) + W(K n L) - W(K) - W(L)| / (W(K) + W(L))``, or 0 when
    every term vanishes.
    """
    for body, name in ((K, "K"), (L, "L"), (union, "union"), (inter, "intersection")):
        if not isinstance(body, ArcBody2D):
            raise PreconditionError(f"{name} must be an arc body")
        _check_arc_radii(body, params.R, name)
    if validate_ball_convex(union, params.R).min_slack < 0:
        raise PreconditionError("union is not ball convex")
    wk, wl, wu, wi = (omega_p_R(b, params).value for b in (K, L, union, inter))
    denom = wk + wl
    if denom == 0.0 and wu == 0.0 and wi == 0.0:
        return 0.0
    return abs(wu + wi - wk - wl) / denom


def _disk_covered(base: ArcBody2D, disks, points: int = 4096) -> bool:
    phi = 2.0 * np.pi * np.arange(points) / points
    w = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    x = base.radial(w)[:, None] * w
    inside = np.zeros(points, dtype=bool)
    for c, r in disks:
        inside |= np.linalg.norm(x - np.asarray(c, dtype=float), axis=1) <= r * (1.0 + 1e-12)
    return bool(inside.all())


def valuation_construction(d1, d2, base: Sequence) -> tuple[ArcBody2D, ArcBody2D, ArcBody2D, ArcBody2D]:
    """Bodies ``(K, L, K u L, K n L)`` from disks ``d1``, ``d2`` and a disk-intersection base M.

    Each disk is ``(center, radius)``. ``K = D1 n M`` and ``L = D2 n M``;
    if M lies in ``D1 u D2`` then ``K u L = M`` and ``K n L = D1 n D2 n M``.
    """
    base = [tuple(d) for d in base]
    m = ArcBody2D.from_disks([c for c, _ in base], [r for _, r in base])
    if not _disk_covered(m, [d1, d2]):
        raise PreconditionError("base is not covered by the union of the two disks")

    def inter(disks):
        return ArcBody2D.from_disks([c for c, _ in disks], [r for _, r in disks])

    return inter([d1] + base), inter([d2] + base), m, inter([d1, d2] + base)


@dataclass(frozen=True)
class Chain:
    """An inequality chain ``values[0] <= values[1] <= ...`` with its verdict."""

    name: str
    labels: tuple
    values: tuple
    ordered: bool
    slacks: tuple


@dataclass(frozen=True)
class ChainReport:
    p: float
    R: float
    chains: tuple
    divergent: bool = False

    @property
    def ordered(self) -> bool:
        return all(c.ordered for c in self.chains)


def _chain(name, labels, values, tol=1e-12) -> Chain:
    values = tuple(float(v) for v in values)
    slacks = tuple(b - a for a, b in zip(values[:-1], values[1:]))
    finite = all(np.isfinite(values))
    ordered = finite and all(s >= -tol * max(1.0, abs(v)) for s, v in zip(slacks, values[1:]))
    return Chain(name, tuple(labels), values, ordered, slacks)


def verify_bounds(body: ConvexBody, params: OmegaParams, rule: Optional[SphereRule] = None) -> ChainReport:
    """Evaluate the boundedness chains that apply to ``params.p``.

    ``1 <= p``: lower bound through ``Omega_1`` and the affine isoperimetric
    upper bound; ``0 <= p <= 1``: the isoperimetric upper bound;
    ``-n < p <= 1``: upper bound through ``Omega_1``; ``p < -n``: lower bound
    through ``Omega_1`` and ``as_p`` above. For ``p >= 0`` the chain
    ``Omega_p <= as_p <= isoperimetric bound`` is added.
    """
    n, p, R = body.dim, params.p, params.R
    omega = omega_p_R(body, params, rule)
    if omega.divergent:
        return ChainReport(p, R, (_chain("divergent", ("0", "Omega_p"), (0.0, omega.value)),), True)
    w = omega.value
    w1 = omega_p_R(body, OmegaParams(1.0, R), rule).value
    vol = body.volume()
    if np.isinf(p):
        iso = n * ball_volume(n) ** 2 * vol ** -1.0
        low_exp = n * n / (n + 1.0)
    else:
        iso = n * ball_volume(n) ** (2 * p / (n + p)) * vol ** ((n - p) / (n + p))
        low_exp = n * n * (p - 1) / ((n + 1.0) * (n + p))
    chains = []
    if p >= 1:
        chains.append(_chain("lower via Omega_1, upper isoperimetric",
                             ("0", "R^-a Omega_1", "Omega_p", "isoperimetric"),
                             (0.0, R**-low_exp * w1, w, iso)))
    if 0 <= p <= 1:
        chains.append(_chain("isoperimetric", ("0", "Omega_p", "isoperimetric"), (0.0, w, iso)))
    if -n < p <= 1:
        up_exp = n * (n - 1) * (p - 1) / ((n + 1.0) * (n + p))
        chains.append(_chain("upper via Omega_1", ("0", "Omega_p", "R^-b Omega_1"),
                             (0.0, w, R**-up_exp * w1)))
    if p < -n:
        asp = as_p(body, p, rule).value
        chains.append(_chain("lower via Omega_1, upper as_p",
                             ("0", "R^-a Omega_1", "Omega_p", "as_p"),
                             (0.0, R**-low_exp * w1, w, asp)))
    if p >= 0:
        asp = as_p(body, p, rule).value
        chains.append(_chain("relative below classical below isoperimetric",
                             ("Omega_p", "as_p", "isoperimetric"), (w, asp, iso)))
    return ChainReport(p, R, tuple(chains))
