"""Entropy power, Kullback-Leibler divergence and the monotonicity and Hoelder inequalities.

All comparisons run in log space: ``(Omega_p / Omega_inf)^(n+p)`` is handled
as ``(n + p) (log Omega_p - log Omega_inf)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import kl_div

from .bodies import ConvexBody
from .kernels import pairwise_sum
from .errors import DegenerateBodyError, EvaluationError, ParameterError, PreconditionError
from .measures import BoundaryData, boundary_data
from .quadrature import SphereRule

LIMIT_PS = (10.0, 30.0, 100.0, 300.0)
DEFAULT_P_GRID = (-1.0, -0.5, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0, 300.0)
MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class EntropyResult:
    """``log_E`` from the integral formula and ``(p, (Omega_p/Omega_inf)^(n+p))`` limit estimates."""

    log_E: float
    E: float
    limit_estimates: tuple


@dataclass(frozen=True)
class DensityPair:
    """Densities ``p = kappa / (Omega_inf <x,N>^n)`` and ``q = <x,N> / Omega_0`` at boundary nodes.

    ``measure`` holds the node weights of ``w_K dmu``; ``raw_p`` and
    ``raw_q`` are the integrals before renormalisation.
    """

    p: np.ndarray
    q: np.ndarray
    measure: np.ndarray
    raw_p: float
    raw_q: float


def _data(body: ConvexBody, R: float, rule: Optional[SphereRule]) -> BoundaryData:
    data = boundary_data(body, R, rule)
    if not np.any(data.w > 0):
        raise DegenerateBodyError("no boundary point has all curvatures above 1/R")
    return data


def _log_omega(data: BoundaryData, p: float) -> float:
    val = data.omega_log(p)
    if not np.isfinite(val):
        raise DegenerateBodyError(f"relative surface area vanishes at p = {p}")
    return val


def _limit_log(data: BoundaryData, p: float, log_inf: float) -> float:
    return (data.n + p) * (_log_omega(data, p) - log_inf)


def entropy_integral(body: ConvexBody, R: float, rule: Optional[SphereRule] = None) -> EntropyResult:
    """Entropy power from ``log E = -(n / Omega_inf) int kappa/<x,N>^n log(kappa/<x,N>^(n+1)) w dmu``."""
    data = _data(body, R, rule)
    n = data.n
    log_inf = _log_omega(data, np.inf)
    dens = np.where(data.w > 0, data.kappa / data.hdot**n * data.w, 0.0)
    log_e = -n * np.exp(-log_inf) * data.integral(dens * np.log(data.kappa / data.hdot ** (n + 1)))
    est = tuple((p, float(np.exp(_limit_log(data, p, log_inf)))) for p in LIMIT_PS)
    return EntropyResult(float(log_e), float(np.exp(log_e)), est)


def entropy_limit(body: ConvexBody, R: float, p_max: float = 300.0,
                  rule: Optional[SphereRule] = None) -> tuple:
    """``(p, (Omega_p / Omega_inf)^(n+p))`` for ``p`` in ``p_max * (1/30, 1/10, 1/3, 1)``."""
    if not p_max > 0:
        raise ParameterError("p_max must be positive")
    data = _data(body, R, rule)
    log_inf = _log_omega(data, np.inf)
    ps = (p_max / 30.0, p_max / 10.0, p_max / 3.0, float(p_max))
    return tuple((p, float(np.exp(_limit_log(data, p, log_inf)))) for p in ps)


def densities(body: ConvexBody, R: float, rule: Optional[SphereRule] = None) -> DensityPair:
    """Raw densities at the boundary nodes with their integrals against ``w_K dmu``."""
    data = _data(body, R, rule)
    n = data.n
    omega_inf = np.exp(_log_omega(data, np.inf))
    omega_0 = np.exp(_log_omega(data, 0.0))
    p = data.kappa / (omega_inf * data.hdot**n)
    q = data.hdot / omega_0
    measure = data.mu_weights * data.w
    return DensityPair(p, q, measure, data.integral(p * data.w), data.integral(q * data.w))


def kl_divergence(body: ConvexBody, R: float, rule: Optional[SphereRule] = None) -> float:
    """``int p log(p/q) w_K dmu`` after renormalising both densities on the nodes."""
    d = densities(body, R, rule)
    live = d.measure > 0
    if np.any((d.p[live] <= 0) | (d.q[live] <= 0)):
        raise EvaluationError("nonpositive density at a boundary node")
    P = d.measure[live] * d.p[live] / d.raw_p
    Q = d.measure[live] * d.q[live] / d.raw_q
    # elementwise P log(P/Q) - P + Q is nonnegative and sums to the divergence
    return pairwise_sum(kl_div(P, Q))


def kl_identity_rhs(body: ConvexBody, R: float, rule: Optional[SphereRule] = None) -> float:
    """``log(Omega_0 / Omega_inf * E^(-1/n))``."""
    data = _data(body, R, rule)
    log_e = entropy_integral(body, R, rule).log_E
    return _log_omega(data, 0.0) - _log_omega(data, np.inf) - log_e / data.n


@dataclass(frozen=True)
class MonotonicityReport:
    """Log values of the decreasing sequence (i) and the increasing sequence (ii).

    ``step_i`` are consecutive decreases of (i), ``step_ii`` consecutive
    increases of (ii); both should be ``>= -tol``.
    """

    p_grid: tuple
    log_i: tuple
    p_grid_ii: tuple
    log_ii: tuple
    step_i: tuple
    step_ii: tuple
    violations_i: tuple
    violations_ii: tuple

    @property
    def ok(self) -> bool:
        return not self.violations_i and not self.violations_ii

    @property
    def min_strict(self) -> float:
        return float(min(self.step_i + self.step_ii))


def verify_monotonicity(body: ConvexBody, R: float, p_grid: Sequence[float] = DEFAULT_P_GRID,
                        rule: Optional[SphereRule] = None, tol: float = MONOTONE_TOL) -> MonotonicityReport:
    """Check that ``(Omega_p/Omega_inf)^(n+p)`` decreases and ``(Omega_p/Omega_0)^((n+p)/p)`` increases."""
    data = _data(body, R, rule)
    n = data.n
    grid = tuple(sorted(float(p) for p in p_grid))
    if any(p <= -n for p in grid):
        raise ParameterError(f"p grid must lie in (-{n}, inf)")
    log_inf = _log_omega(data, np.inf)
    log_0 = _log_omega(data, 0.0)
    li = tuple(_limit_log(data, p, log_inf) for p in grid)
    grid_ii = tuple(p for p in grid if p != 0.0)
    lii = tuple((n + p) / p * (_log_omega(data, p) - log_0) for p in grid_ii)
    step_i = tuple(a - b for a, b in zip(li[:-1], li[1:]))
    step_ii = tuple(b - a for a, b in zip(lii[:-1], lii[1:]))
    vi = tuple((grid[k], grid[k + 1]) for k, s in enumerate(step_i) if s < -tol)
    vii = tuple((grid_ii[k], grid_ii[k + 1]) for k, s in enumerate(step_ii) if s < -tol)
    return MonotonicityReport(grid, li, grid_ii, lii, step_i, step_ii, vi, vii)


@dataclass(frozen=True)
class HoelderReport:
    """Log-space slacks (right minus left) of the two interpolation inequalities."""

    r: float
    s: float
    t: float
    slack_i: float
    slack_ii: float
    degenerate_i: bool
    degenerate_ii: bool


def verify_interpolation(body: ConvexBody, R: float, r: float, s: float, t: float,
                    rule: Optional[SphereRule] = None) -> HoelderReport:
    """Slacks of the three-exponent inequality (i) and the two-exponent inequality (ii).

    (i) ``Omega_r <= Omega_t^a Omega_s^b`` needs
    ``1 < (n+r)(t-s) / ((n+t)(r-s)) < inf``;
    (ii) ``Omega_r / Omega_0 <= (Omega_t / Omega_0)^(r(n+t)/(t(n+r)))`` needs
    ``(n+r) t / ((n+t) r) > 1``. Cases ``r = t`` or ``r = s`` in (i), and
    ``r = t`` or ``r = 0`` in (ii), hold with equality and report slack 0.

    Raises
    ------
    PreconditionError
        Naming the violated condition.
    """
    data = _data(body, R, rule)
    n = data.n
    for name, v in (("r", r), ("s", s), ("t", t)):
        if not v > -n:
            raise PreconditionError(f"condition {name} > -n violated ({name} = {v})")
    deg_i = r == t or r == s
    deg_ii = r == t or r == 0
    if not deg_i:
        ratio = (n + r) * (t - s) / ((n + t) * (r - s))
        if not 1.0 < ratio < np.inf:
            raise PreconditionError(
                f"condition 1 < (n+r)(t-s)/((n+t)(r-s)) < inf violated (value {ratio:.6g})")
    if not deg_ii:
        ratio = (n + r) * t / ((n + t) * r)
        if not ratio > 1.0:
            raise PreconditionError(f"condition (n+r)t/((n+t)r) > 1 violated (value {ratio:.6g})")
    lr = _log_omega(data, r)
    if deg_i:
        slack_i = 0.0
    else:
        a = (r - s) * (n + t) / ((t - s) * (n + r))
        b = (t - r) * (n + s) / ((t - s) * (n + r))
        slack_i = a * _log_omega(data, t) + b * _log_omega(data, s) - lr
    if deg_ii:
        slack_ii = 0.0
    else:
        l0 = _log_omega(data, 0.0)
        slack_ii = r * (n + t) / (t * (n + r)) * (_log_omega(data, t) - l0) - (lr - l0)
    return HoelderReport(r, s, t, float(slack_i), float(slack_ii), deg_i, deg_ii)


@dataclass(frozen=True)
class SandwichReport:
    """``log E <= (n+p) log(Omega_p/Omega_inf) <= n log(Omega_0/Omega_inf)`` for each ``p``."""

    log_E: float
    rows: tuple
    log_upper: float

    @property
    def holds(self) -> bool:
        return all(self.log_E <= v + 1e-12 and v <= self.log_upper + 1e-12 for _, v in self.rows)

    @property
    def spread(self) -> float:
        vals = [self.log_E, self.log_upper] + [v for _, v in self.rows]
        return float(max(vals) - min(vals))


def info_sandwich(body: ConvexBody, R: float, ps: Sequence[float] = (0.0, 1.0, 2.0, 5.0, 10.0),
                  rule: Optional[SphereRule] = None) -> SandwichReport:
    """Entropy power between the p-ratios and the p = 0 ratio, all in logs."""
    data = _data(body, R, rule)
    log_inf = _log_omega(data, np.inf)
    log_e = entropy_integral(body, R, rule).log_E
    rows = tuple((float(p), _limit_log(data, p, log_inf)) for p in ps)
    return SandwichReport(log_e, rows, _limit_log(data, 0.0, log_inf))
