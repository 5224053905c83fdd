"""Deterministic quadrature on the unit circle and the unit 2-sphere."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import EvaluationError, ParameterError
from .kernels import pairwise_sum

#: Counting measure of the 0-sphere {-1, +1}.
SIGMA_S0 = 2.0


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n."""
    return {1: SIGMA_S0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}[n]


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n (n = 0..3)."""
    return {0: 1.0, 1: 2.0, 2: np.pi, 3: 4.0 * np.pi / 3.0}[n]


@dataclass(frozen=True, eq=False)
class SphereRule:
    """Quadrature nodes and positive weights on the unit sphere of R^n.

    Attributes
    ----------
    n : int
        Ambient dimension (2 or 3).
    nodes : ndarray, shape (m, n)
        Unit directions.
    weights : ndarray, shape (m,)
        Positive weights summing to the sphere area.
    resolution : int
        The resolution the rule was built with.
    angles : ndarray
        Polar angles of the nodes for n = 2, shape (m, 2) ``(polar, azimuth)`` for n = 3.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int
    angles: np.ndarray

    @property
    def size(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class IntegralEstimate:
    """Quadrature value with the rule size and, if requested, the refinement change."""

    value: float
    rule_size: int
    refinement_ratio: Optional[float] = None


def build_rule(n: int, resolution: int) -> SphereRule:
    """Build a product rule on S^{n-1}.

    For n = 2 this is the uniform trapezoid rule with ``resolution`` nodes;
    for n = 3 it is ``resolution`` Gauss-Legendre nodes in the cosine of the
    polar angle times ``2 * resolution`` uniform azimuths.
    """
    if n not in (2, 3):
        raise ParameterError(f"unsupported dimension n={n}; expected 2 or 3")
    resolution = int(resolution)
    if resolution < 8:
        raise ParameterError(f"resolution must be at least 8, got {resolution}")
    if n == 2:
        theta = 2.0 * np.pi * np.arange(resolution) / resolution
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        weights = np.full(resolution, 2.0 * np.pi / resolution)
        return SphereRule(2, nodes, weights, resolution, theta)
    z, wz = np.polynomial.legendre.leggauss(resolution)
    n_az = 2 * resolution
    phi = 2.0 * np.pi * np.arange(n_az) / n_az
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    s = np.sqrt(1.0 - zz**2)
    nodes = np.stack([s * np.cos(pp), s * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    weights = np.repeat(wz, n_az) * (2.0 * np.pi / n_az)
    angles = np.stack([np.arccos(zz).ravel(), pp.ravel()], axis=1)
    return SphereRule(3, nodes, weights, resolution, angles)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("BALLCONV_THREADS", "1")))
    except ValueError:
        return 1


def _evaluate(rule: SphereRule, integrand: Callable, workers: int) -> np.ndarray:
    if workers <= 1 or rule.size < 2 * workers:
        values = integrand(rule.nodes)
    else:
        chunks = np.array_split(np.arange(rule.size), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda idx: np.asarray(integrand(rule.nodes[idx]), dtype=float), chunks))
        values = np.concatenate(parts)
    values = np.broadcast_to(np.asarray(values, dtype=float), (rule.size,))
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise EvaluationError(
            f"integrand is not finite ({values[i]}) at node {i}: {rule.nodes[i].tolist()}",
            node=rule.nodes[i].copy(),
        )
    return values


def integrate(rule: SphereRule, integrand: Callable[[np.ndarray], np.ndarray],
              refine: bool = False, workers: Optional[int] = None) -> IntegralEstimate:
    """Integrate a vectorised integrand over the sphere.

    Parameters
    ----------
    rule : SphereRule
    integrand : callable
        Maps an ``(m, n)`` array of directions to ``m`` values.
    refine : bool
        Also evaluate on the rule of doubled resolution and record the
        relative change as ``refinement_ratio``.
    workers : int, optional
        Threads used for evaluation; defaults to ``BALLCONV_THREADS`` (1).
        The reduction is a fixed pairwise tree, so the result does not
        depend on this.
    """
    workers = _thread_count() if workers is None else max(1, int(workers))
    value = pairwise_sum(rule.weights * _evaluate(rule, integrand, workers))
    ratio = None
    if refine:
        finer = build_rule(rule.n, 2 * rule.resolution)
        fine_value = pairwise_sum(finer.weights * _evaluate(finer, integrand, workers))
        scale = abs(fine_value) if fine_value != 0.0 else 1.0
        ratio = abs(fine_value - value) / scale
    return IntegralEstimate(value, rule.size, ratio)


def check_integral_identity(n: int, c, rule: SphereRule) -> tuple[float, float]:
    """Quadrature and closed form of the integral of (sum c_i u_i^2)^(-n/2) over S^{n-1}.

    Returns ``(lhs, rhs)`` with rhs = sigma(S^{n-1}) / sqrt(prod c).
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (n,) or np.any(c <= 0):
        raise ParameterError(f"need {n} positive coefficients, got {c.tolist()}")
    if rule.n != n:
        raise ParameterError(f"rule dimension {rule.n} does not match n={n}")
    lhs = integrate(rule, lambda u: (u**2 @ c) ** (-n / 2.0)).value
    rhs = sphere_area(n) / np.sqrt(np.prod(c))
    return lhs, float(rhs)
