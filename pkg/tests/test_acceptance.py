"""Acceptance gate: one test per criterion, at the stated tolerances."""
import time

import numpy as np
import pytest

from ballconv import (ArcBody2D, Ball, Ellipsoid, OmegaParams, PNormBall2D, PreconditionError, SupportCurve2D,
                      converge_dual, converge_primal, entropy_integral, entropy_limit, fp_weight_fn, kl_divergence,
                      kl_identity_rhs, omega_p_R, valuation_construction, verify_homogeneity, verify_interpolation,
                      verify_monotonicity, verify_valuation)
from ballconv.floating import primal_constant
from ballconv.quadrature import build_rule, check_integral_identity

INF = float("inf")
SEED = 20261016


def _disk():
    return Ball((0.0, 0.0), 1.0)


def _perturbed():
    return SupportCurve2D(1.0, (0.0, 0.0, 0.1))


def test_criterion_01_sphere_integral_identity():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst = {}
    for n, res in ((2, 512), (3, 64)):
        rule = build_rule(n, res)
        errs = []
        for _ in range(20):
            # log-uniform coefficients in [1, 100] keep the condition number <= 100
            c = 10.0 ** rng.uniform(0.0, 2.0, n)
            lhs, rhs = check_integral_identity(n, c, rule)
            errs.append(abs(lhs - rhs) / rhs)
        worst[n] = max(errs)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    assert worst[2] <= 1e-8, worst
    assert worst[3] <= 1e-8, worst


@pytest.mark.parametrize("R", [1.5, 2.0, 10.0])
def test_criterion_02_ball_closed_form(R):
    rule = build_rule(2, 512)
    expected = 2 * np.pi * (1 - 1 / R) ** (1 / 3)
    for p in (-1.0, 0.0, 1.0, 2.0, INF, -INF):
        val = omega_p_R(_disk(), OmegaParams(p, R), rule).value
        assert abs(val - expected) / expected <= 1e-9, (p, val)


@pytest.mark.parametrize("axes", [(2.0, 1.0), (2.0, 1.5, 1.0)])
def test_criterion_03_ellipsoid_ratio_law(axes):
    body = Ellipsoid(axes)
    n = len(axes)
    rule = build_rule(n, 2048 if n == 2 else 64)
    R = 5.0
    k = np.prod(axes) ** (-2.0 / (n + 1))
    w1 = omega_p_R(body, OmegaParams(1.0, R), rule).value
    for p in (0.0, 2.0, 5.0, INF):
        e = n if p == INF else n * (p - 1) / (n + p)
        ratio = omega_p_R(body, OmegaParams(p, R), rule).value / w1
        assert abs(ratio - k**e) / k**e <= 1e-7, (p, ratio, k**e)


def test_criterion_04_primal_convergence_disk():
    disk = _disk()
    deltas = np.geomspace(1e-2, 1e-5, 7) * disk.volume()
    start = time.perf_counter()
    rep = converge_primal(disk, 2.0, deltas=deltas)
    elapsed = time.perf_counter() - start
    target = primal_constant(2) * 2 * np.pi * 0.5 ** (1 / 3)
    assert elapsed < 60.0
    assert not rep.trimmed
    assert abs(rep.fitted_order - 2 / 3) <= 0.05
    assert abs(rep.extrapolated - target) / target <= 0.02
    assert all(row["lens_oracle_deviation"] <= 1e-6 for row in rep.diagnostics)


@pytest.mark.parametrize("p", [0.0, 2.0])
def test_criterion_05_weighted_primal_convergence_ellipse(p):
    body = Ellipsoid((2.0, 1.0))
    R = 5.0
    target = primal_constant(2) * omega_p_R(body, OmegaParams(p, R), build_rule(2, 2048)).value
    rep = converge_primal(body, R, fp_weight_fn(body, p), deltas=np.geomspace(1e-2, 1e-5, 7) * body.volume())
    assert abs(rep.extrapolated - target) / target <= 0.03


def test_criterion_06_dual_convergence_ellipse():
    body = Ellipsoid((2.0, 1.0))
    start = time.perf_counter()
    rep = converge_dual(body, 5.0, deltas=np.geomspace(1e-2, 1e-5, 7) * body.volume())
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    assert rep.constant == pytest.approx(2 * 1.5 ** (2 / 3), rel=1e-14)
    assert rep.relative_error <= 0.03, (rep.extrapolated, rep.target)


def test_criterion_07_entropy():
    rule = build_rule(2, 2048)
    assert abs(entropy_integral(_disk(), 2.0, rule).E - 1.0) <= 1e-9
    assert abs(entropy_integral(Ellipsoid((2.0, 1.0)), 5.0, rule).E - 16.0) <= 1e-4
    for body, R in ((_perturbed(), 2.0), (Ellipsoid((2.0, 1.0)), 5.0)):
        e = entropy_integral(body, R, rule).E
        lim = entropy_limit(body, R, 300.0, rule)
        assert abs(lim[-1][1] - e) / e <= 0.05
        gaps = [abs(v - e) for _, v in lim]
        assert all(b <= a + 1e-12 * e for a, b in zip(gaps[:-1], gaps[1:])), gaps


def test_criterion_08_kl_identity():
    rule = build_rule(2, 2048)
    for body, R in ((_disk(), 2.0), (Ellipsoid((2.0, 1.0)), 5.0), (_perturbed(), 2.0)):
        kl = kl_divergence(body, R, rule)
        assert kl >= 0.0
        assert abs(kl - kl_identity_rhs(body, R, rule)) <= 1e-6
    assert kl_divergence(Ellipsoid((2.0, 1.0)), 5.0, rule) <= 1e-7


def test_criterion_09_inequality_and_monotonicity_suites():
    rule = build_rule(2, 2048)
    rep = verify_interpolation(_perturbed(), 2.0, 1.0, 0.0, 2.0, rule)
    assert rep.slack_i > 1e-4 and rep.slack_ii > 1e-4
    mono = verify_monotonicity(_perturbed(), 2.0, rule=rule)
    assert mono.ok and mono.min_strict > 1e-4
    for axes in ((2.0, 1.0), (1.5, 1.0)):
        e = Ellipsoid(axes)
        rep = verify_interpolation(e, 5.0, 1.0, 0.0, 2.0, rule)
        assert abs(rep.slack_i) <= 1e-7 and abs(rep.slack_ii) <= 1e-7
        assert np.max(np.abs(verify_monotonicity(e, 5.0, rule=rule).step_i)) <= 1e-7
    with pytest.raises(PreconditionError, match=r"\(n\+r\)t/\(\(n\+t\)r\) > 1"):
        verify_interpolation(_perturbed(), 2.0, 1.0, 2.0, 0.0, rule)
    with pytest.raises(PreconditionError, match=r"1 < \(n\+r\)\(t-s\)/\(\(n\+t\)\(r-s\)\) < inf"):
        verify_interpolation(_perturbed(), 2.0, 2.0, 0.0, 1.0, rule)


def test_criterion_10_valuation():
    # disks of radii 1.2, 1 and 1 (base); the base is covered by the first two
    K, L, U, I = valuation_construction(((-0.4, 0.0), 1.2), ((0.5, 0.0), 1.0), [((0.0, 0.0), 1.0)])
    for p in (0.0, 1.0, 2.0, 5.0):
        assert verify_valuation(K, L, U, I, OmegaParams(p, 2.0)) <= 1e-9
    K, L, U, I = valuation_construction(((-0.4, 0.0), 2.0), ((0.5, 0.0), 2.0),
                                        [((0.0, -1.5), 2.0), ((0.0, 1.5), 2.0)])
    params = OmegaParams(1.0, 2.0)
    values = [omega_p_R(b, params).value for b in (K, L, U, I)]
    assert values == [0.0, 0.0, 0.0, 0.0]
    assert verify_valuation(K, L, U, I, params) == 0.0


def test_criterion_11_homogeneity():
    rule = build_rule(2, 1024)
    for body, R in ((_disk(), 2.0), (Ellipsoid((2.0, 1.0)), 5.0)):
        for a in (0.5, 3.0):
            for p in (0.0, 1.0, 2.0):
                assert verify_homogeneity(body, a, OmegaParams(p, R), rule) <= 1e-8


def test_criterion_12_divergence_diagnostic():
    res = omega_p_R(PNormBall2D(1.5), OmegaParams(-4.0, 2.0))
    assert res.divergent and res.value == INF
    vals = [v for _, v in res.estimates]
    assert len(vals) >= 5
    assert all(b >= 1.1 * a for a, b in zip(vals[:-1], vals[1:]))
