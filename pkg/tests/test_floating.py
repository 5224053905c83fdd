import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from ballconv import (ArcBody2D, Ball, CutBall, Ellipsoid, SupportCurve2D, WeightFn, converge_dual, converge_primal,
                      cut_measure, dual_floating_volume, find_cut_depth, floating_body, floating_volume, fp_weight,
                      fp_weight_fn, polar_volume)
from ballconv.errors import GeometryError, StarvationError, WeightError
from ballconv.floating import (cap_volume_check, default_deltas, dual_constant, fitted_order, lens_area,
                               lens_volume, primal_constant, richardson)
from ballconv.quadrature import build_rule


def _lens_reference(rho, R, d):
    # area of the disk of radius rho at the origin inside the disk of radius R at (d, 0), by chord integration
    lo, hi = max(-rho, d - R), min(rho, d + R)
    if lo >= hi:
        return 0.0

    def chord(x):
        a = np.sqrt(np.maximum(rho * rho - x * x, 0.0))
        b = np.sqrt(np.maximum(R * R - (x - d) ** 2, 0.0))
        return 2 * np.minimum(a, b)

    x0 = (d * d + rho * rho - R * R) / (2 * d)
    pts = [x0] if lo < x0 < hi else None
    return quad(chord, lo, hi, points=pts, epsabs=0, epsrel=1e-13, limit=200)[0]


@pytest.mark.parametrize("rho,R,d", [(1.0, 2.0, 1.5), (1.0, 2.0, 2.9), (0.7, 1.3, 0.8), (1.0, 1.0, 1.0)])
def test_lens_area_against_chord_integral(rho, R, d):
    assert lens_area(rho, R, d) == pytest.approx(_lens_reference(rho, R, d), rel=1e-9)


def test_lens_volume_limits():
    assert lens_volume(1.0, 2.0, 0.5) == pytest.approx(4 * np.pi / 3)
    assert lens_volume(1.0, 2.0, 3.5) == 0.0
    # equal unit balls at distance 1: 5 pi / 12
    assert lens_volume(1.0, 1.0, 1.0) == pytest.approx(5 * np.pi / 12, rel=1e-14)


def test_constants():
    assert primal_constant(2) == pytest.approx(0.5 * 1.5 ** (2 / 3), rel=1e-14)
    assert primal_constant(2) == pytest.approx(0.655185, abs=1e-6)
    assert dual_constant(2) == pytest.approx(4 * primal_constant(2), rel=1e-14)


def test_cut_measure_matches_lens():
    disk = Ball((0.0, 0.0), 1.0)
    z = np.array([-1.01, 0.0])
    val = cut_measure(disk, CutBall(tuple(z), 2.0))
    assert val == pytest.approx(np.pi - lens_area(1.0, 2.0, 1.01), rel=1e-12)
    assert cut_measure(disk, CutBall(tuple(z), 2.0), WeightFn.const(3.0)) == pytest.approx(3 * val, rel=1e-13)


def test_cut_ball_must_contain_origin():
    with pytest.raises(GeometryError):
        cut_measure(Ball((0.0, 0.0), 1.0), CutBall((3.0, 0.0), 2.0))


def test_cut_measure_3d_closed_form_and_spheroid():
    b = Ball((0.0, 0.0, 0.0), 1.0)
    z = (0.0, 0.0, -1.1)
    assert cut_measure(b, CutBall(z, 2.0)) == pytest.approx(4 * np.pi / 3 - lens_volume(1.0, 2.0, 1.1), rel=1e-12)
    s = Ellipsoid((1.0, 1.0, 1.0))
    assert cut_measure(s, CutBall(z, 2.0)) == pytest.approx(cut_measure(b, CutBall(z, 2.0)), rel=1e-9)


def test_cap_volume_asymptotics():
    num, asym = cap_volume_check((1.0, 1.0, 1.0), 2.0, 1e-3)
    assert num == pytest.approx(asym, rel=2e-3)
    num, asym = cap_volume_check((2.0, 1.0), 5.0, 1e-4)
    assert num == pytest.approx(asym, rel=1e-2)


@pytest.mark.parametrize("delta", [1e-1, 1e-3, 1e-5])
def test_cut_depth_against_brentq(delta):
    disk = Ball((0.0, 0.0), 1.0)
    R = 2.0
    t_ref = brentq(lambda t: np.pi - lens_area(1.0, R, R + t - 1.0) - delta, 1e-14, 1.0, xtol=1e-15)
    ball = find_cut_depth(disk, np.array([1.0, 0.0]), delta, R=R)
    assert ball.depth == pytest.approx(t_ref, rel=1e-9)
    assert cut_measure(disk, ball) == pytest.approx(delta, rel=1e-9)


def test_disk_floating_body_is_a_disk():
    disk = Ball((0.0, 0.0), 1.0)
    delta, R = 0.01, 2.0
    t_ref = brentq(lambda t: np.pi - lens_area(1.0, R, R + t - 1.0) - delta, 1e-14, 1.0, xtol=1e-15)
    approx = floating_body(disk, delta, R, grid=build_rule(2, 64))
    np.testing.assert_allclose(approx.radial, 1.0 - t_ref, rtol=1e-9)


def test_3d_ball_floating_body():
    b = Ball((0.0, 0.0, 0.0), 1.0)
    approx = floating_body(b, 1e-2, 2.0, grid=build_rule(3, 8))
    t = approx.depths[0]
    assert 4 * np.pi / 3 - lens_volume(1.0, 2.0, 2.0 + t - 1.0) == pytest.approx(1e-2, rel=1e-8)
    np.testing.assert_allclose(approx.radial, 1.0 - t, rtol=1e-9)


def test_zero_delta_is_identity(ellipse):
    grid = build_rule(2, 256)
    approx = floating_body(ellipse, 0.0, 5.0, grid=grid)
    np.testing.assert_allclose(approx.radial, ellipse.radial(grid.nodes))
    assert dual_floating_volume(approx, grid, ellipse) == pytest.approx(polar_volume(ellipse, grid), rel=1e-14)


def test_fp_weight_one_is_unit(ellipse):
    u = build_rule(2, 32).nodes
    np.testing.assert_allclose(fp_weight(ellipse, 1.0, u), 1.0, rtol=1e-14)
    grid = build_rule(2, 64)
    a = floating_body(ellipse, 1e-3, 5.0, WeightFn.one(), grid).radial
    b = floating_body(ellipse, 1e-3, 5.0, fp_weight_fn(ellipse, 1.0), grid).radial
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_weight_lower_bound_enforced():
    f = WeightFn(lambda x: np.full(np.shape(x)[:-1], 0.5), 1.0)
    with pytest.raises(WeightError):
        cut_measure(Ball((0.0, 0.0), 1.0), CutBall((-1.01, 0.0), 2.0), f)


def test_starvation_lists_directions():
    with pytest.raises(StarvationError) as info:
        floating_body(Ball((0.0, 0.0), 1.0), 10.0, 2.0, grid=build_rule(2, 16))
    assert len(info.value.directions) == 16


def test_corner_body_floating():
    lens = ArcBody2D.from_disks([(-0.5, 0.0), (0.5, 0.0)], [1.0, 1.0])
    approx = floating_body(lens, 1e-3, 2.0, grid=build_rule(2, 128))
    assert np.all(approx.radial < lens.radial(approx.directions))
    assert floating_volume(approx) < lens.volume()


@settings(max_examples=15, deadline=None)
@given(st.floats(1e-4, 5e-2), st.floats(1.1, 3.0))
def test_inclusion_monotone_in_delta(d, factor):
    k = SupportCurve2D(1.0, (0.0, 0.05, 0.1))
    grid = build_rule(2, 64)
    small = floating_body(k, d, 2.0, grid=grid)
    large = floating_body(k, d * factor, 2.0, grid=grid)
    assert np.all(large.radial <= small.radial + 1e-12)
    assert floating_volume(large) < floating_volume(small)


def test_richardson_and_fitted_order_on_synthetic_data():
    d = np.array([1e-2, 1e-3, 1e-4, 1e-5])
    x = d ** (2 / 3)
    ratios = 3.0 + 0.7 * x
    assert richardson(d, ratios, 2) == pytest.approx(3.0, rel=1e-12)
    assert fitted_order(d, 5.0 * d ** (2 / 3)) == pytest.approx(2 / 3, rel=1e-12)


def test_default_deltas():
    d = default_deltas(Ball((0.0, 0.0), 1.0), 3, 1e-2)
    np.testing.assert_allclose(d, np.pi * 1e-2 * np.array([1, 0.25, 0.0625]))


def test_primal_convergence_small_grid():
    disk = Ball((0.0, 0.0), 1.0)
    deltas = default_deltas(disk, 4, 1e-2)
    rep = converge_primal(disk, 2.0, deltas=deltas, grid=build_rule(2, 256))
    assert rep.relative_error < 0.01
    assert all(row["cut_residual"] < 1e-8 for row in rep.diagnostics)


@pytest.mark.parametrize("body,R", [(Ball((0.0, 0.0), 1.0), 2.0), (Ellipsoid((2.0, 1.0)), 5.0)])
def test_dual_limit_matches_constant_over_n_squared(body, R):
    rep = converge_dual(body, R, deltas=default_deltas(body, 6, 1e-2))
    alt = rep.diagnostics[-1]
    assert alt["alternative_constant"] == pytest.approx(primal_constant(2), rel=1e-14)
    assert alt["alternative_relative_error"] < 1e-4


def test_dual_and_primal_limits_coincide_for_disk():
    disk = Ball((0.0, 0.0), 1.0)
    d = default_deltas(disk, 6, 1e-2)
    primal = converge_primal(disk, 2.0, deltas=d)
    dual = converge_dual(disk, 2.0, deltas=d)
    # the floating body of a centred disk is a disk, so both differences agree to first order
    assert dual.extrapolated == pytest.approx(primal.extrapolated, rel=1e-4)
