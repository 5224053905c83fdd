import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from ballconv import (ArcBody2D, Ball, CornerError, Ellipsoid, PNormBall2D, SupportCurve2D,
                      petty_constant_diagnostic, polar_volume, validate_ball_convex)
from ballconv.errors import ParameterError
from ballconv.quadrature import build_rule

from conftest import reference_quad


def _dirs(m):
    t = 2 * np.pi * np.arange(m) / m
    return np.stack([np.cos(t), np.sin(t)], axis=1)


def test_ball_requires_interior_origin():
    with pytest.raises(ParameterError):
        Ball((1.0, 0.0), 1.0)


def test_ellipse_support_and_radial():
    e = Ellipsoid((2.0, 1.0))
    u = _dirs(64)
    np.testing.assert_allclose(e.support(u), np.sqrt(4 * u[:, 0] ** 2 + u[:, 1] ** 2), rtol=1e-14)
    r = e.radial(u)
    np.testing.assert_allclose((r * u[:, 0] / 2) ** 2 + (r * u[:, 1]) ** 2, 1.0, rtol=1e-13)


def test_ellipse_curvature_at_vertices():
    s = Ellipsoid((2.0, 1.0)).inverse_gauss(np.array([[1.0, 0.0], [0.0, 1.0]]))
    np.testing.assert_allclose(s.kappas[:, 0], [2.0, 0.25], rtol=1e-13)


def test_ellipsoid_principal_curvatures():
    s = Ellipsoid((2.0, 1.5, 1.0)).inverse_gauss(np.array([[0.0, 0.0, 1.0]]))
    # at the vertex (0, 0, c): kappa_i = c / a_i^2
    np.testing.assert_allclose(np.sort(s.kappas[0]), np.sort([1 / 4, 1 / 2.25]), rtol=1e-12)


def test_support_curve_curvature():
    k = SupportCurve2D(1.0, (0.0, 0.0, 0.1))
    s = k.inverse_gauss(np.array([[1.0, 0.0]]))
    # radius of curvature 1 - 0.8 cos 3t
    assert s.kappas[0, 0] == pytest.approx(5.0, rel=1e-13)


def test_support_curve_rejects_nonconvex():
    with pytest.raises(ParameterError):
        SupportCurve2D(1.0, (0.0, 0.0, 0.2))


def test_support_curve_volume_matches_reference():
    k = SupportCurve2D(1.0, (0.0, 0.05, 0.1), (0.0, 0.02))
    h = lambda t: k.h(t)
    ref = 0.5 * reference_quad(lambda t: h(t) ** 2 - k.h(t, 1) ** 2, 0.0, 2 * np.pi)
    assert k.volume() == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("r", [1.2, 1.5, 1.8])
def test_pnorm_volume_gamma_formula(r):
    assert PNormBall2D(r).volume() == pytest.approx(4 * gamma(1 + 1 / r) ** 2 / gamma(1 + 2 / r), rel=1e-10)


def test_pnorm_support_matches_dual_norm():
    b = PNormBall2D(1.5)
    u = _dirs(97)
    np.testing.assert_allclose(b.support(u), b.support_closed_form(u), rtol=1e-12)


def test_pnorm_clamps_axis_normals():
    s = PNormBall2D(1.5).inverse_gauss(np.array([[1.0, 0.0]]))
    assert s.clamped.any()


def test_lens_volume_and_corners():
    lens = ArcBody2D.from_disks([(-0.5, 0.0), (0.5, 0.0)], [1.0, 1.0])
    assert lens.volume() == pytest.approx(2 * np.pi / 3 - np.sqrt(3) / 2, rel=1e-13)
    assert len(lens.corners()) == 2
    with pytest.raises(CornerError):
        lens.inverse_gauss(np.array([[0.0, 1.0]]))


def test_arc_body_origin_on_boundary_rejected():
    with pytest.raises(ParameterError):
        ArcBody2D.from_disks([(0.0, 0.0), (1.0, 0.0)], [1.0, 1.0])


def test_ball_convexity_exact_threshold():
    k = SupportCurve2D(1.0, (0.0, 0.0, 0.1))
    # largest radius of curvature is 1.8
    rep = validate_ball_convex(k, 1.8)
    assert rep.min_slack == 0.0 and not rep.all_strict
    assert validate_ball_convex(k, 1.9).all_strict
    assert validate_ball_convex(k, 1.7).min_slack < 0


def test_pnorm_ball_convexity_threshold():
    b = PNormBall2D(1.5)
    R0 = b.ball_convexity_threshold
    assert validate_ball_convex(b, R0).min_slack == 0.0
    assert validate_ball_convex(b, 0.99 * R0).min_slack < 0


def test_polar_volume_ellipse():
    assert polar_volume(Ellipsoid((2.0, 1.0)), build_rule(2, 1024)) == pytest.approx(np.pi / 2, rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 5.0))
def test_santalo_product_for_centred_balls(r):
    b = Ball((0.0, 0.0), r)
    assert b.volume() * polar_volume(b, build_rule(2, 256)) == pytest.approx(np.pi**2, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_santalo_product_for_centred_ellipses(a, b):
    e = Ellipsoid((a, b))
    assert e.volume() * polar_volume(e, build_rule(2, 2048)) == pytest.approx(np.pi**2, rel=1e-10)


def test_petty_diagnostic():
    rule = build_rule(2, 1024)
    mean, dev = petty_constant_diagnostic(Ellipsoid((2.0, 1.0)), rule)
    assert mean == pytest.approx(2.0 ** (-2 / 3), rel=1e-12) and dev < 1e-12
    _, dev = petty_constant_diagnostic(SupportCurve2D(1.0, (0.0, 0.0, 0.1)), rule)
    assert dev > 0.1


@pytest.mark.parametrize("body", [Ellipsoid((2.0, 1.0)), SupportCurve2D(1.0, (0.0, 0.1, 0.05)), PNormBall2D(1.5),
                                  ArcBody2D.from_disks([(-0.5, 0.0), (0.5, 0.0)], [1.0, 1.0])])
def test_radial_times_direction_is_on_boundary(body):
    w = _dirs(37) @ np.array([[np.cos(0.1), np.sin(0.1)], [-np.sin(0.1), np.cos(0.1)]])
    x = body.radial(w)[:, None] * w
    n = body.normal_at_ray(w)
    # support in the normal direction is attained at the boundary point
    np.testing.assert_allclose(np.sum(x * n, axis=1), body.support(n), rtol=1e-9, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 4.0))
def test_scaling_covariance_of_support(a):
    k = SupportCurve2D(1.0, (0.0, 0.05, 0.1))
    u = _dirs(16)
    np.testing.assert_allclose(k.scaled(a).support(u), a * k.support(u), rtol=1e-13)
    assert k.scaled(a).volume() == pytest.approx(a * a * k.volume(), rel=1e-13)
