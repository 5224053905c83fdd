import numpy as np
import pytest

from ballconv import Ball, Ellipsoid, SupportCurve2D
from ballconv.quadrature import build_rule


@pytest.fixture(scope="session")
def rule2():
    return build_rule(2, 2048)


@pytest.fixture(scope="session")
def rule3():
    return build_rule(3, 64)


@pytest.fixture(scope="session")
def disk():
    return Ball((0.0, 0.0), 1.0)


@pytest.fixture(scope="session")
def ellipse():
    return Ellipsoid((2.0, 1.0))


@pytest.fixture(scope="session")
def perturbed_disk():
    # h = 1 + 0.1 cos 3t, radius of curvature 1 - 0.8 cos 3t
    return SupportCurve2D(1.0, (0.0, 0.0, 0.1))


def rel(a, b):
    return abs(a - b) / abs(b)


def reference_quad(f, a, b, n=4000):
    """Composite Gauss-Legendre reference quadrature independent of the package rules."""
    x, w = np.polynomial.legendre.leggauss(50)
    edges = np.linspace(a, b, n // 50 + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        t = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        total += 0.5 * (hi - lo) * np.dot(w, f(t))
    return total
