"""
Tests for the adaptive Gauss–Legendre engines
"""

import math

import numpy as np
import pytest

from bergman_lab.errors import NumericError
from bergman_lab.quadrature import integrate, integrate_2d, integrate_scalar, periodic_trapezoid


def test_polynomial_exact():
    value, err = integrate(lambda x: x ** 2, 0.0, 1.0)
    assert value == pytest.approx(1.0 / 3.0, rel=1e-13)
    assert err < 1e-12


def test_reversed_limits_flip_sign():
    assert integrate_scalar(lambda x: x ** 2, 1.0, 0.0) == pytest.approx(-1.0 / 3.0, rel=1e-13)


def test_leading_axes_share_the_mesh():
    value, _ = integrate(lambda x: np.vstack([x, x ** 2]), 0.0, 1.0)
    assert value.shape == (2,)
    assert value == pytest.approx([0.5, 1.0 / 3.0], rel=1e-12)


def test_endpoint_log_singularity():
    value, _ = integrate(np.log, 0.0, 1.0, rtol=1e-9, atol=1e-12)
    assert value == pytest.approx(-1.0, rel=1e-8)


def test_breakpoints_resolve_kinks():
    value, _ = integrate(lambda x: np.abs(x - 0.3), 0.0, 1.0, breakpoints=[0.3])
    assert value == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-13)


def test_panel_budget_exhaustion_raises():
    with pytest.raises(NumericError) as info:
        integrate(lambda x: np.where(x < 0.3, 0.0, 1.0), 0.0, 1.0, rtol=1e-14, max_panels=3)
    assert "panels" in info.value.diagnostics


def test_two_dimensional_product():
    value, _ = integrate_2d(lambda x, y: x * y, [0.0, 1.0], [0.0, 2.0])
    assert value == pytest.approx(1.0, rel=1e-12)


def test_two_dimensional_gaussian():
    value, _ = integrate_2d(lambda x, y: np.exp(-x * x - y * y), [-6.0, 0.0, 6.0], [-6.0, 0.0, 6.0], rtol=1e-10)
    assert value == pytest.approx(math.pi, rel=1e-9)


def test_periodic_trapezoid_mean():
    assert periodic_trapezoid(lambda t: np.cos(t) ** 2, 16) == pytest.approx(0.5, abs=1e-15)
