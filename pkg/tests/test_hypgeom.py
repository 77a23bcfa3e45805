"""
Tests for the hyperbolic geometry of the ball
"""

import math

import numpy as np
import pytest

from bergman_lab.errors import ArgumentError, DomainError
from bergman_lab.hypgeom import (
    annulus_index, ball_volume, ball_volume_closed_form, bergman_distance, distances_to, euclidean_to_radius,
    invariant_density, min_pairwise_distance, mobius_involution, mobius_kernel_identity_residual, poincare_mass,
    poincare_mass_closed_form, poincare_mass_tail, poisson_kernel, radius_to_euclidean, sphere_sample,
)
from bergman_lab.models import BoundaryPoint, Point
from bergman_lab.quadrature import integrate_scalar


def test_distance_from_origin():
    assert bergman_distance(0.5, 0.0) == pytest.approx(math.log(3.0), rel=1e-14)
    assert bergman_distance(Point(coords=[0.5j]), Point.origin(1)) == pytest.approx(math.log(3.0), rel=1e-14)


def test_distance_is_symmetric_and_vanishes_on_the_diagonal():
    x, z = 0.3 + 0.4j, -0.2 + 0.1j
    assert bergman_distance(x, z) == pytest.approx(bergman_distance(z, x), rel=1e-13)
    assert bergman_distance(x, x) == pytest.approx(0.0, abs=1e-7)


def test_radius_conversions_invert():
    r = np.array([0.0, 0.5, 3.0, 10.0])
    assert euclidean_to_radius(radius_to_euclidean(r)) == pytest.approx(r, rel=1e-10, abs=1e-14)
    assert bergman_distance(float(radius_to_euclidean(2.0)), 0.0) == pytest.approx(2.0, rel=1e-12)


def test_involution_swaps_and_squares_to_identity():
    w = [0.3 + 0.1j, -0.2j]
    image = mobius_involution(w, w)
    assert np.allclose(image.as_array(), 0.0, atol=1e-15)
    assert np.allclose(mobius_involution(w, [0j, 0j]).as_array(), w, atol=1e-15)
    z = [0.1 - 0.5j, 0.4 + 0j]
    twice = mobius_involution(w, mobius_involution(w, z))
    assert np.allclose(twice.as_array(), z, atol=1e-13)


def test_involution_preserves_distance():
    w, x, y = 0.6 + 0.2j, -0.3 + 0.5j, 0.1 - 0.7j
    moved = bergman_distance(mobius_involution(w, x), mobius_involution(w, y))
    assert moved == pytest.approx(bergman_distance(x, y), rel=1e-11)


def test_kernel_identity_residual_small():
    x, y, z = [0.3 + 0.1j, 0.2j], [-0.4 + 0j, 0.1 + 0.3j], [0.5j, -0.2 + 0j]
    assert mobius_kernel_identity_residual(x, y, z) < 1e-13


def test_points_outside_ball_rejected():
    with pytest.raises(DomainError):
        bergman_distance(1.0, 0.0)
    with pytest.raises(ArgumentError):
        bergman_distance([0.1, 0.2], 0.0)
    with pytest.raises(ValueError):
        Point(coords=[0.8 + 0.8j])


def test_distances_to_vectorized(disk_config):
    dist = distances_to(disk_config.array, 0.2)
    expected = [bergman_distance(p[0], 0.2) for p in disk_config.points]
    assert dist == pytest.approx(expected, rel=1e-13)
    assert distances_to(np.zeros((0, 1)), 0.0).size == 0


def test_ball_volume_matches_closed_form():
    for d in (1, 2, 3):
        for r in (0.5, 2.0, 6.0):
            assert ball_volume(r, d) == pytest.approx(ball_volume_closed_form(r, d), rel=1e-10)
    assert ball_volume(0.0, 2) == 0.0
    with pytest.raises(DomainError):
        ball_volume(-1.0, 1)


def test_annulus_index():
    assert annulus_index(0.5, 0.0) == 1
    assert annulus_index(0.2, 0.0) == 0
    assert annulus_index(0.9, 0.0) == 2


def test_poincare_mass_closed_form():
    assert poincare_mass(2.0, 1) == pytest.approx(1.0 / 6.0, rel=1e-10)
    for s in (1.05, 1.5, 1.9):
        assert poincare_mass(s, 1) == pytest.approx(poincare_mass_closed_form(s), rel=1e-10)


def test_poincare_mass_critical_limit():
    # (s − d) g_P(s) → d/4^d as s ↓ d
    assert 0.001 * poincare_mass(1.001, 1) == pytest.approx(0.2498751, rel=1e-3)
    assert 0.001 * poincare_mass(2.001, 2) == pytest.approx(0.125, rel=1e-2)


def test_poincare_mass_tail_splits_the_mass():
    s, r0 = 1.5, 2.0
    # volume density in d = 1 is sinh(r)/2
    inner = integrate_scalar(lambda r: np.exp(-s * r) * np.sinh(r) / 2.0, 0.0, r0)
    assert inner + poincare_mass_tail(s, 1, r0) == pytest.approx(poincare_mass(s, 1), rel=1e-10)


def test_poincare_mass_diverges_at_critical_exponent():
    with pytest.raises(DomainError):
        poincare_mass(1.0, 1)
    with pytest.raises(DomainError):
        poincare_mass(2.0, 2)


def test_poisson_kernel_mean_value():
    # (1/2π) ∫ P(z, e^{iθ}) dθ = 1
    thetas = 2 * math.pi * np.arange(512) / 512
    values = [poisson_kernel(0.4 + 0.3j, complex(np.exp(1j * t))) for t in thetas]
    assert np.mean(values) == pytest.approx(1.0, rel=1e-12)
    assert poisson_kernel(0.0, BoundaryPoint(coords=[1.0])) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        poisson_kernel(0.0, 0.5)


def test_invariant_density():
    assert invariant_density(0.0) == 1.0
    assert invariant_density([0.5, 0.0]) == pytest.approx(0.75 ** -3)


def test_sphere_sample_on_sphere(rng):
    pts = sphere_sample(3, 100, rng)
    assert pts.shape == (100, 3)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)


def test_min_pairwise_distance():
    pts = np.array([[0.0], [0.3], [0.35j]], dtype=complex)
    assert min_pairwise_distance(pts) == pytest.approx(abs(0.3 - 0.35j))
    assert min_pairwise_distance(pts[:1]) == math.inf
