"""
Tests for radial profiles
"""

import math

import numpy as np
import pytest

from bergman_lab.errors import ArgumentError
from bergman_lab.profiles import RadialProfile, distance_from_eps, exp_neg_distance


def test_eps_helpers_match_distance():
    r = 0.6
    eps = 1.0 - r * r
    assert exp_neg_distance(eps) == pytest.approx((1 - r) / (1 + r), rel=1e-14)
    assert distance_from_eps(eps) == pytest.approx(math.log((1 + r) / (1 - r)), rel=1e-14)


def test_indicator_support():
    p = RadialProfile.indicator(2.0)
    assert p.is_compact
    assert p.support_bound == pytest.approx(math.tanh(1.0))
    assert p.of_distance([0.5, 1.99, 2.01]) == pytest.approx([1.0, 1.0, 0.0])
    assert p.eps_breakpoints() == [pytest.approx(1.0 - math.tanh(1.0) ** 2)]


def test_bump_vanishes_at_radius():
    p = RadialProfile.bump(3.0)
    assert p.of_distance(0.0) == pytest.approx(1.0)
    assert p.of_distance(1.5) == pytest.approx(0.75 ** 3)
    assert p.of_distance(3.5) == 0.0


def test_poincare_profile_is_exponential():
    p = RadialProfile.poincare(1.5)
    assert not p.is_compact
    assert p.of_distance(2.0) == pytest.approx(math.exp(-3.0), rel=1e-12)
    cut = RadialProfile.poincare(1.5, radius=2.0)
    assert cut.is_compact
    assert cut.of_distance(2.5) == 0.0


def test_weight_shapes():
    eps = np.array([0.5, 0.01])
    assert RadialProfile.power(1.0).evaluate_eps(eps) == pytest.approx(eps)
    assert RadialProfile.critical().evaluate_eps(eps) == pytest.approx(1.0 / (eps * np.log(4.0 / eps) ** 2))
    assert RadialProfile.log_supercritical(0.5).evaluate_eps(eps) == pytest.approx(np.log(4.0 / eps) ** -1.5 / eps)
    assert RadialProfile.constant(2.0).evaluate(np.array([0.1, 0.9])) == pytest.approx([2.0, 2.0])


def test_custom_profile():
    p = RadialProfile.custom(lambda r: 1.0 - r, support_bound=0.5, label="tent")
    assert p.name == "tent"
    assert p.evaluate(0.25) == pytest.approx(0.75)
    with pytest.raises(ArgumentError):
        RadialProfile.custom(lambda r: r, support_bound=1.5)


def test_invalid_profiles():
    with pytest.raises(ArgumentError):
        RadialProfile(kind="indicator")
    with pytest.raises(ArgumentError):
        RadialProfile.power(-1.0)
    with pytest.raises(ArgumentError):
        RadialProfile(kind="triangle")


def test_names():
    assert RadialProfile.indicator(1.5).name == "indicator(r=1.5)"
    assert RadialProfile.critical().name == "critical"
