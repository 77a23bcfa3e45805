"""
Tests for the variance oracles and the variance-side functionals
"""

import math

import numpy as np
import pytest
from scipy.special import beta

from bergman_lab.errors import ArgumentError, ContractError, DomainError, RangeError
from bergman_lab.hypgeom import ball_volume, poincare_mass
from bergman_lab.kernels import WeightSpec, radial_weight_coeffs
from bergman_lab.models import GafSpec
from bergman_lab.profiles import RadialProfile
from bergman_lab.psinterp import TestFunction
from bergman_lab.variance import (
    IMPOSSIBILITY_BOUND, LinearStatistic, _jackknife_variance, claimA_limit, claimA_UV, count_variance_closed_form,
    identity_Iz, impossibility_ratio, interpolation_variance_ratio, mode_band_ratio, mode_variance_constant,
    pluri_ratio_bound,
    profile_mass, ps_variance_upper_bound, residue_Jz_check, scalar_mode_variance, sharp_divergence_bound,
    sum_to_integral_bound, var_kernel_weighted, var_mc, var_mc_configs, var_scalar_quadrature,
)


def test_count_variance_quadrature_matches_closed_form():
    report = var_scalar_quadrature(RadialProfile.indicator(2.0))
    assert report.method == "quadrature"
    assert report.value == pytest.approx(count_variance_closed_form(math.tanh(1.0)), rel=1e-6)
    assert report.value == pytest.approx(0.874098, rel=1e-5)


def test_identity_routes_agree():
    profile = RadialProfile.indicator(1.5)
    for z in (0.0, 0.5):
        closed = identity_Iz(profile, z).value
        angular = var_scalar_quadrature(profile, z, statistic="bergman_section").value
        assert angular == pytest.approx(closed, rel=1e-6)


def test_residue_check_closed_form():
    quad, closed = residue_Jz_check(0.3, 0.6, 0.2 + 0.1j)
    assert quad == pytest.approx(closed, rel=1e-8)
    t = 0.7
    _, at_origin = residue_Jz_check(t, t, 0.0)
    assert at_origin == pytest.approx((1 + 3 * t ** 4) / (1 - t ** 4) ** 5, rel=1e-12)
    with pytest.raises(DomainError):
        residue_Jz_check(1.0, 0.5, 0.0)


def test_weighted_unit_kernel_matches_bergman_section():
    coeffs = radial_weight_coeffs(WeightSpec.unit(), rho_max=0.99)
    profile = RadialProfile.indicator(1.5)
    weighted = var_kernel_weighted(coeffs, profile=profile).value
    assert weighted == pytest.approx(identity_Iz(profile).value, rel=1e-6)


def test_weighted_variance_argument_checks():
    coeffs = radial_weight_coeffs(WeightSpec.unit(), rho_max=0.99)
    with pytest.raises(ContractError):
        var_kernel_weighted(coeffs, s=1.8, z=0.3)
    with pytest.raises(ArgumentError):
        var_kernel_weighted(coeffs, s=1.8, profile=RadialProfile.indicator(1.0))
    with pytest.raises(ArgumentError):
        var_kernel_weighted(coeffs)
    # growth exponent 1 for W ≡ 1: finite only for s > 3/2
    with pytest.raises(RangeError):
        var_kernel_weighted(coeffs, s=1.4)


def test_unsupported_statistics():
    with pytest.raises(ContractError):
        var_scalar_quadrature(RadialProfile.indicator(1.0), statistic="monomial")
    with pytest.raises(ContractError):
        identity_Iz(RadialProfile.poincare(1.5))
    with pytest.raises(DomainError):
        var_scalar_quadrature(1.0)
    with pytest.raises(ArgumentError):
        var_scalar_quadrature(RadialProfile.indicator(1.0), z=[0.1, 0.1])


def test_profile_mass():
    assert profile_mass(RadialProfile.indicator(2.0)) == pytest.approx(ball_volume(2.0, 1), rel=1e-9)
    assert profile_mass(RadialProfile.poincare(2.0)) == pytest.approx(1.0 / 6.0, rel=1e-10)
    with pytest.raises(ContractError):
        profile_mass(RadialProfile.power(0.5))


def test_impossibility_floor():
    for profile in (RadialProfile.indicator(1.0), RadialProfile.indicator(4.0), RadialProfile.bump(3.0)):
        assert impossibility_ratio(profile) > IMPOSSIBILITY_BOUND
    assert impossibility_ratio(RadialProfile.indicator(2.0), 0.4) > IMPOSSIBILITY_BOUND


def test_claim_a_ratio():
    u, v, ratio = claimA_UV(0, 1.0)
    assert ratio == pytest.approx(0.5724, abs=1e-4)
    assert ratio == pytest.approx(u / v)
    assert claimA_limit(1.0) == pytest.approx(0.5)
    assert claimA_UV(2000, 1.0)[2] == pytest.approx(0.5, abs=0.01)
    with pytest.raises(ArgumentError):
        claimA_UV(-1, 1.0)


def test_sharp_bound_grows_below_three_halves():
    assert sharp_divergence_bound(1.25, 20) > 10.0 * sharp_divergence_bound(1.25, 5)
    w20 = sharp_divergence_bound(2.0, 20, allow_outside=True)
    w40 = sharp_divergence_bound(2.0, 40, allow_outside=True)
    assert abs(w40 - w20) / w20 < 0.05
    with pytest.raises(DomainError):
        sharp_divergence_bound(2.0, 5)
    with pytest.raises(DomainError):
        sharp_divergence_bound(1.0, 5)


def test_pluri_ratio_bound_approaches_beta_limit():
    s, d = 2.05, 2
    limit = beta(d + 1.0, 2.0 * s - d)
    gaps = [abs(pluri_ratio_bound(n, s, d) - limit) for n in (10, 100, 1000)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert pluri_ratio_bound(1000, s, d) == pytest.approx(limit, rel=1e-4)
    value, bound, integral = sum_to_integral_bound(10, s, d)
    assert value <= bound
    assert integral == pytest.approx(limit)
    with pytest.raises(DomainError):
        pluri_ratio_bound(10, 5.0, 2)
    with pytest.raises(ArgumentError):
        pluri_ratio_bound(0, 2.5, 2)


def test_mode_variance_asymptotics():
    s = 1.2
    assert scalar_mode_variance(5000, s) == pytest.approx(mode_variance_constant(s) * 5000 ** (1 - 2 * s))
    exact = scalar_mode_variance(4096, s)
    assert exact == pytest.approx(mode_variance_constant(s) * 4096 ** (1 - 2 * s), rel=0.05)
    with pytest.raises(DomainError):
        scalar_mode_variance(3, 0.5)


def test_interpolation_variance_ratio():
    mono = TestFunction.monomial(3)
    assert interpolation_variance_ratio(mono, 1.1) < interpolation_variance_ratio(mono, 1.5)
    assert interpolation_variance_ratio(TestFunction.constant(), 1.5) > 0
    with pytest.raises(ContractError):
        interpolation_variance_ratio(TestFunction.poisson(), 1.5)


def test_ps_variance_upper_bound_for_constant():
    # 2∫ e^{−2s d} dμ = 2 g_P(2s)
    assert ps_variance_upper_bound(TestFunction.constant(), 1.2) == pytest.approx(2 * poincare_mass(2.4, 1),
                                                                                   rel=1e-8)


MODE_GRID = [(n, s) for n in (0, 1, 4) for s in (1.2, 1.5, 2.0)]


def test_mode_variance_two_sided_band():
    """Var of a monomial mode is comparable to its weighted area norm"""
    ratios = [mode_band_ratio(n, s) for n, s in MODE_GRID]
    assert min(ratios) > 0.005
    assert max(ratios) < 0.1


def test_mode_band_ratio_levels_off():
    # m^{2s−1} Var and m^{2s−1} B(m+1, 2s−1) share their limit up to Γ(2s−1)
    limit = mode_variance_constant(2.0) / math.gamma(3.0)
    assert mode_band_ratio(1024, 2.0) == pytest.approx(limit, rel=0.05)


def test_mode_variance_below_upper_bound():
    for n, s in MODE_GRID:
        assert scalar_mode_variance(n, s) <= ps_variance_upper_bound(TestFunction.monomial(n), s)


def test_truncated_upper_bound_is_smaller():
    f = TestFunction.monomial(2)
    assert ps_variance_upper_bound(f, 1.5, radius=2.0) < ps_variance_upper_bound(f, 1.5)
    assert ps_variance_upper_bound(f, 1.5, radius=40.0) == pytest.approx(ps_variance_upper_bound(f, 1.5), rel=1e-8)


def test_jackknife_variance_matches_sample_variance(rng):
    x = rng.standard_normal(50)
    value, se = _jackknife_variance(x.astype(complex))
    assert value == pytest.approx(np.var(x, ddof=1), rel=1e-10)
    assert se > 0


def test_linear_statistic_value(disk_config):
    count = LinearStatistic(profile=RadialProfile.indicator(1.0))
    assert count.value(disk_config) == pytest.approx(2.0)
    assert not count.is_vector
    section = LinearStatistic(profile=RadialProfile.indicator(1.0), f=TestFunction.kernel_section(WeightSpec.unit()))
    assert section.is_vector
    assert section.squared_deviation(disk_config) > 0
    with pytest.raises(ContractError):
        LinearStatistic(profile=RadialProfile.poincare(1.5),
                        f=TestFunction.kernel_section(WeightSpec.unit())).squared_deviation(disk_config)


def test_monte_carlo_needs_enough_samples(disk_config):
    with pytest.raises(ArgumentError):
        var_mc_configs(LinearStatistic(profile=RadialProfile.indicator(1.0)), [disk_config] * 10)
    with pytest.raises(ArgumentError):
        var_mc(LinearStatistic(profile=RadialProfile.indicator(1.0)), GafSpec(window_radius=2.0), range(5))


@pytest.mark.slow
def test_monte_carlo_count_variance():
    stat = LinearStatistic(profile=RadialProfile.indicator(2.0))
    report = var_mc(stat, GafSpec(window_radius=2.5), range(600), threads=4)
    target = count_variance_closed_form(math.tanh(1.0))
    assert report.method == "mc"
    assert report.n_samples == 600
    assert abs(report.value - target) <= max(0.1 * target, 4.0 * report.standard_error)


@pytest.mark.slow
def test_monte_carlo_kernel_statistic_below_upper_bound():
    """Vector-valued statistic Σ e^{−s d_B} K(·, x) stays under 2∫e^{−2s d_B}‖K(·, x)‖² dμ"""
    section = TestFunction.kernel_section(WeightSpec.unit())
    stat = LinearStatistic(profile=RadialProfile.poincare(1.5, radius=2.0), f=section)
    report = var_mc(stat, GafSpec(window_radius=2.5), range(300), threads=4)
    bound = ps_variance_upper_bound(section, 1.5, radius=2.0)
    assert report.value <= bound + 4.0 * report.standard_error
