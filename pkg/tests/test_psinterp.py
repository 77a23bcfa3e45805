"""
Tests for Patterson–Sullivan sums, test functions and growth functionals
"""

import math

import numpy as np
import pytest

from bergman_lab.errors import (
    ArgumentError, ConditioningError, ContractError, DegenerateConfigurationError, DomainError, WindowError,
)
from bergman_lab.hypgeom import bergman_distance, poincare_mass
from bergman_lab.kernels import WeightSpec, bergman_kernel
from bergman_lab.models import Configuration
from bergman_lab.profiles import RadialProfile
from bergman_lab.psinterp import (
    PluriTerm, TestFunction, boundary_reconstruction, gram_schmidt_baseline, harmonic_measure_moments,
    mean_growth_profile, poincare_series, ps_generalized, ps_ratio, ps_weighted_sum, sphere_monomial_norm,
    tempered_functional, window_tail_bound,
)


def _weights(config, s, z):
    return np.array([math.exp(-s * bergman_distance(p[0], z)) for p in config.points])


def test_poincare_series_direct_sum(disk_config):
    expected = _weights(disk_config, 2.0, 0.1).sum()
    assert poincare_series(disk_config, 2.0, 0.1) == pytest.approx(expected, rel=1e-13)


def test_constant_ratio_is_exact(disk_config):
    est = ps_weighted_sum(disk_config, 1.5, 0.0, TestFunction.constant())
    assert est.ratio == pytest.approx(1.0, abs=1e-15)
    assert est.err_abs == pytest.approx(0.0, abs=1e-15)
    assert est.g_f == pytest.approx(est.g)
    assert est.seed == 11


def test_monomial_ratio_matches_weighted_mean(disk_config):
    w = _weights(disk_config, 1.5, 0.0)
    x = disk_config.array[:, 0]
    est = ps_weighted_sum(disk_config, 1.5, 0.0, TestFunction.monomial(1))
    assert est.ratio == pytest.approx(complex(np.sum(w * x) / np.sum(w)), rel=1e-13)
    assert est.err_abs == pytest.approx(abs(np.sum(w * x) / np.sum(w)), rel=1e-13)
    assert est.normalized == pytest.approx(est.g_f / poincare_mass(1.5, 1))


def test_annular_blocks_add_up(disk_config):
    est = ps_weighted_sum(disk_config, 1.5, 0.0, TestFunction.monomial(2), k_max=5)
    assert len(est.annular) == 6
    assert sum(est.annular) == pytest.approx(est.g_f, rel=1e-13)
    short = ps_weighted_sum(disk_config, 1.5, 0.0, TestFunction.constant(), k_max=0)
    # only points with d_B(x, o) < 1 contribute
    assert short.g == pytest.approx(_weights(disk_config, 1.5, 0.0)[[0, 1]].sum())
    assert short.tail_bound > est.tail_bound


def test_vector_estimate_reports_norms(disk_config):
    f = TestFunction.kernel_section(WeightSpec.unit())
    est = ps_weighted_sum(disk_config, 1.5, 0.0, f)
    assert est.g_f is None
    assert est.g_f_norm > 0
    assert est.record is not None
    assert est.err_abs is not None and est.err_abs > 0


def test_kernel_section_norm_is_diagonal():
    f = TestFunction.kernel_section(WeightSpec.unit())
    record = f.evaluate(0.5)
    assert record.norm() == pytest.approx(1.0 / 0.75, rel=1e-12)


def test_hardy_atomic_norm():
    f = TestFunction.hardy_atomic([[1.0]], [2.0])
    assert f.evaluate(0.0).norm() == pytest.approx(math.sqrt(2.0))
    assert f.values(np.array([[0.5]]))[0] == pytest.approx(2.0 * 0.75 / 0.25)


def test_exponent_and_dimension_checks(disk_config):
    with pytest.raises(DomainError):
        ps_weighted_sum(disk_config, 1.0, 0.0, TestFunction.constant())
    with pytest.raises(ArgumentError):
        ps_weighted_sum(disk_config, 1.5, [0.0, 0.0], TestFunction.constant())
    with pytest.raises(ArgumentError):
        ps_weighted_sum(disk_config, 1.5, 0.0, TestFunction.constant(d=2))
    with pytest.raises(ArgumentError):
        ps_weighted_sum(disk_config, 1.5, 0.0, TestFunction.constant(), k_max=-1)


def test_empty_configuration_is_degenerate():
    empty = Configuration(points=[], dimension=1, window_radius=2.0, seed=0, generator="gaf")
    est = ps_weighted_sum(empty, 1.5, 0.0, TestFunction.constant())
    assert est.g == 0.0
    assert est.ratio is None
    with pytest.raises(DegenerateConfigurationError):
        ps_ratio(empty, 1.5, 0.0, TestFunction.constant())


def test_window_tail_bound_shrinks_with_window(disk_config):
    near = window_tail_bound(disk_config, 1.5, 0.6)
    centred = window_tail_bound(disk_config, 1.5, 0.0)
    assert near > centred > 0


def test_poincare_series_pairs_with_tail_bound(disk_config):
    """The weighted sum reports the full-window series with the window tail bound"""
    est = ps_weighted_sum(disk_config, 1.5, 0.2, TestFunction.constant(), k_max=10)
    assert est.g == pytest.approx(poincare_series(disk_config, 1.5, 0.2), rel=1e-13)
    assert est.tail_bound == window_tail_bound(disk_config, 1.5, 0.2)


def test_generalized_sums(disk_config):
    profile = RadialProfile.indicator(1.0)
    value, g_r = ps_generalized(disk_config, profile, 0.0, TestFunction.constant())
    assert g_r == 2.0
    assert value == pytest.approx(2.0)
    record, _ = ps_generalized(disk_config, profile, 0.0, TestFunction.kernel_section(WeightSpec.unit()))
    assert record.points.shape == (2, 1)


def test_generalized_window_checks(disk_config):
    with pytest.raises(WindowError):
        ps_generalized(disk_config, RadialProfile.indicator(4.0), 0.0, TestFunction.constant())
    with pytest.raises(WindowError):
        ps_generalized(disk_config, RadialProfile.poincare(1.5), 0.0, TestFunction.constant())


def test_harmonic_measure_moments(disk_config):
    moments = harmonic_measure_moments(disk_config, 1.5, 0.0, 2)
    assert moments[0] == pytest.approx(1.0)
    est = ps_weighted_sum(disk_config, 1.5, 0.0, TestFunction.monomial(2))
    assert moments[2] == pytest.approx(est.ratio, rel=1e-12)


def test_boundary_reconstruction_of_constants(disk_config):
    assert boundary_reconstruction(disk_config, 1.5, 0.0, lambda zeta: np.ones(len(zeta))) == pytest.approx(1.0)


def test_monomial_and_pluriharmonic_modes():
    assert sphere_monomial_norm([1, 1]) == pytest.approx(1.0 / 6.0)
    assert sphere_monomial_norm([3]) == 1.0
    f = TestFunction.pluriharmonic([PluriTerm(n=[1, 0], part="re")], d=2)
    # mean of (Re z₁)² over |x|² = t is t/4
    assert f.sphere_mean_square(np.array([0.5]))[0] == pytest.approx(0.125)
    with pytest.raises(ArgumentError):
        TestFunction.pluriharmonic([PluriTerm(n=[1])], d=1)


def test_function_validation():
    with pytest.raises(DomainError):
        TestFunction.poisson(0.5)
    with pytest.raises(ArgumentError):
        TestFunction.monomial(-1)
    with pytest.raises(ContractError):
        TestFunction.kernel_section(WeightSpec.unit()).values(np.zeros((1, 1)))


def test_tempered_functional_closed_forms():
    for alpha in (0.01, 0.1, 1.0):
        assert tempered_functional(TestFunction.constant(), alpha) == pytest.approx(alpha ** 2 / (1 + alpha))
        assert tempered_functional(TestFunction.poisson(), alpha) == pytest.approx(
            alpha * (alpha + 2) / (alpha + 1))
    with pytest.raises(ArgumentError):
        tempered_functional(TestFunction.constant(), 0.0)


def test_tempered_functional_separates_lacunary():
    lac = TestFunction.lacunary()
    assert tempered_functional(lac, 0.01) > 5.0 * tempered_functional(lac, 0.1)
    mono = TestFunction.monomial(3)
    assert tempered_functional(mono, 0.01) < tempered_functional(mono, 0.1)


def test_unit_kernel_diagonal_is_not_tempered():
    assert tempered_functional(TestFunction.kernel_section(WeightSpec.unit()), 0.5) == math.inf


def test_mean_growth_profile_constant():
    values = mean_growth_profile(TestFunction.constant(), 3)
    expected = [math.exp(-2 * k) * (math.cosh(k + 1) - math.cosh(k)) / 2 for k in range(4)]
    assert values == pytest.approx(expected, rel=1e-8)
    with pytest.raises(ArgumentError):
        mean_growth_profile(TestFunction.constant(), -1)


def test_gram_schmidt_interpolates_kernel_sections():
    pts = [0.0, 0.3 + 0j, -0.4j]
    f_values = [bergman_kernel(p, 0.2) for p in pts]
    value = gram_schmidt_baseline(pts, f_values, WeightSpec.unit(), 0.3, n_terms=3)
    assert value == pytest.approx(f_values[1], rel=1e-10)
    with pytest.raises(ArgumentError):
        gram_schmidt_baseline(pts, f_values, WeightSpec.unit(), 0.0, n_terms=4)


def test_gram_schmidt_detects_ill_conditioning():
    pts = [0.3 + 0j, 0.3 + 1e-9j]
    with pytest.raises(ConditioningError):
        gram_schmidt_baseline(pts, [1.0, 1.0], WeightSpec.unit(), 0.0, n_terms=2)
