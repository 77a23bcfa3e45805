"""
Variance oracles for linear statistics of the Bergman process on the disk.

For a statistic Σ_x P(x) F(x) that is radial about z the variance

    ½ ∬ ‖P(x)F(x) − P(y)F(y)‖² |K(x, y)|² dA(x) dA(y)

is Möbius-transported to z = o and its angular part summed in closed form,
leaving ½ ∬ (p(a) − p(b))² k(1 − ab) da db over a = |x|², b = |y|². The
remaining 2D integral is taken in ε = 1 − |x|² coordinates: compact profiles
on a rectangle mesh cut at their support, full-support profiles in polar
coordinates (σ, λ) = (ε₁ + ε₂, ε₁/σ) with the boundary corner done analytically.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.interpolate import CubicSpline
from scipy.special import beta, betainc, betaln, gamma, gammainc, gammaln

from .errors import ArgumentError, ContractError, DomainError, RangeError
from .hypgeom import _distance, euclidean_to_radius, poincare_mass
from .kernels import KernelCoeffs, WeightSpec, log_weight_moments_logdeg
from .models import Configuration, GafSpec, HkpvSpec, PointLike, VarianceReport, as_coords, ensure_inside
from .profiles import RadialProfile, exp_neg_distance
from .psinterp import CoefficientRecord, TestFunction, ps_generalized
from .quadrature import integrate, integrate_2d, periodic_trapezoid
from .sampler import count_statistics, sample_many

logger = logging.getLogger(__name__)

SIGMA_FLOOR = 1e-6
ETA_SPLIT = 2e-3
SPLINE_POINTS = 600
MODE_EXACT_LIMIT = 4096
MIN_MC_SEEDS = 200
IMPOSSIBILITY_BOUND = 1.0 / 128.0

Kernel = Callable[[np.ndarray], np.ndarray]


def _z_sq(z: Optional[PointLike]) -> float:
    if z is None:
        return 0.0
    za = ensure_inside(as_coords(z), "z")
    if za.size != 1:
        raise ArgumentError("variance oracles are implemented for d = 1")
    return float(abs(za[0]) ** 2)


def _lambda_constant(s: float) -> float:
    """∫_0^1 (λ^s − (1−λ)^s)² dλ"""
    return 2.0 / (2.0 * s + 1.0) - 2.0 * float(beta(s + 1.0, s + 1.0))


# ------------------------------------------------------------ kernels in η


def count_kernel(eta: np.ndarray) -> np.ndarray:
    """Angular mean of |K(x,y)|²: (1+v)/(1−v)³ with v = 1 − η"""
    return (2.0 - eta) / eta ** 3


def iz_polynomial(v: np.ndarray, z_sq: float) -> np.ndarray:
    """I_z = 1 + (3+8|z|²)v + (3|z|⁴+8|z|²)v² + |z|⁴v³"""
    z4 = z_sq * z_sq
    return 1.0 + (3.0 + 8.0 * z_sq) * v + (3.0 * z4 + 8.0 * z_sq) * v ** 2 + z4 * v ** 3


def identity_kernel(z_sq: float) -> Kernel:
    """Kernel of the Bergman-section statistic about z, closed form"""
    def k(eta):
        return iz_polynomial(1.0 - eta, z_sq) / (eta ** 5 * (1.0 - z_sq) ** 2)
    return k


def _angular_nodes(c_max: float) -> int:
    if c_max >= 0.9995:
        raise RangeError(f"angular route needs |xy| bounded away from 1, got {c_max:.6g}")
    need = math.log(1e-16) / math.log(max(c_max, 1e-3)) + 32.0
    return int(min(8192, 2 ** math.ceil(math.log2(need))))


def angular_J(v: np.ndarray, z_sq: float, n_angles: int) -> np.ndarray:
    """(1/2π)∫ (1+4|z|²w+|z|⁴w²)/((1−w)⁴(1−w̄)²) dψ / (1−|z|²)², w = √v e^{iψ}"""
    c = np.sqrt(np.asarray(v, dtype=float)).ravel()
    out = np.empty(c.size)
    for start in range(0, c.size, 256):
        cc = c[start:start + 256]

        def integrand(psi, cc=cc):
            w = cc[:, None] * np.exp(1j * psi)[None, :]
            num = 1.0 + 4.0 * z_sq * w + z_sq * z_sq * w * w
            return (num / ((1.0 - w) ** 4 * (1.0 - np.conj(w)) ** 2)).real

        out[start:start + 256] = periodic_trapezoid(integrand, n_angles)
    return out.reshape(np.shape(v)) / (1.0 - z_sq) ** 2


def angular_kernel(z_sq: float, eta_min: float) -> Kernel:
    n = _angular_nodes(math.sqrt(1.0 - eta_min))

    def k(eta):
        return angular_J(1.0 - eta, z_sq, n)
    return k


def dsharp_closed_form(eta: np.ndarray) -> np.ndarray:
    """D♯ for W ≡ 1: (1+3v)/(1−v)⁵"""
    return (4.0 - 3.0 * eta) / eta ** 5


def _dsharp_exact(b: np.ndarray, v: np.ndarray) -> np.ndarray:
    k = np.arange(b.size, dtype=float)
    one_minus = 1.0 - v
    return (np.polynomial.polynomial.polyval(v, b * (k + 1.0)) / one_minus ** 2
            + 2.0 * v * np.polynomial.polynomial.polyval(v, b) / one_minus ** 3)


def dsharp_kernel(coeffs: KernelCoeffs, eta_min: float) -> Kernel:
    """D♯ as a function of η on [eta_min, 1], spline-interpolated from the truncated series"""
    if coeffs.weight.kind == "unit":
        return dsharp_closed_form
    if coeffs.dimension != 1:
        raise ArgumentError("weighted variance is implemented for d = 1")
    if 1.0 - eta_min > coeffs.rho_max:
        raise RangeError(f"D♯ needed at v = {1.0 - eta_min:.6g} beyond rho_max = {coeffs.rho_max}")
    log_eta = np.linspace(math.log(eta_min), 0.0, SPLINE_POINTS)
    eta = np.exp(log_eta)
    scaled = _dsharp_exact(coeffs.coeffs, 1.0 - eta) * eta ** 4
    spline = CubicSpline(log_eta, np.log(scaled))

    def k(e):
        e = np.asarray(e, dtype=float)
        return np.exp(spline(np.log(np.clip(e, eta_min, 1.0)))) / e ** 4
    return k


# ------------------------------------------------------- double integrals


def _compact_double_integral(p: Callable, k: Kernel, eps_t: float, rtol: float) -> Tuple[float, float]:
    """½∬(p(ε₁)−p(ε₂))² k(η) for p vanishing on ε < eps_t"""
    n_edges = max(4, int(2 * math.ceil(math.log10(1.0 / eps_t))) + 2)
    edges = np.unique(np.concatenate([np.geomspace(eps_t, 1.0, n_edges), [1.0]]))

    def inner(e1, e2):
        eta = e1 + e2 - e1 * e2
        return 0.5 * (p(e1) - p(e2)) ** 2 * k(eta)

    def cross(e1, e2):
        eta = e1 + e2 - e1 * e2
        return p(e1) ** 2 * k(eta)

    v1, err1 = integrate_2d(inner, edges, edges, atol=1e-14, rtol=rtol)
    v2, err2 = integrate_2d(cross, edges, [0.0, 0.5 * eps_t, eps_t], atol=1e-14, rtol=rtol)
    return v1 + v2, err1 + err2


def _polar_double_integral(p: Callable, k: Kernel, sigma_floor: float, rtol: float) -> Tuple[float, float]:
    """½∬(p(ε₁)−p(ε₂))² k(η) over σ = ε₁+ε₂ ≥ sigma_floor"""
    w_max = -math.log(sigma_floor)

    def near(w, lam):
        sig = np.exp(-w)
        e1, e2 = lam * sig, (1.0 - lam) * sig
        return (p(e1) - p(e2)) ** 2 * k(e1 + e2 - e1 * e2) * sig * sig

    def far(sig, mu):
        lo = 1.0 - 1.0 / sig
        lam = lo + mu * (0.5 - lo)
        e1, e2 = lam * sig, (1.0 - lam) * sig
        return (p(e1) - p(e2)) ** 2 * k(e1 + e2 - e1 * e2) * sig * (0.5 - lo)

    w_edges = np.linspace(0.0, w_max, int(math.ceil(w_max)) + 1)
    lam_edges = [0.0, 1e-4, 1e-3, 1e-2, 0.05, 0.15, 0.3, 0.5]
    v1, err1 = integrate_2d(near, w_edges, lam_edges, atol=1e-15, rtol=rtol)
    v2, err2 = integrate_2d(far, [1.0, 1.5, 2.0], [0.0, 0.5, 1.0], atol=1e-15, rtol=rtol)
    return v1 + v2, err1 + err2


def _power_corner(s: float, amplitude: float, power: float, sigma_c: float) -> float:
    """Corner σ < sigma_c for a kernel ~ amplitude·η^{−power}"""
    expo = 2.0 * s + 2.0 - power
    if expo <= 0:
        raise RangeError(f"variance diverges at the boundary for s={s} (kernel order {power})")
    return 0.5 * 4.0 ** (-2.0 * s) * _lambda_constant(s) * amplitude * sigma_c ** expo / expo


def _profile_fn(profile: RadialProfile) -> Callable:
    return lambda eps: profile.evaluate_eps(eps)


def _radial_variance(profile: RadialProfile, kernel_builder: Callable[[float], Kernel],
                     amplitude: float, power: float, rtol: float = 1e-9) -> Tuple[float, float]:
    p = _profile_fn(profile)
    if profile.is_compact:
        eps_t = profile.eps_support
        return _compact_double_integral(p, kernel_builder(eps_t), eps_t, rtol)
    if profile.kind != "poincare":
        raise ContractError(f"full-support profile {profile.name} has no boundary model")
    body, err = _polar_double_integral(p, kernel_builder(SIGMA_FLOOR * 0.5), SIGMA_FLOOR, rtol)
    corner = _power_corner(profile.s, amplitude, power, SIGMA_FLOOR)
    return body + corner, err + corner * SIGMA_FLOOR


def _as_profile(profile_or_s: Union[RadialProfile, float]) -> RadialProfile:
    if isinstance(profile_or_s, RadialProfile):
        return profile_or_s
    s = float(profile_or_s)
    if s <= 1.0:
        raise DomainError(f"Poincaré-weighted statistic needs s > 1, got {s!r}")
    return RadialProfile.poincare(s)


def var_scalar_quadrature(profile_or_s: Union[RadialProfile, float], z: Optional[PointLike] = None,
                          statistic: str = "scalar") -> VarianceReport:
    """Variance of Σ R(φ_z(x)) F(x) for F ≡ 1 ("scalar") or F = K(·, x) ("bergman_section")"""
    profile = _as_profile(profile_or_s)
    z_sq = _z_sq(z)
    if statistic == "scalar":
        value, err = _radial_variance(profile, lambda _: count_kernel, 2.0, 3.0)
    elif statistic == "bergman_section":
        if profile.is_compact:
            value, err = _radial_variance(profile, lambda eta_min: angular_kernel(z_sq, eta_min), 0.0, 0.0)
        else:
            amp = float(iz_polynomial(1.0, z_sq)) / (1.0 - z_sq) ** 2
            value, err = _radial_variance(profile, lambda _: identity_kernel(z_sq), amp, 5.0)
    else:
        raise ContractError(f"statistic {statistic!r} is not radial about z")
    logger.debug(f"var_scalar_quadrature {profile.name} {statistic} |z|²={z_sq:.4g}: {value:.10g} ± {err:.2g}")
    return VarianceReport(statistic=f"{statistic}:{profile.name}", method="quadrature", value=value,
                          quadrature_error=err, meta={"z_sq": z_sq})


def identity_Iz(profile: RadialProfile, z: Optional[PointLike] = None) -> VarianceReport:
    """Variance of the Bergman-section statistic through the closed-form I_z kernel"""
    if not profile.is_compact:
        raise ContractError(f"profile {profile.name} is not compactly supported")
    z_sq = _z_sq(z)
    value, err = _radial_variance(profile, lambda _: identity_kernel(z_sq), 0.0, 0.0)
    return VarianceReport(statistic=f"identity_Iz:{profile.name}", method="quadrature", value=value,
                          quadrature_error=err, meta={"z_sq": z_sq})


def residue_Jz_check(x: float, y: float, z: PointLike, n_angles: int = 256) -> Tuple[float, float]:
    """(double angular trapezoid, closed form) of J_z at radii x, y"""
    if not (0.0 <= x < 1.0 and 0.0 <= y < 1.0):
        raise DomainError(f"radii must lie in [0, 1), got {x!r}, {y!r}")
    zc = complex(ensure_inside(as_coords(z), "z")[0])
    z_sq = abs(zc) ** 2
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    xs = x * np.exp(1j * theta)[:, None]
    ys = y * np.exp(1j * theta)[None, :]
    k_xy = 1.0 / (1.0 - xs * np.conj(ys)) ** 2
    k_yx = 1.0 / (1.0 - ys * np.conj(xs)) ** 2
    moved = (1.0 - np.conj(zc) * ys) ** 2 * (1.0 - zc * np.conj(xs)) ** 2
    quad = float(np.mean((k_yx * np.abs(k_xy) ** 2 * moved).real)) / (1.0 - z_sq) ** 2
    v = (x * y) ** 2
    closed = float(iz_polynomial(v, z_sq) / ((1.0 - v) ** 5 * (1.0 - z_sq) ** 2))
    return quad, closed


# ------------------------------------------------------- weighted kernels


def _coefficient_at(weight: WeightSpec, y: np.ndarray) -> np.ndarray:
    """b(x) at real degree x = e^y (d = 1)"""
    x = np.exp(y)
    if weight.kind == "unit":
        return x + 1.0
    if weight.kind == "standard_alpha":
        return np.exp(-betaln(x + 1.0, weight.alpha + 1.0))
    if weight.kind in ("critical", "log_supercritical"):
        gamma_ = 0.0 if weight.kind == "critical" else weight.gamma
        return 1.0 / log_weight_moments_logdeg(y, gamma_)
    raise ContractError(f"no large-degree model for {weight.label}")


def _lower_gamma(a: float, x: np.ndarray) -> np.ndarray:
    return gammainc(a, x) * gamma(a)


def _weighted_corner(coeffs: KernelCoeffs, s: float, eta_c: float) -> float:
    """½4^{−2s}C_λ(s)·Σ_n b_n ∫_0^{η_c} σ^{2s+1} e^{−nσ}[(n+1)/σ² + 2/σ³] dσ"""
    b = coeffs.coeffs
    n = np.arange(1, b.size, dtype=float)
    a1, a2 = 2.0 * s, 2.0 * s - 1.0
    head = b[0] * (eta_c ** a1 / a1 + 2.0 * eta_c ** a2 / a2)
    terms = b[1:] * ((n + 1.0) * n ** -a1 * _lower_gamma(a1, n * eta_c) + 2.0 * n ** -a2 * _lower_gamma(a2, n * eta_c))
    growth = coeffs.weight.growth_exponent()
    decay = 2.0 * s - 2.0 - growth
    y0 = math.log(b.size - 0.5)
    span = 60.0 / decay

    def integrand(y):
        x = np.exp(y)
        g = x ** (1.0 - a1) * (2.0 * _lower_gamma(a2, eta_c * x) + _lower_gamma(a1, eta_c * x))
        return _coefficient_at(coeffs.weight, y) * g * x

    tail, _ = integrate(integrand, y0, y0 + span, breakpoints=[y0 + 0.01 * span, y0 + 0.1 * span, y0 + 0.3 * span],
                        atol=1e-300, rtol=1e-9)
    return 0.5 * 4.0 ** (-a1) * _lambda_constant(s) * float(head + np.sum(terms) + float(tail))


def var_kernel_weighted(coeffs: KernelCoeffs, s: Optional[float] = None, z: Optional[PointLike] = None,
                        profile: Optional[RadialProfile] = None) -> VarianceReport:
    """Variance of Σ e^{−s d_B(x,o)} K_W(·, x) (or Σ R(x) K_W(·, x)) in A²(W)"""
    if _z_sq(z) != 0.0:
        raise ContractError("the weighted-kernel variance is evaluated at z = o")
    if (s is None) == (profile is None):
        raise ArgumentError("give exactly one of s or profile")
    if coeffs.dimension != 1:
        raise ArgumentError("weighted variance is implemented for d = 1")
    if profile is not None:
        if not profile.is_compact:
            raise ContractError(f"profile {profile.name} is not compactly supported")
        eps_t = profile.eps_support
        value, err = _compact_double_integral(_profile_fn(profile), dsharp_kernel(coeffs, eps_t), eps_t, 1e-9)
        label = profile.name
    else:
        if s <= 1.0 + 0.5 * coeffs.weight.growth_exponent():
            raise RangeError(f"variance of the {coeffs.weight_id} statistic diverges at s={s}")
        p = _profile_fn(RadialProfile.poincare(s))
        body, err = _polar_double_integral(p, dsharp_kernel(coeffs, 0.5 * ETA_SPLIT), ETA_SPLIT, 1e-8)
        corner = _weighted_corner(coeffs, s, ETA_SPLIT)
        # the corner model drops O(η_c) relative terms
        value, err = body + corner, err + ETA_SPLIT * corner
        label = f"poincare(s={s:g})"
    logger.debug(f"var_kernel_weighted {coeffs.weight_id} {label}: {value:.10g} ± {err:.2g}")
    return VarianceReport(statistic=f"kernel:{coeffs.weight_id}:{label}", method="quadrature", value=value,
                          quadrature_error=err, meta={"weight": coeffs.weight_id, "degree": coeffs.degree})


# ------------------------------------------------------------ functionals


def profile_mass(profile: RadialProfile, d: int = 1) -> float:
    """g^R_P = ∫ R dμ, the mean of Σ R(φ_z(x))"""
    if not profile.is_compact:
        if profile.kind != "poincare":
            raise ContractError(f"mass of full-support profile {profile.name} is not tabulated")
        return poincare_mass(profile.s, d)
    w_max = -math.log(profile.eps_support)

    def integrand(w):
        eps = np.exp(-w)
        return d * (1.0 - eps) ** (d - 1) * profile.evaluate_eps(eps) * eps ** (-d)

    breaks = [b for b in (1.0, 4.0, 16.0, 64.0) if b < w_max]
    value, _ = integrate(integrand, 0.0, w_max, breakpoints=breaks, atol=1e-14, rtol=1e-11)
    return float(value)


def impossibility_ratio(profile: RadialProfile, z: Optional[PointLike] = None) -> float:
    """E sup_{‖f‖≤1} |g^R_X(z; f)/g^R_P − f(z)|² = Var/(g^R_P)²"""
    mass = profile_mass(profile)
    if mass <= 0.0:
        raise DomainError(f"profile {profile.name} has zero mass")
    return identity_Iz(profile, z).value / mass ** 2


def claimA_UV(n: int, s: float) -> Tuple[float, float, float]:
    """(U, V, U/V) with U = (∫((1−r)/(1+r))^s r^{2n+1} dr)², V = ∫((1−r)/(1+r))^{2s} r^{2n+1} dr/(2n+2)"""
    if n < 0:
        raise ArgumentError(f"n must be nonnegative, got {n!r}")
    breaks = sorted({1.0 - j / (n + 1.0) for j in (1, 4, 16) if j < n + 1})

    def first(r):
        return ((1.0 - r) / (1.0 + r)) ** s * r ** (2 * n + 1)

    def second(r):
        return ((1.0 - r) / (1.0 + r)) ** (2.0 * s) * r ** (2 * n + 1)

    a, _ = integrate(first, 0.0, 1.0, breakpoints=breaks, atol=1e-300, rtol=1e-13)
    b, _ = integrate(second, 0.0, 1.0, breakpoints=breaks, atol=1e-300, rtol=1e-13)
    u = float(a) ** 2
    v = float(b) / (2.0 * n + 2.0)
    return u, v, u / v


def claimA_limit(s: float) -> float:
    """n → ∞ limit Γ(s+1)²/Γ(2s+1) of U/V"""
    return math.exp(2.0 * gammaln(s + 1.0) - gammaln(2.0 * s + 1.0))


def sharp_divergence_bound(s: float, N: int, allow_outside: bool = False) -> float:
    """(1/128)(∫ Φ_N(√(1−t))²/t⁴ dt)² for the Poincaré profile cut at d_B ≤ N + 1"""
    if N < 0:
        raise ArgumentError(f"N must be nonnegative, got {N!r}")
    if s <= 1.0 or (s > 1.5 and not allow_outside):
        raise DomainError(f"divergence bound is stated for 1 < s ≤ 3/2, got {s!r}")
    # t ≥ sech²((N+1)/2), written as w = −log t ≤ 2 log cosh((N+1)/2)
    half = 0.5 * (N + 1.0)
    w_max = 2.0 * (half + math.log1p(math.exp(-2.0 * half)) - math.log(2.0))

    def integrand(w):
        t = np.exp(-w)
        return exp_neg_distance(t) ** (2.0 * s) * t ** -3.0

    breaks = [b for b in np.arange(1.0, w_max, 1.0)]
    value, _ = integrate(integrand, 0.0, w_max, breakpoints=breaks, atol=1e-300, rtol=1e-11)
    return float(value) ** 2 / 128.0


def pluri_ratio_bound(n: int, s: float, d: int) -> float:
    """Σ_k k^d m^{2s−d}/(k+m)^{2s+1} for m = |n|, summed exactly with a Beta-function tail"""
    if n < 1:
        raise ArgumentError(f"|n| must be at least 1, got {n!r}")
    if not d <= s <= 2 * d:
        raise DomainError(f"s must lie in [{d}, {2 * d}], got {s!r}")
    m = float(n)
    k_max = max(64 * n, 1000)
    k = np.arange(1, k_max + 1, dtype=float)
    body = float(np.sum(np.exp(d * np.log(k) + (2.0 * s - d) * math.log(m) - (2.0 * s + 1.0) * np.log(k + m))))
    x = (k_max + 0.5) / m
    tail = float(beta(d + 1.0, 2.0 * s - d) * (1.0 - betainc(d + 1.0, 2.0 * s - d, x / (1.0 + x))))
    return body + tail


def sum_to_integral_bound(m: int, s: float, d: int) -> Tuple[float, float, float]:
    """((1/m)Σ H(k/m), max H + 2∫H, ∫H) for H(t) = t^d/(1+t)^{2s+1}"""
    t_star = d / (2.0 * s + 1.0 - d)
    h_max = t_star ** d / (1.0 + t_star) ** (2.0 * s + 1.0)
    h_int = float(beta(d + 1.0, 2.0 * s - d))
    return pluri_ratio_bound(m, s, d), h_max + 2.0 * h_int, h_int


def count_variance_closed_form(t: float, d: int = 1) -> float:
    """Variance of the number of points in the Euclidean ball of radius t"""
    if not 0.0 <= t < 1.0:
        raise DomainError(f"radius must lie in [0, 1), got {t!r}")
    return count_statistics(float(euclidean_to_radius(t)), d)[1]


def mode_variance_constant(s: float) -> float:
    """lim m^{2s−1} Var(Σ e^{−s d_B(x,o)} x^m) = 4^{−2s} Γ(2s−1) (1 − Γ(s+1)²/Γ(2s+1))"""
    return 4.0 ** (-2.0 * s) * math.exp(gammaln(2.0 * s - 1.0)) * (1.0 - claimA_limit(s))


@lru_cache(maxsize=4096)
def scalar_mode_variance(m: int, s: float) -> float:
    """Var of Σ e^{−s d_B(x,o)} x^m (d = 1), by quadrature up to m = 4096 and asymptotically beyond"""
    if m < 0:
        raise ArgumentError(f"m must be nonnegative, got {m!r}")
    if s <= 0.5:
        raise DomainError(f"mode variance diverges for s={s!r}")
    if m > MODE_EXACT_LIMIT:
        return mode_variance_constant(s) * float(m) ** (1.0 - 2.0 * s)
    p = _profile_fn(RadialProfile.poincare(s))

    def integrand(w, lam):
        sig = np.exp(-w)
        e1, e2 = lam * sig, (1.0 - lam) * sig
        eta = e1 + e2 - e1 * e2
        a, b = 1.0 - e1, 1.0 - e2
        p1, p2 = p(e1), p(e2)
        v = a * b
        k0 = (2.0 - eta) / eta ** 3
        km = (m + 1.0) / eta ** 2 + 2.0 * v / eta ** 3
        val = (p1 * p1 * a ** m + p2 * p2 * b ** m) * k0 - 2.0 * p1 * p2 * v ** m * km
        return val * sig * sig

    w_max = -math.log(1e-9)
    w_edges = np.unique(np.concatenate([np.linspace(0.0, w_max, 22), [math.log(m + 1.0)]]))
    lam_edges = [0.0, 1e-3, 0.05, 0.3, 0.5]
    near, _ = integrate_2d(integrand, w_edges, lam_edges, atol=1e-300, rtol=1e-8)

    def far(sig, mu):
        lo = 1.0 - 1.0 / sig
        lam = lo + mu * (0.5 - lo)
        return integrand(-np.log(sig), lam) / sig * (0.5 - lo)

    rest, _ = integrate_2d(far, [1.0, 1.5, 2.0], [0.0, 0.5, 1.0], atol=1e-300, rtol=1e-8)
    return max(float(near + rest), 0.0)


def interpolation_variance_ratio(f: TestFunction, s: float) -> float:
    """Var g_X(s, o; f)/g_P(s)² for holomorphic f on the disk; distinct modes are uncorrelated"""
    if f.dimension != 1:
        raise ArgumentError("mode variances are implemented for d = 1")
    if f.kind == "constant":
        var = abs(f.value) ** 2 * scalar_mode_variance(0, s)
    elif f.kind == "monomial":
        var = scalar_mode_variance(f.n[0], s)
    elif f.kind == "lacunary":
        var = 0.0
        for k in range(1, 1000):
            term = 2.0 ** k * k * k * scalar_mode_variance(2 ** k, s)
            var += term
            if term < 1e-16 * var:
                break
    else:
        raise ContractError(f"{f.name} is not a holomorphic mode sum")
    return var / poincare_mass(s, 1) ** 2


def mode_band_ratio(m: int, s: float) -> float:
    """Var of the degree-m mode over ∫|x^m|²(1−|x|²)^{2s−2} dA (normalized area)"""
    if s <= 0.5:
        raise DomainError(f"mode variance diverges for s={s!r}")
    return scalar_mode_variance(m, s) / math.exp(betaln(m + 1.0, 2.0 * s - 1.0))


def ps_variance_upper_bound(f: TestFunction, s: float, radius: Optional[float] = None) -> float:
    """2∫ e^{−2s d_B(x,o)} ‖f(x)‖² dμ(x), bounding the variance of g_X(s, o; f)

    With a radius the integral stops at d_B(x, o) = radius, which bounds the statistic
    weighted by the truncated Poincaré profile.
    """
    d = f.dimension

    def integrand(w):
        eps = np.exp(-w)
        return (2.0 * d * (1.0 - eps) ** (d - 1) * exp_neg_distance(eps) ** (2.0 * s)
                * f.sphere_mean_square(1.0 - eps, eps) * eps ** (-d))

    # ε = sech²(radius/2) at the edge of B(o, radius)
    w_max = 700.0 if radius is None else 2.0 * math.log(math.cosh(0.5 * radius))
    value, _ = integrate(integrand, 0.0, w_max, breakpoints=[1.0, 4.0, 16.0, 64.0, 256.0], atol=1e-300, rtol=1e-10)
    return float(value)


# ------------------------------------------------------------ Monte Carlo


class LinearStatistic(BaseModel):
    """Σ R(φ_z(x)) F(x) over a configuration"""
    model_config = ConfigDict(frozen=True)

    profile: RadialProfile
    z: List[complex] = Field(default_factory=lambda: [0j])
    f: Optional[TestFunction] = None

    @property
    def label(self) -> str:
        name = self.f.name if self.f is not None else "1"
        return f"{self.profile.name}|{name}|z={self.z[0]:.3g}"

    @property
    def is_vector(self) -> bool:
        return self.f is not None and self.f.is_vector

    def _function(self, d: int) -> TestFunction:
        return self.f if self.f is not None else TestFunction.constant(1.0, d)

    def value(self, config: Configuration):
        f = self._function(config.dimension)
        if self.profile.is_compact:
            stat, _ = ps_generalized(config, self.profile, self.z, f)
            return stat
        za = np.asarray(self.z, dtype=complex)
        weights = self.profile.of_distance(_distance(config.array, za)) if len(config) else np.zeros(0)
        if f.is_vector:
            return CoefficientRecord(feature=f, points=config.array, coeffs=weights.astype(complex))
        return complex(np.sum(weights * f.values(config.array))) if len(config) else 0j

    def squared_deviation(self, config: Configuration) -> float:
        """‖S − E S‖² for vector statistics, with E S = g^R_P F(z)"""
        if not self.profile.is_compact:
            raise ContractError("the mean of a window-truncated statistic is not known in closed form")
        record = self.value(config)
        mass = profile_mass(self.profile, config.dimension)
        return record.with_term(np.asarray(self.z, dtype=complex), -mass).norm() ** 2


def _jackknife_variance(x: np.ndarray) -> Tuple[float, float]:
    """Sample variance (ddof=1) and its delete-1 jackknife standard error"""
    n = x.size
    s1 = np.sum(x)
    s2 = float(np.sum(np.abs(x) ** 2))
    loo_mean = (s1 - x) / (n - 1)
    loo_var = (s2 - np.abs(x) ** 2 - (n - 1) * np.abs(loo_mean) ** 2) / (n - 2)
    var = (s2 - n * abs(s1 / n) ** 2) / (n - 1)
    se = math.sqrt((n - 1) / n * float(np.sum((loo_var - loo_var.mean()) ** 2)))
    return max(float(var), 0.0), se


def var_mc_configs(statistic: LinearStatistic, configs: Sequence[Configuration], threads: int = 1) -> VarianceReport:
    """Empirical variance of the statistic over given configurations"""
    n = len(configs)
    if n < MIN_MC_SEEDS:
        raise ArgumentError(f"need at least {MIN_MC_SEEDS} configurations, got {n}")
    fn = statistic.squared_deviation if statistic.is_vector else statistic.value
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = np.asarray(list(pool.map(fn, configs)))
    else:
        values = np.asarray([fn(c) for c in configs])
    if statistic.is_vector:
        value = float(values.mean())
        se = float(values.std(ddof=1)) / math.sqrt(n)
    else:
        value, se = _jackknife_variance(values.astype(complex))
    logger.info(f"MC variance of {statistic.label} over {n} configurations: {value:.6g} ± {se:.2g}")
    return VarianceReport(statistic=statistic.label, method="mc", value=value, n_samples=n, standard_error=se,
                          meta={"generator": configs[0].generator, "window": configs[0].window_radius})


def var_mc(statistic: LinearStatistic, spec: Union[GafSpec, HkpvSpec], seeds: Sequence[int],
           threads: int = 1) -> VarianceReport:
    """Sample the process at each seed and report the empirical variance"""
    if len(seeds) < MIN_MC_SEEDS:
        raise ArgumentError(f"need at least {MIN_MC_SEEDS} seeds, got {len(seeds)}")
    return var_mc_configs(statistic, sample_many(spec, seeds, threads), threads)
