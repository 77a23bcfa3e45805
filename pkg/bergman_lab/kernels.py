"""
Bergman kernels on the unit ball.

The unweighted kernel has the closed form (1 − <z,w>)^{−(d+1)}. For a radial
weight W(z) = Φ(|z|) the kernel is Σ_k b_k <z,w>^k with per-degree scalars

    b_k = C(k+d−1, d−1) / m_k,    m_k = d ∫_0^1 t^{k+d−1} Φ(√t) dt,

and the monomial coefficient of z^n w̄^n is a_n = b_{|n|} |n|!/n!. For d = 1 the
two coincide. Log-type weights are integrated after the change of variables
1 − t = 4e^{−x}, which turns the boundary singularity into x^{γ−2} decay.
"""

import logging
import math
from functools import lru_cache
from typing import Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import betaln, gammaln

from .errors import AdmissibilityError, ArgumentError, ContractError, NumericError, RangeError
from .hypgeom import _inner
from .models import PointLike, as_coords, ensure_inside
from .profiles import RadialProfile
from .quadrature import integrate, periodic_trapezoid

logger = logging.getLogger(__name__)

LOG4 = math.log(4.0)
DEFAULT_DEGREE = 4096
MAX_DEGREE = 1 << 20
TAIL_TARGET = 1e-9
CHUNK = 2048

WeightKind = Literal["unit", "standard_alpha", "critical", "log_supercritical", "custom"]


class WeightSpec(BaseModel):
    """A radial Bergman weight W(z) = Φ(|z|)"""
    model_config = ConfigDict(frozen=True)

    kind: WeightKind
    dimension: int = Field(default=1, ge=1)
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    profile: Optional[RadialProfile] = None

    @classmethod
    def unit(cls, d: int = 1) -> "WeightSpec":
        return cls(kind="unit", dimension=d)

    @classmethod
    def standard_alpha(cls, alpha: float, d: int = 1) -> "WeightSpec":
        return cls(kind="standard_alpha", alpha=alpha, dimension=d)

    @classmethod
    def critical(cls, d: int = 1) -> "WeightSpec":
        return cls(kind="critical", dimension=d)

    @classmethod
    def log_supercritical(cls, gamma: float, d: int = 1) -> "WeightSpec":
        return cls(kind="log_supercritical", gamma=gamma, dimension=d)

    @classmethod
    def custom(cls, profile: RadialProfile, d: int = 1) -> "WeightSpec":
        return cls(kind="custom", profile=profile, dimension=d)

    @property
    def label(self) -> str:
        if self.kind == "standard_alpha":
            return f"standard_alpha({self.alpha:g})"
        if self.kind == "log_supercritical":
            return f"log_supercritical({self.gamma:g})"
        if self.kind == "custom":
            return f"custom({self.profile.name})"
        return self.kind

    def as_profile(self) -> RadialProfile:
        """The weight as a radial profile Φ"""
        if self.kind == "unit":
            return RadialProfile.constant(1.0)
        if self.kind == "standard_alpha":
            return RadialProfile.power(self.alpha)
        if self.kind == "critical":
            return RadialProfile.critical()
        if self.kind == "log_supercritical":
            return RadialProfile.log_supercritical(self.gamma)
        return self.profile

    def growth_exponent(self) -> float:
        """p in the coefficient envelope b_k ≲ (k+1)^p log(k+2)"""
        d = self.dimension
        if self.kind == "unit":
            return float(d)
        if self.kind == "standard_alpha":
            return d + self.alpha
        return float(d - 1)


# ---------------------------------------------------------------- closed forms


def bergman_kernel(z: PointLike, w: PointLike) -> complex:
    """Unweighted Bergman kernel 1/(1 − <z,w>)^{d+1}"""
    za = ensure_inside(as_coords(z), "z")
    wa = ensure_inside(as_coords(w), "w")
    if za.size != wa.size:
        raise ArgumentError(f"dimension mismatch: {za.size} vs {wa.size}")
    return complex((1.0 - _inner(za, wa)) ** (-(za.size + 1)))


def E_function(t):
    """E(t) = (1−t)^{−4} log(2/(1−t))"""
    t = np.asarray(t, dtype=float)
    return (1.0 - t) ** -4 * np.log(2.0 / (1.0 - t))


def log_series_ratio(t, d: int) -> np.ndarray:
    """Σ (k+1)^{d−1} log(k+2) t^k divided by (1−t)^{−d} log(2/(1−t))"""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(ts)
    for i, ti in enumerate(ts):
        if ti == 0.0:
            out[i] = 1.0
            continue
        n_terms = int(45.0 / (1.0 - ti)) + 16
        k = np.arange(n_terms, dtype=float)
        terms = np.exp((d - 1) * np.log1p(k) + k * math.log(ti)) * np.log(k + 2.0)
        out[i] = float(np.sum(terms)) * (1.0 - ti) ** d / math.log(2.0 / (1.0 - ti))
    return out


def critical_coefficient_model(n, d: int = 1) -> np.ndarray:
    """Growth model C(n+d−1, d−1) log(4(n+d)) / d of the critical-weight coefficients"""
    n = np.asarray(n, dtype=float)
    binom = np.exp(gammaln(n + d) - gammaln(n + 1) - gammaln(d))
    return binom * np.log(4.0 * (n + d)) / d


# ------------------------------------------------------- moment quadratures


def _log_moment_breaks(ks: np.ndarray, gamma: float):
    """Transition points x* = log(4k) mapped to the integration variable"""
    k_pos = ks[ks > 0]
    if k_pos.size == 0:
        return []
    xs = np.log(4.0 * np.geomspace(k_pos.min(), k_pos.max(), 6))
    if gamma == 0.0:
        return list(1.0 / xs)
    return list(xs ** (gamma - 1.0))


def log_weight_moments(ks: Sequence[float], gamma: float = 0.0) -> np.ndarray:
    """∫_{log 4}^∞ (1 − 4e^{−x})^k x^{γ−2} dx for each k (γ = 0: critical weight)"""
    ks = np.asarray(ks, dtype=float)
    out = np.empty(ks.size)
    for start in range(0, ks.size, CHUNK):
        chunk = ks[start:start + CHUNK]
        if gamma == 0.0:
            upper = 1.0 / LOG4

            def f(v, chunk=chunk):
                base = np.log1p(-4.0 * np.exp(-1.0 / v))
                return np.exp(chunk[:, None] * base[None, :])

            scale = 1.0
        else:
            upper = LOG4 ** (gamma - 1.0)

            def f(q, chunk=chunk):
                x = q ** (-1.0 / (1.0 - gamma))
                base = np.log1p(-4.0 * np.exp(-x))
                return np.exp(chunk[:, None] * base[None, :])

            scale = 1.0 / (1.0 - gamma)
        value, _ = integrate(f, 0.0, upper, breakpoints=_log_moment_breaks(chunk, gamma),
                             atol=1e-13, rtol=1e-12, max_panels=50000)
        out[start:start + CHUNK] = scale * value
    return out


def _stable_lambda(u: np.ndarray) -> np.ndarray:
    """log(−log(1 − 4e^{−u})), accurate for u far beyond exp underflow"""
    u = np.asarray(u, dtype=float)
    far = u > 40.0
    near_u = np.where(far, 40.0, u)
    near = np.log(-np.log1p(-4.0 * np.exp(-near_u)))
    return np.where(far, LOG4 - u + 2.0 * np.exp(-np.minimum(u, 700.0)), near)


def log_weight_moments_logdeg(y: Sequence[float], gamma: float = 0.0) -> np.ndarray:
    """The same moments at real degree k = e^y, usable for y in the hundreds.

    The integrand is a smoothed step located at x* = y + log 4, so the
    integral is taken over a fixed window around x* plus the closed-form tail.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    centre = y + LOG4

    def f(tau):
        u = centre[:, None] + tau[None, :]
        inside = u > LOG4
        u_safe = np.where(inside, u, 2.0 * LOG4)
        step = np.exp(-np.exp(y[:, None] + _stable_lambda(u_safe)))
        return np.where(inside, step * u_safe ** (gamma - 2.0), 0.0)

    body, _ = integrate(f, -40.0, 40.0, breakpoints=[-8.0, -2.0, 0.0, 2.0, 8.0], atol=1e-300, rtol=1e-11)
    tail = (centre + 40.0) ** (gamma - 1.0) / (1.0 - gamma)
    return body + tail


def critical_claim_integral(k: int) -> float:
    """∫_{log 4}^∞ (1 − 4e^{−x})^k / x² dx"""
    if k < 0:
        raise ArgumentError(f"k must be nonnegative, got {k!r}")
    return float(log_weight_moments([k])[0])


def _custom_moments(profile: RadialProfile, ks: np.ndarray, d: int) -> np.ndarray:
    """d ∫_0^1 (1−ε)^{k+d−1} Φ(ε) dε with ε = e^{−u}"""
    eps_break = [-math.log(e) for e in profile.eps_breakpoints() if e > 0]
    out = np.empty(ks.size)
    for start in range(0, ks.size, CHUNK):
        chunk = ks[start:start + CHUNK] + d - 1

        def f(u, chunk=chunk):
            eps = np.exp(-u)
            base = np.log1p(-eps)
            phi = profile.evaluate_eps(eps) * eps
            return np.exp(chunk[:, None] * base[None, :]) * phi[None, :]

        value, _ = integrate(f, 0.0, 700.0, breakpoints=eps_break + [1.0, 5.0, 20.0, 80.0],
                             atol=1e-15, rtol=1e-11, max_panels=50000)
        out[start:start + CHUNK] = d * value
    return out


def _check_admissible(weight: WeightSpec) -> None:
    if weight.kind == "log_supercritical":
        if weight.gamma is None or not 0.0 < weight.gamma < 1.0:
            raise AdmissibilityError(f"log_supercritical weight needs γ in (0, 1), got {weight.gamma!r}")
    if weight.kind == "standard_alpha" and (weight.alpha is None or weight.alpha <= -1.0):
        raise AdmissibilityError(f"(1−|z|²)^α is not integrable for α={weight.alpha!r}")
    if weight.kind == "custom":
        if weight.profile is None:
            raise AdmissibilityError("custom weight needs a profile")
        near_boundary = weight.profile.evaluate_eps(np.geomspace(1e-12, 1e-1, 12))
        if not np.any(near_boundary > 0):
            raise AdmissibilityError(f"{weight.label} vanishes near the boundary")


@lru_cache(maxsize=32)
def degree_moments(weight: WeightSpec, n_max: int) -> np.ndarray:
    """m_0 .. m_{n_max} for the weight"""
    _check_admissible(weight)
    d = weight.dimension
    ks = np.arange(n_max + 1, dtype=float)
    if weight.kind == "unit":
        return d / (ks + d)
    if weight.kind == "standard_alpha":
        return d * np.exp(betaln(ks + d, weight.alpha + 1.0))
    if weight.kind in ("critical", "log_supercritical"):
        gamma = 0.0 if weight.kind == "critical" else weight.gamma
        logger.debug(f"Integrating {n_max + 1} moments for {weight.label}, d={d}")
        return d * log_weight_moments(ks + d - 1, gamma)
    try:
        moments = _custom_moments(weight.profile, ks, d)
    except NumericError as e:
        raise AdmissibilityError(f"{weight.label} is not integrable: {e.detail}") from e
    if not np.all(np.isfinite(moments)) or np.any(moments <= 0):
        raise AdmissibilityError(f"{weight.label} has non-positive or infinite moments")
    return moments


def degree_coefficients(weight: WeightSpec, n_max: int) -> np.ndarray:
    """Per-degree scalars b_0 .. b_{n_max}"""
    d = weight.dimension
    ks = np.arange(n_max + 1, dtype=float)
    if weight.kind == "unit":
        return np.exp(gammaln(ks + d + 1) - gammaln(ks + 1) - gammaln(d + 1))
    binom = np.exp(gammaln(ks + d) - gammaln(ks + 1) - gammaln(d))
    return binom / degree_moments(weight, n_max)


# ------------------------------------------------------------- coefficients


class KernelCoeffs(BaseModel):
    """Truncated per-degree expansion of K_W with a certified tail"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weight: WeightSpec
    coeffs: np.ndarray
    rho_max: float
    envelope_scale: float
    envelope_power: float

    @property
    def dimension(self) -> int:
        return self.weight.dimension

    @property
    def weight_id(self) -> str:
        return self.weight.label

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def envelope(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return self.envelope_scale * (k + 1.0) ** self.envelope_power * np.log(k + 2.0)

    def tail_bound(self, x: float, extra_power: float = 0.0) -> float:
        """Bound on Σ_{k>N} b_k (k+1)^{extra_power} x^k for 0 ≤ x ≤ rho_max"""
        if x <= 0.0:
            return 0.0
        n = self.degree
        p = self.envelope_power + extra_power
        q = x * ((n + 2.0) / (n + 1.0)) ** max(p, 0.0) * math.log(n + 3.0) / math.log(n + 2.0)
        if q >= 1.0:
            return math.inf
        first = self.envelope_scale * (n + 2.0) ** p * math.log(n + 3.0) * x ** (n + 1)
        return first / (1.0 - q)

    def multi_index_coefficient(self, n: Sequence[int]) -> float:
        """a_n = b_{|n|} |n|!/n! for the monomial z^n"""
        n = np.asarray(n, dtype=float)
        k = int(n.sum())
        if k > self.degree:
            raise RangeError(f"|n|={k} beyond truncation degree {self.degree}")
        return float(self.coeffs[k] * math.exp(gammaln(k + 1) - np.sum(gammaln(n + 1))))

    def series(self, x) -> np.ndarray:
        """Σ b_k x^k for complex x (no range check)"""
        return np.polynomial.polynomial.polyval(np.asarray(x), self.coeffs)


def _fit_envelope(weight: WeightSpec, coeffs: np.ndarray) -> Tuple[float, float]:
    n = coeffs.size - 1
    if weight.kind == "custom":
        lo = max(n // 2, 1)
        slope = math.log(coeffs[n] / coeffs[lo]) / math.log((n + 1.0) / (lo + 1.0))
        power = max(float(weight.dimension - 1), math.ceil(10 * slope) / 10 + 0.25)
    else:
        power = weight.growth_exponent()
    k = np.arange(max(n // 2, 0), n + 1, dtype=float)
    ratio = coeffs[k.astype(int)] / ((k + 1.0) ** power * np.log(k + 2.0))
    return 2.0 * max(1.0, float(ratio.max())), power


def radial_weight_coeffs(weight: WeightSpec, n: int = DEFAULT_DEGREE, rho_max: float = 0.99) -> KernelCoeffs:
    """Kernel coefficients with N ≥ n, doubled until the tail at rho_max is below 1e-9"""
    if n < 0:
        raise ArgumentError(f"N must be nonnegative, got {n!r}")
    if not 0.0 <= rho_max < 1.0:
        raise RangeError(f"rho_max must lie in [0, 1), got {rho_max!r}")
    n = max(n, 8)
    while True:
        coeffs = degree_coefficients(weight, n)
        scale, power = _fit_envelope(weight, coeffs)
        kc = KernelCoeffs(weight=weight, coeffs=coeffs, rho_max=rho_max,
                          envelope_scale=scale, envelope_power=power)
        tail = kc.tail_bound(rho_max)
        if tail < TAIL_TARGET:
            logger.debug(f"{weight.label}: N={n}, tail bound {tail:.2e} at rho_max={rho_max}")
            return kc
        if n >= MAX_DEGREE:
            raise NumericError(f"{weight.label}: tail bound {tail:.2e} at rho_max={rho_max} even with N={n}",
                               {"degree": n, "tail": tail})
        n *= 2


def weighted_kernel_eval(coeffs: KernelCoeffs, z: PointLike, w: PointLike) -> Tuple[complex, float]:
    """K_W(z, w) as (partial sum, tail bound)"""
    za = ensure_inside(as_coords(z), "z")
    wa = ensure_inside(as_coords(w), "w")
    if za.size != wa.size or za.size != coeffs.dimension:
        raise ArgumentError(f"dimension mismatch: {za.size}, {wa.size}, kernel d={coeffs.dimension}")
    bound = float(np.linalg.norm(za) * np.linalg.norm(wa))
    if bound > coeffs.rho_max:
        raise RangeError(f"|z||w| = {bound:.6g} exceeds rho_max = {coeffs.rho_max}")
    x = complex(_inner(za, wa))
    value = complex(coeffs.series(x))
    if np.allclose(za, wa):
        value = complex(value.real, 0.0)
    return value, coeffs.tail_bound(abs(x))


def kernel_gram(coeffs: KernelCoeffs, points: np.ndarray) -> np.ndarray:
    """Matrix [K_W(x_i, x_j)] for an (n, d) array of points"""
    pts = np.asarray(points, dtype=complex)
    norms = np.linalg.norm(pts, axis=1)
    if norms.size and norms.max() ** 2 > coeffs.rho_max:
        raise RangeError(f"points reach |x|² = {norms.max() ** 2:.6g} beyond rho_max = {coeffs.rho_max}")
    x = pts @ np.conj(pts).T
    return coeffs.series(x)


def angular_average_Dsharp(coeffs: KernelCoeffs, u: float) -> Tuple[float, float]:
    """D♯(u) = Σ b_n v^n [(n+1)/(1−v)² + 2v/(1−v)³] with v = u², as (value, tail bound)"""
    if coeffs.dimension != 1:
        raise ArgumentError("the angular-average series is defined for d = 1")
    if not 0.0 <= u < 1.0:
        raise RangeError(f"u must lie in [0, 1), got {u!r}")
    v = u * u
    if v > coeffs.rho_max:
        raise RangeError(f"u² = {v:.6g} exceeds rho_max = {coeffs.rho_max}")
    b = coeffs.coeffs
    k = np.arange(b.size, dtype=float)
    one_minus = 1.0 - v
    value = (np.polynomial.polynomial.polyval(v, b * (k + 1.0)) / one_minus ** 2
             + 2.0 * v * np.polynomial.polynomial.polyval(v, b) / one_minus ** 3)
    tail = coeffs.tail_bound(v, 1.0) / one_minus ** 2 + 2.0 * v * coeffs.tail_bound(v) / one_minus ** 3
    return float(value), float(tail)


def dsharp_series_coefficients(coeffs: KernelCoeffs) -> np.ndarray:
    """c_j with D♯ = Σ c_j v^j: c_j = (j+1) Σ_{n≤j} b_n (j−n+1)"""
    b = coeffs.coeffs
    j = np.arange(b.size, dtype=float)
    # Σ_{n≤j} b_n (j+1−n) = (j+1) B_j − Σ_{n≤j} n b_n with cumulative sums
    cum_b = np.cumsum(b)
    cum_nb = np.cumsum(j * b)
    return (j + 1.0) * ((j + 1.0) * cum_b - cum_nb)


def is_supercritical(weight: WeightSpec) -> bool:
    """Ratio test: W/W_cr increasing without bound toward the boundary"""
    if weight.kind == "log_supercritical":
        return weight.gamma is not None and 0.0 < weight.gamma < 1.0
    eps = np.geomspace(1e-2, 1e-250, 40)
    ratio = weight.as_profile().evaluate_eps(eps) / RadialProfile.critical().evaluate_eps(eps)
    if not np.all(np.isfinite(ratio)):
        return False
    return bool(np.all(np.diff(ratio) >= -1e-12 * ratio[:-1]) and ratio[-1] > 10.0 * ratio[0])


def supercritical_ratio_decay(weight: WeightSpec, t_grid: Sequence[float]) -> np.ndarray:
    """K_W(t,t)/K_{W_cr}(t,t) along radii t (d = 1)"""
    if not is_supercritical(weight):
        raise ContractError(f"{weight.label} is not super-critical")
    t = np.asarray(t_grid, dtype=float)
    if np.any((t < 0) | (t >= 1)):
        raise RangeError("radii must lie in [0, 1)")
    x = t * t
    rho = max(float(x.max()), 0.5)
    kw = radial_weight_coeffs(weight, rho_max=rho)
    kc = radial_weight_coeffs(WeightSpec.critical(weight.dimension), rho_max=rho)
    return kw.series(x).real / kc.series(x).real


def reproducing_identity_residual(coeffs: KernelCoeffs, z: complex, n_angles: int = 256) -> float:
    """Relative gap in ∫ K_W(w,z)|K_D(z,w)|² dA(w) = K_W(z,z) K_D(z,z) (d = 1)"""
    if coeffs.dimension != 1:
        raise ArgumentError("reproducing identity check is implemented for d = 1")
    z = complex(z)
    if abs(z) > coeffs.rho_max:
        raise RangeError(f"|z| exceeds rho_max = {coeffs.rho_max}")

    def radial(a):
        r = np.sqrt(a)

        def angular(theta):
            w = r[:, None] * np.exp(1j * theta)[None, :]
            kd = 1.0 / (1.0 - z * np.conj(w)) ** 2
            return (coeffs.series(w * np.conj(z)) * np.abs(kd) ** 2).real

        return periodic_trapezoid(angular, n_angles)

    lhs, _ = integrate(radial, 0.0, 1.0, atol=1e-14, rtol=1e-11)
    kd_zz = 1.0 / (1.0 - abs(z) ** 2) ** 2
    rhs = float(coeffs.series(abs(z) ** 2).real) * kd_zz
    return abs(float(lhs) - rhs) / rhs


def _rho_bucket(x: float) -> float:
    """Round a needed rho_max up to a small set of cached values"""
    for rho in (0.5, 0.9, 0.99, 0.999, 0.9999):
        if x <= rho:
            return rho
    raise RangeError(f"kernel series requested at |z||w| = {x:.8g}, too close to the boundary")


@lru_cache(maxsize=32)
def cached_coeffs(weight: WeightSpec, rho_max: float) -> KernelCoeffs:
    return radial_weight_coeffs(weight, rho_max=rho_max)


def kernel_matrix(weight: WeightSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[K_W(a_i, b_j)] for (n, d) and (m, d) point arrays"""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    x = a @ np.conj(b).T
    if weight.kind == "unit":
        return (1.0 - x) ** (-(weight.dimension + 1))
    if x.size == 0:
        return np.zeros(x.shape, dtype=complex)
    need = float(np.max(np.linalg.norm(a, axis=1)) * np.max(np.linalg.norm(b, axis=1)))
    return cached_coeffs(weight, _rho_bucket(need)).series(x)
