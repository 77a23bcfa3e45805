"""
Hyperbolic geometry of the unit ball in C^d with the Bergman metric.

Distances, Möbius involutions, the invariant measure and its balls, annuli and
the Poisson–Szegő kernel. Public operations take Point-like arguments; the
underscore helpers work on coordinate arrays of shape (..., d) and are what the
samplers and interpolation code call in their inner loops.
"""

import logging
import math

import numpy as np

from .errors import ArgumentError, DomainError
from .models import BoundaryPoint, Point, PointLike, as_coords, ensure_inside
from .quadrature import integrate

logger = logging.getLogger(__name__)

ORIGIN_TOLERANCE = 1e-30


def _inner(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """<z, w> = Σ z_i conj(w_i) over the last axis"""
    return np.sum(z * np.conj(w), axis=-1)


def _check_pair(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise ArgumentError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def _mobius(w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """φ_w(z) for a single w of shape (d,) and z of shape (..., d)"""
    w_sq = float(np.sum(np.abs(w) ** 2))
    if w_sq < ORIGIN_TOLERANCE:
        return -z
    zw = _inner(z, w)[..., None]
    proj = zw * w / w_sq
    return (w - proj - math.sqrt(1.0 - w_sq) * (z - proj)) / (1.0 - zw)


def _one_minus_phi_sq(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """1 − |φ_z(x)|² computed without cancellation"""
    x_sq = np.sum(np.abs(x) ** 2, axis=-1)
    z_sq = np.sum(np.abs(z) ** 2, axis=-1)
    return (1.0 - z_sq) * (1.0 - x_sq) / np.abs(1.0 - _inner(x, z)) ** 2


def _distance(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """d_B(x, z) = log((1+r)/(1−r)) with r = |φ_z(x)|"""
    q = np.clip(_one_minus_phi_sq(x, z), 0.0, 1.0)
    r = np.sqrt(1.0 - q)
    with np.errstate(divide="ignore"):
        return 2.0 * np.log1p(r) - np.log(q)


def _as_pair(x: PointLike, z: PointLike):
    xa = ensure_inside(as_coords(x), "x")
    za = ensure_inside(as_coords(z), "z")
    _check_pair(xa, za)
    return xa, za


def radius_to_euclidean(r):
    """Euclidean radius of B(o, r): tanh(r/2)"""
    return np.tanh(0.5 * np.asarray(r, dtype=float))


def euclidean_to_radius(rho):
    """Hyperbolic distance from o of a point with Euclidean norm rho"""
    rho = np.asarray(rho, dtype=float)
    return 2.0 * np.arctanh(rho)


def mobius_involution(w: PointLike, z: PointLike) -> Point:
    """φ_w(z): the involution of the ball exchanging w and o"""
    wa, za = _as_pair(w, z)
    out = _mobius(wa, za)
    # |φ_w(z)| < 1 holds exactly; guard against the last ulp
    norm_sq = float(np.sum(np.abs(out) ** 2))
    if norm_sq >= 1.0:
        out = out / math.sqrt(norm_sq) * (1.0 - 1e-16)
    return Point(coords=out.tolist())


def bergman_distance(x: PointLike, z: PointLike) -> float:
    """Bergman distance d_B(x, z)"""
    xa, za = _as_pair(x, z)
    return float(_distance(xa, za))


def distances_to(points: np.ndarray, z: PointLike) -> np.ndarray:
    """Vectorized d_B(x, z) over an (n, d) array of points"""
    za = ensure_inside(as_coords(z), "z")
    pts = np.asarray(points, dtype=complex)
    if pts.size == 0:
        return np.zeros(0)
    _check_pair(pts, za)
    return _distance(pts, za)


def mobius_kernel_identity_residual(x: PointLike, y: PointLike, z: PointLike) -> float:
    """|1 − <φ_z(x), φ_z(y)> − (1−|z|²)(1−<x,y>)/((1−<x,z>)(1−<z,y>))|"""
    xa, za = _as_pair(x, z)
    ya, _ = _as_pair(y, z)
    lhs = 1.0 - _inner(_mobius(za, xa), _mobius(za, ya))
    z_sq = float(np.sum(np.abs(za) ** 2))
    rhs = (1.0 - z_sq) * (1.0 - _inner(xa, ya)) / ((1.0 - _inner(xa, za)) * (1.0 - _inner(za, ya)))
    return float(abs(lhs - rhs))


def invariant_density(z: PointLike) -> float:
    """Density (1−|z|²)^{−(d+1)} of the invariant measure against normalized volume"""
    za = ensure_inside(as_coords(z), "z")
    d = za.size
    return float((1.0 - np.sum(np.abs(za) ** 2)) ** (-(d + 1)))


def _volume_density(x: np.ndarray, d: int) -> np.ndarray:
    """d/dr μ(B(o, r)) written as (d/4^d) e^{dx}(1−e^{−x})^{2d−1}(1+e^{−x})"""
    e = np.exp(-x)
    return d / 4.0 ** d * np.exp(d * x) * (-np.expm1(-x)) ** (2 * d - 1) * (1.0 + e)


def ball_volume_closed_form(r: float, d: int) -> float:
    """μ(B(o, r)) = sinh^{2d}(r/2)"""
    return float(math.sinh(0.5 * r) ** (2 * d))


def ball_volume(r: float, d: int) -> float:
    """Invariant volume of a hyperbolic ball of radius r"""
    if r < 0:
        raise DomainError(f"radius must be nonnegative, got {r!r}")
    if d < 1:
        raise ArgumentError(f"dimension must be positive, got {d!r}")
    if r == 0:
        return 0.0
    if d == 1:
        return float(0.5 * (math.cosh(r) - 1.0))
    breaks = [b for b in (1.0, 4.0, 16.0) if b < r]
    value, _ = integrate(lambda x: _volume_density(x, d), 0.0, float(r), breakpoints=breaks,
                         atol=1e-12, rtol=1e-13)
    return float(value)


def annulus_index(x: PointLike, z: PointLike) -> int:
    """k with x in A_k(z) = {k ≤ d_B(x, z) < k+1}"""
    return int(math.floor(bergman_distance(x, z)))


def _mass_integrand(t: np.ndarray, s: float, d: int) -> np.ndarray:
    e = np.exp(-t / (s - d))
    return np.exp(-t) * (-np.expm1(-t / (s - d))) ** (2 * d - 1) * (1.0 + e)


def poincare_mass(s: float, d: int) -> float:
    """g_P(s) = ∫ e^{−s d_B(x,o)} dμ(x), finite exactly when s > d"""
    return poincare_mass_tail(s, d, 0.0)


def poincare_mass_tail(s: float, d: int, r0: float) -> float:
    """∫_{d_B(x,o) ≥ r0} e^{−s d_B(x,o)} dμ(x)"""
    if s <= d:
        raise DomainError(f"Poincaré series diverges for s={s!r} ≤ d={d}")
    gap = s - d
    t0 = gap * max(r0, 0.0)
    t_end = t0 + 60.0
    breaks = sorted({t0 + b for b in (gap, 4.0 * gap, 16.0 * gap, 1.0, 4.0, 16.0)})
    value, _ = integrate(lambda t: _mass_integrand(t, s, d), t0, t_end, breakpoints=breaks,
                         atol=1e-300, rtol=1e-13)
    return float(d / 4.0 ** d / gap * value)


def poincare_mass_closed_form(s: float) -> float:
    """d = 1: g_P(s) = 1/(2(s²−1))"""
    if s <= 1:
        raise DomainError(f"Poincaré series diverges for s={s!r} ≤ 1")
    return 1.0 / (2.0 * (s * s - 1.0))


def poisson_kernel(z: PointLike, zeta: PointLike) -> float:
    """Poisson–Szegő kernel (1−|z|²)^d / |1 − <z, ζ>|^{2d}"""
    za = ensure_inside(as_coords(z), "z")
    if isinstance(zeta, BoundaryPoint):
        xi = zeta.as_array()
    else:
        xi = as_coords(zeta)
        if abs(float(np.linalg.norm(xi)) - 1.0) > 1e-12:
            raise DomainError(f"ζ must lie on the unit sphere, |ζ| = {np.linalg.norm(xi)!r}")
    _check_pair(za, xi)
    return float(_poisson(za, xi))


def _poisson(z: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    d = z.shape[-1]
    z_sq = np.sum(np.abs(z) ** 2, axis=-1)
    return (1.0 - z_sq) ** d / np.abs(1.0 - _inner(z, zeta)) ** (2 * d)


def sphere_sample(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points uniformly distributed on S_d, shape (n, d)"""
    g = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def min_pairwise_distance(points: np.ndarray) -> float:
    """Smallest Euclidean distance between two rows; inf for fewer than two points"""
    pts = np.asarray(points, dtype=complex)
    n = pts.shape[0]
    if n < 2:
        return math.inf
    best = math.inf
    # blocked to keep memory flat for a few thousand points
    for start in range(0, n, 512):
        block = pts[start:start + 512]
        diff = np.linalg.norm(block[:, None, :] - pts[None, :, :], axis=-1)
        rows = np.arange(block.shape[0])
        diff[rows, start + rows] = math.inf
        best = min(best, float(diff.min()))
    return best
