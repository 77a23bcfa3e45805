"""
Patterson–Sullivan interpolation.

Given a configuration X of the Bergman process, the Poincaré series
g_X(s, z) = Σ e^{−s d_B(x, z)} and its f-weighted version are accumulated over
hyperbolic annuli A_k(z) in increasing k, and f(z) is estimated by the ratio
g_X(s, z; f)/g_X(s, z) (or by g_X(s, z; f)/g_P(s)).

Scalar test functions are evaluated directly. Vector-valued ones (kernel
sections F_W = K_W(·, x) and Poisson atoms F_μ = P(x, ·) ∈ L²(μ)) are kept as
coefficient records Σ c_i F(x_i); their norms come from the Gram identity,
so no function space is ever discretized.
"""

import logging
import math
from typing import Any, Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.linalg import cho_factor, cho_solve
from scipy.special import betaln, gammaln

from .errors import (
    ArgumentError, ConditioningError, ContractError, DegenerateConfigurationError, DomainError,
    RangeError, WindowError,
)
from .hypgeom import _distance, _poisson, bergman_distance, min_pairwise_distance, poincare_mass, poincare_mass_tail
from .kernels import WeightSpec, degree_coefficients, kernel_matrix, log_weight_moments_logdeg
from .models import Configuration, PointLike, PSEstimate, as_coords, ensure_inside
from .profiles import RadialProfile
from .quadrature import integrate

logger = logging.getLogger(__name__)

TAIL_FRACTION = 1e-3
CONDITION_LIMIT = 1e12
TEMPERED_DEGREE = 4096
POISSON_SERIES_TERMS = 200000

FunctionKind = Literal[
    "constant", "monomial", "poisson", "poisson_szego", "lacunary", "pluriharmonic",
    "kernel_section", "hardy_atomic",
]
VECTOR_KINDS = ("kernel_section", "hardy_atomic")


def sphere_monomial_norm(n: Sequence[int]) -> float:
    """∫_S |ζ^n|² dσ = (d−1)! n! / (d−1+|n|)!"""
    n = np.asarray(n, dtype=float)
    d = n.size
    return float(np.exp(gammaln(d) + np.sum(gammaln(n + 1.0)) - gammaln(d + n.sum())))


class PluriTerm(BaseModel):
    """Re(c z^n) or Im(c z^n)"""
    model_config = ConfigDict(frozen=True)

    coef: complex = 1.0
    n: List[int]
    part: Literal["re", "im"] = "re"


class TestFunction(BaseModel):
    """A harmonic test function f, or a vector-valued F for the RKHS statistics"""
    model_config = ConfigDict(frozen=True)
    __test__ = False  # keeps pytest from collecting the model

    kind: FunctionKind
    dimension: int = Field(default=1, ge=1)
    value: complex = 1.0
    n: Optional[List[int]] = None
    zeta: Optional[List[complex]] = None
    terms: List[PluriTerm] = Field(default_factory=list)
    weight: Optional[WeightSpec] = None
    center: Optional[List[complex]] = None
    atoms: List[List[complex]] = Field(default_factory=list)
    masses: List[float] = Field(default_factory=list)
    h: List[complex] = Field(default_factory=list)

    # constructors

    @classmethod
    def constant(cls, value: complex = 1.0, d: int = 1) -> "TestFunction":
        return cls(kind="constant", value=value, dimension=d)

    @classmethod
    def monomial(cls, n, d: Optional[int] = None) -> "TestFunction":
        idx = [int(n)] if np.isscalar(n) else [int(v) for v in n]
        if d is not None and len(idx) == 1 and d > 1:
            idx = idx + [0] * (d - 1)
        if any(v < 0 for v in idx):
            raise ArgumentError(f"monomial exponents must be nonnegative, got {idx!r}")
        return cls(kind="monomial", n=idx, dimension=len(idx))

    @classmethod
    def poisson(cls, zeta: complex = 1.0) -> "TestFunction":
        return cls(kind="poisson", zeta=[complex(zeta)], dimension=1)

    @classmethod
    def poisson_szego(cls, zeta: Sequence[complex]) -> "TestFunction":
        return cls(kind="poisson_szego", zeta=list(zeta), dimension=len(zeta))

    @classmethod
    def lacunary(cls) -> "TestFunction":
        """Σ_{k≥1} 2^{k/2} k z^{2^k}: harmonic, sub-exponential mean growth, not tempered"""
        return cls(kind="lacunary", dimension=1)

    @classmethod
    def pluriharmonic(cls, terms: Sequence[PluriTerm], d: int) -> "TestFunction":
        return cls(kind="pluriharmonic", terms=list(terms), dimension=d)

    @classmethod
    def kernel_section(cls, weight: WeightSpec, center: Optional[Sequence[complex]] = None) -> "TestFunction":
        """K_W(·, w) as a scalar function when center w is given, else the map x ↦ K_W(·, x)"""
        return cls(kind="kernel_section", weight=weight, dimension=weight.dimension,
                   center=list(center) if center is not None else None)

    @classmethod
    def hardy_atomic(cls, atoms: Sequence[Sequence[complex]], masses: Sequence[float],
                     h: Optional[Sequence[complex]] = None) -> "TestFunction":
        """F_μ(x) = P(x, ·) ∈ L²(μ) for μ = Σ μ_j δ_{ζ_j}; h selects the scalar P[hμ]"""
        atoms = [[complex(c) for c in a] for a in atoms]
        return cls(kind="hardy_atomic", atoms=atoms, masses=list(masses), dimension=len(atoms[0]),
                   h=list(h) if h is not None else [1.0] * len(atoms))

    def model_post_init(self, __context) -> None:
        kind, d = self.kind, self.dimension
        if kind == "monomial" and (not self.n or len(self.n) != d):
            raise ArgumentError("monomial needs a multi-index of length d")
        if kind in ("poisson", "poisson_szego"):
            if not self.zeta or len(self.zeta) != d:
                raise ArgumentError(f"{kind} needs a boundary point of dimension {d}")
            if abs(float(np.linalg.norm(np.asarray(self.zeta))) - 1.0) > 1e-12:
                raise DomainError("ζ must lie on the unit sphere")
            if kind == "poisson" and d != 1:
                raise ArgumentError("poisson is the d = 1 kernel; use poisson_szego")
        if kind == "lacunary" and d != 1:
            raise ArgumentError("the lacunary function lives on the disk")
        if kind == "pluriharmonic":
            if d < 2:
                raise ArgumentError("pluriharmonic test functions are for d ≥ 2")
            if not self.terms or any(len(t.n) != d for t in self.terms):
                raise ArgumentError(f"pluriharmonic terms need multi-indices of length {d}")
        if kind == "kernel_section" and self.weight is None:
            raise ArgumentError("kernel_section needs a weight")
        if kind == "hardy_atomic":
            if not self.atoms or len(self.masses) != len(self.atoms) or len(self.h) != len(self.atoms):
                raise ArgumentError("hardy_atomic needs matching atoms, masses and h")
            if any(m <= 0 for m in self.masses):
                raise ArgumentError("atom masses must be positive")
            norms = np.linalg.norm(np.asarray(self.atoms, dtype=complex), axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-12):
                raise DomainError("atoms must lie on the unit sphere")

    @property
    def is_vector(self) -> bool:
        if self.kind == "kernel_section":
            return self.center is None
        return self.kind == "hardy_atomic"

    @property
    def name(self) -> str:
        if self.kind == "monomial":
            return "monomial(" + ",".join(str(v) for v in self.n) + ")"
        if self.kind == "kernel_section":
            return f"kernel_section({self.weight.label})"
        return self.kind

    # evaluation

    def values(self, points: np.ndarray) -> np.ndarray:
        """f at each row of an (n, d) array (scalar kinds, and P[hμ] for hardy_atomic)"""
        pts = np.asarray(points, dtype=complex).reshape(-1, self.dimension)
        kind = self.kind
        if kind == "constant":
            return np.full(pts.shape[0], complex(self.value))
        if kind == "monomial":
            return np.prod(pts ** np.asarray(self.n), axis=1)
        if kind in ("poisson", "poisson_szego"):
            return _poisson(pts, np.asarray(self.zeta, dtype=complex)).astype(complex)
        if kind == "lacunary":
            return _lacunary_values(pts[:, 0])
        if kind == "pluriharmonic":
            out = np.zeros(pts.shape[0], dtype=complex)
            for term in self.terms:
                mono = term.coef * np.prod(pts ** np.asarray(term.n), axis=1)
                out += mono.real if term.part == "re" else mono.imag
            return out
        if kind == "kernel_section":
            if self.center is None:
                raise ContractError("kernel_section without a center is vector-valued")
            return kernel_matrix(self.weight, pts, np.asarray([self.center]))[:, 0]
        return _poisson_matrix(pts, self._atom_array()) @ (np.asarray(self.masses) * np.asarray(self.h))

    def evaluate(self, point: PointLike):
        """f(x) as a complex number, or the one-term record F(x)"""
        x = ensure_inside(as_coords(point), "x")
        if x.size != self.dimension:
            raise ArgumentError(f"point has dimension {x.size}, function has {self.dimension}")
        if self.is_vector:
            return CoefficientRecord(feature=self, points=x[None, :], coeffs=np.ones(1, dtype=complex))
        return complex(self.values(x[None, :])[0])

    def _atom_array(self) -> np.ndarray:
        return np.asarray(self.atoms, dtype=complex)

    # radial structure

    def sphere_mean_square(self, t, eps=None) -> np.ndarray:
        """Mean of ‖f‖² over the sphere |x|² = t (eps = 1 − t for accuracy near 1)"""
        t = np.asarray(t, dtype=float)
        eps = 1.0 - t if eps is None else np.asarray(eps, dtype=float)
        kind = self.kind
        if kind in ("poisson", "poisson_szego", "hardy_atomic"):
            if self.dimension != 1:
                raise ContractError(f"{kind}: annular means are computed for d = 1")
            mass = sum(self.masses) if kind == "hardy_atomic" else 1.0
            return mass * (1.0 + t) / eps
        if kind == "lacunary":
            return _lacunary_mean_square(t)
        if kind == "kernel_section" and self.center is None:
            b = degree_coefficients(self.weight, TEMPERED_DEGREE)
            if np.any(t > 0.99):
                raise RangeError("kernel diagonal is summed for |x|² ≤ 0.99")
            return np.polynomial.polynomial.polyval(t, b)
        exps, weights = self._modes()
        return np.sum(weights[:, None] * t[None, :] ** exps[:, None], axis=0).reshape(t.shape)

    def _modes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Sphere mean of |f|² written as Σ w_m t^{e_m}"""
        kind = self.kind
        if kind == "constant":
            return np.zeros(1), np.array([abs(self.value) ** 2])
        if kind == "monomial":
            return np.array([float(sum(self.n))]), np.array([sphere_monomial_norm(self.n)])
        if kind == "pluriharmonic":
            hol: dict = {}
            anti: dict = {}
            for term in self.terms:
                key = tuple(term.n)
                c = complex(term.coef)
                if term.part == "re":
                    a, b = c / 2, np.conj(c) / 2
                else:
                    a, b = c / 2j, 1j * np.conj(c) / 2
                hol[key] = hol.get(key, 0.0) + a
                anti[key] = anti.get(key, 0.0) + b
            zero = tuple([0] * self.dimension)
            exps, weights = [0.0], [abs(hol.pop(zero, 0.0) + anti.pop(zero, 0.0)) ** 2]
            for key in set(hol) | set(anti):
                exps.append(float(sum(key)))
                weights.append((abs(hol.get(key, 0.0)) ** 2 + abs(anti.get(key, 0.0)) ** 2)
                               * sphere_monomial_norm(key))
            return np.asarray(exps), np.asarray(weights)
        if kind == "kernel_section" and self.center is not None:
            if self.dimension != 1:
                raise ContractError("scalar kernel sections are reduced radially for d = 1")
            w_sq = abs(complex(self.center[0])) ** 2
            b = degree_coefficients(self.weight, TEMPERED_DEGREE)
            k = np.arange(b.size, dtype=float)
            return k, b * b * w_sq ** k
        raise ContractError(f"{kind} has no finite mode expansion")


def _lacunary_values(z: np.ndarray) -> np.ndarray:
    out = np.zeros(z.shape, dtype=complex)
    p = z.astype(complex)
    r_max = float(np.max(np.abs(z))) if z.size else 0.0
    for k in range(1, 64):
        p = p * p
        out += 2.0 ** (0.5 * k) * k * p
        if r_max == 0.0 or 2.0 ** k * math.log(r_max) + 0.5 * k * math.log(2.0) + math.log(k) < -40.0:
            break
    return out


def _lacunary_mean_square(t: np.ndarray) -> np.ndarray:
    """Σ 2^k k² t^{2^k}"""
    out = np.zeros(t.shape)
    with np.errstate(divide="ignore"):
        log_t = np.log(t)
    for k in range(1, 1000):
        log_term = k * math.log(2.0) + 2.0 * math.log(k) + 2.0 ** k * log_t
        out += np.exp(log_term)
        if np.all(log_term < -60.0):
            break
    return out


def _poisson_matrix(points: np.ndarray, atoms: np.ndarray) -> np.ndarray:
    """[P(x_i, ζ_j)]"""
    return _poisson(points[:, None, :], atoms[None, :, :])


# ------------------------------------------------------------ RKHS records


class CoefficientRecord(BaseModel):
    """Σ c_i F(x_i) for a vector-valued test function F"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    feature: TestFunction
    points: np.ndarray
    coeffs: np.ndarray

    def with_term(self, point: np.ndarray, coeff: complex) -> "CoefficientRecord":
        pts = np.vstack([self.points, np.asarray(point, dtype=complex).reshape(1, -1)])
        return CoefficientRecord(feature=self.feature, points=pts, coeffs=np.append(self.coeffs, coeff))

    def scaled(self, factor: complex) -> "CoefficientRecord":
        return CoefficientRecord(feature=self.feature, points=self.points, coeffs=self.coeffs * factor)

    def gram(self) -> np.ndarray:
        """[<F(x_j), F(x_i)>] over the record's points"""
        f = self.feature
        if f.kind == "kernel_section":
            return kernel_matrix(f.weight, self.points, self.points)
        p = _poisson_matrix(self.points, f._atom_array())
        return (p * np.asarray(f.masses)) @ p.T

    def gram_norm(self) -> float:
        """‖Σ c_i F(x_i)‖ = sqrt(Σ c_i c̄_j <F(x_i), F(x_j)>)"""
        if self.coeffs.size == 0:
            return 0.0
        c = self.coeffs
        value = np.conj(c) @ self.gram() @ c
        return math.sqrt(max(float(np.real(value)), 0.0))

    def norm(self) -> float:
        f = self.feature
        if f.kind == "hardy_atomic":
            vec = self.coeffs @ _poisson_matrix(self.points, f._atom_array())
            return math.sqrt(float(np.sum(np.asarray(f.masses) * np.abs(vec) ** 2)))
        return self.gram_norm()


# ------------------------------------------------------- Poincaré series


def _check_exponent(s: float, d: int) -> None:
    if s <= d:
        raise DomainError(f"Poincaré series diverges for s={s!r} ≤ d={d} (critical exponent)")


def _prepare(X: Configuration, s: float, z: PointLike) -> Tuple[np.ndarray, np.ndarray]:
    _check_exponent(s, X.dimension)
    za = ensure_inside(as_coords(z), "z")
    if za.size != X.dimension:
        raise ArgumentError(f"z has dimension {za.size}, configuration has {X.dimension}")
    dist = _distance(X.array, za) if len(X) else np.zeros(0)
    return za, dist


def poincare_series(X: Configuration, s: float, z: PointLike) -> float:
    """Σ_{x∈X} e^{−s d_B(x, z)} over the sampled window

    Points outside the window are missing from the sum; window_tail_bound(X, s, z) bounds
    their expected contribution and ps_weighted_sum reports the two together.
    """
    _, dist = _prepare(X, s, z)
    return float(np.sum(np.exp(-s * dist)))


def window_tail_bound(X: Configuration, s: float, z: PointLike, r0: Optional[float] = None) -> float:
    """Expected Poincaré mass about z lying outside the window (or beyond radius r0)"""
    za = ensure_inside(as_coords(z), "z")
    reach = X.window_radius - bergman_distance(za, np.zeros_like(za))
    if r0 is not None:
        reach = min(reach, r0)
    return poincare_mass_tail(s, X.dimension, max(reach, 0.0))


def _annular_order(points: np.ndarray, annulus: np.ndarray) -> np.ndarray:
    """Sort by annulus, then lexicographically by coordinates"""
    keys = []
    for j in range(points.shape[1] - 1, -1, -1):
        keys.extend([points[:, j].imag, points[:, j].real])
    keys.append(annulus)
    return np.lexsort(keys)


def _default_k_max(s: float, d: int, scale: float, k_all: int) -> int:
    for k in range(k_all + 1):
        if poincare_mass_tail(s, d, k + 1.0) < TAIL_FRACTION * scale:
            return k
    return k_all


def ps_weighted_sum(X: Configuration, s: float, z: PointLike, f: TestFunction,
                    k_max: Optional[int] = None) -> PSEstimate:
    """Annular principal-value sums of g_X(s, z; f) and g_X(s, z)"""
    za, dist = _prepare(X, s, z)
    if f.dimension != X.dimension:
        raise ArgumentError(f"test function has dimension {f.dimension}, configuration has {X.dimension}")
    d = X.dimension
    pts = X.array
    annulus = np.floor(dist).astype(int)
    order = _annular_order(pts, annulus)
    pts, dist, annulus = pts[order], dist[order], annulus[order]
    weights = np.exp(-s * dist)
    k_all = int(annulus.max()) if annulus.size else 0

    if f.is_vector:
        contrib = None
        scale = float(np.sum(weights))
    else:
        contrib = weights * f.values(pts)
        scale = float(abs(np.sum(contrib)))
    if k_max is None:
        k_max = _default_k_max(s, d, scale, k_all) if len(X) else 0
    elif k_max < 0:
        raise ArgumentError(f"K_max must be nonnegative, got {k_max!r}")

    keep = annulus <= k_max
    g_blocks = [float(np.sum(weights[annulus == k])) for k in range(k_max + 1)]
    g = float(sum(g_blocks))
    tail = window_tail_bound(X, s, za, k_max + 1.0)
    g_p = poincare_mass(s, d)

    if contrib is not None:
        annular = [complex(np.sum(contrib[annulus == k])) for k in range(k_max + 1)]
        g_f = complex(sum(annular))
        direct = complex(np.sum(contrib[keep]))
        if abs(g_f - direct) > 1e-12 * max(1.0, abs(direct)):
            logger.warning(f"annular sum {g_f} drifted from direct sum {direct}")
        ratio = g_f / g if g > 0 else None
        truth = complex(f.values(za[None, :])[0])
        return PSEstimate(
            s=s, z=list(za), f_kind=f.name, seed=X.seed, g=g, g_f=g_f, ratio=ratio, normalized=g_f / g_p,
            annular=annular, k_max=k_max, tail_bound=tail,
            err_abs=abs(ratio - truth) if ratio is not None else None,
        )

    record = CoefficientRecord(feature=f, points=pts[keep], coeffs=weights[keep].astype(complex))
    err = None
    if g > 0:
        err = record.scaled(1.0 / g).with_term(za, -1.0).norm()
    return PSEstimate(
        s=s, z=list(za), f_kind=f.name, seed=X.seed, g=g, g_f_norm=record.norm(),
        annular=[complex(v) for v in g_blocks], k_max=k_max, tail_bound=tail, err_abs=err, record=record,
    )


def ps_ratio(X: Configuration, s: float, z: PointLike, f: TestFunction) -> Tuple[Optional[complex], Optional[float]]:
    """(R_X(s, z; f), error) for scalar f; (None, ‖R_X(s, z; F) − F(z)‖) for vector F"""
    est = ps_weighted_sum(X, s, z, f)
    if est.g <= 0.0:
        raise DegenerateConfigurationError(f"Poincaré series vanishes for seed {X.seed} at s={s}")
    return est.ratio, est.err_abs


def ps_generalized(X: Configuration, profile: RadialProfile, z: PointLike, f: TestFunction):
    """(g^R_X(z; f), g^R_X(z)) = Σ R(φ_z(x)) f(x) and Σ R(φ_z(x)); f may be vector-valued"""
    if not profile.is_compact:
        raise WindowError(f"profile {profile.name} is not compactly supported")
    za = ensure_inside(as_coords(z), "z")
    if za.size != X.dimension or f.dimension != X.dimension:
        raise ArgumentError("dimension mismatch between z, f and the configuration")
    reach = 2.0 * math.atanh(profile.support_bound) + bergman_distance(za, np.zeros_like(za))
    if reach > X.window_radius + 1e-12:
        raise WindowError(f"support of {profile.name} about z reaches {reach:.4g} beyond window {X.window_radius}")
    if not len(X):
        empty = CoefficientRecord(feature=f, points=np.zeros((0, X.dimension), dtype=complex),
                                  coeffs=np.zeros(0, dtype=complex))
        return (empty if f.is_vector else 0j), 0.0
    weights = profile.of_distance(_distance(X.array, za))
    inside = weights != 0.0
    g_r = float(np.sum(weights))
    if f.is_vector:
        return CoefficientRecord(feature=f, points=X.array[inside], coeffs=weights[inside].astype(complex)), g_r
    return complex(np.sum(weights[inside] * f.values(X.array[inside]))), g_r


def harmonic_measure_moments(X: Configuration, s: float, z: PointLike, m_max: int) -> List[complex]:
    """∫ x^m dν_X(s, z) for m ≤ m_max, ν_X the normalized Patterson–Sullivan measure (d = 1)"""
    if X.dimension != 1:
        raise ArgumentError("harmonic measure moments are defined on the disk")
    _, dist = _prepare(X, s, z)
    weights = np.exp(-s * dist)
    g = float(np.sum(weights))
    if g <= 0.0:
        raise DegenerateConfigurationError(f"Poincaré series vanishes for seed {X.seed}")
    x = X.array[:, 0]
    return [complex(np.sum(weights * x ** m) / g) for m in range(m_max + 1)]


def boundary_reconstruction(X: Configuration, s: float, z: PointLike,
                            boundary_values: Callable[[np.ndarray], np.ndarray]) -> complex:
    """u(z) ≈ ∫ u dν_X(s, z) with each atom pushed radially to the sphere"""
    _, dist = _prepare(X, s, z)
    pts = X.array
    norms = np.linalg.norm(pts, axis=1) if len(X) else np.zeros(0)
    keep = norms > 0.0
    weights = np.exp(-s * dist[keep])
    g = float(np.sum(weights))
    if g <= 0.0:
        raise DegenerateConfigurationError(f"Poincaré series vanishes for seed {X.seed}")
    directions = pts[keep] / norms[keep][:, None]
    return complex(np.sum(weights * np.asarray(boundary_values(directions))) / g)


# ------------------------------------------------------ growth functionals


def _log_beta_large(log_e: np.ndarray, e: np.ndarray, a: float) -> np.ndarray:
    """log B(e + 1, a) switching to Γ(a) e^{−a} for huge e"""
    big = log_e > 30.0
    exact = betaln(np.where(big, 1.0, e) + 1.0, a)
    return np.where(big, gammaln(a) - a * log_e, exact)


def _power_tail(terms: np.ndarray, k_last: float, decay: float) -> float:
    """Σ_{k>K} of terms behaving like C k^{−1−decay}, from the last term"""
    if decay <= 0:
        return math.inf
    return float(terms[-1] * k_last / decay)


def _kernel_diagonal_tempered(weight: WeightSpec, alpha: float) -> float:
    d = weight.dimension
    if weight.kind == "unit":
        return math.inf
    if weight.kind == "standard_alpha" and alpha <= weight.alpha + 1.0:
        return math.inf
    if weight.kind == "custom":
        raise ContractError("no asymptotic coefficient model for custom weights")
    b = degree_coefficients(weight, TEMPERED_DEGREE)
    k = np.arange(b.size, dtype=float)
    terms = b * np.exp(betaln(k + d, alpha + d))
    body = float(np.sum(terms))
    n = float(k[-1])
    if weight.kind == "standard_alpha":
        tail = _power_tail(terms, n, alpha - weight.alpha - 1.0)
    else:
        gamma = 0.0 if weight.kind == "critical" else weight.gamma
        const = math.exp(gammaln(alpha + d) - gammaln(d)) / d

        def integrand(y):
            return const * np.exp(-alpha * y) / log_weight_moments_logdeg(y, gamma)

        y0 = math.log(n + 0.5)
        tail, _ = integrate(integrand, y0, y0 + 60.0 / alpha, breakpoints=[y0 + 1.0 / alpha, y0 + 10.0 / alpha],
                            atol=1e-14, rtol=1e-9)
    return alpha * alpha * d * (body + float(tail))


def _poisson_szego_tempered(d: int, alpha: float) -> float:
    if d == 1:
        return alpha * (alpha + 2.0) / (alpha + 1.0)
    k = np.arange(POISSON_SERIES_TERMS, dtype=float)
    log_binom = gammaln(k + 2 * d) - gammaln(k + 1) - gammaln(2 * d)
    log_sphere = gammaln(k + 1) + gammaln(d) - gammaln(k + d)
    terms = np.exp(2.0 * log_binom + log_sphere + betaln(k + d, 3 * d + alpha))
    return alpha * alpha * d * (float(np.sum(terms)) + _power_tail(terms, k[-1], alpha))


def tempered_functional(f: TestFunction, alpha: float) -> float:
    """α² ∫ ‖F(x)‖² (1 − |x|²)^{α+d−1} dv_d(x); +∞ when the integral diverges"""
    if alpha <= 0:
        raise ArgumentError(f"α must be positive, got {alpha!r}")
    d = f.dimension
    kind = f.kind
    if kind in ("poisson", "poisson_szego"):
        return _poisson_szego_tempered(d, alpha)
    if kind == "hardy_atomic":
        return sum(f.masses) * _poisson_szego_tempered(d, alpha)
    if kind == "kernel_section" and f.center is None:
        return _kernel_diagonal_tempered(f.weight, alpha)
    if kind == "lacunary":
        k = np.arange(1, int(100 + 100.0 / alpha), dtype=float)
        log_e = k * math.log(2.0)
        log_terms = log_e + 2.0 * np.log(k) + _log_beta_large(log_e, np.exp(np.minimum(log_e, 700.0)), alpha + 1.0)
        return alpha * alpha * float(np.sum(np.exp(log_terms)))
    exps, weights = f._modes()
    return alpha * alpha * d * float(np.sum(weights * np.exp(betaln(exps + d, alpha + d))))


def mean_growth_profile(f: TestFunction, k_max: int) -> List[float]:
    """e^{−2kd} ∫_{A_k(o)} ‖f‖² dμ for k = 0 .. k_max"""
    if k_max < 0:
        raise ArgumentError(f"k_max must be nonnegative, got {k_max!r}")
    d = f.dimension

    def integrand(r):
        half = 0.5 * r
        t = np.tanh(half) ** 2
        eps = np.cosh(half) ** -2
        density = d * np.tanh(half) ** (2 * d - 1) * np.cosh(half) ** (2 * d)
        return f.sphere_mean_square(t, eps) * density

    out = []
    for k in range(k_max + 1):
        value, _ = integrate(integrand, float(k), float(k + 1), atol=1e-300, rtol=1e-10)
        out.append(float(value) * math.exp(-2.0 * k * d))
    return out


# --------------------------------------------------------- Gram–Schmidt


def gram_schmidt_baseline(X_finite: Sequence[PointLike], f_values: Sequence[complex], W: WeightSpec,
                          z: PointLike, n_terms: int) -> complex:
    """Σ_{n<n_terms} φ_n(z)<f, φ_n> for φ_n orthonormalized from K_W(·, x_1), K_W(·, x_2), ..."""
    if n_terms < 1 or n_terms > len(X_finite):
        raise ArgumentError(f"n_terms must lie in [1, {len(X_finite)}], got {n_terms!r}")
    if len(f_values) != len(X_finite):
        raise ArgumentError("need one f value per point")
    pts = np.vstack([ensure_inside(as_coords(p), "x") for p in X_finite[:n_terms]])
    za = ensure_inside(as_coords(z), "z")
    if min_pairwise_distance(pts) == 0.0:
        raise ArgumentError("points must be distinct")
    gram = kernel_matrix(W, pts, pts)
    gram = 0.5 * (gram + np.conj(gram).T)
    eig = np.linalg.eigvalsh(gram)
    condition = float(eig[-1] / eig[0]) if eig[0] > 0 else math.inf
    if condition > CONDITION_LIMIT:
        raise ConditioningError(f"Gram matrix of {n_terms} kernel sections is ill-conditioned", condition)
    # <f, K_W(·, x_k)> = f(x_k), so the projection solves G α = f
    alpha = cho_solve(cho_factor(gram, lower=True), np.asarray(f_values[:n_terms], dtype=complex))
    return complex(kernel_matrix(W, za[None, :], pts)[0] @ alpha)
