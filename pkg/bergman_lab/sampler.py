"""
Samplers for the determinantal point process of the Bergman kernel.

Two generators:

- ``gaf``: zeros of the Gaussian analytic function Σ ξ_n z^n (d = 1), truncated
  at a degree certified by a margin test on the window boundary circle;
- ``hkpv``: the spectral sequential sampler. The kernel restricted to a centred
  ball is diagonal in the monomials with eigenvalues t^{2(|n|+d)}, so a sample
  selects each monomial independently with that probability and then draws the
  projection process of the selected functions point by point.

Both return immutable Configuration records carrying their truncation metadata.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import gammaln

from .errors import ArgumentError, NumericError, TruncationMarginError
from .hypgeom import ball_volume, distances_to, min_pairwise_distance, radius_to_euclidean
from .models import Configuration, GafSpec, HkpvSpec
from .rng import complex_normal, stream

logger = logging.getLogger(__name__)

MARGIN_NODES = 1024
CONTOUR_NODES = 8192
GAUSSIAN_SIGMAS = 6.0
MIN_SEPARATION = 1e-10
RESIDUAL_TOLERANCE = 1e-10
KERNEL_MASS_TOLERANCE = 1e-6
DENSITY_FLOOR = -1e-12


# ------------------------------------------------------------------ GAF


def circle_values(coeffs: np.ndarray, rho: float, n_nodes: int) -> np.ndarray:
    """Σ c_n (ρe^{iθ_j})^n on n_nodes equispaced angles, by folding and FFT"""
    n = np.arange(coeffs.size)
    scaled = coeffs * np.exp(n * math.log(rho)) if rho > 0 else np.where(n == 0, coeffs, 0)
    folded = np.zeros(n_nodes, dtype=complex)
    np.add.at(folded, n % n_nodes, scaled)
    return np.fft.ifft(folded) * n_nodes


def argument_principle_count(coeffs: np.ndarray, rho: float, n_nodes: int = CONTOUR_NODES) -> int:
    """Number of zeros of the polynomial inside |z| < ρ from its winding number"""
    values = circle_values(np.asarray(coeffs, dtype=complex), rho, n_nodes)
    phase = np.angle(np.concatenate([values, values[:1]]))
    steps = np.angle(np.exp(1j * np.diff(phase)))
    return int(round(float(np.sum(steps)) / (2.0 * math.pi)))


def _newton_ratio(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p/p' at z, using the reversed polynomial outside the unit circle"""
    degree = c.size - 1
    out = np.empty_like(z)
    inside = np.abs(z) <= 1.0
    if inside.any():
        zi = z[inside]
        p = np.full_like(zi, c[-1])
        dp = np.zeros_like(zi)
        for coef in c[-2::-1]:
            dp = dp * zi + p
            p = p * zi + coef
        out[inside] = p / dp
    if (~inside).any():
        zo = z[~inside]
        w = 1.0 / zo
        q = np.full_like(w, c[0])
        dq = np.zeros_like(w)
        for coef in c[1:]:
            dq = dq * w + q
            q = q * w + coef
        out[~inside] = zo * q / (degree * q - w * dq)
    return out


def _polyval(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    p = np.full_like(z, c[-1])
    for coef in c[-2::-1]:
        p = p * z + coef
    return p


def aberth_roots(coeffs: np.ndarray, max_iter: int = 500, tol: float = 1e-14) -> np.ndarray:
    """All roots of Σ c_n z^n by Aberth–Ehrlich simultaneous iteration"""
    c = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(c)[0]
    c = c[:nz[-1] + 1]
    degree = c.size - 1
    if degree < 1:
        return np.zeros(0, dtype=complex)
    radius = abs(c[0] / c[-1]) ** (1.0 / degree) if c[0] != 0 else 0.5
    angles = 2.0 * math.pi * np.arange(degree) / degree + 0.4
    z = radius * np.exp(1j * angles)
    active = np.ones(degree, dtype=bool)
    for iteration in range(max_iter):
        idx = np.nonzero(active)[0]
        ratio = _newton_ratio(c, z[idx])
        repulsion = np.empty(idx.size, dtype=complex)
        for start in range(0, idx.size, 256):
            block = idx[start:start + 256]
            diff = z[block][:, None] - z[None, :]
            diff[np.arange(block.size), block] = np.inf
            repulsion[start:start + 256] = np.sum(1.0 / diff, axis=1)
        step = ratio / (1.0 - ratio * repulsion)
        z[idx] -= step
        done = np.abs(step) <= tol * np.maximum(1.0, np.abs(z[idx]))
        active[idx[done]] = False
        if not active.any():
            logger.debug(f"Aberth converged for degree {degree} after {iteration + 1} iterations")
            return z
    raise NumericError(f"Aberth iteration did not converge for degree {degree}",
                       {"unconverged": int(active.sum()), "iterations": max_iter})


def gaf_zeros(coeffs: np.ndarray, rho: float) -> np.ndarray:
    """Newton-polished zeros of the polynomial inside |z| < ρ, residual-checked"""
    c = np.asarray(coeffs, dtype=complex)
    roots = aberth_roots(c)
    inside = roots[np.abs(roots) < rho]
    for _ in range(3):
        inside = inside - _newton_ratio(c, inside)
    inside = inside[np.abs(inside) < rho]
    residual = np.abs(_polyval(c, inside)) if inside.size else np.zeros(0)
    scale = float(np.max(np.abs(c)))
    if residual.size and residual.max() >= RESIDUAL_TOLERANCE * scale:
        raise NumericError("root residual above tolerance after polishing",
                           {"residual": float(residual.max()), "scale": scale})
    return inside[np.lexsort((inside.imag, inside.real))]


def _truncation_degree(coeffs: np.ndarray, rho: float, spec: GafSpec) -> Tuple[Optional[int], float]:
    """Smallest doubled degree passing the margin test, with its margin ratio"""
    n = int(math.ceil(16.0 / (1.0 - rho)))
    while True:
        n = min(n, spec.max_degree)
        sigma = math.sqrt(rho ** (2 * n + 2) / (1.0 - rho * rho))
        floor = float(np.min(np.abs(circle_values(coeffs[:n + 1], rho, MARGIN_NODES))))
        margin = GAUSSIAN_SIGMAS * sigma / floor if floor > 0 else math.inf
        if margin < spec.tail_epsilon:
            return n, margin
        if n >= spec.max_degree:
            return None, margin
        n *= 2


def sample_gaf(spec: GafSpec, seed: int, degree_override: Optional[int] = None) -> Configuration:
    """Zeros of the truncated Gaussian analytic function inside the window"""
    rho = float(radius_to_euclidean(spec.window_radius))
    rejects = 0
    last_margin = math.inf
    for attempt in range(spec.max_attempts):
        rng = stream(seed, attempt)
        coeffs = complex_normal(rng, spec.max_degree + 1)
        degree, margin = _truncation_degree(coeffs, rho, spec)
        last_margin = margin
        if degree is None:
            logger.warning(f"seed {seed} attempt {attempt}: margin {margin:.2e} fails at max degree, resampling")
            rejects += 1
            continue
        if degree_override is not None:
            degree = max(degree, degree_override)
        zeros = gaf_zeros(coeffs[:degree + 1], rho)
        if min_pairwise_distance(zeros[:, None]) < MIN_SEPARATION:
            logger.warning(f"seed {seed} attempt {attempt}: near-double zero, resampling")
            rejects += 1
            continue
        return Configuration(
            points=[[complex(z)] for z in zeros],
            dimension=1,
            window_radius=spec.window_radius,
            seed=seed,
            generator="gaf",
            truncation_meta={"degree": degree, "margin": margin, "accepts": 1, "rejects": rejects,
                             "attempt": attempt, "rho": rho},
        )
    raise TruncationMarginError(
        f"seed {seed}: no acceptable truncation after {spec.max_attempts} attempts",
        {"margin": last_margin, "rejects": rejects},
    )


# ------------------------------------------------------------------ HKPV


def multi_indices(d: int, n_max: int) -> np.ndarray:
    """All n in N^d with |n| ≤ n_max, ordered by degree then lexicographically"""
    if d == 1:
        return np.arange(n_max + 1)[:, None]
    rows = []
    for k in range(n_max + 1):
        for bars in itertools.combinations(range(k + d - 1), d - 1):
            cuts = (-1,) + bars + (k + d - 1,)
            rows.append([cuts[i + 1] - cuts[i] - 1 for i in range(d)])
    return np.asarray(rows, dtype=int)


def default_degree_cutoff(window_radius: float, d: int) -> int:
    """Smallest N whose partial kernel at |z| = tanh(R/2) reaches (1 − 1e-6) K(z,z)"""
    x = float(radius_to_euclidean(window_radius)) ** 2
    full = -(d + 1) * math.log1p(-x)
    k = np.arange(1 << 22, dtype=float)
    log_terms = gammaln(k + d + 1) - gammaln(k + 1) - gammaln(d + 1) + k * math.log(x)
    partial = np.cumsum(np.exp(log_terms - full))
    hits = np.nonzero(partial >= 1.0 - KERNEL_MASS_TOLERANCE)[0]
    if hits.size == 0:
        raise ArgumentError(f"window radius {window_radius} too large for the HKPV sampler")
    return int(hits[0])


def _log_window_norms(idx: np.ndarray, d: int, t_sq: float) -> np.ndarray:
    """log ‖z^n‖² on the ball of radius t (normalized volume of the unit ball)"""
    k = idx.sum(axis=1).astype(float)
    log_sphere = gammaln(d) + np.sum(gammaln(idx + 1.0), axis=1) - gammaln(d + k)
    return log_sphere + math.log(d) + (k + d) * math.log(t_sq) - np.log(k + d)


def _features(points: np.ndarray, idx: np.ndarray, log_norms: np.ndarray) -> np.ndarray:
    """ψ_n(x) = x^n/‖z^n‖ for a batch of points, shape (B, M)"""
    n_max = int(idx.max()) if idx.size else 0
    out = np.exp(-0.5 * log_norms)[None, :].astype(complex)
    powers = np.arange(n_max + 1)
    for i in range(idx.shape[1]):
        table = points[:, i][:, None] ** powers[None, :]
        out = out * table[:, idx[:, i]]
    return out


def _propose(rng: np.random.Generator, idx: np.ndarray, t_sq: float, size: int) -> np.ndarray:
    """Draws from the mixture (1/M) Σ_n |ψ_n|²"""
    d = idx.shape[1]
    pick = idx[rng.integers(idx.shape[0], size=size)]
    k = pick.sum(axis=1)
    radius = np.sqrt(t_sq * rng.random(size) ** (1.0 / (k + d)))
    if d == 1:
        direction = np.exp(2j * math.pi * rng.random(size))[:, None]
    else:
        g = rng.gamma(pick + 1.0)
        mod = np.sqrt(g / g.sum(axis=1, keepdims=True))
        direction = mod * np.exp(2j * math.pi * rng.random((size, d)))
    return radius[:, None] * direction


def _projection_sample(rng: np.random.Generator, idx: np.ndarray, t_sq: float, batch: int = 32):
    """Sequential sampler of the projection process spanned by the ψ_n, n in idx"""
    d = idx.shape[1]
    m = idx.shape[0]
    log_norms = _log_window_norms(idx, d, t_sq)
    basis = np.zeros((m, m), dtype=complex)
    points = np.zeros((m, d), dtype=complex)
    proposals = 0
    for i in range(m):
        while True:
            cand = _propose(rng, idx, t_sq, batch)
            feats = _features(cand, idx, log_norms)
            norm2 = np.sum(np.abs(feats) ** 2, axis=1)
            if i:
                coef = feats @ np.conj(basis[:, :i])
                resid = norm2 - np.sum(np.abs(coef) ** 2, axis=1)
            else:
                resid = norm2
            ratio = resid / norm2
            if np.any(ratio < DENSITY_FLOOR):
                raise NumericError("negative conditional density", {"step": i, "min_ratio": float(ratio.min())})
            accept = np.nonzero(rng.random(batch) < np.clip(ratio, 0.0, 1.0))[0]
            if accept.size:
                j = int(accept[0])
                proposals += j + 1
                break
            proposals += batch
        v = feats[j].copy()
        # two passes of Gram–Schmidt keep the basis orthonormal to round-off
        for _ in range(2):
            if i:
                v -= basis[:, :i] @ (np.conj(basis[:, :i]).T @ v)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            raise NumericError("degenerate direction in Gram–Schmidt", {"step": i})
        basis[:, i] = v / nv
        points[i] = cand[j]
    return points, proposals


def sample_hkpv(spec: HkpvSpec, seed: int, restrict: str = "window", max_retries: int = 3) -> Configuration:
    """Spectral sequential sample of the process in B(o, R).

    restrict="window" samples the kernel restricted to the window exactly;
    restrict="ball" samples the rank-M projection on the whole ball and keeps
    the points that fall in the window.
    """
    d = spec.dimension
    n_cut = spec.degree_cutoff if spec.degree_cutoff is not None else default_degree_cutoff(spec.window_radius, d)
    idx = multi_indices(d, n_cut)
    rho = float(radius_to_euclidean(spec.window_radius))
    last_error = None
    for attempt in range(max_retries):
        rng = stream(seed, attempt)
        if restrict == "window":
            t_sq = rho * rho
            degrees = idx.sum(axis=1)
            chosen = idx[rng.random(idx.shape[0]) < t_sq ** (degrees + d)]
        elif restrict == "ball":
            t_sq = 1.0
            chosen = idx
        else:
            raise ArgumentError(f"unknown restriction {restrict!r}")
        try:
            points, proposals = _projection_sample(rng, chosen, t_sq) if chosen.size else (np.zeros((0, d)), 0)
        except NumericError as e:
            logger.warning(f"seed {seed} attempt {attempt}: {e.detail}, retrying")
            last_error = e
            continue
        basis_size = int(chosen.shape[0])
        if restrict == "ball":
            points = points[np.sum(np.abs(points) ** 2, axis=1) < rho * rho]
        if min_pairwise_distance(points) <= 1e-12:
            logger.warning(f"seed {seed} attempt {attempt}: coincident points, retrying")
            continue
        if points.size:
            keys = []
            for i in reversed(range(d)):
                keys += [points[:, i].imag, points[:, i].real]
            points = points[np.lexsort(keys)]
        return Configuration(
            points=[list(map(complex, p)) for p in points],
            dimension=d,
            window_radius=spec.window_radius,
            seed=seed,
            generator="hkpv",
            truncation_meta={"degree": n_cut, "basis_size": basis_size, "proposals": proposals,
                             "restrict": restrict, "attempt": attempt, "rho": rho},
        )
    raise NumericError(f"seed {seed}: HKPV sampling failed after {max_retries} attempts",
                       {"retries": max_retries, "last": last_error.detail if last_error else None})


def sample(spec: Union[GafSpec, HkpvSpec], seed: int) -> Configuration:
    if isinstance(spec, GafSpec):
        return sample_gaf(spec, seed)
    return sample_hkpv(spec, seed)


def sample_many(spec: Union[GafSpec, HkpvSpec], seeds: Sequence[int], threads: int = 1) -> List[Configuration]:
    """Independent samples, one stream per seed, returned in seed order"""
    seeds = list(seeds)
    if threads <= 1:
        return [sample(spec, s) for s in seeds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: sample(spec, s), seeds))


# ------------------------------------------------------------ statistics


def count_statistics(r: float, d: int) -> Tuple[float, float]:
    """Exact mean and variance of the number of points in B(o, r)"""
    t_sq = float(radius_to_euclidean(r)) ** 2
    mean = (t_sq / (1.0 - t_sq)) ** d
    variance = mean - (t_sq * t_sq / (1.0 - t_sq * t_sq)) ** d
    return mean, variance


def pair_correlation(distance, d: int) -> np.ndarray:
    """ρ_2/(ρ_1 ρ_1) = 1 − sech^{2(d+1)}(d_B/2)"""
    return 1.0 - np.cosh(0.5 * np.asarray(distance, dtype=float)) ** (-2 * (d + 1))


class RadiusStatistics(BaseModel):
    radius: float
    mean: float
    variance: float
    expected_mean: float
    expected_variance: float
    z_score: float
    variance_rel_error: float


class PairBin(BaseModel):
    lo: float
    hi: float
    within_pairs: int
    cross_pairs: int
    empirical: Optional[float] = None
    theory: float


class StatisticsReport(BaseModel):
    n_configurations: int
    generator: str
    dimension: int
    radii: List[RadiusStatistics] = Field(default_factory=list)
    pairs: List[PairBin] = Field(default_factory=list)


def counts_in_ball(configs: Sequence[Configuration], r: float) -> np.ndarray:
    """Number of points with d_B(x, o) < r in each configuration"""
    out = np.empty(len(configs))
    for i, cfg in enumerate(configs):
        out[i] = np.count_nonzero(distances_to(cfg.array, np.zeros(cfg.dimension)) < r) if len(cfg) else 0
    return out


def validate_statistics(configs: Sequence[Configuration], radii: Sequence[float],
                        pair_edges: Optional[Sequence[float]] = None) -> StatisticsReport:
    """Counts, variances and binned pair ratios against the exact values"""
    if len(configs) < 100:
        raise ArgumentError(f"need at least 100 configurations, got {len(configs)}")
    d = configs[0].dimension
    generators = {c.generator for c in configs}
    windows = {c.window_radius for c in configs}
    if len(generators) != 1 or len(windows) != 1 or {c.dimension for c in configs} != {d}:
        raise ArgumentError("configurations must share generator, window and dimension")
    window = windows.pop()
    report = StatisticsReport(n_configurations=len(configs), generator=generators.pop(), dimension=d)
    n = len(configs)
    for r in radii:
        if r > window:
            raise ArgumentError(f"radius {r} exceeds the sampled window {window}")
        counts = counts_in_ball(configs, r)
        mean, var = float(counts.mean()), float(counts.var(ddof=1))
        exp_mean, exp_var = count_statistics(r, d)
        stderr = math.sqrt(var / n) if var > 0 else math.inf
        report.radii.append(RadiusStatistics(
            radius=r, mean=mean, variance=var, expected_mean=exp_mean, expected_variance=exp_var,
            z_score=(mean - exp_mean) / stderr if stderr > 0 else 0.0,
            variance_rel_error=abs(var - exp_var) / exp_var,
        ))
    edges = np.asarray(pair_edges if pair_edges is not None else np.linspace(0.0, min(window, 3.0), 13))
    within = np.zeros(edges.size - 1, dtype=int)
    cross = np.zeros(edges.size - 1, dtype=int)
    for i, cfg in enumerate(configs):
        pts = cfg.array
        other = configs[(i + 1) % n].array
        for j in range(len(pts)):
            dist = distances_to(pts, pts[j])
            dist = np.delete(dist, j)
            within += np.histogram(dist, bins=edges)[0]
            if len(other):
                cross += np.histogram(distances_to(other, pts[j]), bins=edges)[0]
    for b in range(edges.size - 1):
        mid = 0.5 * (edges[b] + edges[b + 1])
        report.pairs.append(PairBin(
            lo=float(edges[b]), hi=float(edges[b + 1]), within_pairs=int(within[b]), cross_pairs=int(cross[b]),
            empirical=float(within[b] / cross[b]) if cross[b] else None, theory=float(pair_correlation(mid, d)),
        ))
    logger.info(f"Validated {n} {report.generator} configurations at radii {list(radii)}")
    return report
