"""
Named experiments and the acceptance registry.

Each experiment reads an ExperimentConfig, draws (or reloads) configurations
through a RunContext and returns an ExperimentResult: PSEstimate rows for the
interpolation experiments, VarianceReport rows for the variance experiments,
and at most one CriterionResult. Every acceptance criterion belongs to exactly
one experiment.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .archive import archive_name, read_configuration
from .config import ExperimentConfig
from .errors import ArchiveError, ArgumentError
from .hypgeom import poincare_mass, poincare_mass_closed_form, poincare_mass_tail
from .kernels import (
    WeightSpec, cached_coeffs, critical_coefficient_model, degree_coefficients, log_weight_moments,
)
from .models import Configuration, CriterionResult, GafSpec, HkpvSpec, PSEstimate, VarianceReport
from .profiles import RadialProfile
from .psinterp import PluriTerm, TestFunction, ps_weighted_sum, tempered_functional
from .rng import stream
from .sampler import count_statistics, sample_many, validate_statistics
from .variance import (
    IMPOSSIBILITY_BOUND, LinearStatistic, claimA_UV, identity_Iz, impossibility_ratio,
    interpolation_variance_ratio, pluri_ratio_bound, residue_Jz_check, sharp_divergence_bound,
    sum_to_integral_bound, var_kernel_weighted, var_mc_configs, var_scalar_quadrature,
)

logger = logging.getLogger(__name__)

CRITICAL_MASS_D1 = 0.2498751
CRITICAL_MASS_D2 = 0.125
INTENSITY_RADIUS = 2.0
CLAIM_A_TARGET = 0.5724
CRITERION_IDS = tuple(range(1, 15))

Command = Literal["interpolate", "variance"]


class ExperimentResult(BaseModel):
    name: str
    command: Command
    estimates: List[PSEstimate] = Field(default_factory=list)
    reports: List[VarianceReport] = Field(default_factory=list)
    criterion: Optional[CriterionResult] = None


class Experiment(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    command: Command
    criterion: Optional[int] = None
    title: str = ""
    defaults: Dict[str, Any] = Field(default_factory=dict)
    runner: Callable


EXPERIMENTS: Dict[str, Experiment] = {}


def experiment(name: str, command: Command, criterion: Optional[int] = None, title: str = "", **defaults):
    """Register a runner under a name"""
    def register(fn):
        if name in EXPERIMENTS:
            raise ArgumentError(f"experiment {name!r} registered twice")
        EXPERIMENTS[name] = Experiment(name=name, command=command, criterion=criterion, title=title,
                                       defaults=defaults, runner=fn)
        return fn
    return register


def get_experiment(name: str) -> Experiment:
    try:
        return EXPERIMENTS[name]
    except KeyError:
        raise ArgumentError(f"unknown experiment {name!r}; known: {', '.join(sorted(EXPERIMENTS))}") from None


def criterion_experiments() -> Dict[int, str]:
    return {e.criterion: e.name for e in EXPERIMENTS.values() if e.criterion is not None}


def default_config(name: str, **overrides) -> ExperimentConfig:
    """The config an experiment runs with when no file is given"""
    return ExperimentConfig(experiment=name, **{**get_experiment(name).defaults, **overrides})


# ------------------------------------------------------------ run context


class RunContext:
    """Thread count, seed override and a per-run configuration cache"""

    def __init__(self, threads: int = 1, seeds: Optional[Sequence[int]] = None,
                 archive_dir: Optional[Union[str, Path]] = None):
        self.threads = max(int(threads), 1)
        self.seeds = list(seeds) if seeds is not None else None
        self.archive_dir = Path(archive_dir) if archive_dir is not None else None
        self._cache: Dict[Tuple[Any, int], Configuration] = {}

    def seeds_for(self, config: ExperimentConfig) -> List[int]:
        if self.seeds is not None:
            return list(self.seeds)
        return list(range(config.seed_base, config.seed_base + config.n_configurations))

    def _load(self, spec: Union[GafSpec, HkpvSpec], seed: int) -> Configuration:
        generator = "gaf" if isinstance(spec, GafSpec) else "hkpv"
        d = 1 if generator == "gaf" else spec.dimension
        path = self.archive_dir / archive_name(generator, d, seed)
        if not path.exists():
            raise ArchiveError("missing configuration archive", path=str(path))
        config = read_configuration(path)
        if config.window_radius < spec.window_radius:
            raise ArchiveError(f"archive window {config.window_radius} is smaller than {spec.window_radius}",
                               path=str(path))
        return config

    def configurations(self, spec: Union[GafSpec, HkpvSpec], seeds: Sequence[int]) -> List[Configuration]:
        missing = [s for s in seeds if (spec, s) not in self._cache]
        if missing:
            if self.archive_dir is not None:
                fresh = [self._load(spec, s) for s in missing]
            else:
                logger.info(f"Sampling {len(missing)} configurations with {type(spec).__name__}")
                fresh = sample_many(spec, missing, self.threads)
            for s, c in zip(missing, fresh):
                self._cache[(spec, s)] = c
        return [self._cache[(spec, s)] for s in seeds]

    def map(self, fn: Callable, items: Sequence) -> List:
        """fn over items in order, on the thread pool when threads > 1"""
        if self.threads <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))


def spec_from_config(config: ExperimentConfig) -> Union[GafSpec, HkpvSpec]:
    if config.generator == "gaf":
        if config.dimension != 1:
            raise ArgumentError("the GAF sampler is defined on the disk (dimension = 1)")
        return GafSpec(window_radius=config.window_radius, tail_epsilon=config.tail_epsilon,
                       max_degree=config.max_degree)
    return HkpvSpec(dimension=config.dimension, degree_cutoff=config.degree_cutoff,
                    window_radius=config.window_radius)


# ------------------------------------------------------------ test functions


def _weight_from_name(text: str, d: int) -> WeightSpec:
    name, _, arg = text.partition(":")
    if name == "unit":
        return WeightSpec.unit(d)
    if name == "critical":
        return WeightSpec.critical(d)
    if name == "standard_alpha":
        return WeightSpec.standard_alpha(float(arg), d)
    if name == "log_supercritical":
        return WeightSpec.log_supercritical(float(arg), d)
    raise ArgumentError(f"unknown weight {text!r}")


def function_from_name(text: str, d: int = 1) -> TestFunction:
    """Test functions by config name: constant, monomial:3, monomial:1.2, poisson, lacunary,
    hardy, kernel:<weight>, pluri_example"""
    name, _, arg = text.strip().partition(":")
    try:
        if name == "constant":
            return TestFunction.constant(1.0, d)
        if name == "monomial":
            return TestFunction.monomial([int(v) for v in arg.split(".")], d)
        if name == "poisson":
            if d == 1:
                return TestFunction.poisson(1.0)
            return TestFunction.poisson_szego([1.0] + [0.0] * (d - 1))
        if name == "lacunary":
            return TestFunction.lacunary()
        if name == "hardy":
            return TestFunction.hardy_atomic([[1.0] + [0.0] * (d - 1)], [1.0])
        if name == "kernel":
            return TestFunction.kernel_section(_weight_from_name(arg, d))
        if name == "pluri_example":
            return pluriharmonic_example(d)
    except ValueError as e:
        raise ArgumentError(f"bad test function {text!r}: {e}") from e
    raise ArgumentError(f"unknown test function {text!r}")


def pluriharmonic_example(d: int = 2) -> TestFunction:
    """Re(z₁) + Im(z₁z₂)"""
    if d < 2:
        raise ArgumentError("the pluriharmonic example needs d ≥ 2")
    first = [1] + [0] * (d - 1)
    second = [1, 1] + [0] * (d - 2)
    return TestFunction.pluriharmonic([PluriTerm(coef=1.0, n=first, part="re"),
                                       PluriTerm(coef=1.0, n=second, part="im")], d)


def _z_point(z: complex, d: int) -> List[complex]:
    return [complex(z)] + [0j] * (d - 1)


# ------------------------------------------------------------ helpers


def _value_report(statistic: str, value: float, method: str = "quadrature", err: Optional[float] = None,
                  **meta) -> VarianceReport:
    return VarianceReport(statistic=statistic, method=method, value=float(value), quadrature_error=err, meta=meta)


def _criterion(cid: int, name: str, ok: bool, measured: Dict[str, Any], required: Dict[str, Any]) -> CriterionResult:
    status = "pass" if ok else "fail"
    log = logger.info if ok else logger.warning
    log(f"Criterion {cid} ({name}): {status}")
    return CriterionResult(id=cid, name=name, status=status, measured=measured, required=required)


def _median_errors(estimates: Sequence[PSEstimate]) -> Optional[float]:
    errs = [e.err_abs for e in estimates if e.err_abs is not None]
    return float(np.median(errs)) if errs else None


def _interpolation_sweep(config: ExperimentConfig, ctx: RunContext, functions: Sequence[TestFunction],
                         k_max: Optional[int] = None) -> List[PSEstimate]:
    """One row per (seed, s, z, f), in that order"""
    configs = ctx.configurations(spec_from_config(config), ctx.seeds_for(config))
    d = config.dimension

    def per_config(X: Configuration) -> List[PSEstimate]:
        rows = []
        for s in config.s_grid:
            for z in config.z_grid:
                for f in functions:
                    rows.append(ps_weighted_sum(X, s, _z_point(z, d), f, k_max=k_max))
        return rows

    out: List[PSEstimate] = []
    for rows in ctx.map(per_config, configs):
        out.extend(rows)
    return out


def _select(estimates: Sequence[PSEstimate], s: float, z: Optional[complex] = None,
            f_kind: Optional[str] = None) -> List[PSEstimate]:
    return [e for e in estimates
            if e.s == s and (z is None or e.z[0] == z) and (f_kind is None or e.f_kind == f_kind)]


# ------------------------------------------------------------ variance-side experiments


@experiment("critical-mass", "variance", 1, "critical-exponent mass d/4^d")
def run_critical_mass(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    v1 = 0.001 * poincare_mass(1.001, 1)
    v2 = 0.001 * poincare_mass(2.001, 2)
    rel1 = abs(v1 - CRITICAL_MASS_D1) / CRITICAL_MASS_D1
    rel2 = abs(v2 - CRITICAL_MASS_D2) / CRITICAL_MASS_D2
    reports = [_value_report("(s-d)g_P:d=1:s=1.001", v1, d=1), _value_report("(s-d)g_P:d=2:s=2.001", v2, d=2)]
    crit = _criterion(1, "critical-exponent mass", rel1 < 1e-3 and rel2 < 1e-2,
                      {"d1": v1, "d2": v2, "rel_d1": rel1, "rel_d2": rel2},
                      {"d1": CRITICAL_MASS_D1, "d2": CRITICAL_MASS_D2, "rel_d1": 1e-3, "rel_d2": 1e-2})
    return ExperimentResult(name="critical-mass", command="variance", reports=reports, criterion=crit)


@experiment("poincare-mass", "variance", 2, "closed-form Poincaré mass")
def run_poincare_mass(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    value = poincare_mass(2.0, 1)
    rel = abs(value - 1.0 / 6.0) * 6.0
    reports = [_value_report("g_P:d=1:s=2", value),
               _value_report("g_P:d=1:s=2", poincare_mass_closed_form(2.0), method="closed_form")]
    crit = _criterion(2, "closed-form Poincaré mass", rel < 1e-8, {"g_P(2)": value, "rel": rel},
                      {"g_P(2)": 1.0 / 6.0, "rel": 1e-8})
    return ExperimentResult(name="poincare-mass", command="variance", reports=reports, criterion=crit)


@experiment("intensity", "variance", 3, "sampler intensity and count variance",
            window_radius=3.0, n_configurations=400, seed_base=0)
def run_intensity(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    seeds = ctx.seeds_for(config)
    gaf = GafSpec(window_radius=config.window_radius, tail_epsilon=config.tail_epsilon, max_degree=config.max_degree)
    hkpv = HkpvSpec(dimension=1, degree_cutoff=config.degree_cutoff, window_radius=config.window_radius)
    rep_g = validate_statistics(ctx.configurations(gaf, seeds), [INTENSITY_RADIUS]).radii[0]
    rep_h = validate_statistics(ctx.configurations(hkpv, seeds), [INTENSITY_RADIUS]).radii[0]
    n = len(seeds)
    exp_mean, exp_var = count_statistics(INTENSITY_RADIUS, 1)
    se_g = math.sqrt(rep_g.variance / n)
    agree = abs(rep_g.mean - rep_h.mean) / math.sqrt((rep_g.variance + rep_h.variance) / n)
    reports = [
        _value_report(f"count:B(o,{INTENSITY_RADIUS:g})", rep_g.variance, method="mc", generator="gaf", mean=rep_g.mean),
        _value_report(f"count:B(o,{INTENSITY_RADIUS:g})", rep_h.variance, method="mc", generator="hkpv", mean=rep_h.mean),
        _value_report(f"count:B(o,{INTENSITY_RADIUS:g})", exp_var, method="closed_form", mean=exp_mean),
    ]
    ok = (abs(rep_g.mean - exp_mean) <= 3.0 * se_g and rep_g.variance_rel_error <= 0.1 and agree <= 3.0)
    crit = _criterion(3, "sampler intensity", ok,
                      {"gaf_mean": rep_g.mean, "gaf_se": se_g, "gaf_variance": rep_g.variance,
                       "hkpv_mean": rep_h.mean, "agreement_z": agree, "n": n},
                      {"mean": exp_mean, "variance": exp_var, "mean_se": 3.0, "variance_rel": 0.1, "agreement_z": 3.0})
    return ExperimentResult(name="intensity", command="variance", reports=reports, criterion=crit)


@experiment("oracle-agreement", "variance", 6, "Monte Carlo against quadrature variance",
            window_radius=3.0, n_configurations=2000, seed_base=0)
def run_oracle_agreement(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    configs = ctx.configurations(spec_from_config(config), ctx.seeds_for(config))
    cases = [
        (LinearStatistic(profile=RadialProfile.indicator(INTENSITY_RADIUS)),
         var_scalar_quadrature(RadialProfile.indicator(INTENSITY_RADIUS))),
        (LinearStatistic(profile=RadialProfile.indicator(1.5), f=TestFunction.kernel_section(WeightSpec.unit())),
         var_scalar_quadrature(RadialProfile.indicator(1.5), statistic="bergman_section")),
    ]
    reports, measured, ok = [], {}, True
    for stat, quad in cases:
        mc = var_mc_configs(stat, configs, ctx.threads)
        tol = max(0.05 * quad.value, 4.0 * mc.standard_error)
        gap = abs(mc.value - quad.value)
        ok = ok and gap <= tol
        measured[stat.label] = {"mc": mc.value, "se": mc.standard_error, "quadrature": quad.value, "tolerance": tol}
        reports += [mc, quad]
    crit = _criterion(6, "variance oracle agreement", ok, measured, {"tolerance": "max(5%, 4 SE)"})
    return ExperimentResult(name="oracle-agreement", command="variance", reports=reports, criterion=crit)


@experiment("iz-identity", "variance", 7, "closed-form I_z kernel against the angular route",
            z_grid=[0j, 0.5 + 0j], seed_base=7)
def run_iz_identity(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    reports, worst = [], 0.0
    for profile in (RadialProfile.indicator(1.5), RadialProfile.bump(2.0)):
        for z in config.z_grid:
            route1 = identity_Iz(profile, z)
            route2 = var_scalar_quadrature(profile, z, statistic="bergman_section")
            worst = max(worst, abs(route1.value - route2.value) / route1.value)
            reports += [route1, route2]
    rng = stream(config.seed_base, 0)
    worst_residue = 0.0
    for _ in range(5):
        x, y = rng.uniform(0.0, 0.9, 2)
        z = rng.uniform(0.0, 0.7) * np.exp(2j * np.pi * rng.uniform())
        quad, closed = residue_Jz_check(float(x), float(y), complex(z))
        worst_residue = max(worst_residue, abs(quad - closed) / abs(closed))
        reports.append(_value_report("J_z", closed, method="closed_form", x=float(x), y=float(y), quadrature=quad))
    crit = _criterion(7, "I_z identity", worst <= 1e-6 and worst_residue <= 1e-8,
                      {"route_rel_gap": worst, "residue_rel_gap": worst_residue},
                      {"route_rel_gap": 1e-6, "residue_rel_gap": 1e-8})
    return ExperimentResult(name="iz-identity", command="variance", reports=reports, criterion=crit)


@experiment("impossibility", "variance", 8, "variance floor for compact profiles", z_grid=[0j, 0.4 + 0j])
def run_impossibility(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    profiles = [RadialProfile.indicator(r) for r in np.arange(0.5, 6.01, 0.5)] + [RadialProfile.bump(3.0)]
    reports, ratios = [], []
    for profile in profiles:
        for z in config.z_grid:
            ratio = impossibility_ratio(profile, z)
            ratios.append(ratio)
            reports.append(_value_report(f"Var/mass^2:{profile.name}", ratio, z=str(z)))
    low = min(ratios)
    crit = _criterion(8, "impossibility", low > IMPOSSIBILITY_BOUND, {"min_ratio": low},
                      {"min_ratio_above": IMPOSSIBILITY_BOUND})
    return ExperimentResult(name="impossibility", command="variance", reports=reports, criterion=crit)


@experiment("critical-kernel", "variance", 9, "critical-weight kernel asymptotics")
def run_critical_kernel(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    weight = WeightSpec.critical()
    b = degree_coefficients(weight, 2000)
    band = b / critical_coefficient_model(np.arange(b.size))
    band_ratio = float(band.max() / band.min())
    coeffs = cached_coeffs(weight, 0.999)
    t_sq = np.linspace(0.0, 0.999, 400)
    diag = coeffs.series(t_sq).real * (1.0 - t_sq) / np.log(2.0 / (1.0 - t_sq))
    diag_ratio = float(diag.max() / diag.min())
    ks = np.unique(np.concatenate([[0], np.geomspace(1, 1e4, 80).astype(int)]))
    claim = log_weight_moments(ks) * np.log(4.0 * ks + 4.0)
    a0_gap = abs(float(b[0]) - math.log(4.0))
    reports = [
        _value_report("a_0(W_cr)", b[0]),
        _value_report("coefficient_band_ratio", band_ratio, n_max=2000),
        _value_report("diagonal_band_ratio", diag_ratio, t_sq_max=0.999),
        _value_report("claim_integral_max", float(claim.max()), k_max=int(ks[-1])),
    ]
    ok = a0_gap <= 1e-8 and band_ratio <= 10.0 and diag_ratio <= 10.0 and float(claim.max()) <= 2.0
    crit = _criterion(9, "critical kernel", ok,
                      {"a0_gap": a0_gap, "coefficient_band": band_ratio, "diagonal_band": diag_ratio,
                       "claim_max": float(claim.max())},
                      {"a0_gap": 1e-8, "coefficient_band": 10.0, "diagonal_band": 10.0, "claim_max": 2.0})
    return ExperimentResult(name="critical-kernel", command="variance", reports=reports, criterion=crit)


@experiment("critical-floor", "variance", 10, "critical against super-critical variance decay",
            s_grid=[1.2, 1.02])
def run_critical_floor(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    s_hi, s_lo = max(config.s_grid), min(config.s_grid)
    reports, normalized = [], {}
    for weight in (WeightSpec.critical(), WeightSpec.log_supercritical(0.5)):
        coeffs = cached_coeffs(weight, 0.999)
        for s in (s_hi, s_lo):
            report = var_kernel_weighted(coeffs, s)
            normalized[(weight.label, s)] = report.value / poincare_mass(s, 1) ** 2
            reports.append(report)
    crit_keep = normalized[("critical", s_lo)] / normalized[("critical", s_hi)]
    super_drop = normalized[("log_supercritical(0.5)", s_hi)] / normalized[("log_supercritical(0.5)", s_lo)]
    crit = _criterion(10, "critical/super-critical dichotomy", crit_keep >= 0.5 and super_drop >= 3.0,
                      {"critical_kept_fraction": crit_keep, "supercritical_drop": super_drop,
                       "s": [s_hi, s_lo]},
                      {"critical_kept_fraction": 0.5, "supercritical_drop": 3.0})
    return ExperimentResult(name="critical-floor", command="variance", reports=reports, criterion=crit)


@experiment("claimA", "variance", 11, "U/V ratio behind the variance lower bound")
def run_claim_a(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    base = claimA_UV(0, 1.0)[2]
    worst, arg = 0.0, (0, 1.0)
    for s in np.round(np.arange(1.0, 2.0001, 0.05), 10):
        for n in range(201):
            ratio = claimA_UV(n, float(s))[2]
            if ratio > worst:
                worst, arg = ratio, (n, float(s))
    reports = [_value_report("U/V:n=0:s=1", base), _value_report("max U/V", worst, n=arg[0], s=arg[1])]
    crit = _criterion(11, "claim A", abs(base - CLAIM_A_TARGET) <= 1e-4 and worst < 0.9,
                      {"U/V(0,1)": base, "max_U/V": worst, "argmax": list(arg)},
                      {"U/V(0,1)": CLAIM_A_TARGET, "tolerance": 1e-4, "max_U/V_below": 0.9})
    return ExperimentResult(name="claimA", command="variance", reports=reports, criterion=crit)


@experiment("sharp", "variance", 12, "divergence of the Poincaré-weighted variance")
def run_sharp(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    v5, v20 = sharp_divergence_bound(1.25, 5), sharp_divergence_bound(1.25, 20)
    w20 = sharp_divergence_bound(2.0, 20, allow_outside=True)
    w40 = sharp_divergence_bound(2.0, 40, allow_outside=True)
    drift = abs(w40 - w20) / w20
    reports = [_value_report("sharp:s=1.25", v, N=n) for n, v in ((5, v5), (20, v20))]
    reports += [_value_report("sharp:s=2", w, N=n) for n, w in ((20, w20), (40, w40))]
    crit = _criterion(12, "sharp divergence", v20 > 10.0 * v5 and drift < 0.05,
                      {"growth_1.25": v20 / v5, "drift_2": drift},
                      {"growth_1.25_above": 10.0, "drift_2_below": 0.05})
    return ExperimentResult(name="sharp", command="variance", reports=reports, criterion=crit)


# ------------------------------------------------------------ interpolation experiments


@experiment("hardy", "interpolate", 4, "weighted harmonic Hardy spaces: atomic μ = δ_1",
            generator="hkpv", window_radius=6.0, n_configurations=50, seed_base=1000,
            s_grid=[1.5, 1.3, 1.2, 1.1, 1.05], z_grid=[0j, 0.4 + 0j], functions=["hardy"])
def run_hardy(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    functions = [function_from_name(name, config.dimension) for name in config.functions]
    estimates = _interpolation_sweep(config, ctx, functions)
    s_path = sorted(config.s_grid, reverse=True)
    measured, ok = {}, True
    for z in config.z_grid:
        medians = [_median_errors(_select(estimates, s, z)) for s in s_path]
        if any(m is None for m in medians):
            ok = False
            measured[str(z)] = {"medians": medians}
            continue
        steps = sum(b < a for a, b in zip(medians, medians[1:]))
        halved = medians[-1] < 0.5 * medians[0]
        # one non-decreasing step is tolerated
        ok = ok and steps >= len(medians) - 2 and halved
        measured[str(z)] = {"s": s_path, "medians": medians, "decreasing_steps": steps}
    crit = _criterion(4, "Hardy interpolation", ok, measured,
                      {"decreasing_steps_min": len(s_path) - 2, "last_over_first_below": 0.5})
    return ExperimentResult(name="hardy", command="interpolate", estimates=estimates, criterion=crit)


@experiment("mean-identity", "interpolate", 5, "mean of the weighted Poincaré series",
            window_radius=3.0, n_configurations=400, seed_base=0, s_grid=[1.2, 1.5],
            functions=["constant", "monomial:1", "poisson"])
def run_mean_identity(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    functions = [function_from_name(name, config.dimension) for name in config.functions]
    k_all = int(math.ceil(config.window_radius))
    estimates = _interpolation_sweep(config.model_copy(update={"z_grid": [0j]}), ctx, functions, k_max=k_all)
    d = config.dimension
    measured, ok = {}, True
    for f in functions:
        f0 = f.evaluate(np.zeros(d)).real
        for s in config.s_grid:
            # Re g_X(s, o; f); the mean over the window is f(o) times the truncated mass
            values = np.array([e.g_f.real for e in _select(estimates, s, f_kind=f.name)])
            target = f0 * (poincare_mass(s, d) - poincare_mass_tail(s, d, config.window_radius))
            se = float(values.std(ddof=1)) / math.sqrt(values.size)
            z_score = abs(float(values.mean()) - target) / se if se > 0 else math.inf
            ok = ok and z_score <= 3.0
            measured[f"{f.name}@s={s:g}"] = {"mean": float(values.mean()), "target": target, "se": se,
                                             "z": z_score}
    crit = _criterion(5, "mean identity", ok, measured, {"z_max": 3.0})
    return ExperimentResult(name="mean-identity", command="interpolate", estimates=estimates, criterion=crit)


@experiment("wbergman", "interpolate", None, "uniform interpolation in a super-critical weighted space",
            window_radius=3.0, n_configurations=50, seed_base=2000, s_grid=[1.5, 1.2, 1.1],
            functions=["kernel:log_supercritical:0.5"])
def run_wbergman(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    functions = [function_from_name(name, config.dimension) for name in config.functions]
    return ExperimentResult(name="wbergman", command="interpolate",
                            estimates=_interpolation_sweep(config, ctx, functions))


@experiment("critical", "interpolate", None, "interpolation at the critical weight, z = o",
            window_radius=3.0, n_configurations=50, seed_base=2000, s_grid=[1.5, 1.2, 1.1],
            functions=["kernel:critical"])
def run_critical(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    functions = [function_from_name(name, config.dimension) for name in config.functions]
    return ExperimentResult(name="critical", command="interpolate",
                            estimates=_interpolation_sweep(config.model_copy(update={"z_grid": [0j]}), ctx, functions))


@experiment("tempered-single", "interpolate", 13, "tempered growth classifier",
            window_radius=3.0, n_configurations=50, seed_base=3000, s_grid=[1.2, 1.1, 1.05],
            functions=["lacunary", "monomial:3"])
def run_tempered_single(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    functions = [function_from_name(name, config.dimension) for name in config.functions]
    estimates = _interpolation_sweep(config.model_copy(update={"z_grid": [0j]}), ctx, functions)
    constant, monomial, lacunary = TestFunction.constant(), TestFunction.monomial(3), TestFunction.lacunary()
    tempered = {f.name: (tempered_functional(f, 0.01), tempered_functional(f, 0.1))
                for f in (constant, monomial, lacunary)}
    s_path = sorted(config.s_grid, reverse=True)
    lac_ratio = [interpolation_variance_ratio(lacunary, s) for s in s_path]
    mono_ratio = [interpolation_variance_ratio(monomial, s) for s in s_path]
    vanishing = all(v01 < v1 for name, (v01, v1) in tempered.items() if name != "lacunary")
    growing = tempered["lacunary"][0] > 5.0 * tempered["lacunary"][1]
    floor = min(lac_ratio) >= 0.5 * lac_ratio[0] > 0.0
    decreasing = all(b < a for a, b in zip(mono_ratio, mono_ratio[1:]))
    reports = [_value_report(f"tempered:{name}", v, alpha=a)
               for name, pair in tempered.items() for a, v in zip((0.01, 0.1), pair)]
    reports += [_value_report(f"variance_ratio:{f.name}", r, s=s)
                for f, ratios in ((lacunary, lac_ratio), (monomial, mono_ratio)) for s, r in zip(s_path, ratios)]
    crit = _criterion(13, "tempered classifier", vanishing and growing and floor and decreasing,
                      {"tempered": {k: list(v) for k, v in tempered.items()}, "s": s_path,
                       "lacunary_ratio": lac_ratio, "monomial_ratio": mono_ratio},
                      {"lacunary_growth_above": 5.0, "floor_fraction": 0.5, "monomial": "decreasing"})
    return ExperimentResult(name="tempered-single", command="interpolate", estimates=estimates, reports=reports,
                            criterion=crit)


@experiment("pluriharmonic", "interpolate", 14, "pluriharmonic interpolation in the ball of C^2",
            dimension=2, generator="hkpv", window_radius=4.0, n_configurations=30, seed_base=4000,
            s_grid=[2.5, 2.05], functions=["pluri_example"])
def run_pluriharmonic(config: ExperimentConfig, ctx: RunContext) -> ExperimentResult:
    functions = [function_from_name(name, config.dimension) for name in config.functions]
    estimates = _interpolation_sweep(config.model_copy(update={"z_grid": [0j]}), ctx, functions)
    s_hi, s_lo = max(config.s_grid), min(config.s_grid)
    med_hi = _median_errors(_select(estimates, s_hi))
    med_lo = _median_errors(_select(estimates, s_lo))
    d = config.dimension
    bounds = [sum_to_integral_bound(n, s_lo, d) for n in (10, 100, 1000)]
    under_bound = all(value <= bound for value, bound, _ in bounds)
    gaps = [abs(value - limit) for value, _, limit in bounds]
    converging = all(b < a for a, b in zip(gaps, gaps[1:]))
    reports = [_value_report("pluri_ratio_bound", pluri_ratio_bound(n, s_lo, d), n=n, s=s_lo, beta_limit=limit)
               for n, (_, _, limit) in zip((10, 100, 1000), bounds)]
    ok = med_hi is not None and med_lo is not None and med_lo < med_hi and under_bound and converging
    crit = _criterion(14, "pluriharmonic interpolation", ok,
                      {"median_error": {str(s_hi): med_hi, str(s_lo): med_lo}, "ratio_gaps": gaps,
                       "ratio_values": [b[0] for b in bounds]},
                      {"median_error": "decreasing", "ratio": "≤ max H + 2∫H, converging to the Beta limit"})
    return ExperimentResult(name="pluriharmonic", command="interpolate", estimates=estimates, reports=reports,
                            criterion=crit)


# ------------------------------------------------------------ drivers


def run_experiment(config: ExperimentConfig, ctx: Optional[RunContext] = None) -> ExperimentResult:
    """Run one experiment and time it"""
    exp = get_experiment(config.experiment)
    ctx = ctx or RunContext(threads=config.threads)
    logger.info(f"Starting experiment '{exp.name}'")
    started = time.perf_counter()
    result = exp.runner(config, ctx)
    seconds = time.perf_counter() - started
    if result.criterion is not None:
        result.criterion.seconds = seconds
    logger.info(f"Finished experiment '{exp.name}' in {seconds:.1f}s")
    return result


def run_acceptance(ids: Optional[Sequence[int]] = None, ctx: Optional[RunContext] = None) -> List[ExperimentResult]:
    """Run the experiments behind the given criteria (all by default) with their default configs"""
    ctx = ctx or RunContext()
    owners = criterion_experiments()
    wanted = sorted(ids) if ids is not None else sorted(owners)
    unknown = [i for i in wanted if i not in owners]
    if unknown:
        raise ArgumentError(f"no experiment computes criteria {unknown}")
    return [run_experiment(default_config(owners[i]), ctx) for i in wanted]


def summarize(criteria: Sequence[CriterionResult]) -> Dict[str, Any]:
    """Overall verdict; criteria with no result are listed as incomplete"""
    by_id = {c.id: c for c in criteria}
    owners = criterion_experiments()
    rows = []
    for cid in CRITERION_IDS:
        if cid in by_id:
            rows.append(by_id[cid].model_dump())
        else:
            rows.append({"id": cid, "name": owners.get(cid, ""), "status": "incomplete",
                         "measured": {}, "required": {}, "seconds": None})
    statuses = {row["status"] for row in rows}
    if "fail" in statuses:
        status = "fail"
    elif "incomplete" in statuses:
        status = "incomplete"
    else:
        status = "pass"
    return {"status": status, "criteria": rows}
