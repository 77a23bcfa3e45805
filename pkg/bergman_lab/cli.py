"""
Command-line driver: sample, interpolate, variance and report.

Exit codes: 0 when every criterion computed in the run passes (or none was
computed), 2 when an acceptance criterion fails, 1 on any error.
"""

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .archive import (
    archive_name, read_manifest, write_configuration, write_manifest, write_ps_csv, write_variance_csv,
)
from .config import ExperimentConfig, dump_config_text, get_lab_settings, load_config
from .errors import ArchiveError, ArgumentError, LabError
from .experiments import (
    CRITERION_IDS, EXPERIMENTS, ExperimentResult, RunContext, criterion_experiments, default_config,
    get_experiment, run_experiment, spec_from_config, summarize,
)
from .models import CriterionResult, RunManifest
from .rng import parse_seed_range
from .sampler import sample_many

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2
MANIFEST = "manifest.json"
REPORT = "report.json"


# ------------------------------------------------------------ manifest


def _load_manifest(out: Path) -> RunManifest:
    path = out / MANIFEST
    if path.exists():
        return read_manifest(path)
    return RunManifest(config_hash="", code_version=__version__)


def _record(out: Path, manifest: RunManifest, config: ExperimentConfig, files: List[Path],
            seconds: float) -> RunManifest:
    """Add one experiment's files to the manifest and rewrite it"""
    conf_path = out / f"{config.experiment}.conf"
    conf_path.write_text(dump_config_text(config), encoding="utf-8")
    outputs = dict(manifest.outputs)
    outputs[config.experiment] = sorted(str(p.relative_to(out)) for p in [conf_path, *files])
    stages = dict(manifest.stage_seconds)
    stages[config.experiment] = round(seconds, 3)
    hashes = {**_config_hashes(out, outputs), config.experiment: config.config_hash()}
    combined = hashlib.sha256("\n".join(f"{k}:{v}" for k, v in sorted(hashes.items())).encode()).hexdigest()
    manifest = RunManifest(config_hash=combined, code_version=__version__, outputs=outputs, stage_seconds=stages)
    write_manifest(manifest, out / MANIFEST)
    return manifest


def _config_hashes(out: Path, outputs) -> dict:
    hashes = {}
    for name in outputs:
        path = out / f"{name}.conf"
        if path.exists():
            hashes[name] = load_config(str(path)).config_hash()
    return hashes


# ------------------------------------------------------------ commands


def _resolve_config(args, command: Optional[str]) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
    elif args.experiment:
        config = default_config(args.experiment)
    else:
        raise ArgumentError("give --config <path> or --experiment <name>")
    if args.threads is not None:
        config = config.model_copy(update={"threads": args.threads})
    if command is not None and config.experiment in EXPERIMENTS:
        owner = get_experiment(config.experiment).command
        if owner != command:
            raise ArgumentError(f"experiment '{config.experiment}' runs under '{owner}', not '{command}'")
    return config


def _context(args, config: ExperimentConfig) -> RunContext:
    seeds = parse_seed_range(args.seeds) if args.seeds else None
    archives = getattr(args, "archives", None)
    return RunContext(threads=config.threads, seeds=seeds, archive_dir=archives)


def cmd_sample(config: ExperimentConfig, out: Path, ctx: RunContext) -> List[Path]:
    """One archive file per seed under <out>/archives"""
    spec = spec_from_config(config)
    seeds = ctx.seeds_for(config)
    started = time.perf_counter()
    configs = sample_many(spec, seeds, ctx.threads)
    paths = [write_configuration(c, out / "archives" / archive_name(c.generator, c.dimension, c.seed))
             for c in configs]
    logger.info(f"Wrote {len(paths)} configuration archives to {out / 'archives'}")
    _record(out, _load_manifest(out), config.model_copy(update={"experiment": f"sample-{config.experiment}"}),
            paths, time.perf_counter() - started)
    return paths


def _write_result(result: ExperimentResult, config: ExperimentConfig, out: Path, started: float) -> List[Path]:
    files = []
    if result.estimates:
        files.append(write_ps_csv(result.estimates, out / f"{result.name}.csv"))
    if result.reports:
        suffix = "_variance" if result.command == "interpolate" else ""
        files.append(write_variance_csv(result.reports, out / f"{result.name}{suffix}.csv"))
    if result.criterion is not None:
        path = out / "criteria" / f"{result.criterion.id:02d}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(result.criterion.model_dump_json(indent=2) + "\n", encoding="utf-8")
        files.append(path)
    _record(out, _load_manifest(out), config, files, time.perf_counter() - started)
    return files


def cmd_run(config: ExperimentConfig, out: Path, ctx: RunContext) -> ExperimentResult:
    """cmd_interpolate and cmd_variance: run the named experiment and write its CSVs"""
    started = time.perf_counter()
    result = run_experiment(config, ctx)
    _write_result(result, config, out, started)
    return result


def cmd_interpolate(config: ExperimentConfig, out: Path, ctx: RunContext) -> ExperimentResult:
    return cmd_run(config, out, ctx)


def cmd_variance(config: ExperimentConfig, out: Path, ctx: RunContext) -> ExperimentResult:
    return cmd_run(config, out, ctx)


def collect_criteria(out: Path) -> List[CriterionResult]:
    """Criterion verdicts recorded in the manifest of an output directory"""
    results = []
    manifest = _load_manifest(out)
    for files in manifest.outputs.values():
        for name in files:
            if name.startswith("criteria/"):
                try:
                    results.append(CriterionResult.model_validate_json((out / name).read_text(encoding="utf-8")))
                except OSError as e:
                    raise ArchiveError(f"cannot read criterion: {e.strerror}", path=str(out / name)) from e
    return results


def cmd_report(out: Path, ctx: RunContext, run_missing: bool = False,
               criteria: Optional[Sequence[int]] = None) -> dict:
    """JSON summary of every acceptance criterion; missing ones are incomplete"""
    owners = criterion_experiments()
    if run_missing:
        done = {c.id for c in collect_criteria(out)}
        wanted = list(criteria) if criteria else list(CRITERION_IDS)
        for cid in wanted:
            if cid in done:
                continue
            if cid not in owners:
                raise ArgumentError(f"no experiment computes criterion {cid}")
            cmd_run(default_config(owners[cid]), out, ctx)
    summary = summarize(collect_criteria(out))
    summary["code_version"] = __version__
    path = out / REPORT
    path.write_text(json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    logger.info(f"Report written to {path}: {summary['status']}")
    return summary


# ------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bergman-lab", description="Bergman-kernel point process lab")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (default: $BERGMAN_LAB_OUT or ./runs)")
        p.add_argument("--seeds", help="seed range 'a..b', overriding seed_base/n_configurations")
        p.add_argument("--threads", type=int, help="worker threads over seeds")

    for name in ("sample", "interpolate", "variance"):
        p = sub.add_parser(name, help=f"{name} command")
        p.add_argument("--config", help="flat key = value experiment file")
        p.add_argument("--experiment", help="run a registered experiment with its default config")
        if name != "sample":
            p.add_argument("--archives", help="read configurations from this archive directory")
        common(p)

    p = sub.add_parser("report", help="acceptance summary")
    p.add_argument("--run", action="store_true", help="run experiments whose criteria are missing")
    p.add_argument("--criteria", help="comma list of criterion ids for --run")
    common(p)

    sub.add_parser("list", help="list registered experiments")
    return parser


def _exit_for(criteria: Sequence[Optional[CriterionResult]]) -> int:
    return EXIT_FAILED if any(c is not None and c.status == "fail" for c in criteria) else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_lab_settings()
    logging.basicConfig(level=getattr(logging, settings.log_level, logging.INFO),
                        format='%(asctime)s - %(levelname)s - %(message)s')
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for name in sorted(EXPERIMENTS):
                exp = EXPERIMENTS[name]
                crit = f"#{exp.criterion}" if exp.criterion else "-"
                print(f"{name:18s} {exp.command:12s} {crit:4s} {exp.title}")
            return EXIT_OK
        out = Path(args.out or settings.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "report":
            threads = args.threads or 1
            ctx = RunContext(threads=threads, seeds=parse_seed_range(args.seeds) if args.seeds else None)
            ids = [int(v) for v in args.criteria.split(",")] if args.criteria else None
            summary = cmd_report(out, ctx, run_missing=args.run, criteria=ids)
            print(json.dumps({"status": summary["status"]}))
            return EXIT_FAILED if summary["status"] == "fail" else EXIT_OK
        config = _resolve_config(args, None if args.command == "sample" else args.command)
        ctx = _context(args, config)
        if args.command == "sample":
            cmd_sample(config, out, ctx)
            return EXIT_OK
        handler = cmd_interpolate if args.command == "interpolate" else cmd_variance
        result = handler(config, out, ctx)
        return _exit_for([result.criterion])
    except (LabError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}", exc_info=True)
        return EXIT_ERROR
    except ValueError as e:
        logger.error(f"Invalid argument: {e}", exc_info=True)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
