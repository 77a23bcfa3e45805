"""
Text archives: configurations, kernel coefficient tables, CSV rows and run manifests.

Floats are written with 17 significant digits so every archive reads back to the
identical binary value. CSV files open with a versioned header comment line.
"""

import csv
import io
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
from pydantic import ValidationError

from .errors import ArchiveError
from .kernels import KernelCoeffs, WeightSpec
from .models import Configuration, PSEstimate, RunManifest, VarianceReport

logger = logging.getLogger(__name__)

CSV_VERSION = 1
PS_COLUMNS = ["seed", "s", "z_re", "z_im", "f_kind", "g", "g_f_re", "g_f_im", "g_f_norm", "ratio_re", "ratio_im",
              "err_abs", "tail_bound"]
VARIANCE_COLUMNS = ["statistic", "method", "value", "err", "meta"]


def fmt(x: Any) -> str:
    """17 significant digits for floats, empty for None"""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        # newline="" keeps the bytes identical across platforms
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as e:
        raise ArchiveError(f"cannot write: {e.strerror}", path=str(path)) from e


def _read_text(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ArchiveError(f"cannot read: {e.strerror}", path=str(path)) from e


def _header_fields(line: str, tag: str, path: Path) -> Dict[str, str]:
    parts = line.lstrip("#").split()
    if not parts or parts[0] != tag:
        raise ArchiveError(f"expected a '# {tag} ...' header, got {line[:60]!r}", path=str(path))
    fields = {}
    for item in parts[1:]:
        if "=" not in item:
            raise ArchiveError(f"malformed header field {item!r}", path=str(path))
        key, value = item.split("=", 1)
        fields[key] = value
    return fields


# ------------------------------------------------------------ configurations


def configuration_text(config: Configuration) -> str:
    lines = [
        f"# dpp d={config.dimension} generator={config.generator} seed={config.seed} "
        f"R={fmt(config.window_radius)} N={len(config)}",
        "# meta " + json.dumps(config.truncation_meta, sort_keys=True),
    ]
    for point in config.points:
        lines.append(",".join(f"{fmt(c.real)},{fmt(c.imag)}" for c in point))
    return "\n".join(lines) + "\n"


def archive_name(generator: str, dimension: int, seed: int) -> str:
    return f"{generator}_d{dimension}_seed{seed:06d}.dpp"


def write_configuration(config: Configuration, path: os.PathLike) -> Path:
    """Write one configuration archive"""
    path = Path(path)
    _write_text(path, configuration_text(config))
    logger.debug(f"Wrote {len(config)} points to {path}")
    return path


def read_configuration(path: os.PathLike) -> Configuration:
    """Inverse of write_configuration"""
    path = Path(path)
    lines = _read_text(path).splitlines()
    if len(lines) < 2:
        raise ArchiveError("truncated configuration archive", path=str(path))
    head = _header_fields(lines[0], "dpp", path)
    if not lines[1].startswith("# meta "):
        raise ArchiveError("missing '# meta' line", path=str(path))
    try:
        d = int(head["d"])
        n = int(head["N"])
        meta = json.loads(lines[1][len("# meta "):])
        points = []
        for row in lines[2:]:
            vals = [float(v) for v in row.split(",")]
            if len(vals) != 2 * d:
                raise ArchiveError(f"row {row[:40]!r} does not have {2 * d} fields", path=str(path))
            points.append([complex(vals[2 * i], vals[2 * i + 1]) for i in range(d)])
        if len(points) != n:
            raise ArchiveError(f"header declares {n} points, found {len(points)}", path=str(path))
        return Configuration(points=points, dimension=d, window_radius=float(head["R"]), seed=int(head["seed"]),
                             generator=head["generator"], truncation_meta=meta)
    except (KeyError, ValueError, ValidationError) as e:
        if isinstance(e, ArchiveError):
            raise
        raise ArchiveError(f"malformed configuration archive: {e}", path=str(path)) from e


def read_configurations(paths: Iterable[os.PathLike]) -> List[Configuration]:
    return [read_configuration(p) for p in paths]


# ------------------------------------------------------------ kernel tables


def kernel_table_text(coeffs: KernelCoeffs) -> str:
    lines = [
        f"# weight={coeffs.weight_id} d={coeffs.dimension} N={coeffs.degree} rho_max={fmt(coeffs.rho_max)}",
        f"# envelope scale={fmt(coeffs.envelope_scale)} power={fmt(coeffs.envelope_power)}",
    ]
    if coeffs.weight.kind != "custom":
        lines.append("# spec " + coeffs.weight.model_dump_json(exclude={"profile"}))
    lines += [f"{n},{fmt(a)}" for n, a in enumerate(coeffs.coeffs)]
    return "\n".join(lines) + "\n"


def write_kernel_table(coeffs: KernelCoeffs, path: os.PathLike) -> Path:
    path = Path(path)
    _write_text(path, kernel_table_text(coeffs))
    return path


def read_kernel_table(path: os.PathLike) -> KernelCoeffs:
    """Reload a coefficient table; custom weights carry no spec line and cannot be reloaded"""
    path = Path(path)
    lines = _read_text(path).splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    spec_lines = [ln for ln in comments if ln.startswith("# spec ")]
    if not spec_lines:
        raise ArchiveError("table has no weight spec line (custom weight?)", path=str(path))
    try:
        head = dict(item.split("=", 1) for item in comments[0].lstrip("#").split())
        env = _header_fields(comments[1], "envelope", path)
        weight = WeightSpec.model_validate_json(spec_lines[0][len("# spec "):])
        rows = [ln.split(",") for ln in lines if ln and not ln.startswith("#")]
        values = np.array([float(a) for _, a in rows])
        if [int(n) for n, _ in rows] != list(range(values.size)) or values.size != int(head["N"]) + 1:
            raise ArchiveError("coefficient rows are not 0..N", path=str(path))
        return KernelCoeffs(weight=weight, coeffs=values, rho_max=float(head["rho_max"]),
                            envelope_scale=float(env["scale"]), envelope_power=float(env["power"]))
    except (KeyError, ValueError, ValidationError) as e:
        raise ArchiveError(f"malformed kernel table: {e}", path=str(path)) from e


# ------------------------------------------------------------ CSV rows


def ps_row(est: PSEstimate) -> List[str]:
    """Scalar estimates fill g_f_re/g_f_im, vector-valued ones only g_f_norm"""
    g_f = est.g_f
    ratio = est.ratio
    return [
        fmt(est.seed), fmt(est.s), fmt(est.z[0].real), fmt(est.z[0].imag), est.f_kind, fmt(est.g),
        fmt(g_f.real if g_f is not None else None), fmt(g_f.imag if g_f is not None else None), fmt(est.g_f_norm),
        fmt(ratio.real if ratio is not None else None), fmt(ratio.imag if ratio is not None else None),
        fmt(est.err_abs), fmt(est.tail_bound),
    ]


def variance_row(report: VarianceReport) -> List[str]:
    fields = dict(report.meta)
    if report.n_samples is not None:
        fields["n_samples"] = report.n_samples
    meta = json.dumps(fields, sort_keys=True, default=str)
    return [report.statistic, report.method, fmt(report.value), fmt(report.err), meta]


def csv_text(kind: str, columns: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    buf.write(f"# bergman_lab {kind} v{CSV_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_ps_csv(estimates: Iterable[PSEstimate], path: os.PathLike) -> Path:
    path = Path(path)
    _write_text(path, csv_text("psestimate", PS_COLUMNS, (ps_row(e) for e in estimates)))
    logger.info(f"Wrote Patterson–Sullivan estimates to {path}")
    return path


def write_variance_csv(reports: Iterable[VarianceReport], path: os.PathLike) -> Path:
    path = Path(path)
    _write_text(path, csv_text("variance", VARIANCE_COLUMNS, (variance_row(r) for r in reports)))
    logger.info(f"Wrote variance reports to {path}")
    return path


def read_csv_rows(path: os.PathLike) -> List[Dict[str, str]]:
    """Rows of a lab CSV as dicts; the version comment is checked and dropped"""
    path = Path(path)
    text = _read_text(path)
    first, _, body = text.partition("\n")
    if not first.startswith("# bergman_lab ") or not first.endswith(f"v{CSV_VERSION}"):
        raise ArchiveError(f"unsupported CSV header {first!r}", path=str(path))
    return list(csv.DictReader(io.StringIO(body)))


# ------------------------------------------------------------ manifests


def write_manifest(manifest: RunManifest, path: os.PathLike) -> Path:
    path = Path(path)
    _write_text(path, json.dumps(manifest.model_dump(), indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(path: os.PathLike) -> RunManifest:
    path = Path(path)
    try:
        return RunManifest.model_validate_json(_read_text(path))
    except ValidationError as e:
        raise ArchiveError(f"malformed manifest: {e}", path=str(path)) from e
