"""
Configuration: environment settings and flat key-value experiment files
"""

import hashlib
import logging
import os
from pathlib import Path
from typing import List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ArchiveError, ArgumentError

logger = logging.getLogger(__name__)

DEFAULT_OUT_DIR = "runs"


class LabSettings(BaseModel):
    out_dir: str = DEFAULT_OUT_DIR
    log_level: str = "INFO"


def get_lab_settings() -> LabSettings:
    """Get lab settings from environment variables"""
    load_dotenv()
    return LabSettings(
        out_dir=os.getenv("BERGMAN_LAB_OUT", DEFAULT_OUT_DIR),
        log_level=os.getenv("BERGMAN_LAB_LOG_LEVEL", "INFO").upper(),
    )


class ExperimentConfig(BaseModel):
    """One experiment run; every field has a key in the flat config file"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: str
    dimension: int = Field(default=1, ge=1)
    s_grid: List[float] = Field(default_factory=list)
    z_grid: List[complex] = Field(default_factory=lambda: [0j])
    functions: List[str] = Field(default_factory=lambda: ["constant"])
    generator: Literal["gaf", "hkpv"] = "gaf"
    window_radius: float = Field(default=3.0, gt=0.0)
    tail_epsilon: float = Field(default=1e-6, gt=0.0, le=1e-3)
    max_degree: int = Field(default=1 << 16, ge=16)
    degree_cutoff: Optional[int] = None
    n_configurations: int = Field(default=100, ge=1)
    seed_base: int = 0
    output_dir: Optional[str] = None
    threads: int = Field(default=1, ge=1)

    @field_validator("z_grid")
    @classmethod
    def z_inside_disk(cls, zs: List[complex]) -> List[complex]:
        for z in zs:
            if abs(z) >= 1.0:
                raise ValueError(f"z={z!r} is not inside the unit disk")
        return zs

    @model_validator(mode="after")
    def s_grid_above_critical(self) -> "ExperimentConfig":
        d = self.dimension
        for s in self.s_grid:
            if not (d < s <= d + 1):
                raise ValueError(f"s={s!r} outside ({d}, {d + 1}]")
        return self

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON dump"""
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()


_LIST_KEYS = {"s_grid", "z_grid", "functions"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _LIST_KEYS:
        items = [item.strip() for item in raw.split(",") if item.strip()]
        if key == "z_grid":
            try:
                return [complex(item.replace(" ", "")) for item in items]
            except ValueError as e:
                raise ArgumentError(f"bad complex literal in z_grid: {raw!r}") from e
        return items
    if raw.lower() in ("none", ""):
        return None
    return raw


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse flat `key = value` lines into an ExperimentConfig"""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ArgumentError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip()
        if key not in ExperimentConfig.model_fields:
            raise ArgumentError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ArgumentError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw)
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        raise ArgumentError(f"invalid experiment config: {e}") from e


def load_config(path: str) -> ExperimentConfig:
    """Read and validate a config file"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ArchiveError(f"cannot read config: {e.strerror}", path=str(path)) from e
    config = parse_config_text(text)
    logger.info(f"Loaded config {path} for experiment '{config.experiment}'")
    return config


def dump_config_text(config: ExperimentConfig) -> str:
    """Inverse of parse_config_text for the keys that are set"""
    lines = []
    for key, value in config.model_dump().items():
        if value is None:
            continue
        if isinstance(value, list):
            value = ",".join(repr(v) if isinstance(v, complex) else str(v) for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
