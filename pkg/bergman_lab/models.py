"""
Typed records shared across the lab
"""

from functools import cached_property
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import ArgumentError, DomainError

BOUNDARY_TOLERANCE = 1e-12
MIN_POINT_SEPARATION = 1e-12


class Point(BaseModel):
    """A point of the open unit ball in C^d"""
    model_config = ConfigDict(frozen=True)

    coords: List[complex]

    @field_validator("coords")
    @classmethod
    def inside_ball(cls, coords: List[complex]) -> List[complex]:
        if not coords:
            raise ValueError("a point needs at least one coordinate")
        if sum(abs(c) ** 2 for c in coords) >= 1.0:
            raise ValueError("point must lie strictly inside the unit ball")
        return coords

    @property
    def dimension(self) -> int:
        return len(self.coords)

    @classmethod
    def origin(cls, d: int) -> "Point":
        return cls(coords=[0j] * d)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=complex)


class BoundaryPoint(BaseModel):
    """A point of the unit sphere S_d (the circle T when d = 1)"""
    model_config = ConfigDict(frozen=True)

    coords: List[complex]

    @field_validator("coords")
    @classmethod
    def on_sphere(cls, coords: List[complex]) -> List[complex]:
        norm = sum(abs(c) ** 2 for c in coords) ** 0.5
        if abs(norm - 1.0) > BOUNDARY_TOLERANCE:
            raise ValueError(f"boundary point has norm {norm!r}, expected 1")
        return coords

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=complex)


class BallRegion(BaseModel):
    """Hyperbolic ball B(center, radius); annuli are differences of two regions"""
    model_config = ConfigDict(frozen=True)

    center: Point
    hyperbolic_radius: float = Field(ge=0.0)

    @field_validator("hyperbolic_radius")
    @classmethod
    def finite_radius(cls, r: float) -> float:
        if not np.isfinite(r):
            raise ValueError("radius must be finite")
        return r


PointLike = Union[Point, BoundaryPoint, complex, float, Sequence[complex], np.ndarray]


def as_coords(p: PointLike) -> np.ndarray:
    """Coerce a point-like value into a 1-D complex coordinate array"""
    if isinstance(p, (Point, BoundaryPoint)):
        return p.as_array()
    arr = np.atleast_1d(np.asarray(p, dtype=complex))
    if arr.ndim != 1:
        raise ArgumentError(f"expected a single point, got array of shape {arr.shape}")
    return arr


def ensure_inside(arr: np.ndarray, name: str = "point") -> np.ndarray:
    """Raise DomainError unless every row of arr lies strictly inside the ball"""
    sq = np.sum(np.abs(arr) ** 2, axis=-1)
    if np.any(sq >= 1.0) or not np.all(np.isfinite(sq)):
        raise DomainError(f"{name} must lie strictly inside the unit ball (|{name}|^2 = {np.max(sq)!r})")
    return arr


GeneratorName = Literal["gaf", "hkpv"]


class GafSpec(BaseModel):
    """Truncated Gaussian analytic function sampler settings (d = 1)"""
    model_config = ConfigDict(frozen=True)

    window_radius: float = Field(gt=0.0)
    tail_epsilon: float = Field(default=1e-6, gt=0.0, le=1e-3)
    max_degree: int = Field(default=1 << 16, ge=16)
    max_attempts: int = Field(default=8, ge=1)


class HkpvSpec(BaseModel):
    """Sequential projection-DPP sampler settings"""
    model_config = ConfigDict(frozen=True)

    dimension: int = Field(default=1, ge=1)
    degree_cutoff: Optional[int] = Field(default=None, ge=0)
    window_radius: float = Field(gt=0.0)


class Configuration(BaseModel):
    """A finite sample of the process restricted to the window B(o, window_radius)"""
    model_config = ConfigDict(frozen=True)

    points: List[List[complex]]
    dimension: int = Field(ge=1)
    window_radius: float
    seed: int
    generator: GeneratorName
    truncation_meta: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def consistent_points(self) -> "Configuration":
        for p in self.points:
            if len(p) != self.dimension:
                raise ValueError(f"point {p!r} does not have dimension {self.dimension}")
        if len(self.points) > 1:
            pts = np.asarray(self.points, dtype=complex)
            gaps = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
            np.fill_diagonal(gaps, np.inf)
            if gaps.min() <= MIN_POINT_SEPARATION:
                raise ValueError("configuration points must be simple (pairwise distinct)")
        return self

    @cached_property
    def array(self) -> np.ndarray:
        """Points as an (n, d) complex array"""
        if not self.points:
            return np.zeros((0, self.dimension), dtype=complex)
        return np.asarray(self.points, dtype=complex).reshape(len(self.points), self.dimension)

    def __len__(self) -> int:
        return len(self.points)


class PSEstimate(BaseModel):
    """Patterson–Sullivan estimate bundle at (s, z)"""
    model_config = ConfigDict(frozen=True)

    s: float
    z: List[complex]
    f_kind: str
    seed: Optional[int] = None
    g: float
    g_f: Optional[complex] = None
    g_f_norm: Optional[float] = None
    ratio: Optional[complex] = None
    normalized: Optional[complex] = None
    annular: List[complex] = Field(default_factory=list)
    k_max: int = 0
    tail_bound: float = 0.0
    err_abs: Optional[float] = None
    record: Optional[Any] = Field(default=None, exclude=True)


class VarianceReport(BaseModel):
    """A variance value with provenance"""
    model_config = ConfigDict(frozen=True)

    statistic: str
    method: Literal["mc", "quadrature", "closed_form"]
    value: float
    quadrature_error: Optional[float] = None
    n_samples: Optional[int] = None
    standard_error: Optional[float] = None
    meta: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("value")
    @classmethod
    def nonnegative(cls, v: float) -> float:
        # round-off can push a vanishing variance a hair below zero
        if v < 0.0:
            if v > -1e-12:
                return 0.0
            raise ValueError(f"variance must be nonnegative, got {v!r}")
        return v

    @property
    def err(self) -> Optional[float]:
        return self.quadrature_error if self.method != "mc" else self.standard_error


class CriterionResult(BaseModel):
    """Verdict of one acceptance criterion"""
    id: int
    name: str
    status: Literal["pass", "fail", "incomplete"]
    measured: Dict[str, Any] = Field(default_factory=dict)
    required: Dict[str, Any] = Field(default_factory=dict)
    seconds: Optional[float] = None


class RunManifest(BaseModel):
    """What a CLI run produced, keyed by experiment"""
    config_hash: str
    code_version: str
    outputs: Dict[str, List[str]] = Field(default_factory=dict)
    stage_seconds: Dict[str, float] = Field(default_factory=dict)
