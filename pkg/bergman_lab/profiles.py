"""
Radial profiles r ↦ Φ(r) on [0, 1).

One class serves both the interpolation profiles R(x) = Φ(|x|) and the Bergman
weights W. Profiles declared by a hyperbolic radius have compact support
tanh(radius/2); the variance and kernel code mostly evaluate them through
ε = 1 − r², which keeps the boundary region resolvable in floating point.
"""

import math
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import ArgumentError

PROFILE_KINDS = (
    "indicator", "bump", "poincare", "power", "critical", "log_supercritical", "constant", "custom",
)


def exp_neg_distance(eps: np.ndarray) -> np.ndarray:
    """e^{−d_B(x,o)} = (1−r)/(1+r) as a function of ε = 1 − r²"""
    eps = np.asarray(eps, dtype=float)
    return eps / (1.0 + np.sqrt(1.0 - eps)) ** 2


def distance_from_eps(eps: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return -np.log(exp_neg_distance(eps))


class RadialProfile(BaseModel):
    """A nonnegative radial function with a declared support bound"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: str
    radius: Optional[float] = Field(default=None, gt=0.0)
    s: Optional[float] = None
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    value: float = 1.0
    func: Optional[Callable] = None
    custom_support: float = 1.0
    label: Optional[str] = None

    # constructors

    @classmethod
    def indicator(cls, radius: float) -> "RadialProfile":
        return cls(kind="indicator", radius=radius)

    @classmethod
    def bump(cls, radius: float) -> "RadialProfile":
        return cls(kind="bump", radius=radius)

    @classmethod
    def poincare(cls, s: float, radius: Optional[float] = None) -> "RadialProfile":
        return cls(kind="poincare", s=s, radius=radius)

    @classmethod
    def power(cls, alpha: float) -> "RadialProfile":
        return cls(kind="power", alpha=alpha)

    @classmethod
    def critical(cls) -> "RadialProfile":
        return cls(kind="critical")

    @classmethod
    def log_supercritical(cls, gamma: float) -> "RadialProfile":
        return cls(kind="log_supercritical", gamma=gamma)

    @classmethod
    def constant(cls, value: float = 1.0) -> "RadialProfile":
        return cls(kind="constant", value=value)

    @classmethod
    def custom(cls, func: Callable, support_bound: float = 1.0, label: str = "custom") -> "RadialProfile":
        if not 0.0 < support_bound <= 1.0:
            raise ArgumentError(f"support bound must lie in (0, 1], got {support_bound!r}")
        return cls(kind="custom", func=func, custom_support=support_bound, label=label)

    def model_post_init(self, __context) -> None:
        if self.kind not in PROFILE_KINDS:
            raise ArgumentError(f"unknown profile kind {self.kind!r}")
        if self.kind in ("indicator", "bump") and self.radius is None:
            raise ArgumentError(f"{self.kind} profile needs a hyperbolic radius")
        if self.kind == "poincare" and (self.s is None or self.s <= 0):
            raise ArgumentError("poincare profile needs s > 0")
        if self.kind == "power" and (self.alpha is None or self.alpha <= -1):
            raise ArgumentError("power profile needs alpha > -1")

    # geometry of the support

    @property
    def support_bound(self) -> float:
        """Smallest ρ with Φ ≡ 0 on (ρ, 1), or 1 for full support"""
        if self.kind in ("indicator", "bump") or (self.kind == "poincare" and self.radius is not None):
            return math.tanh(0.5 * self.radius)
        if self.kind == "custom":
            return self.custom_support
        return 1.0

    @property
    def is_compact(self) -> bool:
        return self.support_bound < 1.0

    @property
    def eps_support(self) -> float:
        """ε = 1 − ρ² at the support bound (0 for full support)"""
        rho = self.support_bound
        return (1.0 - rho) * (1.0 + rho)

    def eps_breakpoints(self) -> List[float]:
        """ε values where the profile is not smooth"""
        return [self.eps_support] if self.is_compact else []

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        params = [f"{k}={v:g}" for k, v in (("r", self.radius), ("s", self.s), ("a", self.alpha), ("g", self.gamma))
                  if v is not None]
        return self.kind + ("(" + ",".join(params) + ")" if params else "")

    # evaluation

    def evaluate(self, r) -> np.ndarray:
        """Φ at Euclidean radius r"""
        r = np.asarray(r, dtype=float)
        if self.kind == "custom":
            return np.asarray(self.func(r), dtype=float)
        return self.evaluate_eps((1.0 - r) * (1.0 + r))

    def evaluate_eps(self, eps) -> np.ndarray:
        """Φ at the radius with 1 − r² = ε"""
        eps = np.asarray(eps, dtype=float)
        kind = self.kind
        if kind == "custom":
            return np.asarray(self.func(np.sqrt(np.clip(1.0 - eps, 0.0, 1.0))), dtype=float)
        if kind == "constant":
            return np.full_like(eps, self.value)
        if kind == "power":
            return eps ** self.alpha
        if kind == "critical":
            return 1.0 / (eps * np.log(4.0 / eps) ** 2)
        if kind == "log_supercritical":
            return np.log(4.0 / eps) ** (self.gamma - 2.0) / eps
        inside = eps > self.eps_support if self.is_compact else np.ones(eps.shape, dtype=bool)
        if kind == "indicator":
            return np.where(inside, 1.0, 0.0)
        if kind == "bump":
            u = distance_from_eps(eps) / self.radius
            return np.where(inside, np.clip(1.0 - u * u, 0.0, None) ** 3, 0.0)
        # poincare
        return np.where(inside, exp_neg_distance(eps) ** self.s, 0.0)

    def of_distance(self, dist) -> np.ndarray:
        """Φ as a function of the hyperbolic distance to the centre"""
        return self.evaluate(np.tanh(0.5 * np.asarray(dist, dtype=float)))
