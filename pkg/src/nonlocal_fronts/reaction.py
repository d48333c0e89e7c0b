"""Monostable reaction terms.

The weakly degenerate family ``r u (1-u) / (1 - ln u)^alpha`` sits between the
Fisher-KPP logistic term and the weak Allee term ``r u^(alpha+1) (1-u)``; both
comparison families are provided.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

__all__ = ["ReactionFamily", "ReactionSpec", "evaluate", "max_slope_estimate"]


class ReactionFamily(str, enum.Enum):
    WEAKLY_DEGENERATE = "weakly_degenerate"
    KPP = "kpp"
    ALLEE = "allee"


@dataclass(frozen=True)
class ReactionSpec:
    family: ReactionFamily
    r: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", ReactionFamily(self.family))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.r < 0 or not np.isfinite(self.r):
            raise ConfigError(f"reaction rate r must be >= 0, got {self.r}")
        if self.family is not ReactionFamily.KPP and not self.alpha > 0:
            raise ConfigError(f"alpha must be positive for {self.family.value}, got {self.alpha}")

    @classmethod
    def weakly_degenerate(cls, r=1.0, alpha=1.0):
        return cls(ReactionFamily.WEAKLY_DEGENERATE, r, alpha)

    @classmethod
    def kpp(cls, r=1.0):
        return cls(ReactionFamily.KPP, r, 0.0)

    @classmethod
    def allee(cls, r=1.0, alpha=1.0):
        return cls(ReactionFamily.ALLEE, r, alpha)

    def to_dict(self):
        d = {"family": self.family.value, "r": self.r}
        if self.family is not ReactionFamily.KPP:
            d["alpha"] = self.alpha
        return d


def evaluate(spec, u):
    """Reaction ``f(u)``, vectorised.

    Inputs are clamped to ``[0, 1]`` first so that small overshoots of the
    scheme never reach ``ln`` of a negative number; ``f(0) = 0`` exactly.
    """
    ua = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(ua)):
        raise DomainError("reaction evaluated at a non-finite value")
    v = np.clip(ua, 0.0, 1.0)
    if spec.family is ReactionFamily.KPP:
        out = spec.r * v * (1.0 - v)
    elif spec.family is ReactionFamily.ALLEE:
        out = spec.r * v ** (spec.alpha + 1.0) * (1.0 - v)
    else:
        pos = v > 0
        safe = np.where(pos, v, 1.0)
        out = np.where(pos, spec.r * safe * (1.0 - safe) / (1.0 - np.log(safe)) ** spec.alpha, 0.0)
    return out if ua.ndim else float(out)


def max_slope_estimate(spec, samples=10_000):
    """Upper estimate of ``sup |f'|`` on [0, 1] from central differences.

    Used only to warn about explicit-step accuracy, so a sampled bound is enough.
    """
    u = np.linspace(0.0, 1.0, samples)
    h = 0.5 / samples
    lo = np.clip(u - h, 0.0, 1.0)
    hi = np.clip(u + h, 0.0, 1.0)
    slope = np.abs(evaluate(spec, hi) - evaluate(spec, lo)) / (hi - lo)
    return float(slope.max())
