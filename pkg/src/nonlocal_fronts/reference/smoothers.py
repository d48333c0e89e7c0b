"""Cut-off functions used to cap sub-solutions at a small height ``eps``.

Two smoothers are provided:

* ``cubic`` (C^1): ``g(y) = 3 (1 - y/eps + y^2/(3 eps^2)) y`` on ``[0, eps]``,
  constant ``eps`` beyond. It satisfies ``y <= g(y) <= 3y`` and
  ``g'(eps) = g''(eps) = 0``.
* ``quintic`` (C^2): identity on ``[0, eps/2]``, constant ``eps`` on
  ``[3 eps/2, 1]`` and, in between,

      g(y) = exp{1 - [(1 - ln y)^(alpha+1) + P(y)]^(1/(alpha+1))}

  where ``P`` is the quintic Hermite polynomial vanishing to second order at
  ``eps/2`` and matching ``g = eps``, ``g' = g'' = 0`` at ``3 eps/2``. The
  contract ``g <= y``, ``0 <= g' <= 1`` and
  ``g'(y) y / (1 - ln y)^alpha <= g / (1 - ln g)^alpha`` is equivalent to
  ``0 <= P' <= (alpha+1)(1 - ln y)^alpha / y``, which is verified when the
  smoother is built.
"""

from __future__ import annotations

import enum
import functools
import math

import numpy as np
from scipy.interpolate import BPoly

from ..errors import ConfigError, DomainError

__all__ = ["SmootherKind", "CubicSmoother", "QuinticSmoother", "make_smoother", "smoother_eval"]


class SmootherKind(str, enum.Enum):
    CUBIC_C1 = "cubic"
    QUINTIC_C2 = "quintic"


class CubicSmoother:
    """C^1 cubic cap ``g_eps`` (constant ``eps`` on ``[eps, 1]``)."""

    kind = SmootherKind.CUBIC_C1

    def __init__(self, eps):
        eps = float(eps)
        if not 0.0 < eps < 1.0:
            raise DomainError(f"cubic smoother needs eps in (0, 1), got {eps}")
        self.eps = eps

    def __call__(self, y, nu=0):
        y = np.asarray(y, dtype=float)
        e = self.eps
        z = np.minimum(y, e) / e
        if nu == 0:
            out = np.where(y >= e, e, 3.0 * (1.0 - z + z * z / 3.0) * np.minimum(y, e))
        elif nu == 1:
            out = np.where(y >= e, 0.0, 3.0 * (1.0 - z) ** 2)
        elif nu == 2:
            out = np.where(y >= e, 0.0, -6.0 / e * (1.0 - z))
        else:
            raise ValueError("only derivatives up to order 2 are available")
        return out if y.ndim else float(out)


class QuinticSmoother:
    """C^2 cap ``g_eps`` tailored to the degeneracy ``alpha``."""

    kind = SmootherKind.QUINTIC_C2
    _CHECK_POINTS = 4001

    def __init__(self, eps, alpha):
        eps, alpha = float(eps), float(alpha)
        if not 0.0 < eps < 2.0 / 3.0:
            raise DomainError(f"quintic smoother needs eps in (0, 2/3), got {eps}")
        if not alpha >= 0.0:
            raise DomainError(f"alpha must be non-negative, got {alpha}")
        self.eps, self.alpha = eps, alpha
        self.a, self.b = 0.5 * eps, 1.5 * eps
        k = alpha + 1.0
        lb = 1.0 - math.log(self.b)
        p_end = (1.0 - math.log(eps)) ** k - lb**k
        dp_end = k * lb**alpha / self.b
        d2p_end = -k * lb ** (alpha - 1.0) * (k - math.log(self.b)) / self.b**2
        self._P = BPoly.from_derivatives([self.a, self.b], [[0.0, 0.0, 0.0], [p_end, dp_end, d2p_end]])
        self._dP = self._P.derivative()
        self._d2P = self._P.derivative(2)
        self._check()

    def _check(self):
        y = np.linspace(self.a, self.b, self._CHECK_POINTS)
        dp = self._dP(y)
        cap = (self.alpha + 1.0) * (1.0 - np.log(y)) ** self.alpha / y
        tol = 1e-12 * cap.max()
        if dp.min() < -tol or np.max(dp - cap) > tol:
            raise ConfigError(
                f"quintic bridge violates 0 <= P' <= (alpha+1)(1-ln y)^alpha/y for eps={self.eps}, "
                f"alpha={self.alpha}; use a smaller eps")

    def _bridge(self, y, nu):
        k = self.alpha + 1.0
        ly = 1.0 - np.log(y)
        S = ly**k + self._P(y)
        G = S ** (1.0 / k)
        g = np.exp(1.0 - G)
        if nu == 0:
            return g
        dS = -k * ly**self.alpha / y + self._dP(y)
        dG = dS * G / (k * S)
        if nu == 1:
            return -g * dG
        d2S = k * ly ** (self.alpha - 1.0) * (self.alpha + ly) / y**2 + self._d2P(y)
        d2G = (d2S * G / (k * S)) + dS * (dG / (k * S) - G * dS / (k * S * S))
        return g * (dG * dG - d2G)

    def __call__(self, y, nu=0):
        if nu not in (0, 1, 2):
            raise ValueError("only derivatives up to order 2 are available")
        y = np.asarray(y, dtype=float)
        lo = y <= self.a
        hi = y >= self.b
        mid = ~(lo | hi)
        if nu == 0:
            out = np.where(lo, y, self.eps)
        elif nu == 1:
            out = np.where(lo, 1.0, 0.0)
        else:
            out = np.zeros_like(y)
        if np.any(mid):
            ym = np.where(mid, y, self.eps)
            out = np.where(mid, self._bridge(ym, nu), out)
        return out if y.ndim else float(out)


@functools.lru_cache(maxsize=128)
def make_smoother(kind, eps, alpha=1.0):
    """Build (and cache) a smoother of the given kind."""
    kind = SmootherKind(kind)
    if kind is SmootherKind.CUBIC_C1:
        return CubicSmoother(eps)
    return QuinticSmoother(eps, alpha)


def smoother_eval(kind, eps, y, alpha=1.0, nu=0):
    """Evaluate a smoother (or its ``nu``-th derivative) at ``y in [0, 1]``.

    ``alpha`` only affects the quintic smoother.
    """
    ya = np.asarray(y, dtype=float)
    if np.any((ya < 0.0) | (ya > 1.0)) or not np.all(np.isfinite(ya)):
        raise DomainError("smoother argument must lie in [0, 1]")
    return make_smoother(SmootherKind(kind), float(eps), float(alpha))(y, nu)
