"""Dispersal kernels, their quadrature cell moments and exterior tail mass.

A kernel is the symmetric jump density ``J`` of the nonlocal operator

    D[u](x) = P.V. int (u(x - y) - u(x)) J(y) dy.

Three tail families are provided (sub-exponential ``e^{1-|z|^beta}``,
algebraic ``|z|^{-(1+2s)}`` and the fractional Laplacian ``C_{1,s}|z|^{-(1+2s)}``)
together with two ways of closing the kernel on ``|z| <= 1``: the unit
second moment law ``z^2 J(z) = 1`` used in all experiments, or continuing
the tail formula down to the origin.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ConfigError, DomainError

__all__ = [
    "KernelFamily",
    "InnerLaw",
    "KernelSpec",
    "GammaRange",
    "evaluate",
    "cell_moment",
    "cell_moments",
    "tail_mass",
    "admissible_gamma",
    "fractional_constant",
    "QUAD_EPSABS",
    "QUAD_EPSREL",
]

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
# target for the neglected sub-exponential remainder beyond the cut
_TAIL_CUT_BOUND = 1e-14


class KernelFamily(str, enum.Enum):
    SUBEXPONENTIAL = "subexponential"
    ALGEBRAIC = "algebraic"
    FRACTIONAL_LAPLACIAN = "fractional_laplacian"


class InnerLaw(str, enum.Enum):
    UNIT_SECOND_MOMENT = "unit_second_moment"
    TAIL_CONTINUATION = "tail_continuation"


def fractional_constant(s):
    """Normalisation ``2^{2s} Gamma((1+2s)/2) / (sqrt(pi) Gamma(1-s))``."""
    return 2.0 ** (2 * s) * special.gamma((1 + 2 * s) / 2) / (math.sqrt(math.pi) * special.gamma(1 - s))


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of a dispersal kernel.

    Parameters
    ----------
    family : KernelFamily
        Tail law.
    exponent : float
        ``beta`` for the sub-exponential family, ``s`` otherwise.
    inner_law : InnerLaw, optional
        Closure on ``|z| <= 1``. Defaults to the unit second moment law,
        except for the fractional Laplacian which is defined on all of R.
    """

    family: KernelFamily
    exponent: float
    inner_law: InnerLaw | None = None

    def __post_init__(self):
        family = KernelFamily(self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "exponent", float(self.exponent))
        if not (self.exponent > 0 and math.isfinite(self.exponent)):
            raise ConfigError(f"kernel exponent must be positive, got {self.exponent}")
        if family is KernelFamily.FRACTIONAL_LAPLACIAN:
            if not self.exponent < 1:
                raise ConfigError(f"fractional Laplacian needs s in (0,1), got {self.exponent}")
            if self.inner_law not in (None, InnerLaw.TAIL_CONTINUATION, InnerLaw.TAIL_CONTINUATION.value):
                raise ConfigError("the fractional Laplacian kernel has no separate inner law")
            object.__setattr__(self, "inner_law", InnerLaw.TAIL_CONTINUATION)
        else:
            law = InnerLaw.UNIT_SECOND_MOMENT if self.inner_law is None else InnerLaw(self.inner_law)
            object.__setattr__(self, "inner_law", law)

    @classmethod
    def subexponential(cls, beta, inner_law=None):
        return cls(KernelFamily.SUBEXPONENTIAL, beta, inner_law)

    @classmethod
    def algebraic(cls, s, inner_law=None):
        return cls(KernelFamily.ALGEBRAIC, s, inner_law)

    @classmethod
    def fractional_laplacian(cls, s):
        return cls(KernelFamily.FRACTIONAL_LAPLACIAN, s)

    @property
    def beta(self):
        if self.family is not KernelFamily.SUBEXPONENTIAL:
            raise AttributeError("beta is only defined for the sub-exponential family")
        return self.exponent

    @property
    def s(self):
        if self.family is KernelFamily.SUBEXPONENTIAL:
            raise AttributeError("s is not defined for the sub-exponential family")
        return self.exponent

    @property
    def tail_prefactor(self):
        if self.family is KernelFamily.FRACTIONAL_LAPLACIAN:
            return fractional_constant(self.exponent)
        return 1.0

    def tail(self, z):
        """Tail formula evaluated at ``|z|`` (no inner law)."""
        a = np.abs(np.asarray(z, dtype=float))
        if self.family is KernelFamily.SUBEXPONENTIAL:
            return np.exp(1.0 - a**self.exponent)
        return self.tail_prefactor * a ** (-(1.0 + 2.0 * self.exponent))

    def to_dict(self):
        d = {"family": self.family.value, "inner_law": self.inner_law.value}
        d["beta" if self.family is KernelFamily.SUBEXPONENTIAL else "s"] = self.exponent
        return d


def evaluate(k, z):
    """Kernel value ``J(z)``; vectorised over ``z``.

    Raises
    ------
    DomainError
        If any ``z`` is zero (the kernel is singular at the origin).
    """
    za = np.asarray(z, dtype=float)
    a = np.abs(za)
    if np.any(a == 0):
        raise DomainError("kernel is singular at z = 0")
    out = k.tail(a)
    if k.inner_law is InnerLaw.UNIT_SECOND_MOMENT:
        inner = a < 1.0
        if np.any(inner):
            out = np.where(inner, 1.0 / np.where(inner, a, 1.0) ** 2, out)
    return out if za.ndim else float(out)


@dataclass(frozen=True)
class GammaRange:
    """Set of admissible splitting exponents, an interval inside [0, 2]."""

    low: float
    high: float = 2.0
    low_closed: bool = True
    high_closed: bool = True

    def __contains__(self, gamma):
        g = float(gamma)
        lo_ok = g >= self.low if self.low_closed else g > self.low
        hi_ok = g <= self.high if self.high_closed else g < self.high
        return lo_ok and hi_ok

    @property
    def empty(self):
        if self.low < self.high:
            return False
        return not (self.low == self.high and self.low_closed and self.high_closed)

    def __str__(self):
        if self.low == self.high and not self.empty:
            return "{%g}" % self.low
        return "%s%g, %g%s" % ("[" if self.low_closed else "(", self.low, self.high,
                               "]" if self.high_closed else ")")


def admissible_gamma(k):
    """Splitting exponents ``gamma`` for which ``y^gamma J(y)`` is integrable near 0."""
    if k.inner_law is InnerLaw.UNIT_SECOND_MOMENT:
        return GammaRange(2.0, 2.0)
    if k.family is KernelFamily.SUBEXPONENTIAL:
        return GammaRange(0.0, 2.0)
    return GammaRange(2.0 * k.exponent, 2.0, low_closed=False)


def check_gamma(k, gamma):
    rng = admissible_gamma(k)
    if gamma not in rng:
        if k.inner_law is InnerLaw.UNIT_SECOND_MOMENT:
            hint = "γ=2 is the only left choice with the unit second moment inner law"
        else:
            hint = f"y^gamma J(y) must be integrable near 0, i.e. gamma in {rng}"
        raise ConfigError(f"inadmissible splitting exponent gamma={gamma}: {hint}")


def _power_integral(a, b, e):
    """``int_a^b y^(e-1) dy`` for ``0 <= a < b``, accurate for narrow cells."""
    if a == 0.0:
        if e <= 0:
            return math.inf
        return b**e / e
    log_ratio = math.log1p((b - a) / a)
    if e == 0:
        return log_ratio
    return a**e * math.expm1(e * log_ratio) / e


def _quad(fun, a, b):
    val, _err = integrate.quad(fun, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
    return val


def _segment_moment(k, gamma, a, b):
    """``int_a^b y^gamma J(y) dy`` on a segment not straddling ``y = 1``."""
    inner = b <= 1.0
    if inner and k.inner_law is InnerLaw.UNIT_SECOND_MOMENT:
        return _power_integral(a, b, gamma - 1.0)
    if k.family is KernelFamily.SUBEXPONENTIAL:
        beta = k.exponent
        return _quad(lambda y: y**gamma * math.exp(1.0 - y**beta), a, b)
    return k.tail_prefactor * _power_integral(a, b, gamma - 2.0 * k.exponent)


def _cell_value(k, gamma, a, b):
    if a < 1.0 < b:
        return _segment_moment(k, gamma, a, 1.0) + _segment_moment(k, gamma, 1.0, b)
    return _segment_moment(k, gamma, a, b)


def _grid_dx(grid):
    return float(grid.dx) if hasattr(grid, "dx") else float(grid)


def cell_moment(k, gamma, grid, n):
    """Cell moment ``int_{y_{n-1}}^{y_n} y^gamma J(y) dy`` with ``y_n = n dx``.

    ``grid`` is a :class:`~nonlocal_fronts.discretization.Grid` or a bare ``dx``.
    """
    check_gamma(k, gamma)
    if n < 1:
        raise DomainError(f"cell index must be >= 1, got {n}")
    dx = _grid_dx(grid)
    return _cell_value(k, float(gamma), (n - 1) * dx, n * dx)


@functools.lru_cache(maxsize=64)
def _cell_moments_cached(k, gamma, dx, N):
    out = np.empty(N)
    for n in range(1, N + 1):
        out[n - 1] = _cell_value(k, gamma, (n - 1) * dx, n * dx)
    out.setflags(write=False)
    return out


def cell_moments(k, gamma, grid, N=None):
    """All cell moments ``[Delta_1, ..., Delta_N]`` as a read-only array."""
    check_gamma(k, gamma)
    dx = _grid_dx(grid)
    if N is None:
        N = int(grid.N)
    return _cell_moments_cached(k, float(gamma), dx, int(N))


def _subexp_cut(beta, L):
    """Upper limit past which ``e * int e^{-y^beta} dy`` is below the target."""
    # the remainder bound (2/beta) Y^(1-beta) e^(-Y^beta) holds once Y^beta >= 2(1/beta - 1)
    y = max(L, (2.0 * max(1.0 / beta - 1.0, 0.0)) ** (1.0 / beta), 1.0)

    def bound(Y):
        return math.e * (2.0 / beta) * Y ** (1.0 - beta) * math.exp(-(Y**beta))

    while bound(y) >= _TAIL_CUT_BOUND:
        y *= 1.25
    return y


def tail_mass(k, L):
    """Exterior mass ``int_L^inf J(y) dy`` for ``L >= 1``."""
    L = float(L)
    if not L >= 1.0:
        raise ConfigError(f"tail mass needs L >= 1 (tail formula only), got {L}")
    if k.family is KernelFamily.SUBEXPONENTIAL:
        beta = k.exponent
        cut = _subexp_cut(beta, L)
        if cut <= L:
            return 0.0
        val, _err = integrate.quad(lambda y: math.exp(1.0 - y**beta), L, cut,
                                   epsabs=1e-15, epsrel=QUAD_EPSREL, limit=500)
        return val
    s = k.exponent
    return k.tail_prefactor / (2.0 * s * L ** (2.0 * s))
