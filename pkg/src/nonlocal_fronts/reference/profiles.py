"""Analytic sub- and super-solution profiles and their level positions.

Every profile exposes ``value(t, x)`` (``None`` where its defining bracket is
negative), ``dx(t, x)``, ``dxx(t, x)``, ``dt(t, x)``, ``breakpoints(t)`` and
``level_position(t, lam)``. Composite profiles (capped at 1 or smoothed at
``eps``) wrap a base profile.

Families
--------
``TWProfileConfig``
    Time-independent travelling-wave super-solution ``1 - e^x`` on
    ``x <= -1``, ``C_L x^p e^{-x^beta}`` on ``x >= L`` and, in between, a
    bridge whose slope is a monotone C^1 cubic Hermite spline (so the
    profile is C^2 and decreasing).
``AlgProfileConfig``
    ``w(t, x) = exp{1 - [(1 - ln v0)^(alpha+1) - rho (alpha+1) t]^(1/(alpha+1))}``
    with the super-solution datum ``C_L x^p e^{-x^beta}`` or the sub-solution
    datum ``e^{-x^beta}``.
``ExpProfileConfig``
    ``psi`` (super-solution with a ``(1 + kappa t^p)`` amplification of
    ``C_L ln^q x / x^{2s}``) and ``phi`` (sub-solution with delay ``h(t, x)``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicHermiteSpline

from ..errors import BracketError, ConfigError, DomainError
from .smoothers import SmootherKind, make_smoother

__all__ = [
    "Variant",
    "TWProfileConfig",
    "AlgProfileConfig",
    "ExpProfileConfig",
    "CappedProfile",
    "SmoothedProfile",
    "eval_profile",
    "level_position",
    "kappa0",
    "composite",
]

_XTOL = 1e-12
_RTOL = 4.0 * np.finfo(float).eps
_MAX_EXPANSIONS = 400


class Variant(str, enum.Enum):
    SUPER = "super"
    SUB = "sub"


def _check_finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            raise DomainError(f"non-finite argument {v}")


def _expand_upper(fun, lo, target_sign=-1.0, factor=2.0):
    """Grow ``hi`` from ``lo`` until ``sign(fun(hi)) == target_sign``."""
    hi = max(lo * factor, lo + 1.0)
    for _ in range(_MAX_EXPANSIONS):
        v = fun(hi)
        if v is not None and np.sign(v) == target_sign:
            return hi
        hi = hi * factor
        if not math.isfinite(hi):
            break
    raise BracketError("could not bracket the level position: the profile never attains the level")


def _brent(fun, lo, hi):
    return optimize.brentq(fun, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=500)


# ---------------------------------------------------------------------------
# travelling-wave super-solution
# ---------------------------------------------------------------------------


def _tw_convexity_start(beta, p):
    """Smallest ``x`` beyond which ``C_L x^p e^{-x^beta}`` is convex."""
    # w'' / (...) = p(p-1) u^2 - beta(2p+beta-1) u + beta^2 with u = x^-beta
    a, b, c = p * (p - 1.0), -beta * (2.0 * p + beta - 1.0), beta * beta
    if abs(a) < 1e-15:
        roots = [] if b == 0 else [-c / b]
    else:
        disc = b * b - 4 * a * c
        roots = [] if disc < 0 else [(-b - math.sqrt(disc)) / (2 * a), (-b + math.sqrt(disc)) / (2 * a)]
    # the quadratic is positive at u = 0; the first positive root bounds u
    pos = sorted(r for r in roots if r > 0)
    if not pos:
        return 1.0
    return pos[0] ** (-1.0 / beta)


class _SlopeBridge:
    """Strictly decreasing C^2 bridge between two value/slope/curvature triples.

    The negative slope ``g = -w'`` is a C^1 cubic Hermite spline: it leaves the
    left end data over a transition of width ``delta``, stays at a constant
    level ``g_m`` and joins the right end data over another ``delta``.
    ``g_m`` is fixed by the drop in value, so ``w = w_a - int g``.
    """

    def __init__(self, a, b, left, right, delta=None):
        delta = min(0.5, 0.25 * (b - a)) if delta is None else float(delta)
        ga, dga = -left[1], -left[2]
        gb, dgb = -right[1], -right[2]
        drop = left[0] - right[0]
        if not (ga > 0 and gb > 0 and drop > 0):
            raise ConfigError("bridge end data must be strictly decreasing")
        # integral of a cubic Hermite piece: h (y0 + y1) / 2 + h^2 (d0 - d1) / 12
        fixed = delta * (ga + gb) / 2 + delta**2 * (dga - dgb) / 12
        g_m = (drop - fixed) / (b - a - delta)
        knots = [a, a + delta, b - delta, b]
        spline = CubicHermiteSpline(knots, [ga, g_m, g_m, gb], [dga, 0.0, 0.0, dgb])
        xs = np.linspace(a, b, 4001)
        if not g_m > 0 or np.min(spline(xs)) <= 0:
            raise ConfigError(f"no decreasing bridge on ({a:g}, {b:g}) with these end conditions; choose another L")
        self.a, self.w_a, self.g_m = a, left[0], g_m
        self.knots = knots
        self._g = spline
        self._G = spline.antiderivative()

    def __call__(self, x, nu=0):
        if nu == 0:
            return self.w_a - float(self._G(x))
        return -float(self._g(x, nu - 1))


@dataclass(frozen=True)
class TWProfileConfig:
    """Travelling-wave super-solution.

    Parameters
    ----------
    beta : float in (0, 1)
    p : float, default ``2 - 2 beta``
        Must satisfy ``p >= 2 - 2 beta``.
    L : float, optional
        Start of the tail; must exceed ``max{1, (p/beta)^(1/beta)}``. The
        default also puts ``L`` past the convexity point of the tail.
    """

    beta: float
    p: float | None = None
    L: float | None = None
    C_L: float = field(init=False)

    def __post_init__(self):
        beta = float(self.beta)
        if not 0.0 < beta < 1.0:
            raise ConfigError(f"travelling-wave profile needs beta in (0, 1), got {beta}")
        p = 2.0 - 2.0 * beta if self.p is None else float(self.p)
        if p < 2.0 - 2.0 * beta - 1e-12:
            raise ConfigError(f"travelling-wave profile needs p >= 2 - 2 beta = {2 - 2 * beta:g}, got {p}")
        L0 = max(1.0, (p / beta) ** (1.0 / beta))
        if self.L is None:
            L = math.ceil(max(L0, _tw_convexity_start(beta, p))) + 1.0
        else:
            L = float(self.L)
        if not L > L0:
            raise ConfigError(f"L must exceed max(1, (p/beta)^(1/beta)) = {L0:g}, got {L}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "C_L", 0.5 * (1.0 - math.exp(-1.0)) * L ** (-p) * math.exp(L**beta))
        object.__setattr__(self, "_bridge", _SlopeBridge(-1.0, L, [1.0 - math.exp(-1.0), -math.exp(-1.0),
                                                                 -math.exp(-1.0)],
                                                          [self._tail(L, k) for k in range(3)]))

    def _tail(self, x, nu=0):
        b, p, C = self.beta, self.p, self.C_L
        e = C * math.exp(-(x**b))
        if nu == 0:
            return e * x**p
        if nu == 1:
            return e * (p * x ** (-b) - b) * x ** (p + b - 1.0)
        return e * (p * (p - 1.0) * x ** (-2 * b) - b * (2 * p + b - 1.0) * x ** (-b) + b * b) * x ** (p + 2 * b - 2.0)

    def _eval(self, x, nu):
        _check_finite(x)
        if x <= -1.0:
            return 1.0 - math.exp(x) if nu == 0 else -math.exp(x)
        if x >= self.L:
            return self._tail(x, nu)
        return self._bridge(x, nu)

    def value(self, t, x):
        return self._eval(float(x), 0)

    def dx(self, t, x):
        return self._eval(float(x), 1)

    def dxx(self, t, x):
        return self._eval(float(x), 2)

    def dt(self, t, x):
        return 0.0

    def breakpoints(self, t=0.0):
        return list(self._bridge.knots)

    def level_position(self, t, lam):
        lam = float(lam)
        if not 0.0 < lam < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {lam}")
        if lam >= 1.0 - math.exp(-1.0):
            return math.log(1.0 - lam)
        hi = _expand_upper(lambda x: self.value(0, x) - lam, self.L)
        return _brent(lambda x: self.value(0, x) - lam, -1.0, hi)


# ---------------------------------------------------------------------------
# algebraic-regime profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgProfileConfig:
    """Profiles of the algebraic acceleration regime.

    ``variant="super"`` uses ``v0 = C_L x^p e^{-x^beta}`` on ``[L, inf)``
    (``v0 = 1`` before), ``C_L = L^{-p} e^{L^beta}``; defaults
    ``p = 2/(1 - beta - alpha beta) + alpha beta`` and ``rho = 10 r``.
    ``variant="sub"`` uses ``v0 = e^{-x^beta}`` on ``[0, inf)``; default
    ``rho = r`` and cap height ``epsilon = 0.1``.
    """

    variant: Variant
    alpha: float
    beta: float
    r: float = 1.0
    rho: float | None = None
    p: float | None = None
    L: float | None = None
    epsilon: float | None = None
    C_L: float = field(init=False, default=0.0)

    def __post_init__(self):
        variant = Variant(self.variant)
        alpha, beta, r = float(self.alpha), float(self.beta), float(self.r)
        problems = []
        if not alpha > 0:
            problems.append(f"alpha must be positive, got {alpha}")
        if not 0.0 < beta < 1.0:
            problems.append(f"beta must lie in (0, 1), got {beta}")
        if not r > 0:
            problems.append(f"r must be positive, got {r}")
        if problems:
            raise ConfigError("; ".join(problems), problems)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "r", r)
        if variant is Variant.SUPER:
            rho = 10.0 * r if self.rho is None else float(self.rho)
            if rho < r:
                raise ConfigError(f"super-solution needs rho >= r, got rho={rho}, r={r}")
            if self.p is None:
                if beta * (alpha + 1.0) >= 1.0:
                    raise ConfigError("default p needs beta (alpha + 1) < 1; pass p explicitly")
                p = 2.0 / (1.0 - beta - alpha * beta) + alpha * beta
            else:
                p = float(self.p)
            if not p > 0:
                raise ConfigError(f"p must be positive, got {p}")
            L0 = max((p / beta) ** (1.0 / beta), 1.0)
            L = L0 if self.L is None else float(self.L)
            if L < L0:
                raise ConfigError(f"L must be at least max((p/beta)^(1/beta), 1) = {L0:g}, got {L}")
            object.__setattr__(self, "p", p)
            object.__setattr__(self, "L", L)
            object.__setattr__(self, "C_L", L ** (-p) * math.exp(L**beta))
        else:
            rho = r if self.rho is None else float(self.rho)
            if not rho > 0:
                raise ConfigError(f"rho must be positive, got {rho}")
            eps = 0.1 if self.epsilon is None else float(self.epsilon)
            if not 0.0 < eps < math.exp(-1.0):
                raise ConfigError(f"epsilon must lie in (0, 1/e), got {eps}")
            object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "rho", rho)

    @property
    def t_star(self):
        return 1.0 / (self.r * (self.alpha + 1.0))

    # -- initial datum ------------------------------------------------------
    def log_v0(self, x):
        """``ln v0(x)`` (0 on the plateau)."""
        if self.variant is Variant.SUPER:
            if x < self.L:
                return 0.0
            return math.log(self.C_L) + self.p * math.log(x) - x**self.beta
        return 0.0 if x < 0 else -(x**self.beta)

    def _dlog_v0(self, x, nu):
        b = self.beta
        if self.variant is Variant.SUPER:
            if x < self.L:
                return 0.0
            if nu == 1:
                return self.p / x - b * x ** (b - 1.0)
            return -self.p / x**2 - b * (b - 1.0) * x ** (b - 2.0)
        if x <= 0:
            return 0.0
        return -b * x ** (b - 1.0) if nu == 1 else -b * (b - 1.0) * x ** (b - 2.0)

    def v0_inverse(self, y):
        """Inverse of the datum on its decreasing part."""
        y = float(y)
        if not 0.0 < y <= 1.0:
            raise DomainError(f"v0^-1 needs y in (0, 1], got {y}")
        return self.log_v0_inverse(math.log(y))

    def log_v0_inverse(self, ly):
        """``v0^-1(e^ly)``; avoids underflow of ``y`` at large times."""
        ly = float(ly)
        if not ly <= 0.0:
            raise DomainError(f"ln y must be non-positive, got {ly}")
        if self.variant is Variant.SUB:
            return (-ly) ** (1.0 / self.beta)
        if ly == 0.0:
            return self.L
        fun = lambda x: self.log_v0(x) - ly  # noqa: E731
        hi = _expand_upper(fun, self.L)
        return _brent(fun, self.L, hi)

    # -- w ------------------------------------------------------------------
    def _bracket(self, t, x):
        k = self.alpha + 1.0
        return (1.0 - self.log_v0(x)) ** k - self.rho * k * t

    def value(self, t, x):
        _check_finite(t, x)
        B = self._bracket(t, x)
        if B < 0:
            return None
        return math.exp(1.0 - B ** (1.0 / (self.alpha + 1.0)))

    def dt(self, t, x):
        w = self.value(t, x)
        if w is None:
            return None
        return self.rho * w / (1.0 - math.log(w)) ** self.alpha

    def dx(self, t, x):
        # w_x = -w / (1 - ln w)^alpha * phi0' (1 + phi0)^alpha with phi0 = -ln v0
        w = self.value(t, x)
        if w is None:
            return None
        phi0 = -self.log_v0(x)
        return w / (1.0 - math.log(w)) ** self.alpha * self._dlog_v0(x, 1) * (1.0 + phi0) ** self.alpha

    def dxx(self, t, x):
        w = self.value(t, x)
        if w is None:
            return None
        a = self.alpha
        phi0 = -self.log_v0(x)
        d1, d2 = -self._dlog_v0(x, 1), -self._dlog_v0(x, 2)
        G = 1.0 - math.log(w)
        return w / G**a * (d1 * d1 * (1.0 + phi0) ** (2 * a) * (G ** (-a) + a * G ** (-a - 1.0)
                                                              - a * (1.0 + phi0) ** (-a - 1.0))
                           - d2 * (1.0 + phi0) ** a)

    def breakpoints(self, t):
        return [self.L] if self.variant is Variant.SUPER else [0.0]

    def upper_bound(self, t, x):
        """Sub-solution bound ``e^{-x^beta + [rho (alpha+1) t]^{1/(alpha+1)}}``."""
        k = self.alpha + 1.0
        return math.exp(-(x**self.beta) + (self.rho * k * t) ** (1.0 / k))

    # -- level sets ---------------------------------------------------------
    def level_position(self, t, lam, method="auto"):
        """Position where ``w(t, .) = lam``.

        The sub-solution has a closed form (``method="closed"``); bisection
        (``method="bisect"``) works for both variants.
        """
        _check_finite(t, lam)
        k = self.alpha + 1.0
        if self.variant is Variant.SUPER:
            if not 0.0 < lam <= 2.0:
                raise DomainError(f"level must lie in (0, 2], got {lam}")
            if t < self.t_star:
                raise DomainError(f"level positions of the super-solution need t >= t* = {self.t_star:g}")
            ly = 1.0 - (self.rho * k * t + (1.0 - math.log(lam)) ** k) ** (1.0 / k)
            if method == "closed":
                raise DomainError("no closed form for the super-solution level position")
            return self.log_v0_inverse(ly)
        if not 0.0 < lam < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {lam}")
        if t < 0:
            raise DomainError("t must be non-negative")
        if method in ("auto", "closed"):
            inner = -1.0 + ((1.0 - math.log(lam)) ** k + self.rho * k * t) ** (1.0 / k)
            return inner ** (1.0 / self.beta)
        if method != "bisect":
            raise ValueError(f"unknown method {method!r}")
        # w is defined and >= e > lam where the bracket vanishes
        lo = max(0.0, (self.rho * k * t) ** (1.0 / k) - 1.0) ** (1.0 / self.beta)
        # w = e on the edge of its domain
        fun = lambda x: (self.value(t, x) or math.e) - lam  # noqa: E731
        hi = _expand_upper(fun, max(lo, 1.0))
        return _brent(fun, lo, hi)


# ---------------------------------------------------------------------------
# exponential-regime profiles
# ---------------------------------------------------------------------------


def kappa0(alpha, s, r, p):
    """Admissible delay amplitude: minimum of four closed-form bounds."""
    k = alpha + 1.0
    rk = r * k
    g1 = p / k * rk ** (1.0 / k)
    g2 = 2.0 * s * p * (2.0 * s * p + 1.0) * math.exp(2.0 * p)
    return min(
        rk ** (alpha / k) / (2.0**k * r * p * math.exp(2.0 * p)),
        1.0 / (2.0 * math.exp(2.0 * p) * rk ** (1.0 / k)),
        1.0 / (4.0 * g1 * math.exp(2.0 * p)),
        s * rk ** (alpha / k) / (2.0**alpha * r * g2),
    )


@dataclass(frozen=True)
class ExpProfileConfig:
    """Profiles of the exponential acceleration regime (algebraic kernels).

    ``variant="super"``: ``psi`` with ``v0 = C_L ln^q x / x^{2s}`` on
    ``[L, inf)``, ``C_L = L^{2s} / ln^q L``, defaults ``p = 1/(alpha+1)``,
    ``q = 2 alpha + 1``, ``kappa = e`` and ``L = max{e, e^{q/(2s)}} + 1``.

    ``variant="sub"``: ``phi`` with delay
    ``h = kappa t^{alpha/(alpha+1)} e^{p R(t)} / x^{2sp}``,
    ``R(t) = [r(alpha+1)t]^{1/(alpha+1)}``, ``p = min{1/(2s), 2s}/2`` and
    ``kappa = kappa0``; cap height ``epsilon = 0.1`` by default.
    """

    variant: Variant
    alpha: float
    s: float
    r: float = 1.0
    kappa: float | None = None
    p: float | None = None
    q: float | None = None
    L: float | None = None
    epsilon: float | None = None
    C_L: float = field(init=False, default=0.0)

    def __post_init__(self):
        variant = Variant(self.variant)
        alpha, s, r = float(self.alpha), float(self.s), float(self.r)
        problems = []
        if not alpha > 0:
            problems.append(f"alpha must be positive, got {alpha}")
        if not s > 0:
            problems.append(f"s must be positive, got {s}")
        if not r > 0:
            problems.append(f"r must be positive, got {r}")
        if problems:
            raise ConfigError("; ".join(problems), problems)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "r", r)
        if variant is Variant.SUPER:
            p = 1.0 / (alpha + 1.0) if self.p is None else float(self.p)
            q = 2.0 * alpha + 1.0 if self.q is None else float(self.q)
            kappa = math.e if self.kappa is None else float(self.kappa)
            if kappa < math.e:
                raise ConfigError(f"kappa must be at least e, got {kappa}")
            Lmin = max(math.e, math.exp(q / (2.0 * s))) + 1.0
            L = Lmin if self.L is None else float(self.L)
            if L < Lmin:
                raise ConfigError(f"L must be at least max(e, e^(q/2s)) + 1 = {Lmin:g}, got {L}")
            object.__setattr__(self, "q", q)
            object.__setattr__(self, "L", L)
            object.__setattr__(self, "C_L", L ** (2.0 * s) / math.log(L) ** q)
        else:
            p = 0.5 * min(1.0 / (2.0 * s), 2.0 * s) if self.p is None else float(self.p)
            kappa = kappa0(alpha, s, r, p) if self.kappa is None else float(self.kappa)
            if not kappa > 0:
                raise ConfigError(f"kappa must be positive, got {kappa}")
            eps = 0.1 if self.epsilon is None else float(self.epsilon)
            if not 0.0 < eps < 0.25:
                raise ConfigError(f"epsilon must lie in (0, 1/4), got {eps}")
            object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "kappa", kappa)

    @property
    def t_star(self):
        if self.variant is Variant.SUPER:
            return 1.0 / (self.r * (self.alpha + 1.0))
        return 2.0 ** (self.alpha + 1.0) / (self.r * (self.alpha + 1.0))

    def R(self, t):
        return (self.r * (self.alpha + 1.0) * t) ** (1.0 / (self.alpha + 1.0))

    # -- super-solution -----------------------------------------------------
    def log_v0(self, x):
        if x < self.L:
            return 0.0
        return math.log(self.C_L) + self.q * math.log(math.log(x)) - 2.0 * self.s * math.log(x)

    def _dlog_v0(self, x, nu):
        if x < self.L:
            return 0.0
        lx = math.log(x)
        if nu == 1:
            return (self.q / lx - 2.0 * self.s) / x
        return (-self.q / lx**2 - self.q / lx + 2.0 * self.s) / x**2

    def v0_inverse(self, y):
        y = float(y)
        if not 0.0 < y <= 1.0:
            raise DomainError(f"v0^-1 needs y in (0, 1], got {y}")
        return self.log_v0_inverse(math.log(y))

    def log_v0_inverse(self, ly):
        """``v0^-1(e^ly)``; avoids underflow of ``y`` at large times."""
        ly = float(ly)
        if not ly <= 0.0:
            raise DomainError(f"ln y must be non-positive, got {ly}")
        if ly == 0.0:
            return self.L
        # monotone in xi = ln x; solve there to cope with very large x
        fun = lambda xi: self.log_v0(math.exp(xi)) - ly  # noqa: E731
        lo = math.log(self.L)
        try:
            hi = _expand_upper(fun, lo, factor=1.5)
        except OverflowError:
            raise DomainError(f"v0^-1(e^{ly:g}) exceeds the floating-point range") from None
        xi = optimize.brentq(fun, lo, hi, xtol=1e-14, rtol=_RTOL, maxiter=500)
        x = math.exp(xi)
        # polish in x for the absolute tolerance
        g = lambda z: self.log_v0(z) - ly  # noqa: E731
        a, b = x * (1 - 1e-9), x * (1 + 1e-9)
        if g(a) > 0 > g(b):
            x = _brent(g, a, b)
        return x

    def _psi_parts(self, t, x):
        k = self.alpha + 1.0
        amp = 1.0 + self.kappa * t**self.p
        B = 1.0 - (math.log(amp) + self.log_v0(x))
        if B < 0:
            return None
        A = B**k - self.r * k * t
        if A < 0:
            return None
        return amp, B, A

    def _phi_parts(self, t, x):
        k = self.alpha + 1.0
        if x <= 0:
            return None
        base = 1.0 + 2.0 * self.s * math.log(x)
        if base < 0:
            return None
        h = self.h(t, x)
        A = base**k - self.r * k * (t - h)
        if A < 0:
            return None
        return base, h, A

    def h(self, t, x):
        """Delay ``kappa t^{alpha/(alpha+1)} e^{p R(t)} / x^{2sp}``."""
        k = self.alpha + 1.0
        return self.kappa * t ** (self.alpha / k) * math.exp(self.p * self.R(t)) / x ** (2.0 * self.s * self.p)

    def value(self, t, x):
        _check_finite(t, x)
        k = self.alpha + 1.0
        parts = self._psi_parts(t, x) if self.variant is Variant.SUPER else self._phi_parts(t, x)
        if parts is None:
            return None
        return math.exp(1.0 - parts[2] ** (1.0 / k))

    def _G_derivs(self, t, x):
        """``A`` and its x-derivatives, ``value = exp(1 - A^{1/k})``."""
        k = self.alpha + 1.0
        if self.variant is Variant.SUPER:
            parts = self._psi_parts(t, x)
            if parts is None:
                return None
            _, B, A = parts
            d1, d2 = self._dlog_v0(x, 1), self._dlog_v0(x, 2)
            # B' = -v0'/v0 = -d1
            A1 = -k * B**self.alpha * d1
            A2 = k * self.alpha * B ** (self.alpha - 1.0) * d1 * d1 - k * B**self.alpha * d2
            return A, A1, A2
        parts = self._phi_parts(t, x)
        if parts is None:
            return None
        base, h, A = parts
        c = 2.0 * self.s
        m = c * self.p
        b1, b2 = c / x, -c / x**2
        h1, h2 = -m * h / x, m * (m + 1.0) * h / x**2
        rk = self.r * k
        A1 = k * base**self.alpha * b1 + rk * h1
        A2 = k * self.alpha * base ** (self.alpha - 1.0) * b1 * b1 + k * base**self.alpha * b2 + rk * h2
        return A, A1, A2

    def dx(self, t, x):
        d = self._G_derivs(t, x)
        if d is None:
            return None
        A, A1, _ = d
        k = self.alpha + 1.0
        v = math.exp(1.0 - A ** (1.0 / k))
        return -v * A ** (1.0 / k - 1.0) * A1 / k

    def dxx(self, t, x):
        d = self._G_derivs(t, x)
        if d is None:
            return None
        A, A1, A2 = d
        k = self.alpha + 1.0
        v = math.exp(1.0 - A ** (1.0 / k))
        G1 = A ** (1.0 / k - 1.0) * A1 / k
        G2 = (1.0 / k) * ((1.0 / k - 1.0) * A ** (1.0 / k - 2.0) * A1 * A1 + A ** (1.0 / k - 1.0) * A2)
        return v * (G1 * G1 - G2)

    def dt(self, t, x):
        k = self.alpha + 1.0
        v = self.value(t, x)
        if v is None:
            return None
        if self.variant is Variant.SUPER:
            _, B, A = self._psi_parts(t, x)
            amp_t = self.kappa * self.p * t ** (self.p - 1.0) if t > 0 else 0.0
            amp = 1.0 + self.kappa * t**self.p
            return v * A ** (-self.alpha / k) * (B**self.alpha * amp_t / amp + self.r)
        _, h, A = self._phi_parts(t, x)
        ht = h * (self.alpha / (k * t) + self.p * (self.r * k) ** (1.0 / k) * t ** (-self.alpha / k) / k) if t > 0 else 0.0
        return v * A ** (-self.alpha / k) * self.r * (1.0 - ht)

    def breakpoints(self, t):
        return [self.L] if self.variant is Variant.SUPER else []

    def lower_position_bound(self, t):
        """``e^{-1/s} e^{R(t)/(2s)}``, a strict lower bound of the sub-solution levels."""
        return math.exp(-1.0 / self.s + self.R(t) / (2.0 * self.s))

    def phi_bounds(self, t, x):
        """``(x^{-2s}, e^{R(t)} x^{-2s})``."""
        lo = x ** (-2.0 * self.s)
        return lo, math.exp(self.R(t)) * lo

    def level_position(self, t, lam, method="auto"):
        _check_finite(t, lam)
        k = self.alpha + 1.0
        if self.variant is Variant.SUPER:
            if not 0.0 < lam <= 2.0:
                raise DomainError(f"level must lie in (0, 2], got {lam}")
            if t < self.t_star:
                raise DomainError(f"level positions need t >= t* = {self.t_star:g}")
            ly = 1.0 - (self.r * k * t + (1.0 - math.log(lam)) ** k) ** (1.0 / k)
            ly -= math.log1p(self.kappa * t**self.p)
            return self.log_v0_inverse(ly)
        if not 0.0 < lam < math.e:
            raise DomainError(f"level must lie in (0, e), got {lam}")
        if t < self.t_star:
            raise DomainError(f"level positions need t >= t0 = {self.t_star:g} (uniqueness)")
        # phi = e exactly where A vanishes; that point lies in (Y0, Y1)
        R = self.R(t)
        Y0 = self.lower_position_bound(t)
        Y1 = math.exp((R - 1.0) / (2.0 * self.s))

        def A_of(x):
            base = 1.0 + 2.0 * self.s * math.log(x)
            return base**k - self.r * k * (t - self.h(t, x))

        if A_of(Y0) < 0 < A_of(Y1):
            lo = optimize.brentq(A_of, Y0, Y1, xtol=1e-14, rtol=_RTOL)
        else:
            lo = Y0
            if self.value(t, lo) is None:
                raise BracketError("could not locate the domain of definition of phi")
        fun = lambda x: (self.value(t, x) or math.e) - lam  # noqa: E731
        hi = _expand_upper(fun, max(lo, Y1))
        return _brent(fun, lo, hi)


# ---------------------------------------------------------------------------
# composites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CappedProfile:
    """``1`` left of ``x_1(t)``, the base profile to the right (super-solutions)."""

    base: object

    def cap_position(self, t):
        return self.base.level_position(t, 1.0)

    def value(self, t, x):
        x1 = self.cap_position(t)
        return 1.0 if x <= x1 else self.base.value(t, x)

    def dx(self, t, x):
        return 0.0 if x <= self.cap_position(t) else self.base.dx(t, x)

    def dxx(self, t, x):
        return 0.0 if x <= self.cap_position(t) else self.base.dxx(t, x)

    def dt(self, t, x):
        return 0.0 if x <= self.cap_position(t) else self.base.dt(t, x)

    def breakpoints(self, t):
        return sorted(set(self.base.breakpoints(t)) | {self.cap_position(t)})

    def level_position(self, t, lam, **kw):
        if not 0.0 < lam < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {lam}")
        return self.base.level_position(t, lam, **kw)


@dataclass(frozen=True)
class SmoothedProfile:
    """``eps`` left of ``x_{c eps}(t)``, ``g_eps(base)`` to the right (sub-solutions).

    The cubic smoother caps at ``x_eps`` (``c = 1``); the quintic one at
    ``x_{3 eps / 2}``.
    """

    base: object
    kind: SmootherKind

    @property
    def eps(self):
        return self.base.epsilon

    @property
    def smoother(self):
        return make_smoother(SmootherKind(self.kind), self.eps, self.base.alpha)

    def cap_position(self, t):
        c = 1.0 if SmootherKind(self.kind) is SmootherKind.CUBIC_C1 else 1.5
        return self.base.level_position(t, c * self.eps)

    def value(self, t, x):
        if x < self.cap_position(t):
            return self.eps
        return float(self.smoother(min(self.base.value(t, x), 1.0)))

    def _chain(self, t, x, which):
        if x < self.cap_position(t):
            return 0.0
        w = self.base.value(t, x)
        g1 = float(self.smoother(w, 1))
        if which == "dt":
            return g1 * self.base.dt(t, x)
        if which == "dx":
            return g1 * self.base.dx(t, x)
        wx = self.base.dx(t, x)
        return float(self.smoother(w, 2)) * wx * wx + g1 * self.base.dxx(t, x)

    def dx(self, t, x):
        return self._chain(t, x, "dx")

    def dxx(self, t, x):
        return self._chain(t, x, "dxx")

    def dt(self, t, x):
        return self._chain(t, x, "dt")

    def breakpoints(self, t):
        return sorted(set(self.base.breakpoints(t)) | {self.cap_position(t)})

    def level_position(self, t, lam, **kw):
        if not 0.0 < lam < self.eps:
            raise DomainError(f"level must lie in (0, eps), got {lam}")
        # invert the smoother, then the base profile
        g = self.smoother
        y = optimize.brentq(lambda v: float(g(v)) - lam, 0.0, self.eps, xtol=1e-15)
        return self.base.level_position(t, y, **kw)


def composite(config):
    """Capped/smoothed profile built on ``config`` as the experiments use it."""
    if isinstance(config, TWProfileConfig):
        return config
    if config.variant is Variant.SUPER:
        return CappedProfile(config)
    kind = SmootherKind.CUBIC_C1 if isinstance(config, AlgProfileConfig) else SmootherKind.QUINTIC_C2
    return SmoothedProfile(config, kind)


def eval_profile(config, t, x, composite_profile=False):
    """Profile value at ``(t, x)``; ``None`` where the defining bracket is negative.

    With ``composite_profile=True`` the capped (``m``, ``Psi``) or smoothed
    (``v``, ``Phi``) profile is evaluated instead of the raw one.
    """
    _check_finite(float(t), float(x))
    prof = composite(config) if composite_profile else config
    return prof.value(float(t), float(x))


def level_position(config, t, lam, method="auto"):
    """Position ``x_lam(t)`` with ``profile(t, x_lam(t)) = lam``."""
    if isinstance(config, TWProfileConfig):
        return config.level_position(t, lam)
    return config.level_position(float(t), float(lam), method=method)
