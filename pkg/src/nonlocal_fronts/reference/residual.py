"""Quadrature residuals of the sub/super-solution inequalities.

The nonlocal operator is evaluated in the symmetric second-difference form

    D[u](x) = int_0^inf (u(x - y) + u(x + y) - 2 u(x)) J(y) dy,

which removes the singularity at ``y = 0`` for C^2 profiles. On
``[0, delta]`` the integrand is replaced by its Taylor limit
``u''(x) y^2 J(y)`` (avoids cancellation), the rest is integrated by
adaptive Gauss-Kronrod with breakpoints at ``1`` and at ``|x - b|`` for
every profile breakpoint ``b``.

Two inequalities are checked:

* travelling wave, ``eps w'' + D[w] + c0 w' + f(w) <= 0`` (``c0`` given or
  searched by doubling);
* parabolic, ``P_t - D[P] - f(P) >= 0`` for super-solutions and ``<= 0``
  for sub-solutions.
"""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .. import kernel as kern
from .. import reaction as react
from ..errors import DomainError
from .profiles import TWProfileConfig, Variant

__all__ = [
    "ResidualReport",
    "nonlocal_operator",
    "residual_check",
    "search_speed",
    "C0_CAP",
]

C0_CAP = 1e3
TAYLOR_DELTA = 1e-4
_EPSABS = 1e-12
_EPSREL = 1e-10
_LIMIT = 400


def _inner_second_moment(k, delta):
    """``int_0^delta y^2 J(y) dy``."""
    if k.inner_law is kern.InnerLaw.UNIT_SECOND_MOMENT and delta <= 1.0:
        return delta
    val, _ = integrate.quad(lambda y: y * y * kern.evaluate(k, y), 0.0, delta,
                            epsabs=1e-16, epsrel=1e-12, limit=_LIMIT)
    return val


def _far_cut(k, reach):
    """Upper limit of the finite quadrature window."""
    base = max(2.0 * reach, 100.0)
    if k.family is kern.KernelFamily.SUBEXPONENTIAL:
        # e^{1 - y^beta} < 1e-17 beyond this point
        return max(base, (1.0 + 17.0 * math.log(10.0)) ** (1.0 / k.beta))
    return base


def _value(profile, t, x):
    v = profile.value(t, x)
    if v is None:
        raise DomainError(f"profile undefined at t={t}, x={x}; use the composite profile")
    return v


def nonlocal_operator(profile, k, x, t=0.0, delta=TAYLOR_DELTA):
    """``(D[profile](x), error_estimate, converged)`` for one point."""
    ux = _value(profile, t, x)
    bps = sorted({abs(x - b) for b in profile.breakpoints(t)} | {1.0})
    reach = max(bps)
    far = _far_cut(k, reach)

    def integrand(y):
        return (_value(profile, t, x - y) + _value(profile, t, x + y) - 2.0 * ux) * kern.evaluate(k, y)

    total = profile.dxx(t, x) * _inner_second_moment(k, delta)
    err = 0.0
    ok = True
    edges = [delta] + [b for b in bps if delta < b < far] + [far]
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            try:
                v, e = integrate.quad(integrand, a, b, epsabs=_EPSABS, epsrel=_EPSREL, limit=_LIMIT)
            except integrate.IntegrationWarning:
                ok = False
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                v, e = integrate.quad(integrand, a, b, epsabs=_EPSABS, epsrel=_EPSREL, limit=_LIMIT)
                warnings.simplefilter("error", integrate.IntegrationWarning)
            total += v
            err += e
        if k.family is kern.KernelFamily.SUBEXPONENTIAL:
            # remaining mass is below 1e-17 per unit of integrand
            err += 2.0 * float(kern.tail_mass(k, far))
        else:
            try:
                v, e = integrate.quad(integrand, far, np.inf, epsabs=_EPSABS, epsrel=_EPSREL, limit=_LIMIT)
            except integrate.IntegrationWarning:
                ok = False
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                v, e = integrate.quad(integrand, far, np.inf, epsabs=_EPSABS, epsrel=_EPSREL, limit=_LIMIT)
            total += v
            err += e
    return total, err, ok


@dataclass
class ResidualReport:
    """Signed residuals at the sample points.

    ``sense`` is ``"<=0"`` or ``">=0"``: the inequality the residual must
    satisfy. A sample passes when the residual has the right sign up to its
    quadrature error estimate.
    """

    x: np.ndarray
    residual: np.ndarray
    error: np.ndarray
    converged: np.ndarray
    sense: str
    c0: float | None = None
    t: float | None = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        if self.sense == "<=0":
            return self.residual <= self.error
        return self.residual >= -self.error

    @property
    def ok(self):
        return bool(np.all(self.passed))

    @property
    def n_failed(self):
        return int(np.count_nonzero(~self.passed))

    def write_csv(self, path):
        """Columns ``x, residual, error_estimate``."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "residual", "error_estimate"])
            for row in zip(self.x, self.residual, self.error):
                w.writerow([repr(float(v)) for v in row])
        return path

    def summary(self):
        return {
            "sense": self.sense,
            "c0": self.c0,
            "t": self.t,
            "samples": int(self.x.size),
            "failed": self.n_failed,
            "max_residual": float(np.max(self.residual)) if self.x.size else None,
            "min_residual": float(np.min(self.residual)) if self.x.size else None,
            "quadrature_failures": int(np.count_nonzero(~self.converged)),
            **self.notes,
        }


def _point(args):
    profile, k, reaction, x, t, viscosity = args
    D, err, ok = nonlocal_operator(profile, k, x, t)
    w = _value(profile, t, x)
    f = react.evaluate(reaction, w) if reaction is not None else 0.0
    if isinstance(profile, TWProfileConfig):
        base = viscosity * profile.dxx(t, x) + D + f
        return base, profile.dx(t, x), err, ok
    # parabolic defect P_t - D[P] - f(P)
    return profile.dt(t, x) - D - f, 0.0, err, ok


def _evaluate(profile, k, reaction, xs, t, viscosity, workers):
    jobs = [(profile, k, reaction, float(x), t, viscosity) for x in xs]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        out = [_point(j) for j in jobs]
    arr = np.array([(a, b, c) for a, b, c, _ in out], dtype=float).reshape(-1, 3)
    conv = np.array([o[3] for o in out], dtype=bool)
    return arr[:, 0], arr[:, 1], arr[:, 2], conv


def _sense(profile):
    if isinstance(profile, TWProfileConfig):
        return "<=0"
    base = getattr(profile, "base", profile)
    return ">=0" if Variant(base.variant) is Variant.SUPER else "<=0"


def residual_check(profile, kernel, reaction, samples, c0=None, t=None, viscosity=0.0, workers=1):
    """Residual of the profile's defining inequality at each sample.

    Parameters
    ----------
    profile
        ``TWProfileConfig`` (travelling-wave inequality, needs ``c0``) or a
        time-dependent profile (parabolic inequality, needs ``t``). Use the
        capped/smoothed composite for time-dependent profiles so that the
        profile is defined on all of R.
    kernel, reaction
        Problem data; ``reaction=None`` means ``f = 0``.
    samples : array_like
        Points ``x``.
    viscosity : float
        The ``eps`` in front of ``w''`` (travelling wave only); 0 omits it.
    workers : int
        Processes used across sample points.
    """
    xs = np.atleast_1d(np.asarray(samples, dtype=float))
    if isinstance(profile, TWProfileConfig):
        if c0 is None:
            raise DomainError("the travelling-wave residual needs a speed c0")
        if not 0.0 <= viscosity <= 1.0:
            raise DomainError(f"viscosity must lie in [0, 1], got {viscosity}")
        tt = 0.0
    else:
        if t is None or t < 0:
            raise DomainError("the parabolic residual needs a time t >= 0")
        tt = float(t)
    base, slope, err, conv = _evaluate(profile, kernel, reaction, xs, tt, viscosity, workers)
    res = base + (float(c0) * slope if c0 is not None else 0.0)
    return ResidualReport(xs, res, err, conv, _sense(profile), None if c0 is None else float(c0),
                          None if t is None else tt)


def search_speed(profile, kernel, reaction, samples, viscosity=0.0, cap=C0_CAP, workers=1):
    """Double ``c0`` from 1 until the travelling-wave residual is ``<= 0`` everywhere.

    The speed-independent part is computed once. Returns the report at the
    first passing ``c0``, or at the last tried value (``report.ok`` is then
    ``False``) once ``c0`` would exceed ``cap``.
    """
    if not isinstance(profile, TWProfileConfig):
        raise DomainError("the speed search applies to the travelling-wave profile")
    xs = np.atleast_1d(np.asarray(samples, dtype=float))
    base, slope, err, conv = _evaluate(profile, kernel, reaction, xs, 0.0, viscosity, workers)
    tried = []
    c0 = 1.0
    while True:
        report = ResidualReport(xs, base + c0 * slope, err, conv, "<=0", c0, 0.0)
        tried.append(c0)
        if report.ok or 2.0 * c0 > cap:
            report.notes["tried"] = tried
            return report
        c0 *= 2.0
