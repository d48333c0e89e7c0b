"""Level-set tracking and propagation-rate fits.

For a non-increasing profile the level-set position is the largest crossing
``X_lambda(t) = sup{x : u(t, x) >= lambda}``. Three growth laws are fitted by
least squares on the late-time window:

* power law, ``ln X`` linear in ``ln t`` (algebraic acceleration);
* exponential of a power, ``ln X`` linear in ``t^{1/(alpha+1)}``
  (exponential acceleration);
* linear speed, ``X`` linear in ``t`` (finite speed).
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, InsufficientDataError
from .kernel import KernelFamily
from .reaction import ReactionFamily

__all__ = [
    "FrontStatus",
    "FitModel",
    "Regime",
    "RateFit",
    "FrontTrace",
    "extract_position",
    "locate_front",
    "build_trace",
    "fit_power_law",
    "fit_exponential_rate",
    "fit_linear_speed",
    "fit_all",
    "classify_regime",
    "predicted_regime",
    "interface_width",
    "MIN_SAMPLES",
]

MIN_SAMPLES = 5
# a front within this fraction of L of the right boundary is treated as breached
BREACH_FRACTION = 0.9
MONOTONE_TOL = 1e-6


class FrontStatus(str, enum.Enum):
    OK = "ok"
    NOT_FORMED = "not_formed"
    BREACH = "breach"
    UNRELIABLE = "unreliable"


class FitModel(str, enum.Enum):
    POWER_LAW = "power_law"
    EXPONENTIAL_OF_POWER = "exponential_of_power"
    LINEAR_SPEED = "linear_speed"


class Regime(str, enum.Enum):
    FINITE_SPEED = "FiniteSpeed"
    ALGEBRAIC_ACCELERATION = "AlgebraicAcceleration"
    EXPONENTIAL_ACCELERATION = "ExponentialAcceleration"


_MODEL_REGIME = {
    FitModel.POWER_LAW: Regime.ALGEBRAIC_ACCELERATION,
    FitModel.EXPONENTIAL_OF_POWER: Regime.EXPONENTIAL_ACCELERATION,
    FitModel.LINEAR_SPEED: Regime.FINITE_SPEED,
}


def _dx_of(grid):
    return float(grid.dx) if hasattr(grid, "dx") else float(grid)


def locate_front(u, grid, lam):
    """Largest crossing of level ``lam`` with its status.

    Returns ``(x, status)`` where ``x`` is ``None`` when the front has not
    formed (``u_0 < lam``) or has reached the last node (truncation breach).
    A field that is not non-increasing to ``1e-6`` yields status
    ``UNRELIABLE`` but still reports the largest crossing.
    """
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise DomainError(f"level lambda must lie in (0, 1), got {lam}")
    u = np.asarray(u, dtype=float)
    dx = _dx_of(grid)
    if u[0] < lam:
        return None, FrontStatus.NOT_FORMED
    j = int(np.flatnonzero(u >= lam)[-1])
    if j == u.size - 1:
        return None, FrontStatus.BREACH
    x = (j + (u[j] - lam) / (u[j] - u[j + 1])) * dx
    status = FrontStatus.OK
    if np.any(np.diff(u) > MONOTONE_TOL):
        status = FrontStatus.UNRELIABLE
    return float(x), status


def extract_position(u, grid, lam):
    """Level-set position ``X_lambda``, or ``None`` if it is not available."""
    return locate_front(u, grid, lam)[0]


@dataclass
class RateFit:
    """Least-squares fit of one growth law.

    ``params`` holds the model parameters: ``exponent``/``prefactor`` for the
    power law, ``inner_exponent``/``slope``/``intercept`` (and ``implied_s``)
    for the exponential law, ``speed``/``intercept``/``deviation`` for the
    linear law.
    """

    model: FitModel
    params: dict
    r_squared: float
    window: tuple
    n_samples: int

    def __getattr__(self, name):
        params = self.__dict__.get("params", {})
        if name in params:
            return params[name]
        raise AttributeError(name)

    @property
    def regime(self):
        return _MODEL_REGIME[self.model]

    def to_dict(self):
        return {
            "model": self.model.value,
            "params": {k: float(v) for k, v in self.params.items()},
            "r_squared": float(self.r_squared),
            "window": [float(self.window[0]), float(self.window[1])],
            "n_samples": int(self.n_samples),
        }


@dataclass
class FrontTrace:
    """Level-set positions ``(t_i, X_lambda(t_i))`` of one run."""

    lam: float
    t: np.ndarray
    X: np.ndarray
    censored: bool = False
    breach_time: float | None = None
    unreliable: int = 0
    fits: dict = field(default_factory=dict)
    regime: Regime | None = None

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.X.tolist()))

    def write_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "X_lambda"])
            for t, x in zip(self.t, self.X):
                w.writerow([repr(float(t)), repr(float(x))])
        return path

    def report(self):
        return {
            "lambda": self.lam,
            "samples": int(self.t.size),
            "censored": self.censored,
            "breach_time": self.breach_time,
            "unreliable_samples": self.unreliable,
            "fits": {m.value if hasattr(m, "value") else m: f.to_dict() for m, f in self.fits.items()},
            "regime": self.regime.value if self.regime else None,
        }


def build_trace(times, fields, grid, lam, breach_fraction=BREACH_FRACTION):
    """Track ``X_lambda`` over snapshots.

    Snapshots where the front has not formed are skipped. Once the front
    comes within ``1 - breach_fraction`` of the right end (or leaves the
    domain) that sample and every later one are dropped and the trace is
    marked censored.
    """
    limit = breach_fraction * grid.L
    ts, xs = [], []
    censored, breach_time, unreliable = False, None, 0
    for t, u in zip(times, fields):
        x, status = locate_front(u, grid, lam)
        if status is FrontStatus.NOT_FORMED:
            continue
        if status is FrontStatus.BREACH or x >= limit:
            censored, breach_time = True, float(t)
            break
        if status is FrontStatus.UNRELIABLE:
            unreliable += 1
        ts.append(float(t))
        xs.append(x)
    return FrontTrace(float(lam), np.array(ts), np.array(xs), censored, breach_time, unreliable)


def _as_arrays(samples):
    if isinstance(samples, FrontTrace):
        return samples.t, samples.X
    if isinstance(samples, tuple) and len(samples) == 2 and np.ndim(samples[0]) == 1:
        return np.asarray(samples[0], float), np.asarray(samples[1], float)
    arr = np.asarray(samples, dtype=float).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def _window(t, X, fraction, positive_t=True):
    if not 0.0 < fraction <= 1.0:
        raise DomainError(f"window fraction must lie in (0, 1], got {fraction}")
    ok = np.isfinite(t) & np.isfinite(X) & (X > 0)
    if positive_t:
        ok &= t > 0
    t, X = t[ok], X[ok]
    start = int(math.floor(t.size * (1.0 - fraction)))
    t, X = t[start:], X[start:]
    if t.size < MIN_SAMPLES:
        raise InsufficientDataError(f"need at least {MIN_SAMPLES} usable samples in the window, got {t.size}")
    return t, X


def _linfit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    return float(slope), float(intercept), r2


def fit_power_law(samples, window=0.5):
    """Fit ``X = A t^k`` on the last ``window`` fraction of the samples."""
    t, X = _window(*_as_arrays(samples), window)
    k, c, r2 = _linfit(np.log(t), np.log(X))
    return RateFit(FitModel.POWER_LAW, {"exponent": k, "prefactor": math.exp(c)}, r2,
                   (t[0], t[-1]), t.size)


def fit_exponential_rate(samples, alpha, r=1.0, window=0.5):
    """Fit ``ln X = a t^{1/(alpha+1)} + b``.

    The theoretical slope is ``[r(alpha+1)]^{1/(alpha+1)} / (2s)``, so the fit
    also reports the implied ``s``.
    """
    t, X = _window(*_as_arrays(samples), window, positive_t=False)
    if np.any(t < 0):
        raise DomainError("negative sample times")
    q = 1.0 / (alpha + 1.0)
    a, b, r2 = _linfit(t**q, np.log(X))
    implied = (r * (alpha + 1.0)) ** q / (2.0 * a) if a > 0 else math.inf
    return RateFit(FitModel.EXPONENTIAL_OF_POWER,
                   {"inner_exponent": q, "slope": a, "intercept": b, "implied_s": implied},
                   r2, (t[0], t[-1]), t.size)


def fit_linear_speed(samples, window=0.5):
    """Fit ``X = c t + d``; also reports the spread of ``X/t`` in the window."""
    t, X = _window(*_as_arrays(samples), window)
    c, d, r2 = _linfit(t, X)
    ratio = X / t
    dev = float(np.max(np.abs(ratio / ratio.mean() - 1.0)))
    return RateFit(FitModel.LINEAR_SPEED, {"speed": c, "intercept": d, "deviation": dev}, r2,
                   (t[0], t[-1]), t.size)


def fit_all(samples, alpha, r=1.0, window=0.5):
    return {
        FitModel.POWER_LAW: fit_power_law(samples, window),
        FitModel.EXPONENTIAL_OF_POWER: fit_exponential_rate(samples, alpha, r, window),
        FitModel.LINEAR_SPEED: fit_linear_speed(samples, window),
    }


def predicted_regime(kernel, reaction):
    """Regime expected from the tail law and the degeneracy ``alpha``.

    Sub-exponential tails accelerate algebraically iff ``beta < 1/(alpha+1)``
    and spread at finite speed otherwise; algebraic tails always accelerate
    exponentially. Returns ``None`` when no prediction applies (Allee growth).
    """
    if reaction.family is ReactionFamily.ALLEE:
        return None
    alpha = reaction.alpha if reaction.family is ReactionFamily.WEAKLY_DEGENERATE else 0.0
    if kernel.family is KernelFamily.SUBEXPONENTIAL:
        if kernel.exponent < 1.0 / (alpha + 1.0):
            return Regime.ALGEBRAIC_ACCELERATION
        return Regime.FINITE_SPEED
    return Regime.EXPONENTIAL_ACCELERATION


def classify_regime(fits, theory=None, tie_tol=1e-3):
    """Regime of the best-fitting model (highest R^2).

    Models within ``tie_tol`` of the best R^2 are tied; a tie is resolved in
    favour of ``theory`` when it is among the tied models.
    """
    fits = list(fits.values()) if isinstance(fits, dict) else list(fits)
    if not fits:
        raise InsufficientDataError("no fits to classify")
    best = max(f.r_squared for f in fits)
    tied = [f for f in fits if f.r_squared >= best - tie_tol]
    if theory is not None:
        theory = Regime(theory)
        for f in tied:
            if f.regime is theory:
                return theory
    return max(tied, key=lambda f: f.r_squared).regime


def interface_width(trace_low, trace_high):
    """``X_{lambda_1}(t) - X_{lambda_2}(t)`` on common sample times (``lambda_1 < lambda_2``)."""
    common, i1, i2 = np.intersect1d(trace_low.t, trace_high.t, return_indices=True)
    return common, trace_low.X[i1] - trace_high.X[i2]


def write_fit_report(path, traces, extra=None):
    doc = {"traces": [tr.report() for tr in traces]}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2))
    return doc
