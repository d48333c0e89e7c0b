"""Run configuration: TOML/JSON schema, validation and echo.

Schema (all sections are tables)::

    name = "fig4a"                 # optional label
    [kernel]
    family = "subexponential"      # | "algebraic" | "fractional_laplacian"
    beta = 0.35                    # or s = 1.0
    inner_law = "unit_second_moment"   # optional
    [reaction]
    family = "weakly_degenerate"   # | "kpp" | "allee"
    r = 1.0
    alpha = 0.2
    [grid]
    L = 400.0
    N = 4000
    T = 30.0
    M = 1500
    gamma = 2.0                    # optional
    snapshot_times = [..]          # optional explicit list, or
    snapshot_count = 31            # with snapshot_spacing "uniform" | "geometric"
    [analysis]
    lambdas = [0.5]
    window = 0.5                   # last fraction of samples used by the fits
    [solver]
    method = "cg"                  # | "dense" | "levinson"

A run manifest (``manifest.json``) is also accepted: its ``config`` entry is
the echo produced by :meth:`RunConfig.to_dict`.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .discretization import Grid
from .errors import ConfigError
from .kernel import InnerLaw, KernelFamily, KernelSpec, admissible_gamma
from .reaction import ReactionFamily, ReactionSpec

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

__all__ = ["RunConfig", "AnalysisConfig", "load_config", "parse_config", "read_document",
           "snapshot_schedule"]

SOLVER_METHODS = ("cg", "dense", "levinson")
SPACINGS = ("uniform", "geometric")


@dataclass(frozen=True)
class AnalysisConfig:
    lambdas: tuple = (0.5,)
    window: float = 0.5


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one simulation."""

    kernel: KernelSpec
    reaction: ReactionSpec
    grid: Grid
    snapshot_times: tuple
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    method: str = "cg"
    name: str = "run"

    def to_dict(self):
        """Echo that :func:`parse_config` maps back to an identical config."""
        return {
            "name": self.name,
            "kernel": self.kernel.to_dict(),
            "reaction": self.reaction.to_dict(),
            "grid": {**self.grid.to_dict(), "snapshot_times": list(self.snapshot_times)},
            "analysis": {"lambdas": list(self.analysis.lambdas), "window": self.analysis.window},
            "solver": {"method": self.method},
        }

    def with_updates(self, **changes):
        """Copy with top-level section overrides given as nested dicts."""
        doc = self.to_dict()
        for key, val in changes.items():
            if isinstance(val, dict):
                doc.setdefault(key, {}).update(val)
            else:
                doc[key] = val
        if "grid" in changes and "snapshot_times" not in changes["grid"]:
            doc["grid"].pop("snapshot_times", None)
        return parse_config(doc)


def snapshot_schedule(T, count=None, spacing="geometric"):
    """Snapshot times on ``[0, T]``.

    ``geometric`` gives ``0`` plus ``count`` log-spaced times from ``T/1024``
    to ``T`` (``count=11`` is the doubling schedule ``T 2^{k-10}``);
    ``uniform`` gives ``count`` equally spaced times including ``0`` and ``T``.
    """
    count = 11 if count is None else int(count)
    if spacing == "uniform":
        return tuple(float(t) for t in np.linspace(0.0, T, count))
    return (0.0,) + tuple(float(t) for t in np.geomspace(T / 1024.0, T, count))


def _number(section, key, problems, where, default=None, integer=False):
    if key not in section:
        if default is None:
            problems.append(f"{where}.{key} is required")
        return default
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        problems.append(f"{where}.{key} must be a number, got {val!r}")
        return default
    if integer and int(val) != val:
        problems.append(f"{where}.{key} must be an integer, got {val!r}")
        return default
    if not math.isfinite(val):
        problems.append(f"{where}.{key} must be finite, got {val!r}")
        return default
    return int(val) if integer else float(val)


def _kernel(sec, problems):
    fam = sec.get("family")
    try:
        family = KernelFamily(fam)
    except ValueError:
        problems.append(f"kernel.family must be one of {[f.value for f in KernelFamily]}, got {fam!r}")
        return None
    key = "beta" if family is KernelFamily.SUBEXPONENTIAL else "s"
    other = "s" if key == "beta" else "beta"
    if other in sec:
        problems.append(f"kernel.{other} does not apply to the {family.value} family (use kernel.{key})")
    exponent = _number(sec, key, problems, "kernel")
    law = sec.get("inner_law")
    if law is not None:
        try:
            law = InnerLaw(law)
        except ValueError:
            problems.append(f"kernel.inner_law must be one of {[v.value for v in InnerLaw]}, got {law!r}")
            law = None
    if exponent is None:
        return None
    if exponent <= 0:
        problems.append(f"kernel.{key} must be positive, got {exponent}")
        return None
    if family is KernelFamily.FRACTIONAL_LAPLACIAN and exponent >= 1:
        problems.append(f"kernel.s must lie in (0, 1) for the fractional Laplacian, got {exponent}")
        return None
    try:
        return KernelSpec(family, exponent, law)
    except ConfigError as exc:
        problems.append(str(exc))
        return None


def _reaction(sec, problems):
    fam = sec.get("family", "weakly_degenerate")
    try:
        family = ReactionFamily(fam)
    except ValueError:
        problems.append(f"reaction.family must be one of {[f.value for f in ReactionFamily]}, got {fam!r}")
        return None
    r = _number(sec, "r", problems, "reaction", default=1.0)
    if family is ReactionFamily.KPP:
        alpha = 0.0
    else:
        alpha = _number(sec, "alpha", problems, "reaction")
    if r is None or alpha is None:
        return None
    ok = True
    if r < 0:
        problems.append(f"reaction.r must be non-negative, got {r}")
        ok = False
    if family is not ReactionFamily.KPP and alpha <= 0:
        problems.append(f"reaction.alpha must be positive, got {alpha}")
        ok = False
    return ReactionSpec(family, r, alpha) if ok else None


def parse_config(doc):
    """Validate a config mapping; raises ConfigError listing every problem."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a table/object")
    if "config" in doc and isinstance(doc["config"], dict) and "kernel" in doc["config"]:
        doc = doc["config"]
    problems = []
    for sec in ("kernel", "reaction", "grid"):
        if not isinstance(doc.get(sec), dict):
            problems.append(f"missing [{sec}] section")
    known = {"name", "kernel", "reaction", "grid", "analysis", "solver"}
    problems.extend(f"unknown top-level key {k!r}" for k in doc if k not in known)
    kernel = _kernel(doc["kernel"], problems) if isinstance(doc.get("kernel"), dict) else None
    reaction = _reaction(doc["reaction"], problems) if isinstance(doc.get("reaction"), dict) else None

    g = doc.get("grid") if isinstance(doc.get("grid"), dict) else {}
    L = _number(g, "L", problems, "grid")
    N = _number(g, "N", problems, "grid", integer=True)
    T = _number(g, "T", problems, "grid")
    M = _number(g, "M", problems, "grid", integer=True)
    gamma = _number(g, "gamma", problems, "grid", default=2.0)
    if L is not None and L <= 1:
        problems.append(f"grid.L must exceed 1, got {L}")
    if N is not None and N < 1:
        problems.append(f"grid.N must be a positive integer, got {N}")
    if T is not None and T <= 0:
        problems.append(f"grid.T must be positive, got {T}")
    if M is not None and M < 0:
        problems.append(f"grid.M must be non-negative, got {M}")
    if kernel is not None and gamma is not None and gamma not in admissible_gamma(kernel):
        if kernel.inner_law is InnerLaw.UNIT_SECOND_MOMENT:
            problems.append(f"grid.gamma={gamma:g} is inadmissible: γ=2 is the only left choice "
                            "with the unit second moment inner law")
        else:
            problems.append(f"grid.gamma={gamma:g} is inadmissible for this kernel; "
                            f"admissible range {admissible_gamma(kernel)}")

    times = None
    spacing = g.get("snapshot_spacing", "geometric")
    if spacing not in SPACINGS:
        problems.append(f"grid.snapshot_spacing must be one of {SPACINGS}, got {spacing!r}")
    if "snapshot_times" in g:
        raw = g["snapshot_times"]
        if not isinstance(raw, (list, tuple)) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
            problems.append("grid.snapshot_times must be a list of numbers")
        else:
            times = tuple(sorted(float(v) for v in raw))
            if T is not None:
                bad = [v for v in times if not 0.0 <= v <= T]
                if bad:
                    problems.append(f"grid.snapshot_times must lie in [0, T={T:g}], got {bad}")
    elif T is not None and spacing in SPACINGS:
        count = _number(g, "snapshot_count", problems, "grid", default=11, integer=True)
        if count is not None and count < 2:
            problems.append(f"grid.snapshot_count must be at least 2, got {count}")
        elif count is not None:
            times = snapshot_schedule(T, count, spacing)
    known_grid = {"L", "N", "T", "M", "gamma", "snapshot_times", "snapshot_count", "snapshot_spacing", "dx", "dt"}
    problems.extend(f"unknown key grid.{k}" for k in g if k not in known_grid)

    a = doc.get("analysis", {})
    if not isinstance(a, dict):
        problems.append("[analysis] must be a table")
        a = {}
    lambdas = a.get("lambdas", [0.5])
    if not isinstance(lambdas, (list, tuple)) or not lambdas:
        problems.append("analysis.lambdas must be a non-empty list")
        lambdas = []
    else:
        for lam in lambdas:
            if isinstance(lam, bool) or not isinstance(lam, (int, float)) or not 0.0 < lam < 1.0:
                problems.append(f"analysis.lambdas values must lie in (0, 1), got {lam!r}")
    window = _number(a, "window", problems, "analysis", default=0.5)
    if window is not None and not 0.0 < window <= 1.0:
        problems.append(f"analysis.window must lie in (0, 1], got {window}")

    s = doc.get("solver", {})
    method = s.get("method", "cg") if isinstance(s, dict) else None
    if method not in SOLVER_METHODS:
        problems.append(f"solver.method must be one of {SOLVER_METHODS}, got {method!r}")
    name = str(doc.get("name", "run"))

    if problems:
        raise ConfigError("invalid configuration:\n  - " + "\n  - ".join(problems), problems)
    grid = Grid(L, N, T, M, gamma)
    return RunConfig(kernel, reaction, grid, times, AnalysisConfig(tuple(float(v) for v in lambdas), window),
                     method, name)


def read_document(path):
    """Parse a ``.json`` file, or TOML for any other suffix, into a dict."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            doc = json.loads(raw.decode("utf-8"))
        else:
            doc = tomllib.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return doc


def load_config(path):
    """Read a TOML or JSON config (or a run manifest) and validate it."""
    return parse_config(read_document(path))
