"""Single runs and parameter sweeps with their on-disk artifacts.

A run directory contains::

    manifest.json        config echo, versions, solver statistics, regime
    snapshots.csv        t, x, u
    traces/<lambda>.csv  t, X_lambda
    fits.json            per-level fits and regime classification

A sweep directory contains one such run directory per cell under ``cells/``
and ``phase_diagram.csv``.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
import shutil
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import fronts
from .config import RunConfig, parse_config
from .errors import ConfigError, InsufficientDataError, NonlocalFrontsError
from .stepper import run, write_manifest

__all__ = ["RunResult", "run_single", "run_sweep", "parse_sweep", "SweepConfig", "PHASE_COLUMNS"]

logger = logging.getLogger(__name__)

PHASE_COLUMNS = ["alpha", "beta", "s", "regime", "predicted", "exponent", "slope", "speed",
                 "r_squared", "censored", "status", "error"]


@dataclass
class RunResult:
    config: RunConfig
    outdir: Path | None
    traces: list
    regime: fronts.Regime | None
    predicted: fronts.Regime | None
    manifest: dict = field(default_factory=dict)


def _lambda_name(lam):
    return f"{lam:g}"


def analyse(config, archive):
    """Traces, fits and regime for every level in ``config.analysis``."""
    predicted = fronts.predicted_regime(config.kernel, config.reaction)
    alpha = config.reaction.alpha
    traces = []
    for lam in config.analysis.lambdas:
        tr = fronts.build_trace(archive.times, archive.fields, config.grid, lam)
        try:
            tr.fits = fronts.fit_all(tr, alpha, config.reaction.r or 1.0, config.analysis.window)
            tr.regime = fronts.classify_regime(tr.fits, predicted)
        except InsufficientDataError as exc:
            logger.info("level %g: %s", lam, exc)
        traces.append(tr)
    regime = next((tr.regime for tr in traces if tr.regime is not None), None)
    return traces, regime, predicted


def run_single(config, outdir=None):
    """Run one configuration and, if ``outdir`` is given, write its artifacts.

    Files written before a failure are removed again; a directory created
    by this call is removed as well.
    """
    if not isinstance(config, RunConfig):
        config = parse_config(config)
    outdir = Path(outdir) if outdir is not None else None
    created_dir = outdir is not None and not outdir.exists()
    written = []
    try:
        _, archive = run(config.kernel, config.reaction, config.grid, config.snapshot_times,
                         method=config.method)
        traces, regime, predicted = analyse(config, archive)
        manifest = {}
        if outdir is not None:
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / "traces").mkdir(exist_ok=True)
            written.append(archive.write_csv(outdir / "snapshots.csv"))
            for tr in traces:
                written.append(tr.write_csv(outdir / "traces" / f"{_lambda_name(tr.lam)}.csv"))
            extra = {"regime": regime.value if regime else None,
                     "predicted_regime": predicted.value if predicted else None}
            written.append(outdir / "fits.json")
            fronts.write_fit_report(outdir / "fits.json", traces, extra)
            written.append(outdir / "manifest.json")
            manifest = write_manifest(outdir / "manifest.json", config.to_dict(), archive,
                                      {**extra, "censored": any(tr.censored for tr in traces)})
        return RunResult(config, outdir, traces, regime, predicted, manifest)
    except BaseException:
        if outdir is not None:
            if created_dir:
                shutil.rmtree(outdir, ignore_errors=True)
            else:
                for p in written:
                    Path(p).unlink(missing_ok=True)
                traces_dir = outdir / "traces"
                if traces_dir.is_dir() and not any(traces_dir.iterdir()):
                    traces_dir.rmdir()
        raise


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    """Cartesian sweep over ``alpha`` and the kernel exponent.

    Exponent entries may be numbers or the string ``"critical"``, which
    resolves to ``1/(alpha+1)`` for each ``alpha`` (sub-exponential only).
    """

    base: dict
    alphas: tuple
    exponents: tuple
    exponent_key: str
    workers: int = 2
    overrides: tuple = ()


def parse_sweep(doc):
    """Validate a sweep document.

    ``{"base": <run config>, "sweep": {"alpha": [...], "beta"|"s": [...],
    "workers": n, "overrides": [...]}}``. Each override is
    ``{"when": {"alpha": a, "s": s}, "grid": {...}}`` and replaces grid keys
    of every matching cell, e.g. a longer horizon where the front is slower.
    """
    problems = []
    base = doc.get("base")
    sweep = doc.get("sweep")
    if not isinstance(base, dict):
        problems.append("missing [base] section (a run configuration)")
    if not isinstance(sweep, dict):
        problems.append("missing [sweep] section")
    if problems:
        raise ConfigError("invalid sweep:\n  - " + "\n  - ".join(problems), problems)
    keys = [k for k in ("beta", "s") if k in sweep]
    if len(keys) > 1:
        problems.append("sweep must vary either beta or s, not both")
    key = keys[0] if keys else ("beta" if base.get("kernel", {}).get("family") == "subexponential" else "s")
    alphas = sweep.get("alpha", [])
    exps = sweep.get(key, [])
    for name, vals in (("alpha", alphas), (key, exps)):
        if not isinstance(vals, (list, tuple)):
            problems.append(f"sweep.{name} must be a list")
    if isinstance(alphas, (list, tuple)):
        for a in alphas:
            if isinstance(a, bool) or not isinstance(a, (int, float)) or a <= 0:
                problems.append(f"sweep.alpha values must be positive numbers, got {a!r}")
    if isinstance(exps, (list, tuple)):
        for e in exps:
            if e == "critical":
                if key != "beta":
                    problems.append("'critical' only applies to sweep.beta")
            elif isinstance(e, bool) or not isinstance(e, (int, float)) or e <= 0:
                problems.append(f"sweep.{key} values must be positive numbers or 'critical', got {e!r}")
    workers = sweep.get("workers", 2)
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        problems.append(f"sweep.workers must be a positive integer, got {workers!r}")
    overrides = sweep.get("overrides", [])
    if not isinstance(overrides, (list, tuple)):
        problems.append("sweep.overrides must be a list")
        overrides = []
    for i, ov in enumerate(overrides):
        if not (isinstance(ov, dict) and isinstance(ov.get("when"), dict) and isinstance(ov.get("grid"), dict)):
            problems.append(f"sweep.overrides[{i}] must have 'when' and 'grid' tables")
        elif set(ov["when"]) - {"alpha", key}:
            problems.append(f"sweep.overrides[{i}].when may only use alpha and {key}")
    if problems:
        raise ConfigError("invalid sweep:\n  - " + "\n  - ".join(problems), problems)
    overrides = tuple(overrides)
    # validate the base once so that config errors surface before any run
    if alphas and exps:
        for a, e in itertools.product(alphas, exps):
            parse_config(_cell_doc(base, key, a, e, overrides))
    return SweepConfig(base, tuple(alphas), tuple(exps), key, workers, overrides)


def _matches(when, alpha, key, exponent):
    vals = {"alpha": float(alpha), key: exponent}
    for k, v in when.items():
        got = vals.get(k)
        if v == "critical" or got == "critical":
            if v != got:
                return False
        elif got is None or not math.isclose(float(v), float(got), rel_tol=1e-12):
            return False
    return True


def _cell_doc(base, key, alpha, exponent, overrides=()):
    doc = {k: (dict(v) if isinstance(v, dict) else v) for k, v in base.items()}
    for ov in overrides:
        if _matches(ov["when"], alpha, key, exponent):
            doc["grid"] = {**doc.get("grid", {}), **ov["grid"]}
    doc.setdefault("reaction", {})["alpha"] = float(alpha)
    if exponent == "critical":
        exponent = 1.0 / (float(alpha) + 1.0)
    kernel = doc.setdefault("kernel", {})
    kernel.pop("beta", None)
    kernel.pop("s", None)
    kernel[key] = float(exponent)
    if key == "beta":
        kernel["family"] = "subexponential"
    elif kernel.get("family") == "subexponential":
        kernel["family"] = "algebraic"
    doc["name"] = f"alpha={float(alpha):g}_{key}={float(exponent):g}"
    return doc


def _run_cell(args):
    doc, cell_dir = args
    row = {"alpha": doc["reaction"]["alpha"], "beta": doc["kernel"].get("beta", ""),
           "s": doc["kernel"].get("s", ""), "status": "ok", "error": ""}
    try:
        res = run_single(parse_config(doc), cell_dir)
    except NonlocalFrontsError as exc:
        row.update(status="failed", error=f"{type(exc).__name__}: {exc}".replace("\n", " "))
        return row
    except Exception as exc:  # noqa: BLE001 - a sweep records every cell failure
        row.update(status="failed", error="".join(traceback.format_exception_only(type(exc), exc)).strip())
        return row
    tr = res.traces[0] if res.traces else None
    row["regime"] = res.regime.value if res.regime else ""
    row["predicted"] = res.predicted.value if res.predicted else ""
    row["censored"] = bool(tr and tr.censored)
    if tr is not None and tr.fits:
        pw = tr.fits[fronts.FitModel.POWER_LAW]
        ex = tr.fits[fronts.FitModel.EXPONENTIAL_OF_POWER]
        ln = tr.fits[fronts.FitModel.LINEAR_SPEED]
        row.update(exponent=pw.exponent, slope=ex.slope, speed=ln.speed,
                   r_squared=max(f.r_squared for f in tr.fits.values()))
    else:
        row["status"] = "no_fit"
    return row


def run_sweep(sweep, outdir, workers=None):
    """Run every cell (concurrently) and write ``phase_diagram.csv``.

    Cell failures are recorded in the table and do not stop the sweep.
    Returns the list of row dicts.
    """
    if not isinstance(sweep, SweepConfig):
        sweep = parse_sweep(sweep)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = []
    for alpha, exponent in itertools.product(sweep.alphas, sweep.exponents):
        doc = _cell_doc(sweep.base, sweep.exponent_key, alpha, exponent, sweep.overrides)
        jobs.append((doc, outdir / "cells" / doc["name"]))
    workers = workers or sweep.workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            rows = list(pool.map(_run_cell, jobs))
    else:
        rows = [_run_cell(j) for j in jobs]
    with (outdir / "phase_diagram.csv").open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=PHASE_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(row.get(k, "")) for k in PHASE_COLUMNS})
    return rows


def _fmt(v):
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return v
