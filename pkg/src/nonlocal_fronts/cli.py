"""Command-line entry point: ``nonlocal-fronts {run,sweep,validate,recipes}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 validation failures present.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import parse_config, read_document
from .errors import ConfigError, NonlocalFrontsError
from .recipes import get_recipe, list_recipes
from .runs import parse_sweep, run_single, run_sweep
from .validation import SUITES, run_suite

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERICAL", "EXIT_VALIDATION"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

logger = logging.getLogger("nonlocal_fronts")


def _source(args, kind):
    """Config document from ``args.config`` or ``args.recipe``."""
    if (args.config is None) == (args.recipe is None):
        raise ConfigError(f"give exactly one of a config file or --recipe for '{kind}'")
    if args.recipe is not None:
        try:
            rec = get_recipe(args.recipe)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from None
        if rec["kind"] != kind:
            raise ConfigError(f"recipe {args.recipe!r} is a {rec['kind']} recipe; use '{rec['kind']}'")
        return rec["config"]
    return read_document(args.config)


def _cmd_run(args):
    doc = _source(args, "run")
    if args.method:
        doc.setdefault("solver", {})["method"] = args.method
    config = parse_config(doc)
    outdir = Path(args.output) if args.output else Path("runs") / config.name
    res = run_single(config, outdir)
    print(f"{config.name}: regime {res.regime.value if res.regime else 'undetermined'} "
          f"(predicted {res.predicted.value if res.predicted else 'none'})")
    for tr in res.traces:
        note = f", censored from t={tr.breach_time:g}" if tr.censored else ""
        print(f"  lambda={tr.lam:g}: {tr.t.size} samples{note}")
    print(f"artifacts in {outdir}")
    return EXIT_OK


def _cmd_sweep(args):
    sweep = parse_sweep(_source(args, "sweep"))
    outdir = Path(args.output) if args.output else Path("runs") / (args.recipe or Path(args.config).stem)
    rows = run_sweep(sweep, outdir, workers=args.workers)
    for row in rows:
        exp = f"beta={row['beta']}" if row.get("beta") != "" else f"s={row['s']}"
        status = row.get("regime") or row["status"]
        print(f"  alpha={row['alpha']:g} {exp}: {status}{' (censored)' if row.get('censored') else ''}")
    failed = [r for r in rows if r["status"] == "failed"]
    print(f"{len(rows)} cells, {len(failed)} failed; table in {outdir / 'phase_diagram.csv'}")
    return EXIT_OK


def _cmd_validate(args):
    def progress(res):
        print(res.line(), flush=True)

    report = run_suite(args.suite, progress=progress, outdir=args.outdir)
    if args.report:
        Path(args.report).parent.mkdir(parents=True, exist_ok=True)
        report.write_json(args.report)
    n_ok = sum(c.passed for c in report.checks)
    print(f"{n_ok}/{len(report.checks)} checks passed")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def _cmd_recipes(args):
    if args.action == "list":
        rows = list_recipes()
        width = max(len(n) for n, _, _ in rows)
        for name, kind, desc in rows:
            print(f"{name:<{width}}  {kind:<5}  {desc}")
        print("All recipes are desk scale: reduced domains and horizons.")
        return EXIT_OK
    try:
        rec = get_recipe(args.name)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    print(json.dumps(rec["config"], indent=2))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="nonlocal-fronts",
                                description="Nonlocal reaction-diffusion front simulations and checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one configuration")
    r.add_argument("config", nargs="?", help="TOML or JSON config, or a manifest.json to re-run")
    r.add_argument("--recipe", help="use a named recipe instead of a file")
    r.add_argument("-o", "--output", help="artifact directory (default runs/<name>)")
    r.add_argument("--method", choices=("cg", "dense", "levinson"), help="override solver.method")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("sweep", help="run a parameter sweep and write phase_diagram.csv")
    s.add_argument("config", nargs="?", help="sweep file with [base] and [sweep] tables")
    s.add_argument("--recipe", help="use a named sweep recipe instead of a file")
    s.add_argument("-o", "--output", help="output directory (default runs/<name>)")
    s.add_argument("-j", "--workers", type=int, help="override sweep.workers")
    s.set_defaults(func=_cmd_sweep)

    v = sub.add_parser("validate", help="run validation suites")
    v.add_argument("suite", nargs="?", default="all", choices=sorted(SUITES) + ["all"])
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--outdir", help="directory for residual reports")
    v.set_defaults(func=_cmd_validate)

    rc = sub.add_parser("recipes", help="list or show the bundled recipes")
    rsub = rc.add_subparsers(dest="action", required=True)
    rsub.add_parser("list", help="list recipe names")
    show = rsub.add_parser("show", help="print a recipe's configuration as JSON")
    show.add_argument("name")
    rc.set_defaults(func=_cmd_recipes)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonlocalFrontsError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
