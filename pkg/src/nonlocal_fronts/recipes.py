"""Desk-scale reproduction recipes.

Every recipe is a plain run or sweep configuration. Domains and horizons
are reduced so that each run takes seconds to a few minutes on a laptop;
they reproduce the qualitative regime (finite speed, algebraic or
exponential acceleration), not any published picture pixel for pixel.
All runs start from ``1_{x<=0}`` with ``gamma = 2`` and the unit second
moment inner law.
"""

from __future__ import annotations

import copy

__all__ = ["RECIPES", "get_recipe", "list_recipes"]


def _run(desc, kernel, alpha, grid, lambdas=(0.5,), r=1.0, kind="run"):
    return {
        "kind": kind,
        "description": desc,
        "config": {
            "kernel": kernel,
            "reaction": {"family": "weakly_degenerate", "r": r, "alpha": alpha},
            "grid": grid,
            "analysis": {"lambdas": list(lambdas), "window": 0.5},
        },
    }


def _uniform(L, N, T, M, count):
    return {"L": L, "N": N, "T": T, "M": M, "snapshot_count": count, "snapshot_spacing": "uniform"}


def _geometric(L, N, T, M, count=40):
    return {"L": L, "N": N, "T": T, "M": M, "snapshot_count": count, "snapshot_spacing": "geometric"}


def _subexp(beta):
    return {"family": "subexponential", "beta": beta}


def _alg(s):
    return {"family": "algebraic", "s": s}


# horizons for the algebraic kernel, per (alpha, s); the front stays inside L = 1e5
_ALG_T = {(0.5, 0.5): 15.0, (0.5, 1.0): 40.0, (0.5, 2.0): 170.0,
          (1.0, 0.5): 40.0, (1.0, 1.0): 150.0, (1.0, 2.0): 700.0}

RECIPES = {}

# At r=1 and this scale the power-law and linear fits agree to ~1e-4 in R^2,
# so the regime comes from the tie rule of fronts.classify_regime; the
# criterion5 recipe (r=10) separates the two fits decisively.
_TIE = " (desk scale: power/linear fits tie, resolved by the predicted regime)"

for _alpha, _fig in ((0.2, "fig4"), (0.4, "fig5")):
    RECIPES[f"{_fig}a"] = _run(f"sub-exponential beta=0.35, alpha={_alpha}: algebraic acceleration" + _TIE,
                               _subexp(0.35), _alpha, _uniform(20000.0, 20000, 20.0, 800, 41))
    RECIPES[f"{_fig}b"] = _run(f"sub-exponential beta=0.45, alpha={_alpha}: algebraic acceleration" + _TIE,
                               _subexp(0.45), _alpha, _uniform(20000.0, 20000, 30.0, 1200, 41))
    RECIPES[f"{_fig}c"] = _run(f"sub-exponential beta=2, alpha={_alpha}: finite speed",
                               _subexp(2.0), _alpha, _uniform(200.0, 2000, 60.0, 1200, 31))

for _alpha, _fig in ((0.5, "fig6"), (1.0, "fig7")):
    for _s, _tag in ((0.5, "a"), (1.0, "b"), (2.0, "c")):
        RECIPES[f"{_fig}{_tag}"] = _run(
            f"algebraic s={_s:g}, alpha={_alpha:g}: exponential acceleration (lambda=0.1)",
            _alg(_s), _alpha, _geometric(100000.0, 25000, _ALG_T[(_alpha, _s)], 1000), lambdas=(0.1,))

RECIPES["criterion5"] = _run(
    "algebraic acceleration check: alpha=0.2, beta=0.35, r=10 (reaction time scale shortened so the "
    "late-time law is reached before truncation)",
    _subexp(0.35), 0.2, _uniform(8000.0, 8000, 2.2, 440, 23), r=10.0)
RECIPES["criterion6"] = _run("finite-speed check: alpha=0.2, beta=2", _subexp(2.0), 0.2,
                             _uniform(200.0, 2000, 60.0, 1200, 31))
RECIPES["criterion7"] = _run("exponential acceleration check: alpha=1, s=1, lambda=0.1", _alg(1.0), 1.0,
                             _uniform(4000.0, 8000, 100.0, 1000, 26), lambdas=(0.1,))

RECIPES["fig2-sweep"] = {
    "kind": "sweep",
    "description": "phase diagram in (beta, alpha): beta in {0.35, 1/(alpha+1), 2}, alpha in {0.2, 0.4, 1}",
    "config": {
        "base": {
            "kernel": _subexp(0.35),
            "reaction": {"family": "weakly_degenerate", "r": 1.0, "alpha": 0.2},
            "grid": _geometric(20000.0, 20000, 60.0, 1200),
            "analysis": {"lambdas": [0.5], "window": 0.5},
        },
        "sweep": {"alpha": [0.2, 0.4, 1.0], "beta": [0.35, "critical", 2.0], "workers": 3},
    },
}

RECIPES["algebraic-sweep"] = {
    "kind": "sweep",
    "description": "algebraic kernels s in {0.5, 1, 2} at alpha in {0.5, 1}: exponential acceleration everywhere",
    "config": {
        "base": {
            "kernel": _alg(1.0),
            "reaction": {"family": "weakly_degenerate", "r": 1.0, "alpha": 1.0},
            "grid": _geometric(100000.0, 25000, 150.0, 1000),
            "analysis": {"lambdas": [0.1], "window": 0.5},
        },
        "sweep": {
            "alpha": [0.5, 1.0],
            "s": [0.5, 1.0, 2.0],
            "workers": 3,
            "overrides": [{"when": {"alpha": a, "s": s}, "grid": {"T": T}} for (a, s), T in _ALG_T.items()],
        },
    },
}


def list_recipes():
    """``[(name, kind, description), ...]`` sorted by name."""
    return [(name, r["kind"], r["description"]) for name, r in sorted(RECIPES.items())]


def get_recipe(name):
    """Deep copy of a recipe; raises KeyError for unknown names."""
    if name not in RECIPES:
        raise KeyError(f"unknown recipe {name!r}; see 'recipes list'")
    r = copy.deepcopy(RECIPES[name])
    if r["kind"] == "run":
        r["config"]["name"] = name
    return r
