"""Acceptance suite: the ten release criteria, one pass/fail line each.

The lines are printed as each criterion finishes (visible with ``-s``) and
repeated in the terminal summary. Run alone with::

    pytest tests/test_acceptance.py -v

Criteria 4 and 10 are production scale and marked ``slow``.
"""

import math
import time

import pytest

from nonlocal_fronts import stepper, validation
from nonlocal_fronts.discretization import Grid, assemble_system
from nonlocal_fronts.fronts import FitModel
from nonlocal_fronts.kernel import KernelSpec
from nonlocal_fronts.reaction import ReactionSpec
from nonlocal_fronts.recipes import get_recipe
from nonlocal_fronts.runs import run_single

RESULTS = {}


def record(number, title, passed, detail):
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    RESULTS[number] = line
    print(line)
    return passed


def timed(check, **kwargs):
    start = time.perf_counter()
    res = check(**kwargs)
    return res, time.perf_counter() - start


def recipe_trace(name):
    res = run_single(get_recipe(name)["config"])
    return res, res.traces[0]


def test_criterion_01_cross_derivation():
    res, secs = timed(validation.check_cross_derivation, n_configs=20, max_n=64)
    diff = res.details["max_entry_difference"]
    ok = res.passed and diff < 1e-12 and secs < 10.0
    assert record(1, "discretisation cross-derivation", ok,
                  f"max entry difference {diff:.2e} over 20 configurations, {secs:.1f} s"), res.details


def test_criterion_02_solver_equivalence():
    res, secs = timed(validation.check_solver_equivalence, N=128, dt=0.01)
    d = res.details
    ok = res.passed and secs < 5.0
    assert record(2, "Toeplitz solver equivalence", ok,
                  f"max relative difference {d['max_relative_difference']:.2e}, "
                  f"CG residual {d['max_cg_residual']:.2e}, {secs:.1f} s"), d


def test_criterion_03_operator_consistency():
    res, secs = timed(validation.check_operator_consistency, kernel=KernelSpec.algebraic(1.0), L=40.0,
                      dxs=(0.1, 0.05, 0.025))
    order = res.details["min_order"]
    ok = res.passed and order >= 1.8 and secs < 30.0
    assert record(3, "operator consistency", ok, f"minimum observed order {order:.3f}, {secs:.1f} s"), res.details


@pytest.mark.slow
def test_criterion_04_invariants_production_run():
    grid = Grid(400.0, 8000, 30.0, 3000)
    res, secs = timed(validation.check_invariants, kernel=KernelSpec.subexponential(0.35),
                      reaction=ReactionSpec.weakly_degenerate(1.0, 0.4), grid=grid, tol=1e-8)
    d = res.details
    worst = max(-d["min_value"], d["max_value"] - 1.0, d["spatial_violation"], d["temporal_violation"],
                d["comparison_violation"])
    assert record(4, "invariant suite (N=8000, M=3000)", res.passed,
                  f"range [{d['min_value']:.3g}, {d['max_value']:.12g}], worst violation {worst:.1e}, "
                  f"{secs:.0f} s"), d


def test_criterion_05_algebraic_acceleration():
    res, tr = recipe_trace("criterion5")
    pw, ln = tr.fits[FitModel.POWER_LAW], tr.fits[FitModel.LINEAR_SPEED]
    theory = 1.0 / (0.35 * 1.2)
    ok = 1.5 <= pw.exponent <= 3.3 and pw.r_squared > ln.r_squared
    assert record(5, "algebraic acceleration (alpha=0.2, beta=0.35)", ok,
                  f"exponent {pw.exponent:.3f} (theory {theory:.3f}), power R2 {pw.r_squared:.6f} > "
                  f"linear R2 {ln.r_squared:.6f}, regime {res.regime.value}")


def test_criterion_06_finite_speed():
    res, tr = recipe_trace("criterion6")
    ln = tr.fits[FitModel.LINEAR_SPEED]
    t, X = tr.t[tr.t > 0], tr.X[tr.t > 0]
    half = slice(int(math.floor(t.size / 2)), None)
    ratio = X[half] / t[half]
    spread = float((ratio.max() - ratio.min()) / ratio.mean())
    ok = spread < 0.10 and ln.r_squared >= 0.995
    assert record(6, "finite speed (alpha=0.2, beta=2)", ok,
                  f"X/t spread {100 * spread:.2f}% over the last half, linear R2 {ln.r_squared:.6f}, "
                  f"speed {ln.speed:.3f}")


def test_criterion_07_exponential_acceleration():
    res, tr = recipe_trace("criterion7")
    ex = tr.fits[FitModel.EXPONENTIAL_OF_POWER]
    pw, ln = tr.fits[FitModel.POWER_LAW], tr.fits[FitModel.LINEAR_SPEED]
    theory = math.sqrt(2.0) / 2.0
    ok = (ex.r_squared >= 0.97 and ex.r_squared > pw.r_squared and ex.r_squared > ln.r_squared
          and abs(ex.slope - theory) <= 0.35 * theory)
    assert record(7, "exponential acceleration (alpha=1, s=1, lambda=0.1)", ok,
                  f"slope {ex.slope:.4f} (theory {theory:.4f}), R2 exp {ex.r_squared:.5f} / "
                  f"power {pw.r_squared:.5f} / linear {ln.r_squared:.5f}")


def test_criterion_08_reference_profiles():
    res, secs = timed(validation.check_reference_profiles, n_trips=100, n_smoother=10_000, n_phi=1000)
    d = res.details
    ok = res.passed and secs < 60.0
    assert record(8, "reference-profile suite", ok,
                  f"round trip {max(d['round_trip_max_error'].values()):.1e}, closed vs bisection "
                  f"{d['closed_vs_bisect_max_diff']:.1e}, phi bounds {d['phi_samples']} samples, {secs:.1f} s"), d


def test_criterion_09_travelling_wave_residual():
    res, secs = timed(validation.check_travelling_wave, beta=0.6, alpha=1.0, p=0.8, n=200)
    d = res.details
    assert record(9, "travelling-wave residual search", res.passed,
                  f"c0 = {d['c0']:g} after {len(d['tried'])} doublings, {d['failed']} of {d['samples']} "
                  f"samples failing, {secs:.1f} s"), d


def _dense_seconds_per_step(N, L, dt, steps=3):
    k, f = KernelSpec.subexponential(0.35), ReactionSpec.weakly_degenerate(1.0, 0.2)
    grid = Grid(L, N, dt * steps, steps)
    system = assemble_system(k, grid, f)
    state = stepper.SimulationState.initial(grid)
    best = math.inf
    for _ in range(steps):
        start = time.perf_counter()
        state = stepper.step(state, system, f, method="dense")
        best = min(best, time.perf_counter() - start)
    return best


@pytest.mark.slow
def test_criterion_10_performance():
    k, f = KernelSpec.subexponential(0.35), ReactionSpec.weakly_degenerate(1.0, 0.2)
    start = time.perf_counter()
    stepper.run(k, f, Grid(1600.0, 16000, 20.0, 2000), (0.0, 10.0, 20.0), method="cg")
    cg = time.perf_counter() - start
    per_step = _dense_seconds_per_step(4000, 400.0, 0.01)
    dense = per_step * (16000 / 4000) ** 3 * 2000
    mv = validation.check_matvec_scaling()
    ok = dense >= 5.0 * cg and mv.passed
    assert record(10, "performance", ok,
                  f"CG run {cg:.1f} s vs dense extrapolated {dense:.0f} s ({dense / cg:.0f}x), "
                  f"matvec log-log slope {mv.details['loglog_slope']:.2f}"), mv.details


if __name__ == "__main__":  # pragma: no cover
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
