"""Validation suites: solver cross-checks, consistency, invariants, reference profiles.

Every check returns a :class:`CheckResult`; :func:`run_suite` groups them
by selector (``toeplitz``, ``discretization``, ``invariants``, ``reference``,
``lemma2.1``, ``all``) into a machine-readable :class:`ValidationReport`.
Failures are report content, never exceptions.
"""

from __future__ import annotations

import inspect
import json
import math
import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from . import kernel as kern
from . import reaction as react
from .discretization import ExtendedField, Grid, assemble_system, build_operator, spike_readout_matrix
from .kernel import KernelSpec
from .reaction import ReactionSpec
from .reference import profiles as prof
from .reference.residual import C0_CAP, search_speed
from .reference.smoothers import SmootherKind, make_smoother
from .toeplitz import SymToeplitz, solve

__all__ = [
    "CheckResult",
    "ValidationReport",
    "SUITES",
    "run_suite",
    "check_cross_derivation",
    "check_solver_equivalence",
    "check_matvec_scaling",
    "check_operator_consistency",
    "check_invariants",
    "check_reference_profiles",
    "check_travelling_wave",
    "invariant_run",
]


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  ({self.elapsed:.2f} s)"

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "elapsed_s": self.elapsed,
                "details": _jsonable(self.details)}


@dataclass
class ValidationReport:
    suite: str
    checks: list

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {"suite": self.suite, "passed": self.ok,
                "n_passed": sum(c.passed for c in self.checks), "n_checks": len(self.checks),
                "checks": [c.to_dict() for c in self.checks]}

    def write_json(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _timed(name, fun, *args, **kwargs):
    start = time.perf_counter()
    try:
        passed, details = fun(*args, **kwargs)
    except Exception as exc:  # noqa: BLE001 - failures are report content
        passed, details = False, {"error": f"{type(exc).__name__}: {exc}",
                                  "traceback": traceback.format_exc(limit=3)}
    return CheckResult(name, bool(passed), details, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# discretisation and solvers
# ---------------------------------------------------------------------------

CROSS_KERNELS = (
    KernelSpec.subexponential(0.35),
    KernelSpec.subexponential(0.45),
    KernelSpec.subexponential(2.0),
    KernelSpec.algebraic(0.5),
    KernelSpec.algebraic(1.0),
    KernelSpec.algebraic(2.0),
)


def closed_form_matrix(kernel, grid):
    """Dense linear part ``T - 2 J_L I`` of the closed-form operator."""
    op = build_operator(kernel, grid, 0.0, 0.0)
    return op.toeplitz.todense() - 2.0 * op.tail_mass * np.eye(grid.N + 1)


def _cross_derivation(n_configs, seed, max_n):
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = []
    for _ in range(n_configs):
        k = CROSS_KERNELS[rng.integers(len(CROSS_KERNELS))]
        N = int(rng.integers(4, max_n + 1))
        L = float(rng.uniform(2.0, 30.0))
        grid = Grid(L, N, 1.0, 1, 2.0)
        diff = float(np.max(np.abs(closed_form_matrix(k, grid) - spike_readout_matrix(k, grid))))
        worst = max(worst, diff)
        cases.append({"kernel": k.to_dict(), "N": N, "L": L, "max_diff": diff})
    return worst < 1e-12, {"max_entry_difference": worst, "cases": cases}


def check_cross_derivation(n_configs=20, seed=0, max_n=64):
    """Closed-form matrix equals the spike readout of the quadrature."""
    return _timed("discretization: closed form vs spike readout", _cross_derivation, n_configs, seed, max_n)


def _solver_equivalence(N, dt, L, kernels):
    worst_pair, worst_res = 0.0, 0.0
    rows = []
    for k in kernels:
        grid = Grid(L, N, dt * 10, 10, 2.0)
        system = assemble_system(k, grid, ReactionSpec.weakly_degenerate(1.0, 0.2))
        X0 = ExtendedField(np.where(grid.x <= 0.0, 1.0, 0.0), 1.0, 0.0).interior
        b = system.rhs(X0, react.evaluate(system.reaction, X0))
        xc, info = solve(system.matrix, b, "cg", return_info=True)
        xd = solve(system.matrix, b, "dense")
        xl = solve(system.matrix, b, "levinson")
        scale = np.linalg.norm(xd)
        pairs = [np.linalg.norm(xc - xd) / scale, np.linalg.norm(xc - xl) / scale, np.linalg.norm(xd - xl) / scale]
        worst_pair = max(worst_pair, *pairs)
        worst_res = max(worst_res, info.residual)
        rows.append({"kernel": k.to_dict(), "cg_dense": pairs[0], "cg_levinson": pairs[1],
                     "dense_levinson": pairs[2], "cg_residual": info.residual, "cg_iterations": info.iterations})
    return worst_pair <= 1e-9 and worst_res <= 1e-10, {
        "max_relative_difference": worst_pair, "max_cg_residual": worst_res, "cases": rows}


def check_solver_equivalence(N=128, dt=0.01, L=10.0, kernels=CROSS_KERNELS):
    """CG, dense and Levinson agree on the assembled implicit system."""
    return _timed("toeplitz: CG / dense / Levinson agreement", _solver_equivalence, N, dt, L, kernels)


def _matvec_scaling(sizes, repeats, max_slope):
    rng = np.random.default_rng(1)
    times = []
    small_err = 0.0
    for n in sizes:
        row = rng.standard_normal(n) / (1.0 + np.arange(n))
        T = SymToeplitz(row)
        x = rng.standard_normal(n)
        if n <= 1024:
            small_err = max(small_err, float(np.max(np.abs(T.matvec(x) - T.todense() @ x))))
        best = math.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            T.matvec(x)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
    big = [i for i, n in enumerate(sizes) if n >= 4096]
    slope = float(np.polyfit(np.log([sizes[i] for i in big]), np.log([times[i] for i in big]), 1)[0])
    return slope <= max_slope and small_err < 1e-10, {
        "sizes": list(sizes), "seconds": times, "loglog_slope": slope, "max_slope": max_slope,
        "small_n_max_error": small_err}


def check_matvec_scaling(sizes=(256, 1024, 4096, 16384, 65536, 131072), repeats=7, max_slope=1.5):
    """FFT matvec matches the dense product and scales like ``N log N``."""
    return _timed("toeplitz: matvec N-scaling", _matvec_scaling, sizes, repeats, max_slope)


def gaussian_oracle(kernel, x0, x):
    """Adaptive-quadrature ``D[u](x)`` for ``u = exp(-(y - x0)^2)``."""
    u = lambda z: math.exp(-((z - x0) ** 2))  # noqa: E731
    ux = u(x)

    def integrand(y):
        return (u(x - y) + u(x + y) - 2.0 * ux) * kern.evaluate(kernel, y)

    # near 0 the unit second moment law makes the integrand a smooth quotient
    inner = lambda y: (u(x - y) + u(x + y) - 2.0 * ux) / (y * y) if y > 1e-4 else (  # noqa: E731
        (4.0 * (x - x0) ** 2 - 2.0) * ux)
    if kernel.inner_law is kern.InnerLaw.UNIT_SECOND_MOMENT:
        a, _ = integrate.quad(inner, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    else:
        a, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    # the bump of u(x -+ y) sits at y = |x - x0|
    bump = [abs(x - x0)] if 1.0 < abs(x - x0) < 60.0 else None
    b, _ = integrate.quad(integrand, 1.0, 60.0, epsabs=1e-13, epsrel=1e-11, limit=400, points=bump)
    c, _ = integrate.quad(integrand, 60.0, np.inf, epsabs=1e-15, epsrel=1e-12, limit=200)
    return a + b + c


def _operator_consistency(kernel, L, dxs, points):
    x0 = L / 2.0
    exact = np.array([gaussian_oracle(kernel, x0, x) for x in points])
    errors = []
    for dx in dxs:
        N = int(round(L / dx))
        grid = Grid(L, N, 1.0, 1, 2.0)
        op = build_operator(kernel, grid, 0.0, 0.0)
        u = np.exp(-((grid.x - x0) ** 2))
        du = op.apply(u)
        idx = np.rint(np.asarray(points) / grid.dx).astype(int)
        errors.append(np.abs(du[idx] - exact))
    errors = np.array(errors)
    orders = np.log2(errors[:-1] / errors[1:])
    observed = float(np.min(orders))
    return observed >= 1.8, {"dx": list(dxs), "points": list(points), "oracle": exact,
                             "errors": errors, "orders": orders, "min_order": observed}


def check_operator_consistency(kernel=None, L=40.0, dxs=(0.1, 0.05, 0.025), points=(16.0, 18.5, 20.0, 21.5, 24.0)):
    """Discrete operator converges to the quadrature value on a Gaussian at order about 2."""
    kernel = KernelSpec.algebraic(1.0) if kernel is None else kernel
    return _timed("discretization: operator consistency on a Gaussian", _operator_consistency,
                  kernel, L, dxs, points)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


@dataclass
class InvariantStats:
    min_value: float = math.inf
    max_value: float = -math.inf
    spatial_violation: float = 0.0
    temporal_violation: float = 0.0
    comparison_violation: float = 0.0
    steps: int = 0

    def to_dict(self):
        return dict(self.__dict__)


def invariant_run(kernel, reaction, grid, shift=None, method="cg"):
    """Step ``1_{x<=0}`` and a larger datum ``1_{x<=shift}`` together.

    Tracks the range, spatial monotonicity (``u_{j+1} <= u_j``), temporal
    monotonicity at ``j >= 1`` (for ``1_{x<=0}``) and the ordering of the two
    solutions.
    """
    system = assemble_system(kernel, grid, reaction)
    x = grid.x
    shift = grid.L / 10.0 if shift is None else shift
    u = np.where(x <= 0.0, 1.0, 0.0)
    v = np.where(x <= shift, 1.0, 0.0)
    st = InvariantStats()

    def record(arr):
        st.min_value = min(st.min_value, float(arr.min()))
        st.max_value = max(st.max_value, float(arr.max()))
        st.spatial_violation = max(st.spatial_violation, float(np.max(np.diff(arr), initial=0.0)))

    record(u)
    record(v)
    for _ in range(grid.M):
        un = solve(system.matrix, system.rhs(u, react.evaluate(reaction, u)), method)
        vn = solve(system.matrix, system.rhs(v, react.evaluate(reaction, v)), method)
        record(un)
        record(vn)
        # only the front-like datum is a sub-solution, so only it must grow
        st.temporal_violation = max(st.temporal_violation, float(np.max(u[1:] - un[1:])))
        st.comparison_violation = max(st.comparison_violation, float(np.max(un - vn)))
        u, v = un, vn
        st.steps += 1
    return st, u


def _invariants(kernel, reaction, grid, tol):
    st, _ = invariant_run(kernel, reaction, grid)
    passed = (st.min_value >= -tol and st.max_value <= 1.0 + tol and st.spatial_violation <= tol
              and st.temporal_violation <= tol and st.comparison_violation <= tol)
    return passed, {"grid": grid.to_dict(), "tolerance": tol, **st.to_dict()}


def check_invariants(kernel=None, reaction=None, grid=None, tol=1e-8):
    """Range, monotonicity and comparison on a run (desk-scale default)."""
    kernel = KernelSpec.subexponential(0.35) if kernel is None else kernel
    reaction = ReactionSpec.weakly_degenerate(1.0, 0.4) if reaction is None else reaction
    grid = Grid(100.0, 1000, 5.0, 250) if grid is None else grid
    return _timed(f"invariants: N={grid.N}, M={grid.M}", _invariants, kernel, reaction, grid, tol)


# ---------------------------------------------------------------------------
# reference profiles
# ---------------------------------------------------------------------------


def default_profiles():
    return {
        "travelling_wave": prof.TWProfileConfig(0.6, p=0.8),
        "algebraic_super": prof.AlgProfileConfig("super", alpha=0.2, beta=0.35),
        "algebraic_sub": prof.AlgProfileConfig("sub", alpha=1.0, beta=0.5),
        "exponential_super": prof.ExpProfileConfig("super", alpha=1.0, s=1.0),
        "exponential_sub": prof.ExpProfileConfig("sub", alpha=1.0, s=1.0),
    }


def _level_range(cfg):
    if isinstance(cfg, prof.TWProfileConfig):
        return 0.0, 1.0
    if cfg.variant is prof.Variant.SUPER:
        return 0.0, 2.0
    return (0.0, 1.0) if isinstance(cfg, prof.AlgProfileConfig) else (0.0, math.e)


def _round_trips(n, seed):
    rng = np.random.default_rng(seed)
    out = {}
    for name, cfg in default_profiles().items():
        lo, hi = _level_range(cfg)
        t_lo = getattr(cfg, "t_star", 0.0)
        worst = 0.0
        for _ in range(n):
            t = t_lo * (1.0 + 20.0 * rng.random()) if t_lo else 10.0 * rng.random()
            lam = lo + (hi - lo) * rng.uniform(1e-3, 1.0 - 1e-3)
            x = prof.level_position(cfg, t, lam)
            worst = max(worst, abs(prof.eval_profile(cfg, t, x) - lam))
        out[name] = worst
    return out


def _closed_vs_bisect(n, seed):
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for beta, alpha in ((0.5, 1.0), (0.35, 0.2), (0.3, 2.0)):
        cfg = prof.AlgProfileConfig("sub", alpha=alpha, beta=beta)
        for _ in range(n):
            t, lam = 20.0 * rng.random(), rng.uniform(0.01, 0.99)
            a = cfg.level_position(t, lam, method="closed")
            b = cfg.level_position(t, lam, method="bisect")
            worst = max(worst, abs(a - b))
    return worst


def smoother_contract(kind, eps, alpha=1.0, n=10_000):
    """Maximum violations of the smoother inequalities at ``n`` samples."""
    g = make_smoother(SmootherKind(kind), eps, alpha)
    if SmootherKind(kind) is SmootherKind.CUBIC_C1:
        y = np.linspace(0.0, eps, n)
        val, d1 = g(y), g(y, 1)
        return {
            "lower (y <= g)": float(np.max(y - val)),
            "upper (g <= 3y)": float(np.max(val - 3.0 * y)),
            "g' >= 0": float(np.max(-d1)),
            "g(eps) = eps": abs(float(g(eps)) - eps),
            "g'(eps) = 0": abs(float(g(eps, 1))),
        }
    y = np.linspace(0.0, 1.0, n)
    val, d1 = g(y), g(y, 1)
    pos = y > 0
    lhs = d1[pos] * y[pos] / (1.0 - np.log(y[pos])) ** alpha
    rhs = val[pos] / (1.0 - np.log(val[pos])) ** alpha
    ident = y <= eps / 2
    cap = y >= 1.5 * eps
    return {
        "g <= y": float(np.max(val - y)),
        "g' >= 0": float(np.max(-d1)),
        "g' <= 1": float(np.max(d1 - 1.0)),
        "composite": float(np.max(lhs - rhs)),
        "identity on [0, eps/2]": float(np.max(np.abs(val[ident] - y[ident]))),
        "constant on [3eps/2, 1]": float(np.max(np.abs(val[cap] - eps), initial=0.0)),
    }


def _phi_bounds(n, seed):
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    checked = 0
    for alpha, s in ((1.0, 1.0), (0.5, 0.5), (1.0, 2.0)):
        cfg = prof.ExpProfileConfig("sub", alpha=alpha, s=s)
        per = n // 3 + 1
        while per:
            t = cfg.t_star * (1.0 + 20.0 * rng.random())
            x = cfg.lower_position_bound(t) * math.exp(5.0 * rng.random())
            v = cfg.value(t, x)
            if v is None:
                continue
            lo, hi = cfg.phi_bounds(t, x)
            worst = max(worst, (lo - v) / lo, (v - hi) / hi)
            per -= 1
            checked += 1
    return worst, checked


def _reference_suite(n_trips, n_smoother, n_phi, seed):
    trips = _round_trips(n_trips, seed)
    closed = _closed_vs_bisect(n_trips, seed)
    smooth = {}
    ok_smooth = True
    for kind, eps, alpha in (("cubic", 0.1, 1.0), ("cubic", 0.3, 1.0), ("quintic", 0.1, 1.0),
                             ("quintic", 0.2, 0.2), ("quintic", 0.05, 2.0)):
        c = smoother_contract(kind, eps, alpha, n_smoother)
        smooth[f"{kind} eps={eps} alpha={alpha}"] = c
        ok_smooth &= all(v <= 1e-12 for v in c.values())
    phi_worst, phi_n = _phi_bounds(n_phi, seed)
    passed = max(trips.values()) <= 1e-8 and closed <= 1e-10 and ok_smooth and phi_worst <= 1e-12
    return passed, {"round_trip_max_error": trips, "closed_vs_bisect_max_diff": closed,
                    "smoother_max_violations": smooth, "phi_bounds_max_relative_violation": phi_worst,
                    "phi_samples": phi_n}


def check_reference_profiles(n_trips=100, n_smoother=10_000, n_phi=1000, seed=0):
    """Level round trips, closed form vs bisection, smoother contracts, phi bounds."""
    return _timed("reference: profiles, levels and smoothers", _reference_suite, n_trips, n_smoother, n_phi, seed)


def _travelling_wave(beta, alpha, p, n, span, workers, outdir):
    cfg = prof.TWProfileConfig(beta, p=p)
    xs = np.linspace(-span, span, n)
    rep = search_speed(cfg, KernelSpec.subexponential(beta), ReactionSpec.weakly_degenerate(1.0, alpha), xs,
                       workers=workers)
    details = {"L": cfg.L, **rep.summary()}
    if outdir is not None:
        Path(outdir).mkdir(parents=True, exist_ok=True)
        details["residual_csv"] = str(rep.write_csv(Path(outdir) / "travelling_wave_residuals.csv"))
    return rep.ok and rep.c0 <= C0_CAP, details


def check_travelling_wave(beta=0.6, alpha=1.0, p=0.8, n=200, span=50.0, workers=1, outdir=None):
    """Doubling search for a speed making the travelling-wave profile a super-solution.

    With ``outdir`` the residual samples of the accepted speed are written
    to ``travelling_wave_residuals.csv`` there.
    """
    return _timed("travelling wave: residual speed search", _travelling_wave, beta, alpha, p, n, span, workers,
                  outdir)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

SUITES = {
    "toeplitz": (check_solver_equivalence, check_matvec_scaling),
    "discretization": (check_cross_derivation, check_operator_consistency),
    "invariants": (check_invariants,),
    "reference": (check_reference_profiles,),
    "lemma2.1": (check_travelling_wave,),
}


def run_suite(selector="all", progress=None, outdir=None):
    """Run a named suite (or ``"all"``) and return its report.

    ``outdir`` is handed to checks that write artifacts (residual reports).
    """
    if selector == "all":
        checks = [c for group in SUITES.values() for c in group]
    elif selector in SUITES:
        checks = list(SUITES[selector])
    else:
        raise KeyError(f"unknown suite {selector!r}; choose from {sorted(SUITES) + ['all']}")
    results = []
    for check in checks:
        takes_dir = "outdir" in inspect.signature(check).parameters
        res = check(outdir=outdir) if takes_dir and outdir is not None else check()
        if progress is not None:
            progress(res)
        results.append(res)
    return ValidationReport(selector, results)
