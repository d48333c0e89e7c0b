"""IMEX time loop: implicit jump operator, explicit reaction.

Each step solves

    ((1 + 2 dt J_L) I - dt D_lin) X_{i+1} = X_i + dt f(X_i) + dt (l + r) J_L + dt b

for the interior field. The stored field is never clamped; only the reaction
evaluation clamps its argument, so scheme defects stay visible to the
invariant checks.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import reaction as react
from .discretization import ExtendedField, Grid, assemble_system, step_function_field
from .errors import ConfigError, NumericalBlowUpError
from .toeplitz import solve

__all__ = [
    "SimulationState",
    "SolverStats",
    "SnapshotArchive",
    "StabilityWarning",
    "step",
    "run",
    "default_snapshot_times",
    "snapshot_indices",
    "write_manifest",
]

logger = logging.getLogger(__name__)


class StabilityWarning(UserWarning):
    """Explicit reaction step is large compared with ``1 / sup |f'|``."""


@dataclass
class SolverStats:
    method: str = "cg"
    solves: int = 0
    total_iterations: int = 0
    max_iterations: int = 0
    max_residual: float = 0.0
    wall_time: float = 0.0

    def record(self, info):
        self.solves += 1
        self.total_iterations += info.iterations
        self.max_iterations = max(self.max_iterations, info.iterations)
        self.max_residual = max(self.max_residual, info.residual)

    def to_dict(self):
        return {
            "method": self.method,
            "solves": self.solves,
            "total_iterations": self.total_iterations,
            "max_iterations": self.max_iterations,
            "mean_iterations": self.total_iterations / self.solves if self.solves else 0.0,
            "max_relative_residual": self.max_residual,
            "wall_time_s": self.wall_time,
        }


@dataclass
class SimulationState:
    """Field ``u_{i, .}`` at time index ``i`` plus the recorded snapshots."""

    grid: Grid
    time_index: int
    field: ExtendedField
    snapshots: list = field(default_factory=list)

    @property
    def t(self):
        return self.time_index * self.grid.dt

    @classmethod
    def initial(cls, grid, interior=None, left_value=1.0, right_value=0.0):
        """State at ``t = 0``; defaults to the step datum ``1_{x <= 0}``."""
        if interior is None:
            fld = step_function_field(grid)
            fld.left_value, fld.right_value = float(left_value), float(right_value)
        else:
            arr = np.array(interior, dtype=float)
            if arr.shape != (grid.N + 1,):
                raise ConfigError(f"initial field must have {grid.N + 1} values, got shape {arr.shape}")
            fld = ExtendedField(arr, float(left_value), float(right_value))
        return cls(grid, 0, fld, [])


def step(state, system, reaction=None, method="cg", stats=None):
    """Advance one time step and return the new state.

    ``reaction`` defaults to ``system.reaction``; ``None`` in both means
    ``f = 0``. The snapshot list is carried over by reference.
    """
    if state.time_index >= state.grid.M:
        raise ConfigError(f"time index {state.time_index} already at M = {state.grid.M}")
    reaction = system.reaction if reaction is None else reaction
    X = state.field.interior
    i = state.time_index + 1
    if not np.all(np.isfinite(X)):
        raise NumericalBlowUpError(f"non-finite field entering step {i}", time_index=i - 1)
    F = np.zeros_like(X) if reaction is None else react.evaluate(reaction, X)
    rhs = system.rhs(X, F)
    if not np.all(np.isfinite(rhs)):
        raise NumericalBlowUpError(f"non-finite right-hand side at time index {i}", time_index=i)
    # warm start: the previous field is an excellent CG initial guess
    extra = {"x0": X} if method == "cg" else {}
    Xn, info = solve(system.matrix, rhs, method=method, return_info=True, **extra)
    if not np.all(np.isfinite(Xn)):
        raise NumericalBlowUpError(f"non-finite field at time index {i}", time_index=i)
    if stats is not None:
        stats.record(info)
    fld = ExtendedField(Xn, state.field.left_value, state.field.right_value)
    return SimulationState(state.grid, i, fld, state.snapshots)


def default_snapshot_times(T, K=10):
    """Geometric schedule ``t_k = T 2^(k-K)``, ``k = 0..K``."""
    return [T * 2.0 ** (k - K) for k in range(K + 1)]


def snapshot_indices(grid, times):
    """Nearest time indices for requested snapshot times, always including 0."""
    idx = {0}
    for t in times:
        if not 0.0 <= t <= grid.T * (1 + 1e-12):
            raise ConfigError(f"snapshot time {t} outside [0, {grid.T}]")
        if grid.M:
            idx.add(min(int(round(t / grid.dt)), grid.M))
    return sorted(idx)


@dataclass
class SnapshotArchive:
    """Recorded snapshots ``(t_k, u(t_k, .))`` of one run."""

    grid: Grid
    times: np.ndarray
    fields: np.ndarray
    stats: SolverStats
    warnings: list = field(default_factory=list)

    @property
    def x(self):
        return self.grid.x

    def __len__(self):
        return len(self.times)

    def write_csv(self, path):
        """One row per (t, x) pair, header ``t,x,u``."""
        path = Path(path)
        x = self.grid.x
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "u"])
            for t, u in zip(self.times, self.fields):
                for xj, uj in zip(x, u):
                    w.writerow([repr(float(t)), repr(float(xj)), repr(float(uj))])
        return path

    @classmethod
    def read_csv(cls, path, grid):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        times = np.unique(data[:, 0])
        fields = data[:, 2].reshape(times.size, grid.N + 1)
        return cls(grid, times, fields, SolverStats())


def run(kernel, reaction, grid, snapshot_times=None, method="cg", initial=None,
        left_value=1.0, right_value=0.0, observer=None):
    """Run ``M`` steps and return ``(final_state, archive)``.

    Parameters
    ----------
    kernel, reaction, grid
        Problem definition. ``reaction`` may be ``None`` for ``f = 0``.
    snapshot_times : sequence of float, optional
        Requested times, rounded to the nearest grid time. Defaults to
        :func:`default_snapshot_times`.
    method : {"cg", "dense", "levinson"}
        Linear solver for the implicit step.
    initial : array, optional
        Interior initial field; defaults to ``1_{x <= 0}``.
    observer : callable, optional
        Called as ``observer(i, previous_interior, new_interior)`` after every
        step; used by the invariant checks without storing every field.
    """
    if snapshot_times is None:
        snapshot_times = default_snapshot_times(grid.T)
    wanted = set(snapshot_indices(grid, snapshot_times))
    stats = SolverStats(method=method)
    notes = []
    if reaction is not None and grid.M:
        slope = react.max_slope_estimate(reaction)
        if grid.dt * slope > 1.0:
            msg = f"dt * sup|f'| = {grid.dt * slope:.3g} > 1: explicit reaction step may be inaccurate"
            warnings.warn(msg, StabilityWarning, stacklevel=2)
            logger.warning(msg)
            notes.append(msg)
    state = SimulationState.initial(grid, initial, left_value, right_value)
    times, fields = [], []
    if 0 in wanted:
        times.append(0.0)
        fields.append(state.field.interior.copy())
    start = time.perf_counter()
    if grid.M:
        system = assemble_system(kernel, grid, reaction, left_value, right_value)
        for _ in range(grid.M):
            prev = state.field.interior
            state = step(state, system, reaction, method, stats)
            if observer is not None:
                observer(state.time_index, prev, state.field.interior)
            if state.time_index in wanted:
                times.append(state.t)
                fields.append(state.field.interior.copy())
    stats.wall_time = time.perf_counter() - start
    state.snapshots = list(zip(times, fields))
    archive = SnapshotArchive(grid, np.array(times), np.array(fields), stats, notes)
    return state, archive


def write_manifest(path, config_echo, archive, extra=None):
    """JSON run manifest: configuration echo, solver statistics, wall time."""
    import numpy
    import scipy

    from . import __version__

    doc = {
        "config": config_echo,
        "versions": {"nonlocal_fronts": __version__, "numpy": numpy.__version__, "scipy": scipy.__version__},
        "solver": archive.stats.to_dict(),
        "snapshots": len(archive),
        "warnings": list(archive.warnings),
    }
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, default=_json_default))
    return doc


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")
