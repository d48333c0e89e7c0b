"""Discrete nonlocal operator on the truncated domain ``[0, L]``.

The singular integral is written in symmetric form

    D[u](x) = int_0^inf (u(x-y) + u(x+y) - 2u(x)) J(y) dy

and split at ``y = L``. On ``[0, L]`` the integrand is factored as
``U_gamma(x, y) * y^gamma J(y)`` with the continuous second-difference quotient
``U_gamma`` and integrated cell by cell with the trapezoid rule weighted by the
cell moments ``Delta_n``. Beyond ``L`` both ``x - y`` and ``x + y`` lie in the
exterior, where the field is frozen to its Dirichlet values, so that piece
collapses to ``(u_left + u_right - 2u(x)) * J_L``.

Because every row sees the same weights, the linear part is a symmetric
Toeplitz matrix. :func:`build_operator` writes it down in closed form;
:func:`apply_interior` evaluates the quadrature formula directly and is kept
independent so the two can be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel as kern
from .errors import ConfigError, DomainError
from .toeplitz import SymToeplitz

__all__ = [
    "Grid",
    "ExtendedField",
    "DiscreteOperator",
    "ImexSystem",
    "lag_weights",
    "apply_interior",
    "apply_all",
    "build_operator",
    "assemble_system",
    "spike_readout_matrix",
    "step_function_field",
]


@dataclass(frozen=True)
class Grid:
    """Uniform space-time grid on ``[0, L] x [0, T]``.

    ``N`` space cells (``N + 1`` nodes ``x_j = j dx``), ``M`` time steps and the
    splitting exponent ``gamma``.
    """

    L: float
    N: int
    T: float
    M: int
    gamma: float = 2.0

    def __post_init__(self):
        problems = []
        if not (math.isfinite(self.L) and self.L > 1.0):
            problems.append(f"domain length L must exceed 1 (kernel breakpoint), got {self.L}")
        if int(self.N) != self.N or self.N < 1:
            problems.append(f"N must be a positive integer, got {self.N}")
        if not (math.isfinite(self.T) and self.T > 0):
            problems.append(f"final time T must be positive, got {self.T}")
        if int(self.M) != self.M or self.M < 0:
            problems.append(f"M must be a non-negative integer, got {self.M}")
        if not 0.0 <= self.gamma <= 2.0:
            problems.append(f"gamma must lie in [0, 2], got {self.gamma}")
        if problems:
            raise ConfigError("; ".join(problems), problems)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def dx(self):
        return self.L / self.N

    @property
    def dt(self):
        return self.T / self.M if self.M else 0.0

    @property
    def x(self):
        return np.arange(self.N + 1) * self.dx

    @property
    def times(self):
        return np.arange(self.M + 1) * self.dt

    def to_dict(self):
        return {"L": self.L, "N": self.N, "T": self.T, "M": self.M, "gamma": self.gamma}


@dataclass
class ExtendedField:
    """Interior nodal values plus the constant exterior (Dirichlet) values.

    ``u_j`` is ``left_value`` for ``j < 0`` and ``right_value`` for ``j > N``.
    """

    interior: np.ndarray
    left_value: float = 1.0
    right_value: float = 0.0

    def __post_init__(self):
        self.interior = np.asarray(self.interior, dtype=float)

    @property
    def N(self):
        return self.interior.size - 1

    def values_at(self, idx):
        idx = np.asarray(idx)
        N = self.N
        inside = np.clip(idx, 0, N)
        out = self.interior[inside]
        out = np.where(idx < 0, self.left_value, out)
        return np.where(idx > N, self.right_value, out)


def step_function_field(grid):
    """Discrete front-like datum ``1_{x <= 0}``: one at node 0, zero elsewhere."""
    u = np.zeros(grid.N + 1)
    u[0] = 1.0
    return ExtendedField(u, 1.0, 0.0)


def lag_weights(moments, dx, gamma):
    """Weight of ``u_{j +- n}`` in the quadrature, for lags ``n = 1..N``.

    Collecting the trapezoid terms gives ``(Delta_n + Delta_{n+1}) / 2`` per lag
    (``Delta_{N+1} = 0``); for ``gamma = 2`` the singular cell adds another
    ``Delta_1 / 2`` at lag one through the central difference ``U_0 = U_1``.
    """
    d = np.asarray(moments, dtype=float)
    N = d.size
    c = 0.5 * (d + np.append(d[1:], 0.0))
    if gamma == 2.0:
        c[0] += 0.5 * d[0]
    n = np.arange(1, N + 1)
    return c / (n * dx) ** gamma


def apply_interior(kernel, grid, fld, j, moments=None, tail=None, split=False):
    """Quadrature approximation of ``D[u](x_j)`` evaluated term by term.

    Returns ``D1 + D2`` (or the pair when ``split``), where ``D1`` is the
    trapezoid sum over ``[0, L]`` and ``D2 = (u_left + u_right - 2u_j) J_L``.
    """
    N = grid.N
    if not 0 <= j <= N:
        raise DomainError(f"node index {j} outside [0, {N}]")
    gamma = grid.gamma
    dx = grid.dx
    if moments is None:
        moments = kern.cell_moments(kernel, gamma, grid)
    if tail is None:
        tail = kern.tail_mass(kernel, grid.L)
    n = np.arange(N + 1)
    uj = fld.interior[j]
    second = fld.values_at(j - n) + fld.values_at(j + n) - 2.0 * uj
    U = np.empty(N + 1)
    U[1:] = second[1:] / (n[1:] * dx) ** gamma
    U[0] = second[1] / dx**2 if gamma == 2.0 else 0.0
    d1 = float(np.sum(0.5 * np.asarray(moments) * (U[1:] + U[:-1])))
    d2 = (fld.left_value + fld.right_value - 2.0 * uj) * tail
    return (d1, d2) if split else d1 + d2


def apply_all(kernel, grid, fld, moments=None, tail=None):
    """:func:`apply_interior` at every node (direct summation, O(N^2))."""
    if moments is None:
        moments = kern.cell_moments(kernel, grid.gamma, grid)
    if tail is None:
        tail = kern.tail_mass(kernel, grid.L)
    return np.array([apply_interior(kernel, grid, fld, j, moments, tail) for j in range(grid.N + 1)])


def spike_readout_matrix(kernel, grid):
    """Matrix of the linear part of the operator read off unit spikes.

    Column ``k`` is the operator applied to ``e_k`` with zero exterior values,
    so the ``-2 J_L`` diagonal of the exterior term is included.
    """
    moments = kern.cell_moments(kernel, grid.gamma, grid)
    tail = kern.tail_mass(kernel, grid.L)
    size = grid.N + 1
    out = np.empty((size, size))
    for k in range(size):
        e = np.zeros(size)
        e[k] = 1.0
        out[:, k] = apply_all(kernel, grid, ExtendedField(e, 0.0, 0.0), moments, tail)
    return out


@dataclass(frozen=True)
class DiscreteOperator:
    """Closed-form discrete operator ``D[X] = T X + b + (l + r - 2X) J_L``.

    ``toeplitz_first_row`` is lag-indexed and excludes the ``-2 J_L`` term.
    """

    toeplitz_first_row: np.ndarray
    boundary_source: np.ndarray
    tail_mass: float
    gamma: float
    left_value: float = 1.0
    right_value: float = 0.0
    toeplitz: SymToeplitz = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "toeplitz", SymToeplitz(self.toeplitz_first_row))

    def apply(self, X):
        X = np.asarray(X, dtype=float)
        return (self.toeplitz.matvec(X) + self.boundary_source
                + (self.left_value + self.right_value - 2.0 * X) * self.tail_mass)


def build_operator(kernel, grid, left_value=1.0, right_value=0.0):
    """Assemble the Toeplitz description of the discrete operator."""
    kern.check_gamma(kernel, grid.gamma)
    moments = kern.cell_moments(kernel, grid.gamma, grid)
    w = lag_weights(moments, grid.dx, grid.gamma)
    N = grid.N
    row = np.empty(N + 1)
    row[0] = -2.0 * w.sum()
    row[1:] = w
    # S[m] = sum_{n >= m} w_n with S[N + 1] = 0
    S = np.zeros(N + 2)
    S[1:N + 1] = np.cumsum(w[::-1])[::-1]
    j = np.arange(N + 1)
    source = left_value * S[j + 1] + right_value * S[N - j + 1]
    return DiscreteOperator(row, source, kern.tail_mass(kernel, grid.L), grid.gamma,
                            float(left_value), float(right_value))


@dataclass(frozen=True)
class ImexSystem:
    """Implicit-diffusion / explicit-reaction step ``A X_{i+1} = X_i + dt F_i + c``.

    ``matrix`` is ``(1 + 2 dt J_L) I - dt D_lin`` and ``boundary_vector`` is
    ``dt (u_left + u_right) J_L 1 + dt b``.
    """

    matrix: SymToeplitz
    boundary_vector: np.ndarray
    tail_mass: float
    dt: float
    operator: DiscreteOperator
    reaction: object = None

    def rhs(self, X, F):
        return X + self.dt * F + self.boundary_vector


def assemble_system(kernel, grid, reaction=None, left_value=1.0, right_value=0.0, dt=None):
    """Build the Toeplitz system solved at every implicit step."""
    op = build_operator(kernel, grid, left_value, right_value)
    dt = grid.dt if dt is None else float(dt)
    row = -dt * op.toeplitz_first_row
    row[0] += 1.0 + 2.0 * dt * op.tail_mass
    bvec = dt * ((left_value + right_value) * op.tail_mass + op.boundary_source)
    return ImexSystem(SymToeplitz(row), bvec, op.tail_mass, dt, op, reaction)
