"""Symmetric Toeplitz matrices: FFT products and linear solvers.

The implicit step of the scheme is a symmetric, strictly diagonally dominant
Toeplitz system. Products are computed in ``O(N log N)`` by embedding the
matrix in a circulant of power-of-two size; the default solver is Jacobi
preconditioned conjugate gradients built on that product. A dense Cholesky
path and a Levinson recursion are kept for validation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionError, MatrixError, SolverError

__all__ = ["SymToeplitz", "SolveInfo", "solve", "cg", "levinson", "dense_solve", "DENSE_MAX_N"]

logger = logging.getLogger(__name__)

# largest N (matrix size N + 1) accepted by the dense path
DENSE_MAX_N = 4096


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


@dataclass(frozen=True)
class SymToeplitz:
    """Matrix ``T[j, k] = first_row[|j - k|]``."""

    first_row: np.ndarray
    _spectrum: np.ndarray = field(init=False, repr=False, compare=False)
    _fft_size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        row = np.array(self.first_row, dtype=float).ravel()
        if row.size == 0:
            raise DimensionError("empty first row")
        row.setflags(write=False)
        object.__setattr__(self, "first_row", row)
        n = row.size
        m = max(_next_pow2(2 * n), 2)
        col = np.zeros(m)
        col[:n] = row
        if n > 1:
            col[m - n + 1:] = row[:0:-1]
        object.__setattr__(self, "_spectrum", np.fft.rfft(col))
        object.__setattr__(self, "_fft_size", m)

    @property
    def size(self):
        return self.first_row.size

    @property
    def shape(self):
        return (self.size, self.size)

    @property
    def diagonal(self):
        return self.first_row[0]

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.size,):
            raise DimensionError(f"vector of shape {x.shape} does not match Toeplitz size {self.size}")
        xf = np.fft.rfft(x, self._fft_size)
        return np.fft.irfft(self._spectrum * xf, self._fft_size)[: self.size]

    def __matmul__(self, x):
        return self.matvec(x)

    def todense(self):
        return scipy.linalg.toeplitz(self.first_row)


@dataclass
class SolveInfo:
    method: str
    iterations: int = 0
    residual: float = 0.0


def _relative_residual(T, x, b, bnorm):
    return float(np.linalg.norm(T.matvec(x) - b) / bnorm)


def cg(T, b, tol=1e-10, maxiter=None, x0=None):
    """Jacobi-preconditioned conjugate gradients with FFT products.

    Returns ``(x, SolveInfo)``. Raises :class:`SolverError` if the relative
    residual is not below ``tol`` after ``maxiter`` (default ``10 (N+1)``)
    iterations and :class:`MatrixError` on non-positive curvature.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (T.size,):
        raise DimensionError(f"right-hand side of shape {b.shape} does not match size {T.size}")
    n = T.size
    maxiter = 10 * n if maxiter is None else int(maxiter)
    d = T.diagonal
    if not d > 0:
        raise MatrixError("non-positive diagonal: matrix is not SPD")
    bnorm = np.linalg.norm(b)
    if not np.isfinite(bnorm):
        raise SolverError("right-hand side contains non-finite values")
    if bnorm == 0:
        return np.zeros(n), SolveInfo("cg", 0, 0.0)
    # stop the recurrence a little early, then confirm on the true residual
    target = 0.5 * tol * bnorm
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - T.matvec(x) if x0 is not None else b.copy()
    z = r / d
    p = z.copy()
    rz = r @ z
    it = 0
    while True:
        while np.linalg.norm(r) > target and it < maxiter:
            Ap = T.matvec(p)
            pAp = p @ Ap
            if not pAp > 0:
                raise MatrixError(f"negative curvature p'Ap={pAp:.3e} at iteration {it}: matrix is not SPD")
            a = rz / pAp
            x += a * p
            r -= a * Ap
            z = r / d
            rz_new = r @ z
            p = z + (rz_new / rz) * p
            rz = rz_new
            it += 1
        res = _relative_residual(T, x, b, bnorm)
        if res <= tol:
            return x, SolveInfo("cg", it, res)
        if it >= maxiter:
            raise SolverError(f"CG did not converge in {it} iterations (relative residual {res:.3e})",
                              residual=res, iterations=it)
        # recursive residual drifted; restart from the true one
        r = b - T.matvec(x)
        z = r / d
        p = z.copy()
        rz = r @ z


def dense_solve(T, b, max_n=DENSE_MAX_N):
    """Cholesky solve on the dense matrix (validation path)."""
    b = np.asarray(b, dtype=float)
    if b.shape != (T.size,):
        raise DimensionError(f"right-hand side of shape {b.shape} does not match size {T.size}")
    if T.size - 1 > max_n:
        raise DimensionError(f"dense path limited to N <= {max_n}, got N = {T.size - 1}")
    try:
        return scipy.linalg.solve(T.todense(), b, assume_a="pos")
    except np.linalg.LinAlgError as exc:
        raise MatrixError(f"Cholesky factorisation failed: {exc}") from exc


def levinson(T, b):
    """Levinson recursion for a symmetric positive definite Toeplitz system, O(N^2)."""
    b = np.asarray(b, dtype=float)
    if b.shape != (T.size,):
        raise DimensionError(f"right-hand side of shape {b.shape} does not match size {T.size}")
    r0 = T.diagonal
    if not r0 > 0:
        raise MatrixError("non-positive diagonal: matrix is not SPD")
    t = T.first_row / r0
    rhs = b / r0
    n = T.size
    x = np.empty(n)
    x[0] = rhs[0]
    if n == 1:
        return x
    y = np.empty(n - 1)
    y[0] = -t[1]
    alpha = -t[1]
    beta = 1.0
    for k in range(1, n):
        beta *= 1.0 - alpha * alpha
        if not beta > 0:
            raise MatrixError(f"Levinson breakdown at order {k}: matrix is not SPD")
        mu = (rhs[k] - t[1:k + 1] @ x[k - 1::-1]) / beta
        x[:k] += mu * y[k - 1::-1]
        x[k] = mu
        if k < n - 1:
            alpha = -(t[k + 1] + t[1:k + 1] @ y[k - 1::-1]) / beta
            y[:k] = y[:k] + alpha * y[k - 1::-1]
            y[k] = alpha
    return x


def solve(T, b, method="cg", tol=1e-10, return_info=False, **kwargs):
    """Solve ``T x = b`` with ``method`` in ``{"cg", "dense", "levinson"}``."""
    method = str(method).lower()
    if method == "cg":
        x, info = cg(T, b, tol=tol, **kwargs)
    elif method == "dense":
        x = dense_solve(T, b, **kwargs)
        info = SolveInfo("dense", 0, _relative_residual(T, x, np.asarray(b, float), np.linalg.norm(b) or 1.0))
    elif method == "levinson":
        x = levinson(T, b)
        info = SolveInfo("levinson", 0, _relative_residual(T, x, np.asarray(b, float), np.linalg.norm(b) or 1.0))
    else:
        raise ValueError(f"unknown solver method {method!r}")
    return (x, info) if return_info else x
