"""Nonlocal reaction-diffusion fronts with weakly degenerate growth.

Discretises du/dt = D[u] + f(u) on a truncated half-line with a gamma-split
quadrature of the jump operator, steps it with an implicit-diffusion /
explicit-reaction scheme on symmetric Toeplitz systems, tracks level-set
positions and fits propagation-rate laws. Analytic sub/super-solution
profiles are provided as validation oracles.
"""

from .errors import (
    BracketError,
    ConfigError,
    DimensionError,
    DomainError,
    InsufficientDataError,
    MatrixError,
    NonlocalFrontsError,
    NumericalBlowUpError,
    SolverError,
)
from .kernel import InnerLaw, KernelFamily, KernelSpec
from .reaction import ReactionFamily, ReactionSpec
from .discretization import ExtendedField, Grid, assemble_system, build_operator
from .toeplitz import SymToeplitz, solve

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "ConfigError",
    "DimensionError",
    "DomainError",
    "InsufficientDataError",
    "MatrixError",
    "NonlocalFrontsError",
    "NumericalBlowUpError",
    "SolverError",
    "InnerLaw",
    "KernelFamily",
    "KernelSpec",
    "ReactionFamily",
    "ReactionSpec",
    "ExtendedField",
    "Grid",
    "assemble_system",
    "build_operator",
    "SymToeplitz",
    "solve",
    "__version__",
]
