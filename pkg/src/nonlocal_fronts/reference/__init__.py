"""Analytic sub/super-solution profiles and quadrature residual checks."""

from .profiles import (
    AlgProfileConfig,
    CappedProfile,
    ExpProfileConfig,
    SmoothedProfile,
    TWProfileConfig,
    Variant,
    composite,
    eval_profile,
    kappa0,
    level_position,
)
from .residual import C0_CAP, ResidualReport, nonlocal_operator, residual_check, search_speed
from .smoothers import CubicSmoother, QuinticSmoother, SmootherKind, make_smoother, smoother_eval

__all__ = [
    "AlgProfileConfig",
    "CappedProfile",
    "ExpProfileConfig",
    "SmoothedProfile",
    "TWProfileConfig",
    "Variant",
    "composite",
    "eval_profile",
    "kappa0",
    "level_position",
    "C0_CAP",
    "ResidualReport",
    "nonlocal_operator",
    "residual_check",
    "search_speed",
    "CubicSmoother",
    "QuinticSmoother",
    "SmootherKind",
    "make_smoother",
    "smoother_eval",
]
