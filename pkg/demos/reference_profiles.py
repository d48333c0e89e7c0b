"""Analytic barriers as numerical oracles.

Two small experiments with the reference module:

1. The travelling-wave profile ``w`` (``1 - e^x`` on the left,
   ``C_L x^p e^{-x^beta}`` on the right) is a super-solution of the wave
   inequality once the speed ``c0`` is large enough. A doubling search finds
   such a speed and the residual is printed at a few points.
2. Level positions of the algebraic-regime sub-solution grow like
   ``t^{1/(beta(alpha+1))}``; the closed form and a bisection agree.

Usage::

    python demos/reference_profiles.py
"""

import numpy as np

from nonlocal_fronts import KernelSpec, ReactionSpec
from nonlocal_fronts.reference import AlgProfileConfig, TWProfileConfig, search_speed


def travelling_wave():
    beta, alpha = 0.6, 1.0
    w = TWProfileConfig(beta, p=0.8)
    xs = np.linspace(-50.0, 50.0, 41)
    rep = search_speed(w, KernelSpec.subexponential(beta), ReactionSpec.weakly_degenerate(1.0, alpha), xs)
    print(f"travelling wave: L = {w.L:g}, speeds tried {rep.notes['tried']}, accepted c0 = {rep.c0:g}")
    for x, r in list(zip(rep.x, rep.residual))[::8]:
        print(f"  x = {x:7.2f}   residual = {r: .3e}")
    print(f"  all {rep.x.size} samples satisfy the inequality: {rep.ok}\n")


def level_growth():
    cfg = AlgProfileConfig("sub", alpha=0.2, beta=0.35)
    rate = 1.0 / (cfg.beta * (cfg.alpha + 1.0))
    print(f"sub-solution level x_0.5(t); expected growth t^{rate:.3f}")
    for t in cfg.t_star * np.geomspace(1.0, 1000.0, 7):
        closed = cfg.level_position(t, 0.5, method="closed")
        bisect = cfg.level_position(t, 0.5, method="bisect")
        print(f"  t = {t:9.3f}   x = {closed:12.5g}   x / t^rate = {closed / t**rate:7.4f}"
              f"   |closed - bisect| = {abs(closed - bisect):.1e}")


if __name__ == "__main__":
    travelling_wave()
    level_growth()
