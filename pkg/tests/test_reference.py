"""Analytic profiles, level positions, smoothers and quadrature residuals."""

import csv
import math

import mpmath
import numpy as np
import pytest

from nonlocal_fronts import kernel as kern
from nonlocal_fronts.errors import ConfigError, DomainError
from nonlocal_fronts.kernel import KernelSpec
from nonlocal_fronts.reaction import ReactionSpec
from nonlocal_fronts.reference import (
    AlgProfileConfig,
    CappedProfile,
    CubicSmoother,
    ExpProfileConfig,
    QuinticSmoother,
    SmoothedProfile,
    SmootherKind,
    TWProfileConfig,
    composite,
    eval_profile,
    kappa0,
    level_position,
    nonlocal_operator,
    residual_check,
    search_speed,
    smoother_eval,
)
from nonlocal_fronts.validation import smoother_contract


def fd(fun, x, h=1e-5):
    return (fun(x + h) - fun(x - h)) / (2 * h)


def fd2(fun, x, h=1e-4):
    return (fun(x + h) - 2 * fun(x) + fun(x - h)) / h**2


TW = TWProfileConfig(0.6, p=0.8)
ALG_SUPER = AlgProfileConfig("super", alpha=0.2, beta=0.35)
ALG_SUB = AlgProfileConfig("sub", alpha=0.2, beta=0.35)
EXP_SUPER = ExpProfileConfig("super", alpha=1.0, s=1.0)
EXP_SUB = ExpProfileConfig("sub", alpha=1.0, s=1.0)


# ---------------------------------------------------------------------------
# travelling-wave profile
# ---------------------------------------------------------------------------


class TestTravellingWave:
    def test_rejects_small_p(self):
        with pytest.raises(ConfigError, match="p >= 2 - 2 beta"):
            TWProfileConfig(0.6, p=0.5)

    def test_rejects_beta_out_of_range(self):
        with pytest.raises(ConfigError):
            TWProfileConfig(1.2)

    def test_rejects_small_L(self):
        with pytest.raises(ConfigError, match="L must exceed"):
            TWProfileConfig(0.6, p=0.8, L=1.0)

    def test_constant(self):
        b, p, L = TW.beta, TW.p, TW.L
        assert TW.C_L == pytest.approx(0.5 * (1 - math.exp(-1)) * L ** (-p) * math.exp(L**b), rel=1e-15)

    def test_closed_pieces(self):
        for x in (-5.0, -2.0, -1.0):
            assert TW.value(0, x) == pytest.approx(1 - math.exp(x), rel=1e-15)
        for x in (TW.L, TW.L + 3.0, 40.0):
            assert TW.value(0, x) == pytest.approx(TW.C_L * x**TW.p * math.exp(-(x**TW.beta)), rel=1e-14)

    @pytest.mark.parametrize("edge", ["left", "right"])
    def test_c2_matching_at_bridge_ends(self, edge):
        x0 = -1.0 if edge == "left" else TW.L
        for nu in (0, 1, 2):
            left, right = TW._eval(x0 - 1e-9, nu), TW._eval(x0 + 1e-9, nu)
            assert left == pytest.approx(right, rel=1e-6, abs=1e-9)

    def test_strictly_decreasing(self):
        xs = np.linspace(-30.0, 60.0, 20001)
        vals = np.array([TW.value(0, x) for x in xs])
        assert np.all(np.diff(vals) < 0)
        assert all(TW.dx(0, x) < 0 for x in xs[::50])

    def test_derivatives_match_finite_differences(self):
        for x in np.linspace(-3.0, TW.L + 5.0, 23):
            f = lambda z: TW.value(0, z)  # noqa: E731
            assert TW.dx(0, x) == pytest.approx(fd(f, x), rel=1e-5, abs=1e-8)
            g = lambda z: TW.dx(0, z)  # noqa: E731
            assert TW.dxx(0, x) == pytest.approx(fd(g, x), rel=1e-5, abs=1e-7)

    def test_level_round_trip(self):
        for lam in (0.01, 0.2, 0.5, 0.63, 0.9):
            x = TW.level_position(0, lam)
            assert abs(TW.value(0, x) - lam) <= 1e-8

    def test_level_on_closed_left_piece(self):
        assert TW.level_position(0, 0.9) == pytest.approx(math.log(0.1), rel=1e-15)

    def test_time_independent(self):
        assert TW.dt(3.0, 2.0) == 0.0
        assert eval_profile(TW, 5.0, 2.0) == TW.value(0, 2.0)


# ---------------------------------------------------------------------------
# algebraic regime
# ---------------------------------------------------------------------------


class TestAlgebraicProfiles:
    def test_super_default_parameters(self):
        a, b = 0.2, 0.35
        p = 2 / (1 - b - a * b) + a * b
        assert ALG_SUPER.p == pytest.approx(p, rel=1e-15)
        assert ALG_SUPER.rho == 10.0
        assert ALG_SUPER.L == pytest.approx((p / b) ** (1 / b))
        assert ALG_SUPER.C_L == pytest.approx(ALG_SUPER.L ** (-p) * math.exp(ALG_SUPER.L**b))

    def test_super_needs_rho_at_least_r(self):
        with pytest.raises(ConfigError, match="rho >= r"):
            AlgProfileConfig("super", alpha=0.2, beta=0.35, r=2.0, rho=1.0)

    def test_sub_epsilon_range(self):
        with pytest.raises(ConfigError, match="epsilon"):
            AlgProfileConfig("sub", alpha=0.2, beta=0.35, epsilon=0.5)

    def test_invalid_parameters_listed(self):
        with pytest.raises(ConfigError) as exc:
            AlgProfileConfig("sub", alpha=-1.0, beta=2.0)
        assert len(exc.value.problems) == 2

    @pytest.mark.parametrize("x", [1.0, 100.0, ALG_SUPER.L, 2 * ALG_SUPER.L, 5e4])
    def test_super_at_zero_time_is_datum(self, x):
        v0 = 1.0 if x < ALG_SUPER.L else ALG_SUPER.C_L * x**ALG_SUPER.p * math.exp(-(x**ALG_SUPER.beta))
        assert ALG_SUPER.value(0.0, x) == pytest.approx(v0, rel=1e-12)

    def test_super_undefined_where_bracket_negative(self):
        # on the plateau the bracket is 1 - rho (alpha+1) t
        t = 2.0 / (ALG_SUPER.rho * 1.2)
        assert ALG_SUPER.value(t, 1.0) is None
        assert eval_profile(ALG_SUPER, t, 1.0) is None

    def test_sub_upper_bound(self):
        for t in (0.0, 0.5, 3.0, 20.0):
            for x in np.geomspace(1e-3, 1e4, 60):
                w = ALG_SUB.value(t, x)
                if w is not None:
                    assert w <= ALG_SUB.upper_bound(t, x) * (1 + 1e-12)

    def test_closed_form_example(self):
        cfg = AlgProfileConfig("sub", alpha=1.0, beta=0.5)
        assert cfg.level_position(0.0, math.exp(-1.0), method="closed") == pytest.approx(1.0, rel=1e-14)

    def test_closed_form_matches_independent_formula(self):
        # x = {-1 + [(1 - ln lam)^(a+1) + rho (a+1) t]^(1/(a+1))}^(1/beta) in high precision
        mpmath.mp.dps = 40
        a, b, rho = ALG_SUB.alpha, ALG_SUB.beta, ALG_SUB.rho
        for t, lam in ((0.3, 0.2), (4.0, 0.5), (15.0, 0.9)):
            k = mpmath.mpf(a) + 1
            ref = (-1 + ((1 - mpmath.log(lam)) ** k + rho * k * t) ** (1 / k)) ** (1 / mpmath.mpf(b))
            assert ALG_SUB.level_position(t, lam) == pytest.approx(float(ref), rel=1e-13)

    def test_closed_form_matches_bisection(self, rng):
        for _ in range(30):
            t, lam = 20.0 * rng.random(), rng.uniform(0.01, 0.99)
            a = ALG_SUB.level_position(t, lam, method="closed")
            b = ALG_SUB.level_position(t, lam, method="bisect")
            assert abs(a - b) <= 1e-10

    def test_super_has_no_closed_form(self):
        with pytest.raises(DomainError):
            ALG_SUPER.level_position(1.0, 0.5, method="closed")

    @pytest.mark.parametrize("cfg", [ALG_SUPER, ALG_SUB], ids=["super", "sub"])
    def test_round_trip(self, cfg, rng):
        hi = 2.0 if cfg is ALG_SUPER else 1.0
        for _ in range(25):
            t = cfg.t_star * (1 + 20 * rng.random())
            lam = rng.uniform(0.01, hi - 0.01)
            x = cfg.level_position(t, lam)
            assert abs(cfg.value(t, x) - lam) <= 1e-8

    def test_level_ranges(self):
        with pytest.raises(DomainError):
            ALG_SUB.level_position(1.0, 1.0)
        with pytest.raises(DomainError):
            ALG_SUPER.level_position(1.0, 2.5)
        with pytest.raises(DomainError, match="t >= t"):
            ALG_SUPER.level_position(0.1 * ALG_SUPER.t_star, 0.5)
        with pytest.raises(DomainError):
            ALG_SUB.level_position(1.0, float("nan"))

    @pytest.mark.parametrize("cfg", [ALG_SUPER, ALG_SUB], ids=["super", "sub"])
    def test_level_ordering(self, cfg):
        t = 5 * cfg.t_star
        xs = [cfg.level_position(t, lam) for lam in (0.05, 0.2, 0.5, 0.8)]
        assert all(a > b for a, b in zip(xs, xs[1:]))

    @pytest.mark.parametrize("cfg", [ALG_SUPER, ALG_SUB], ids=["super", "sub"])
    def test_monotone_in_x(self, cfg):
        t = 3 * cfg.t_star
        x0 = cfg.level_position(t, 0.9)
        xs = np.geomspace(x0, 1e3 * x0, 3000)
        vals = np.array([cfg.value(t, x) for x in xs], dtype=float)
        assert np.all(np.diff(vals) <= 0)

    def test_scaling_band_sub(self):
        # x_lam(t) / t^{1/(beta(alpha+1))} stays in a fixed band on [t*, 100 t*]
        # (the band depends on lam)
        c = ALG_SUB
        ts = c.t_star * np.geomspace(1.0, 100.0, 9)
        for lam, band in ((0.1, 40.0), (0.5, 3.0)):
            ratio = [c.level_position(t, lam) / t ** (1 / (c.beta * (c.alpha + 1))) for t in ts]
            assert max(ratio) / min(ratio) < band

    def test_scaling_band_super(self):
        # the super-solution starts on the plateau edge L, so the band is wider
        c = ALG_SUPER
        ts = c.t_star * np.geomspace(1.0, 100.0, 9)
        ratio = [c.level_position(t, 0.5) / t ** (1 / (c.beta * (c.alpha + 1))) for t in ts]
        assert max(ratio) / min(ratio) < 40.0
        assert all(a > b for a, b in zip(ratio, ratio[1:]))

    @pytest.mark.parametrize("cfg", [ALG_SUPER, ALG_SUB], ids=["super", "sub"])
    def test_derivatives(self, cfg):
        t = 2 * cfg.t_star
        for lam in (0.2, 0.5, 0.8):
            x = cfg.level_position(t, lam)
            fx = lambda z: cfg.value(t, z)  # noqa: E731
            assert cfg.dx(t, x) == pytest.approx(fd(fx, x, 1e-6 * x), rel=1e-5)
            assert cfg.dxx(t, x) == pytest.approx(fd2(fx, x, 1e-3 * x), rel=1e-3)
            ft = lambda s: cfg.value(s, x)  # noqa: E731
            assert cfg.dt(t, x) == pytest.approx(fd(ft, t, 1e-6), rel=1e-5)

    def test_log_space_inverse_beyond_underflow(self):
        x = ALG_SUB.log_v0_inverse(-2000.0)
        assert ALG_SUB.log_v0(x) == pytest.approx(-2000.0, rel=1e-14)
        with pytest.raises(DomainError):
            ALG_SUB.v0_inverse(0.0)


# ---------------------------------------------------------------------------
# exponential regime
# ---------------------------------------------------------------------------


class TestExponentialProfiles:
    def test_super_defaults(self):
        c = EXP_SUPER
        assert c.p == pytest.approx(1 / 2)
        assert c.q == pytest.approx(3.0)
        assert c.kappa == pytest.approx(math.e)
        assert c.C_L == pytest.approx(c.L ** (2 * c.s) / math.log(c.L) ** c.q)

    def test_sub_defaults(self):
        c = ExpProfileConfig("sub", alpha=0.5, s=2.0)
        assert c.p == pytest.approx(0.5 * min(1 / 4, 4.0))
        assert c.kappa == pytest.approx(kappa0(0.5, 2.0, 1.0, c.p))

    def test_kappa0_is_minimum_of_four_bounds(self):
        # independent transcription of the four-term minimum
        a, s, r, p = 0.5, 1.5, 2.0, 1 / 6
        k = a + 1
        g1 = p / k * (r * k) ** (1 / k)
        g2 = 2 * s * p * (2 * s * p + 1) * math.exp(2 * p)
        terms = [
            (r * k) ** (a / k) / (2**k * r * p * math.exp(2 * p)),
            1 / (2 * math.exp(2 * p) * (r * k) ** (1 / k)),
            1 / (4 * g1 * math.exp(2 * p)),
            s * (r * k) ** (a / k) / (2**a * r * g2),
        ]
        assert kappa0(a, s, r, p) == pytest.approx(min(terms), rel=1e-15)

    def test_super_formula(self):
        # psi = exp{1 - {[1 - ln((1 + kappa t^p) v0)]^(a+1) - r (a+1) t}^(1/(a+1))}
        c = EXP_SUPER
        mpmath.mp.dps = 30
        for t, lam in ((0.6, 0.3), (2.0, 0.05)):
            x = c.level_position(t, lam)
            k = c.alpha + 1
            v0 = c.C_L * mpmath.log(x) ** c.q / mpmath.mpf(x) ** (2 * c.s)
            B = (1 - mpmath.log((1 + c.kappa * mpmath.mpf(t) ** c.p) * v0)) ** k - c.r * k * t
            ref = mpmath.exp(1 - B ** (1 / mpmath.mpf(k)))
            assert c.value(t, x) == pytest.approx(float(ref), rel=1e-12)

    def test_sub_formula(self):
        c = EXP_SUB
        mpmath.mp.dps = 30
        for t, x in ((5.0, 30.0), (12.0, 1e4)):
            k = c.alpha + 1
            R = (c.r * k * mpmath.mpf(t)) ** (1 / mpmath.mpf(k))
            h = c.kappa * mpmath.mpf(t) ** (c.alpha / k) * mpmath.exp(c.p * R) / mpmath.mpf(x) ** (2 * c.s * c.p)
            B = (1 + 2 * c.s * mpmath.log(x)) ** k - c.r * k * (t - h)
            ref = mpmath.exp(1 - B ** (1 / mpmath.mpf(k)))
            assert c.value(t, x) == pytest.approx(float(ref), rel=1e-12)

    def test_phi_bounds(self, rng):
        for alpha, s in ((1.0, 1.0), (0.5, 0.5), (1.0, 2.0)):
            c = ExpProfileConfig("sub", alpha=alpha, s=s)
            checked = 0
            while checked < 50:
                t = c.t_star * (1 + 20 * rng.random())
                x = c.lower_position_bound(t) * math.exp(5 * rng.random())
                v = c.value(t, x)
                if v is None:
                    continue
                lo, hi = c.phi_bounds(t, x)
                assert lo * (1 - 1e-12) <= v <= hi * (1 + 1e-12)
                checked += 1

    def test_sub_lower_position_bound(self):
        for t in (EXP_SUB.t_star, 5.0, 40.0):
            for lam in (0.01, 0.5, 2.0):
                assert EXP_SUB.level_position(t, lam) > EXP_SUB.lower_position_bound(t)

    @pytest.mark.parametrize("cfg", [EXP_SUPER, EXP_SUB], ids=["super", "sub"])
    def test_round_trip(self, cfg, rng):
        hi = 2.0 if cfg is EXP_SUPER else math.e
        for _ in range(25):
            t = cfg.t_star * (1 + 20 * rng.random())
            lam = rng.uniform(0.01, hi - 0.01)
            x = cfg.level_position(t, lam)
            assert abs(cfg.value(t, x) - lam) <= 1e-8

    def test_sub_level_range_and_time(self):
        with pytest.raises(DomainError):
            EXP_SUB.level_position(5.0, 3.0)
        with pytest.raises(DomainError, match="uniqueness"):
            EXP_SUB.level_position(0.5 * EXP_SUB.t_star, 0.5)

    @pytest.mark.parametrize("cfg", [EXP_SUPER, EXP_SUB], ids=["super", "sub"])
    def test_level_ordering(self, cfg):
        t = 4 * cfg.t_star
        xs = [cfg.level_position(t, lam) for lam in (0.05, 0.3, 0.7, 0.95)]
        assert all(a > b for a, b in zip(xs, xs[1:]))

    @pytest.mark.parametrize("cfg", [EXP_SUPER, EXP_SUB], ids=["super", "sub"])
    def test_monotone_in_x(self, cfg):
        t = 3 * cfg.t_star
        x0 = cfg.level_position(t, 0.99)
        xs = np.geomspace(x0, 1e4 * x0, 3000)
        vals = np.array([cfg.value(t, x) for x in xs], dtype=float)
        assert np.all(np.diff(vals) <= 0)

    def test_psi_non_decreasing_in_time(self):
        c = EXP_SUPER
        for x in np.geomspace(c.L, 1e6, 25):
            vals = [c.value(t, x) for t in np.linspace(0.0, 3.0, 31)]
            defined = [v for v in vals if v is not None]
            assert all(b >= a for a, b in zip(defined, defined[1:]))

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    def test_sub_exponential_scaling(self, s):
        # ln x_lam(t) / R(t) -> 1/(2s): within 5% by t = 1000 t*
        c = ExpProfileConfig("sub", alpha=1.0, s=s)
        ratios = [math.log(c.level_position(t, 0.5)) / c.R(t) * 2 * s
                  for t in c.t_star * np.array([10.0, 100.0, 1000.0])]
        assert abs(ratios[-1] - 1) < 0.05
        assert abs(ratios[-1] - 1) < abs(ratios[0] - 1)

    def test_super_exponential_scaling_converges(self):
        # logarithmic corrections decay like ln t / R(t); within 6% by t = 1e5
        c = ExpProfileConfig("super", alpha=1.0, s=2.0)
        ratios = [math.log(c.level_position(t, 0.5)) / c.R(t) * 2 * c.s for t in (1e3, 1e4, 1e5, 1e6)]
        assert all(a > b > 1 for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] < 1.05

    def test_out_of_range_position_is_reported(self):
        with pytest.raises(DomainError, match="floating-point range"):
            EXP_SUPER.level_position(1e6, 0.5)

    @pytest.mark.parametrize("cfg", [EXP_SUPER, EXP_SUB], ids=["super", "sub"])
    def test_derivatives(self, cfg):
        t = 2 * cfg.t_star
        for lam in (0.2, 0.6):
            x = cfg.level_position(t, lam)
            fx = lambda z: cfg.value(t, z)  # noqa: E731
            assert cfg.dx(t, x) == pytest.approx(fd(fx, x, 1e-6 * x), rel=1e-5)
            assert cfg.dxx(t, x) == pytest.approx(fd2(fx, x, 1e-3 * x), rel=1e-3)
            ft = lambda s: cfg.value(s, x)  # noqa: E731
            assert cfg.dt(t, x) == pytest.approx(fd(ft, t, 1e-6), rel=1e-5)


# ---------------------------------------------------------------------------
# composites
# ---------------------------------------------------------------------------


class TestComposites:
    def test_kinds(self):
        assert composite(TW) is TW
        assert isinstance(composite(ALG_SUPER), CappedProfile)
        assert composite(ALG_SUB).kind is SmootherKind.CUBIC_C1
        assert composite(EXP_SUB).kind is SmootherKind.QUINTIC_C2

    def test_capped_profile(self):
        m = CappedProfile(ALG_SUPER)
        t = 2 * ALG_SUPER.t_star
        x1 = m.cap_position(t)
        assert ALG_SUPER.value(t, x1) == pytest.approx(1.0, abs=1e-10)
        assert m.value(t, 0.5 * x1) == 1.0
        assert m.value(t, 2 * x1) == ALG_SUPER.value(t, 2 * x1)
        assert eval_profile(ALG_SUPER, t, 0.0, composite_profile=True) == 1.0

    @pytest.mark.parametrize("cfg", [ALG_SUB, EXP_SUB], ids=["alg", "exp"])
    def test_smoothed_profile(self, cfg):
        v = SmoothedProfile(cfg, composite(cfg).kind)
        t = 2 * cfg.t_star
        xc = v.cap_position(t)
        assert v.value(t, 0.5 * xc) == cfg.epsilon
        xs = np.linspace(xc, 50 * xc, 2000)
        vals = np.array([v.value(t, x) for x in xs])
        assert np.all(np.diff(vals) <= 1e-15)
        assert np.all(vals <= cfg.epsilon + 1e-15)

    def test_smoothed_level_round_trip(self):
        v = composite(ALG_SUB)
        t = 1.0
        for lam in (0.01, 0.05, 0.09):
            x = v.level_position(t, lam)
            assert abs(v.value(t, x) - lam) <= 1e-8

    def test_dispatching_level_position(self):
        assert level_position(ALG_SUB, 1.0, 0.5) == ALG_SUB.level_position(1.0, 0.5)
        assert level_position(TW, 0.0, 0.5) == TW.level_position(0.0, 0.5)

    def test_non_finite_inputs(self):
        with pytest.raises(DomainError):
            eval_profile(ALG_SUB, float("inf"), 1.0)


# ---------------------------------------------------------------------------
# smoothers
# ---------------------------------------------------------------------------


class TestSmoothers:
    def test_cubic_at_eps(self):
        g = CubicSmoother(0.1)
        assert g(0.1) == pytest.approx(0.1, rel=1e-15)
        assert g(0.1, 1) == 0.0
        assert g(0.7) == 0.1

    def test_cubic_polynomial(self):
        e = 0.2
        y = np.linspace(0.0, e, 11)
        expected = 3 * (1 - y / e + y**2 / (3 * e**2)) * y
        np.testing.assert_allclose(smoother_eval("cubic", e, y), expected, rtol=1e-15)

    def test_cubic_bounds(self):
        e = 0.3
        y = np.linspace(0.0, e, 10_000)
        g = smoother_eval("cubic", e, y)
        assert np.all(y <= g + 1e-15) and np.all(g <= 3 * y + 1e-15)

    def test_quintic_identity_region(self):
        e = 0.1
        assert smoother_eval("quintic", e, e / 4) == pytest.approx(e / 4, rel=1e-15)
        assert smoother_eval("quintic", e, 0.9) == e

    @pytest.mark.parametrize("eps,alpha", [(0.1, 1.0), (0.2, 0.2), (0.05, 2.0), (0.25, 0.5)])
    def test_quintic_contract(self, eps, alpha):
        viol = smoother_contract("quintic", eps, alpha, n=10_000)
        assert all(v <= 1e-12 for v in viol.values()), viol

    def test_quintic_is_c2(self):
        g = QuinticSmoother(0.1, 1.0)
        for y0 in (0.05, 0.15):
            for nu in (0, 1, 2):
                assert g(y0 - 1e-9, nu) == pytest.approx(g(y0 + 1e-9, nu), abs=1e-6)

    def test_quintic_derivatives(self):
        g = QuinticSmoother(0.1, 1.0)
        for y in np.linspace(0.06, 0.14, 9):
            assert g(y, 1) == pytest.approx(fd(g, y, 1e-7), rel=1e-6, abs=1e-9)
            assert g(y, 2) == pytest.approx(fd(lambda z: g(z, 1), y, 1e-7), rel=1e-5, abs=1e-6)

    @pytest.mark.parametrize("kind,eps", [("cubic", 0.0), ("cubic", 1.0), ("quintic", 0.7), ("quintic", -0.1)])
    def test_eps_out_of_range(self, kind, eps):
        with pytest.raises(DomainError):
            smoother_eval(kind, eps, 0.5)

    def test_argument_out_of_range(self):
        with pytest.raises(DomainError):
            smoother_eval("cubic", 0.1, 1.5)

    def test_contract_failure_is_reported(self):
        # strong degeneracy with a wide bridge leaves no room for the contract
        with pytest.raises(ConfigError, match="use a smaller eps"):
            QuinticSmoother(0.5, 10.0)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------


class _Gaussian:
    """``e^{-x^2}`` as a time-independent profile."""

    variant = "super"

    def value(self, t, x):
        return math.exp(-x * x)

    def dxx(self, t, x):
        return (4 * x * x - 2) * math.exp(-x * x)

    def dx(self, t, x):
        return -2 * x * math.exp(-x * x)

    def dt(self, t, x):
        return 0.0

    def breakpoints(self, t):
        return []


class _One(_Gaussian):
    def value(self, t, x):
        return 1.0

    def dxx(self, t, x):
        return 0.0

    def dx(self, t, x):
        return 0.0


def _mp_operator(k, x):
    # second difference of e^{-z^2} without cancellation:
    # 2 e^{-x^2} [expm1(-y^2) + 2 e^{-y^2} sinh^2(x y)]
    mpmath.mp.dps = 30

    def f(y):
        diff = 2 * mpmath.exp(-x * x) * (mpmath.expm1(-y * y) + 2 * mpmath.exp(-y * y) * mpmath.sinh(x * y) ** 2)
        return diff * (1 / y**2 if y < 1 else kern.evaluate(k, float(y)))

    return float(mpmath.quad(f, [0, 0.5, 1, 4, 20, mpmath.inf]))


class TestResidual:
    @pytest.mark.parametrize("k", [KernelSpec.subexponential(0.6), KernelSpec.algebraic(1.0)], ids=["subexp", "alg"])
    def test_operator_against_mpmath(self, k):
        for x in (0.0, 0.7, 2.5):
            D, err, ok = nonlocal_operator(_Gaussian(), k, x)
            assert ok
            assert D == pytest.approx(_mp_operator(k, x), rel=1e-7, abs=1e-9)

    def test_constant_profile_has_zero_residual(self):
        rep = residual_check(_One(), KernelSpec.subexponential(0.6), ReactionSpec.weakly_degenerate(1.0, 1.0),
                             np.linspace(-5, 5, 7), t=1.0)
        np.testing.assert_array_equal(rep.residual, 0.0)
        assert rep.ok

    def test_travelling_wave_needs_speed(self):
        with pytest.raises(DomainError):
            residual_check(TW, KernelSpec.subexponential(0.6), None, [0.0])

    def test_parabolic_needs_time(self):
        with pytest.raises(DomainError):
            residual_check(composite(ALG_SUB), KernelSpec.subexponential(0.35), None, [0.0])

    def test_undefined_profile_is_reported(self):
        t = 2.0 / (ALG_SUPER.rho * 1.2)
        with pytest.raises(DomainError, match="composite"):
            residual_check(ALG_SUPER, KernelSpec.subexponential(0.35), None, [1.0], t=t)

    def test_viscosity_range(self):
        with pytest.raises(DomainError):
            residual_check(TW, KernelSpec.subexponential(0.6), None, [0.0], c0=1.0, viscosity=2.0)

    def test_speed_search_finds_super_solution(self):
        rep = search_speed(TW, KernelSpec.subexponential(0.6), ReactionSpec.weakly_degenerate(1.0, 1.0),
                           np.linspace(-50.0, 50.0, 21))
        assert rep.ok
        assert rep.c0 <= 1e3
        assert rep.notes["tried"] == [2.0**i for i in range(len(rep.notes["tried"]))]

    def test_viscosity_term(self):
        k, f = KernelSpec.subexponential(0.6), ReactionSpec.weakly_degenerate(1.0, 1.0)
        xs = [-0.5, 3.0]
        a = residual_check(TW, k, f, xs, c0=4.0)
        b = residual_check(TW, k, f, xs, c0=4.0, viscosity=0.5)
        expected = a.residual + 0.5 * np.array([TW.dxx(0, x) for x in xs])
        np.testing.assert_allclose(b.residual, expected, rtol=1e-12)

    def test_sense(self):
        k = KernelSpec.subexponential(0.35)
        sup = residual_check(composite(ALG_SUPER), k, None, [ALG_SUPER.L * 2], t=ALG_SUPER.t_star)
        sub = residual_check(composite(ALG_SUB), k, None, [3.0], t=1.0)
        assert sup.sense == ">=0" and sub.sense == "<=0"

    def test_report_csv(self, tmp_path):
        rep = residual_check(TW, KernelSpec.subexponential(0.6), None, [0.0, 1.0], c0=2.0)
        path = rep.write_csv(tmp_path / "r.csv")
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "residual", "error_estimate"]
        assert len(rows) == 3
        assert float(rows[2][1]) == rep.residual[1]
        assert rep.summary()["samples"] == 2

    def test_parallel_matches_serial(self):
        k, f = KernelSpec.subexponential(0.6), ReactionSpec.weakly_degenerate(1.0, 1.0)
        xs = np.linspace(-3, 8, 6)
        a = residual_check(TW, k, f, xs, c0=3.0)
        b = residual_check(TW, k, f, xs, c0=3.0, workers=2)
        np.testing.assert_array_equal(a.residual, b.residual)

