"""Law-level checks: identities, bounds, limits, and closed-form fixtures."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from parisian_scale import (
    Exponential,
    INF,
    LevyModel,
    build_parisian,
    build_scale,
    laws,
)
from parisian_scale.errors import DomainError, NonpositiveDrift
from parisian_scale.scale import eval_W, eval_Z, eval_parisian_Z


class TestFundamentalIdentity:
    def test_residual_vanishes_on_sweep(self, m1_q23, m2_q1):
        rng = np.random.default_rng(7)
        for ctx in (m1_q23, m2_q1):
            for _ in range(100):
                b = float(rng.uniform(0.3, 4.0))
                x = float(rng.uniform(0.0, b))
                theta = float(rng.uniform(0.0, 5.0))
                res = laws.fundamental_identity_residual(ctx, x, b, theta)
                assert abs(res) < 1e-10

    def test_trivial_endpoints(self, m1_q23):
        b = 1.7
        assert laws.two_sided_exit(m1_q23, b, 0.0, b) == pytest.approx(1.0)
        assert laws.severity_absorbed(m1_q23, b, b, 0.8) == pytest.approx(0.0, abs=1e-14)
        assert laws.bailouts_to_level(m1_q23, b, b, 0.8) == pytest.approx(1.0)


class TestBoundsAndMonotonicity:
    def test_transforms_live_in_unit_interval(self, m1_q23, m2_q1, m1_par, m2_par):
        rng = np.random.default_rng(11)
        for _ in range(200):
            b = float(rng.uniform(0.2, 3.0))
            x = float(rng.uniform(0.0, b))
            theta = float(rng.uniform(0.0, 4.0))
            for ctx in (m1_q23, m2_q1):
                for val in (
                    laws.two_sided_exit(ctx, x, 0.0, b),
                    laws.severity_absorbed(ctx, x, b, theta),
                    laws.severity_reflected(ctx, x, b, theta),
                    laws.severity_infinite(ctx, x, theta),
                    laws.bailouts_to_level(ctx, x, b, theta),
                ):
                    assert -1e-12 <= val <= 1.0 + 1e-12
            for pctx in (m1_par, m2_par):
                assert -1e-12 <= laws.parisian_up_exit(pctx, x, b, theta) <= 1 + 1e-12
                assert -1e-12 <= laws.parisian_severity(pctx, x, b, theta) <= 1 + 1e-12

    def test_up_exit_increases_in_x(self, m1_q23, m1_par):
        b = 2.0
        xs = np.linspace(0.0, b, 40)
        classic = [laws.two_sided_exit(m1_q23, float(x), 0.0, b) for x in xs]
        parisian = [laws.parisian_up_exit(m1_par, float(x), b, INF) for x in xs]
        assert all(np.diff(classic) > 0)
        assert all(np.diff(parisian) > 0)

    def test_severity_decreases_in_x(self, m1_q23):
        xs = np.linspace(0.0, 2.0, 30)
        vals = [laws.severity_absorbed(m1_q23, float(x), 2.0, 1.0) for x in xs]
        assert all(np.diff(vals) < 0)


class TestClosedForms:
    def test_time_in_red_m1(self, m1_q0):
        # kappa(1) = 2/3, so phi_{2/3} = 1 and the transform is 1 - e^{-x}/4
        for x in (0.0, 0.5, 1.0, 3.0):
            got = laws.time_in_red(m1_q0, x, 2.0 / 3.0)
            assert got == pytest.approx(1.0 - 0.25 * math.exp(-x), rel=1e-12)

    def test_time_in_red_guards(self, m1_q0, m1_q23):
        with pytest.raises(ValueError):
            laws.time_in_red(m1_q23, 1.0, 0.5)
        with pytest.raises(ValueError):
            laws.time_in_red(m1_q0, 1.0, 0.0)
        heavy = LevyModel(c=1.0, sigma2=0.0, lam=4.0, phases=((1.0, 2.0),))
        with pytest.raises(NonpositiveDrift):
            laws.time_in_red(build_scale(heavy, 0.0), 1.0, 0.5)

    def test_ruin_transform_m1(self, m1_q23):
        # E_x[e^{-q tau}] at theta = 0 collapses to e^{-4x/3}/3
        for x in (0.0, 0.7, 2.2):
            got = laws.severity_infinite(m1_q23, x, 0.0)
            assert got == pytest.approx(math.exp(-4.0 * x / 3.0) / 3.0, rel=1e-12)

    def test_parisian_up_exit_m2(self, m2_par):
        # W_{1,3}(x) = (3 e^x - e^{-x})/2 and W_{1,3}(0) = 1
        for b in (0.4, 1.0, 2.5):
            got = laws.parisian_up_exit(m2_par, 0.0, b, INF)
            assert got == pytest.approx(2.0 / (3.0 * math.exp(b) - math.exp(-b)), rel=1e-12)

    def test_gs_exit_exponential_matches_severity(self, m1_q23):
        x, b, theta = 0.6, 1.8, 1.3
        gs = laws.gs_exit(m1_q23, x, b, Exponential(theta))
        assert gs == pytest.approx(laws.severity_absorbed(m1_q23, x, b, theta), rel=1e-12)


class TestParisianLimits:
    def test_large_r_recovers_classical_laws(self, m1, m1_q23):
        pctx = build_parisian(m1, 2.0 / 3.0, 1e4)
        b = 1.5
        for x in (0.0, 0.5, 1.0):
            up_p = laws.parisian_up_exit(pctx, x, b, INF)
            up_c = laws.two_sided_exit(m1_q23, x, 0.0, b)
            assert up_p == pytest.approx(up_c, rel=1e-3)
            sev_p = laws.parisian_severity(pctx, x, b, 1.0)
            sev_c = laws.severity_absorbed(m1_q23, x, b, 1.0)
            assert sev_p == pytest.approx(sev_c, rel=1e-3, abs=1e-6)

    def test_moderate_theta_z_limit(self, m1, m1_q23):
        pctx = build_parisian(m1, 2.0 / 3.0, 1e3)
        for x in (0.0, 0.8, 1.9):
            assert eval_parisian_Z(pctx, x, 1.2) == pytest.approx(
                eval_Z(m1_q23, x, 1.2), rel=1e-2)


class TestResolvent:
    def test_density_nonnegative(self, m1_par, m2_par):
        a, b = 0.0, 2.0
        for pctx in (m1_par, m2_par):
            for x in (0.3, 1.0, 1.7):
                ys = np.linspace(a + 1e-4, b - 1e-4, 50)
                dens = [laws.parisian_resolvent(pctx, x, a, b, float(y)) for y in ys]
                assert min(dens) >= -1e-12

    def test_integral_matches_quadrature(self, m1_par):
        a, b, x = 0.0, 2.0, 0.9
        exact = laws.parisian_resolvent_integral(m1_par, x, a, b)
        num, err = quad(lambda y: laws.parisian_resolvent(m1_par, x, a, b, y), a, b,
                        points=[x], limit=200)
        assert exact == pytest.approx(num, rel=1e-8)

    def test_domain_errors(self, m1_par):
        with pytest.raises(DomainError):
            laws.parisian_resolvent(m1_par, 3.0, 0.0, 2.0, 1.0)
        with pytest.raises(DomainError):
            laws.parisian_resolvent(m1_par, 1.0, 0.0, 2.0, 2.5)


class TestOmegaFactorization:
    def test_matches_direct_form_at_b(self, m1_par, m2_par):
        for pctx in (m1_par, m2_par):
            for b in (0.5, 1.3, 2.4):
                for theta, vartheta in ((0.0, 0.0), (1.1, 0.7), (2.3, 0.0)):
                    direct = laws.parisian_dividends_penalty(pctx, b, b, theta, vartheta)
                    fact = laws.parisian_dividends_penalty_factorized(pctx, b, theta, vartheta)
                    assert direct == pytest.approx(fact, rel=1e-10, abs=1e-12)

    def test_omega_closed_form(self, m1_par):
        # Omega = Phi_{q+r} - r W_q(b) / Z_q(b, Phi_{q+r})
        from parisian_scale.model import phi

        b = 1.1
        phi_qr = phi(m1_par.model, m1_par.q + m1_par.r)
        expected = phi_qr - m1_par.r * eval_W(m1_par.base, b) / eval_Z(
            m1_par.base, b, phi_qr)
        assert laws.omega(m1_par, b) == pytest.approx(expected, rel=1e-12)
