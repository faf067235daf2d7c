"""Barrier optimization, efficiency thresholds, and network algebra."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from parisian_scale import Constant, LevyModel, build_parisian, build_scale
from parisian_scale import control as ctl
from parisian_scale.errors import DomainError, NoSolution, RetentionOutOfRange
from parisian_scale.scale import eval_W


def make_slg_G(ctx, k):
    return lambda b: ctl.barrier_function("SLG_classic", ctx, b, k=k)


class TestOptimizer:
    def test_definetti_interior_optimum(self, m1):
        ctx = build_scale(m1, 0.1)
        G = lambda b: ctl.barrier_function("deFinetti_classic", ctx, b, penalty=Constant(0.0))
        sol = ctl.optimize_barrier(G, 8.0)
        assert not sol.is_boundary
        assert sol.b_star == pytest.approx(2.107035, abs=1e-4)
        # the optimum is a minimum of W', so W'' vanishes there
        assert eval_W(ctx, sol.b_star, deriv_order=2) == pytest.approx(0.0, abs=1e-5)

    def test_boundary_detection(self, m1_q23):
        sol = ctl.optimize_barrier(make_slg_G(m1_q23, 1.2), 6.0)
        assert sol.is_boundary and sol.b_star == 0.0

    def test_rejects_truncated_search(self):
        with pytest.raises(NoSolution):
            ctl.optimize_barrier(lambda b: b, 5.0)

    def test_rejects_bad_interval(self):
        with pytest.raises(DomainError):
            ctl.optimize_barrier(lambda b: -b, 0.0)

    def test_slg_boundary_threshold_m1(self, m1):
        """For compound Poisson, b* = 0 exactly when k <= 1 + q/lam."""
        rng = np.random.default_rng(3)
        for _ in range(50):
            q = float(rng.uniform(0.2, 1.5))
            k = float(rng.uniform(1.0, 3.0))
            kc = 1.0 + q / m1.lam
            if abs(k - kc) < 1e-3:
                continue
            ctx = build_scale(m1, q)
            sol = ctl.optimize_barrier(make_slg_G(ctx, k), 10.0)
            assert sol.is_boundary == (k <= kc)

    def test_boundary_agrees_with_initial_slope(self, m1):
        rng = np.random.default_rng(5)
        h = 1e-6
        for _ in range(50):
            q = float(rng.uniform(0.2, 1.5))
            k = float(rng.uniform(1.0, 3.0))
            G = make_slg_G(build_scale(m1, q), k)
            slope = (G(h) - G(0.0)) / h
            if abs(slope) < 1e-6:
                continue
            sol = ctl.optimize_barrier(G, 10.0)
            assert (slope > 0) == (sol.b_star > 0)


class TestValues:
    def test_definetti_zero_penalty_is_dividends(self, m1):
        ctx = build_scale(m1, 0.1)
        for x, b in ((0.0, 1.5), (0.7, 1.5), (1.5, 1.5)):
            assert ctl.value_definetti(ctx, x, b, Constant(0.0)) == pytest.approx(
                ctl.vf_dividends_classic(ctx, x, b), rel=1e-12)

    def test_definetti_lump_above_barrier(self, m1):
        ctx = build_scale(m1, 0.1)
        vb = ctl.value_definetti(ctx, 1.5, 1.5, Constant(0.0))
        assert ctl.value_definetti(ctx, 2.3, 1.5, Constant(0.0)) == pytest.approx(vb + 0.8)

    def test_slg_value_peaks_at_optimizer(self, m1_q23):
        k = 2.5
        sol = ctl.optimize_barrier(make_slg_G(m1_q23, k), 8.0)
        for x in (0.0, 0.2, 0.4):
            best = ctl.value_slg_classic(m1_q23, x, max(sol.b_star, x), k)
            for b in np.linspace(max(x, 0.05), 4.0, 60):
                assert ctl.value_slg_classic(m1_q23, x, float(b), k) <= best + 1e-9

    def test_hjb_variational_inequality(self, m1):
        """The de Finetti value solves max(GV - qV, 1 - V') = 0."""
        q = 0.1
        ctx = build_scale(m1, q)
        sol = ctl.optimize_barrier(
            lambda b: ctl.barrier_function("deFinetti_classic", ctx, b, penalty=Constant(0.0)),
            8.0)
        bstar = sol.b_star
        wp_b = eval_W(ctx, bstar, deriv_order=1)
        v_b = eval_W(ctx, bstar) / wp_b

        def V(y):
            if y < 0:
                return 0.0
            if y <= bstar:
                return eval_W(ctx, y) / wp_b
            return y - bstar + v_b

        def Vp(y):
            return eval_W(ctx, y, deriv_order=1) / wp_b if y <= bstar else 1.0

        def gen_minus_q(y):
            jump, _ = quad(lambda z: (V(y - z) - V(y)) * 2.0 * math.exp(-2.0 * z),
                           0.0, 60.0, points=[y], limit=200)
            return ctx.model.c * Vp(y) + ctx.model.lam * jump - q * V(y)

        for y in (0.3, 1.0, 1.8):
            assert abs(min(-gen_minus_q(y), Vp(y) - 1.0)) < 1e-4
        for y in (bstar + 0.3, bstar + 1.0, bstar + 2.0):
            assert Vp(y) - 1.0 >= -1e-6
            assert gen_minus_q(y) <= 1e-6

    def test_parisian_slg_assembles_from_parts(self, m1_par_sym):
        k, b = 2.0, 1.4
        for x in (0.0, 0.6, 1.4):
            parts = (ctl.value_parisian(m1_par_sym, x, b, "VS_div")
                     - k * ctl.value_parisian(m1_par_sym, x, b, "VS_bail"))
            assert ctl.slg_parisian_value(m1_par_sym, x, b, k) == pytest.approx(
                parts, rel=1e-12)


class TestEfficiency:
    def test_symmetric_fixture_threshold(self, m1_par_sym):
        assert ctl.efficiency_index(m1_par_sym) == pytest.approx(4.0, rel=1e-12)
        assert ctl.is_efficient(m1_par_sym, 3.0)
        assert not ctl.is_efficient(m1_par_sym, 5.0)

    def test_threshold_increasing_in_q(self, m1):
        r = 1.0 / 3.0
        qs = np.linspace(0.05, 2.0, 20)
        ks = [ctl.efficiency_index(build_parisian(m1, float(q), r)) for q in qs]
        assert all(np.diff(ks) > 0)

    def test_threshold_limit_is_one(self, m1):
        k = ctl.efficiency_index(build_parisian(m1, 1e-9, 1.0 / 3.0))
        assert k == pytest.approx(1.0, abs=1e-6)

    def test_patience_zero_when_already_efficient(self, m1_par_sym):
        assert ctl.solve_patience(m1_par_sym, 3.0) == 0.0

    def test_patience_restores_threshold(self, m1_par_sym):
        k = 5.0
        extra = ctl.solve_patience(m1_par_sym, k)
        assert extra > 0
        model, q, r = m1_par_sym.model, m1_par_sym.q, m1_par_sym.r
        restored = ctl.efficiency_index(build_parisian(model, q + extra, r))
        assert restored == pytest.approx(k, rel=1e-7)


class TestNetwork:
    def make_spec(self, premiums, alphas, c0, q=0.5):
        subs = tuple(
            ctl.Subsidiary(premium=c, lam=1.0, phases=((1.0, 2.0),), retention=a)
            for c, a in zip(premiums, alphas)
        )
        return ctl.NetworkSpec(subsidiaries=subs, c0=c0, q=q)

    def test_not_cheap_example(self):
        spec = self.make_spec((3.0, 2.0), (1.0 / 3.0, 0.5), c0=10.0)
        assert not spec.cheap

    def test_cheap_example_constants(self):
        spec = self.make_spec((2.0, 3.0), (0.5, 0.5), c0=1.0)
        chk = ctl.network_check(spec)
        assert chk["cheap"]
        assert chk["gamma"] == pytest.approx(2.0)
        assert chk["c_tilde"] == pytest.approx(10.0)

    def test_claims_line(self):
        spec = self.make_spec((2.0, 3.0), (0.5, 0.25), c0=1.0)
        assert ctl.network_claims_line(spec, 3.0) == pytest.approx([3.0, 1.0])

    def test_retention_validation(self):
        with pytest.raises(RetentionOutOfRange):
            self.make_spec((2.0,), (1.0,), c0=1.0)
        with pytest.raises(RetentionOutOfRange):
            self.make_spec((2.0,), (0.0,), c0=1.0)
