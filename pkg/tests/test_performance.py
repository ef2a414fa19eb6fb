"""Closed-form resonator algebra and switch quality metrics."""

import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from zenoswitch import performance as pf

# sqrt(2.13e-3 * pi * 50e-4), 50-digit arithmetic
R_CRIT_NOMINAL = 5.7842857606390176e-3
BALANCE_POWER_NOMINAL_W = 6.4223594635020385e-13


class TestEnhancementFactor:
    def test_nominal_value(self, res):
        f = pf.enhancement_factor(res.lambda1, res.Q, res.n_eff, res.L_m)
        assert f == pytest.approx(30350.0, rel=1e-2)

    def test_linear_in_quality_factor(self, res):
        f1 = pf.enhancement_factor(res.lambda1, res.Q, res.n_eff, res.L_m)
        f2 = pf.enhancement_factor(res.lambda1, 2 * res.Q, res.n_eff, res.L_m)
        assert f2 == pytest.approx(2 * f1, rel=1e-12)

    def test_composes_exactly_with_q_derived_loss(self, res):
        f = pf.enhancement_factor(res.lambda1, res.Q, res.n_eff, res.L_m)
        gamma_q = pf.gamma_from_Q(res.lambda1, res.Q, res.n_eff)
        assert f * gamma_q * res.L_cm == pytest.approx(1.0, abs=1e-12)

    @given(q=st.floats(min_value=1e4, max_value=1e10),
           lam=st.floats(min_value=2e-7, max_value=2e-6),
           n_e=st.floats(min_value=1.0, max_value=3.5),
           length=st.floats(min_value=1e-5, max_value=1e-2))
    @settings(max_examples=60, deadline=None)
    def test_identity_holds_for_any_inputs(self, q, lam, n_e, length):
        f = pf.enhancement_factor(lam, q, n_e, length)
        gamma_q = pf.gamma_from_Q(lam, q, n_e)
        assert f * gamma_q * (length * 100.0) == pytest.approx(1.0, abs=1e-12)


class TestGammaFromQ:
    def test_nominal_value_within_two_percent(self, res):
        gamma = pf.gamma_from_Q(res.lambda1, res.Q, res.n_eff)
        assert gamma == pytest.approx(2.13e-3, rel=2e-2)

    def test_vanishes_for_large_quality_factor(self, res):
        assert pf.gamma_from_Q(res.lambda1, 1e308, res.n_eff) < 1e-300

    def test_halved_wavelength_doubles_loss(self, res):
        g1 = pf.gamma_from_Q(res.lambda1, res.Q, res.n_eff)
        g2 = pf.gamma_from_Q(res.lambda1 / 2, res.Q, res.n_eff)
        assert g2 == pytest.approx(2 * g1, rel=1e-12)


class TestCriticalCoupling:
    def test_nominal_value(self, res, loss):
        r = pf.critical_coupling(loss.gamma_lin, res.L_cm)
        assert r == pytest.approx(R_CRIT_NOMINAL, rel=1e-12)
        assert r == pytest.approx(5.8e-3, rel=5e-3)

    def test_lossless_cavity_needs_no_coupling(self, res):
        assert pf.critical_coupling(0.0, res.L_cm) == 0.0

    def test_outside_weak_loss_approximation(self):
        with pytest.raises(pf.OutsideApproximationError):
            pf.critical_coupling(2.0, 1.0)

    def test_marginal_loss_warns(self):
        with pytest.warns(UserWarning):
            pf.critical_coupling(0.2, 1.0)

    def test_companion_enhancement_is_inverse_square(self, res, loss):
        r = pf.critical_coupling(loss.gamma_lin, res.L_cm)
        assert 1.0 / r ** 2 == pytest.approx(
            1.0 / (loss.gamma_lin * res.L_cm), rel=1e-12)


class TestBalancePower:
    def test_invariant_under_common_loss_scaling(self, res, loss):
        f = 3e4
        p1 = pf.balance_power(loss.gamma_lin, res.A, loss.alpha, f)
        p2 = pf.balance_power(2 * loss.gamma_lin, res.A, 2 * loss.alpha, f)
        assert p2 == pytest.approx(p1, rel=1e-15)

    def test_vanishes_for_strong_absorption(self, res, loss):
        f = 3e4
        assert pf.balance_power(loss.gamma_lin, res.A, 1e30, f) < 1e-30

    def test_nominal_value_and_reference_discrepancy(self, res, loss):
        f = pf.enhancement_factor(res.lambda1, res.Q, res.n_eff, res.L_m)
        p_c = pf.balance_power(loss.gamma_lin, res.A, loss.alpha, f)
        assert p_c == pytest.approx(BALANCE_POWER_NOMINAL_W, rel=1e-12)
        # The closed form sits many orders of magnitude below the nominal
        # reference value; the report carries both (never reconciled).
        assert p_c / pf.QUOTED_BALANCE_POWER_W < 1e-4

    def test_loss_rates_balance_at_the_computed_power(self, res, loss):
        f = pf.enhancement_factor(res.lambda1, res.Q, res.n_eff, res.L_m)
        p_c = pf.balance_power(loss.gamma_lin, res.A, loss.alpha, f)
        assert pf.balance_residual(loss.gamma_lin, res.A, loss.alpha,
                                   f, p_c) < 1e-9


class TestSwitchQuality:
    def test_operating_point_routes_cleanly(self, res, loss):
        q = pf.switch_quality(res, loss, 3.7e-4, 3.7e-4)
        assert q.crosstalk < 0.01
        assert q.insertion_loss < 0.05
        assert 0.0 <= q.crosstalk <= 1.0
        assert 0.0 <= q.insertion_loss <= 1.0

    def test_without_tpa_the_control_cannot_block(self, res, loss):
        q = pf.switch_quality(res, replace(loss, alpha=0.0), 3.7e-4, 3.7e-4)
        # control-on state still routes the target across the ring
        assert q.control_on.wrong_fraction > 0.9
        assert q.crosstalk > 0.9

    def test_lossless_routed_state_has_no_insertion_loss(self, res, loss):
        q = pf.switch_quality(res, replace(loss, gamma_lin=0.0),
                              3.7e-4, 3.7e-4)
        assert q.control_off.intended_fraction == pytest.approx(1.0,
                                                                abs=1e-9)


class TestPerfReport:
    def test_report_fields(self, bundle):
        rep = pf.perf_report(bundle)
        assert rep.f > 1.0
        assert rep.P_c_quoted == 3.7e-7
        assert rep.P_c_ratio == pytest.approx(rep.P_c / 3.7e-7, rel=1e-12)
        assert rep.balance_residual < 1e-9
        assert rep.gamma_configured == bundle.loss.gamma_lin
        assert rep.gamma_Q == pytest.approx(2.0943951023931952e-3, rel=1e-12)

    def test_q_derived_gamma_flag(self, bundle):
        rep = pf.perf_report(bundle, use_q_derived_gamma=True)
        assert rep.R_crit == pytest.approx(
            math.sqrt(rep.gamma_Q * bundle.resonator.L_cm), rel=1e-12)
