"""Absorption-rate formulas, scaling laws, and vapor thermodynamics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zenoswitch import rubidium as rb
from zenoswitch.model import CONST

D12 = 2.23e-10
D23 = 4.92e-11
GAMMA1 = 1.9e7
GAMMA2 = 3.14e8
DELTA_J = rb.detuning_energy(2.12, 780.0)

# Independently computed (50-digit arithmetic) oracle values.
PRESSURE_316_TORR = 1.8296821150735777e-06
DENSITY_316_CC = 5.5732528129554179e10
SELF_TPA_HALF_NM = 4.0722695336152253e-08
DT_NOMINAL_S = 6.8114963213429659e-13
PF_NOMINAL_W = 3.7484749157974370e-07
L0_NOMINAL_CM = 4.0804895765589940e-02
ALPHA0_NOMINAL = 5.2578088682733441e5


class TestSingleAtomRates:
    def test_zero_field_gives_zero_tpa(self):
        assert rb.single_atom_tpa_rate(D12, D23, 0.0, DELTA_J, GAMMA2) == 0.0

    def test_tpa_scales_as_field_to_the_fourth(self):
        r1 = rb.single_atom_tpa_rate(D12, D23, 1.0, DELTA_J, GAMMA2)
        r2 = rb.single_atom_tpa_rate(D12, D23, 2.0, DELTA_J, GAMMA2)
        assert r2 == pytest.approx(16.0 * r1, rel=1e-12)

    def test_tpa_scales_inversely_with_detuning_squared(self):
        r1 = rb.single_atom_tpa_rate(D12, D23, 1e3, DELTA_J, GAMMA2)
        r2 = rb.single_atom_tpa_rate(D12, D23, 1e3, 2 * DELTA_J, GAMMA2)
        assert r2 == pytest.approx(0.25 * r1, rel=1e-12)

    def test_zero_detuning_raises(self):
        with pytest.raises(rb.VirtualLevelResonanceError):
            rb.single_atom_tpa_rate(D12, D23, 1e3, 0.0, GAMMA2)

    def test_zero_field_gives_zero_1pa(self):
        assert rb.single_atom_1pa_rate(D12, 0.0, DELTA_J, GAMMA1) == 0.0

    def test_1pa_lorentzian_tail(self):
        # far off resonance the rate falls as 1/delta^2
        big = 1e4 * CONST.hbar * GAMMA1
        r1 = rb.single_atom_1pa_rate(D12, 1e3, big, GAMMA1)
        r2 = rb.single_atom_1pa_rate(D12, 1e3, 2 * big, GAMMA1)
        assert r2 == pytest.approx(0.25 * r1, rel=1e-6)

    def test_1pa_on_resonance_peak(self):
        e_field = 1e3
        m = CONST.q * D12 * e_field / math.sqrt(3.0)
        expected = 2.0 * m ** 2 / (CONST.hbar ** 2 * GAMMA1)
        assert rb.single_atom_1pa_rate(D12, e_field, 0.0, GAMMA1) == \
            pytest.approx(expected, rel=1e-12)


class TestSelfTpa:
    def test_degenerate_frequencies_give_unity(self):
        assert rb.self_tpa_ratio(0.0, 778.0, GAMMA2) == 1.0

    def test_half_nanometre_suppression(self):
        ratio = rb.self_tpa_ratio(0.5, 778.0, GAMMA2)
        assert ratio == pytest.approx(SELF_TPA_HALF_NM, rel=1e-12)
        assert ratio <= 1e-7
        assert ratio >= 1e-8   # order 1e-8 suppression

    def test_full_level_spacing_suppression(self):
        assert rb.self_tpa_ratio(4.0, 778.0, GAMMA2) < 1e-8

    @given(st.floats(min_value=1e-3, max_value=10.0),
           st.floats(min_value=1.01, max_value=4.0))
    @settings(max_examples=60, deadline=None)
    def test_strictly_decreasing(self, dl, factor):
        lo = rb.self_tpa_ratio(dl, 778.0, GAMMA2)
        hi = rb.self_tpa_ratio(dl * factor, 778.0, GAMMA2)
        assert hi < lo


class TestScaledRates:
    def test_baseline_rates_are_exact_anchors(self, vapor):
        from dataclasses import replace
        base = replace(vapor, rho=vapor.rho0, delta_lambda=vapor.delta0_lambda)
        rates = rb.scaled_rates(base, 1.0, 1.0)
        assert rates.R2 == 9.41e8
        assert rates.R1 == 1.12e8

    def test_density_detuning_design_rule(self, vapor):
        # rho = rho0 (delta/delta0)^2 restores the baseline rate at any delta
        from dataclasses import replace
        for delta in (0.05, 0.3, 1.0):
            v = replace(vapor, delta_lambda=delta,
                        rho=vapor.rho0 * (delta / vapor.delta0_lambda) ** 2)
            rates = rb.scaled_rates(v, 1.0, 1.0)
            assert rates.R2 == pytest.approx(vapor.R20, rel=1e-12)

    def test_zero_intensity_gives_zero_rates(self, vapor):
        rates = rb.scaled_rates(vapor, 0.0, 1.0)
        assert rates.R2 == 0.0 and rates.R1 == 0.0

    def test_rate_ratio_independent_of_density_and_detuning(self, vapor):
        from dataclasses import replace
        i2 = 3.7
        expected = i2 * vapor.R20 / vapor.R10
        for rho in np.logspace(9, 15, 10):
            for delta in np.linspace(0.02, 2.12, 10):
                v = replace(vapor, rho=rho, delta_lambda=delta)
                rates = rb.scaled_rates(v, 1.3, i2)
                assert abs(rates.R2 / rates.R1 - expected) <= 1e-12 * expected

    def test_summary_self_rate_below_cross_rate(self, vapor, res):
        rates = rb.rate_summary(vapor, res, 1.0, 1.0)
        assert 0.0 < rates.Rs < rates.R2


class TestEffectiveAlpha:
    def test_nominal_chain(self, res, vapor):
        flux = rb.effective_alpha(res, vapor.R20, 778e-9)
        assert flux.dt_roundtrip == pytest.approx(DT_NOMINAL_S, rel=1e-12)
        assert flux.P_f == pytest.approx(PF_NOMINAL_W, rel=1e-12)
        assert flux.L0 == pytest.approx(L0_NOMINAL_CM, rel=1e-12)
        assert flux.alpha0 == pytest.approx(ALPHA0_NOMINAL, rel=1e-12)

    def test_nominal_chain_matches_reference_values(self, res, vapor):
        flux = rb.effective_alpha(res, vapor.R20, 778e-9)
        assert flux.dt_roundtrip == pytest.approx(6.81e-13, rel=5e-3)
        assert flux.P_f == pytest.approx(3.74e-7, rel=5e-3)
        assert flux.L0 == pytest.approx(4.08e-2, rel=1e-2)
        assert flux.alpha0 == pytest.approx(5.27e5, rel=1e-2)

    def test_chain_is_internally_consistent(self, res, vapor):
        flux = rb.effective_alpha(res, vapor.R20, 778e-9)
        speed = CONST.c / res.n_eff
        assert flux.P_f == pytest.approx(flux.photon_energy
                                         / flux.dt_roundtrip, rel=1e-12)
        assert flux.L0 == pytest.approx(vapor.R20 / (speed * 100.0), rel=1e-12)
        assert flux.alpha0 == pytest.approx(flux.L0 * res.A / flux.P_f * 1e9,
                                            rel=1e-12)

    def test_volume_doubling_doubles_alpha(self, res, vapor):
        from dataclasses import replace
        doubled = replace(res, A=None, V=2 * res.V)
        flux = rb.effective_alpha(doubled, vapor.R20, 778e-9)
        base = rb.effective_alpha(replace(res, A=None), vapor.R20, 778e-9)
        assert flux.alpha0 == pytest.approx(2 * base.alpha0, rel=1e-12)

    def test_halved_rate_halves_alpha(self, res, vapor):
        full = rb.effective_alpha(res, vapor.R20, 778e-9)
        half = rb.effective_alpha(res, vapor.R20 / 2, 778e-9)
        assert half.alpha0 == pytest.approx(full.alpha0 / 2, rel=1e-12)


class TestVaporThermodynamics:
    def test_pressure_at_43C(self):
        assert rb.vapor_pressure(316.15) == pytest.approx(PRESSURE_316_TORR,
                                                          rel=1e-12)
        assert rb.vapor_pressure(316.15) == pytest.approx(1.8e-6, rel=0.02)

    def test_pressure_rises_with_temperature(self):
        assert rb.vapor_pressure(350.0) > rb.vapor_pressure(300.0)

    def test_density_chain_at_43C(self):
        rho = rb.density_from_temperature(316.15)
        assert rho == pytest.approx(DENSITY_316_CC, rel=1e-12)
        assert rho == pytest.approx(5.6e10, rel=3e-2)

    @pytest.mark.parametrize("temp", [300.0, 316.15, 350.0])
    def test_inversion_round_trips(self, temp):
        rho = rb.density_from_temperature(temp)
        assert rb.temperature_for_density(rho) == pytest.approx(temp,
                                                                abs=1e-4)

    def test_density_out_of_range_raises(self):
        with pytest.raises(rb.TemperatureRangeError):
            rb.temperature_for_density(1e20)
        with pytest.raises(rb.TemperatureRangeError):
            rb.temperature_for_density(1.0)

    def test_required_density_for_small_detuning_runs_warm(self, vapor):
        rho = float(rb.required_density(0.05, vapor))
        assert rho == pytest.approx(5.6e10, rel=3e-2)
        temp_c = rb.temperature_for_density(rho) - 273.15
        assert temp_c == pytest.approx(43.0, abs=2.0)

    def test_baseline_detuning_needs_baseline_density(self, vapor):
        rho = float(rb.required_density(vapor.delta0_lambda, vapor))
        assert rho == pytest.approx(1e14, rel=1e-12)
        assert rb.temperature_for_density(rho) == pytest.approx(426.55,
                                                                abs=0.5)

    def test_density_strictly_increasing(self):
        temps = np.linspace(250.0, 500.0, 60)
        rhos = [rb.density_from_temperature(t) for t in temps]
        assert all(b > a for a, b in zip(rhos, rhos[1:]))


class TestCurves:
    def test_self_tpa_curve_strictly_decreasing(self, vapor):
        grid = np.linspace(0.05, 4.0, 80)
        curve = rb.self_tpa_curve(grid, 778.0, vapor.gamma2)
        assert np.all(np.diff(curve) < 0)

    def test_temperature_curve_contains_design_point(self, vapor):
        grid = np.array([0.02, 0.05, 0.1])
        temps = rb.required_temperature_curve(grid, vapor)
        assert temps[1] == pytest.approx(43.0, abs=2.0)
