"""Parameter validation, derived quantities, and config round-tripping."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from zenoswitch import model
from zenoswitch.model import (CONST, LossModel, ResonatorParams,
                              ValidationError, VaporParams, bundle_from_raw,
                              default_bundle, dump_config, load_config,
                              parse_config_text, apply_overrides,
                              DEFAULT_CONFIG_VALUES)


def make_resonator(**kwargs):
    base = dict(Q=5e7, D=50e-6, d=0.35e-6, n_eff=1.30,
                lambda1=780e-9, lambda2=776e-9, R=0.1, V=7.6e-11)
    base.update(kwargs)
    return ResonatorParams(**base)


def make_vapor(**kwargs):
    base = dict(rho=5.6e10, rho0=1e14, delta_lambda=0.05, delta0_lambda=2.12,
                gamma1=1.9e7, gamma2=3.14e8, d12=2.23e-10, d23=4.92e-11,
                R20=9.41e8, R10=1.12e8, E31=5.1066e-19)
    base.update(kwargs)
    return VaporParams(**base)


LOSS = LossModel(gamma_lin=2.13e-3, alpha=5.27e5)


class TestConstants:
    def test_hbar_is_h_over_two_pi(self):
        assert CONST.hbar == pytest.approx(CONST.h / (2 * math.pi), rel=1e-12)

    def test_all_positive(self):
        assert CONST.c > 0 and CONST.h > 0 and CONST.hbar > 0 and CONST.q > 0


class TestValidate:
    def test_nominal_values_accepted_and_derived(self):
        b = model.validate(make_resonator(), make_vapor(), LOSS)
        # circumference of a 50 um toroid
        assert b.resonator.L_cm == pytest.approx(1.5708e-2, rel=1e-4)
        # T filled from the coupler identity
        assert b.resonator.T == pytest.approx(math.sqrt(1 - 0.01), rel=1e-15)
        # mode area from V/(pi D)
        assert b.resonator.A == pytest.approx(7.6e-11 / (math.pi * 50e-4),
                                              rel=1e-12)

    def test_area_from_volume_matches_nominal_within_half_percent(self):
        b = model.validate(make_resonator(), make_vapor(), LOSS)
        assert b.resonator.A == pytest.approx(4.83e-9, rel=5e-3)

    def test_decoupled_resonator_boundary_accepted(self):
        b = model.validate(make_resonator(R=0.0, T=1.0), make_vapor(), LOSS)
        assert b.resonator.R == 0.0

    def test_coupler_identity_violation_rejected(self):
        with pytest.raises(ValidationError) as err:
            model.validate(make_resonator(R=0.5, T=0.5), make_vapor(), LOSS)
        assert "coupling_T" in err.value.field

    def test_negative_quality_factor_rejected(self):
        with pytest.raises(ValidationError) as err:
            model.validate(make_resonator(Q=-1.0), make_vapor(), LOSS)
        assert err.value.field == "resonator.Q"

    def test_minor_diameter_must_be_smaller(self):
        with pytest.raises(ValidationError):
            model.validate(make_resonator(d=60e-6), make_vapor(), LOSS)

    def test_inconsistent_area_and_volume_rejected(self):
        with pytest.raises(ValidationError) as err:
            model.validate(make_resonator(A=6e-9), make_vapor(), LOSS)
        assert err.value.field == "resonator.mode_area_cm2"

    def test_negative_loss_rejected(self):
        with pytest.raises(ValidationError):
            model.validate(make_resonator(), make_vapor(),
                           LossModel(gamma_lin=-1e-3, alpha=0.0))

    def test_nonpositive_detuning_rejected(self):
        with pytest.raises(ValidationError):
            model.validate(make_resonator(), make_vapor(delta_lambda=0.0),
                           LOSS)

    @given(r=st.floats(min_value=0.0, max_value=0.999))
    @settings(max_examples=50, deadline=None)
    def test_any_coupling_with_derived_transmission_is_valid(self, r):
        b = model.validate(make_resonator(R=r), make_vapor(), LOSS)
        assert b.resonator.R ** 2 + b.resonator.T ** 2 == pytest.approx(
            1.0, abs=1e-12)


class TestConfig:
    def test_default_round_trip_is_identical(self):
        b = default_bundle()
        again = bundle_from_raw(parse_config_text(dump_config(b)))
        assert again == b

    def test_baseline_anchors_round_trip_bit_exactly(self):
        b = bundle_from_raw(parse_config_text(dump_config(default_bundle())))
        assert b.vapor.rho0 == 1e14
        assert b.vapor.delta0_lambda == 2.12
        assert b.vapor.R20 == 9.41e8
        assert b.vapor.R10 == 1.12e8

    def test_unknown_key_is_an_error(self):
        with pytest.raises(model.ConfigError) as err:
            parse_config_text("resonator.bogus = 1\n")
        assert "resonator.bogus" in str(err.value)

    def test_duplicate_key_is_an_error(self):
        with pytest.raises(model.ConfigError):
            parse_config_text("resonator.Q = 1e7\nresonator.Q = 2e7\n")

    def test_missing_required_key_is_an_error(self):
        raw = dict(DEFAULT_CONFIG_VALUES)
        del raw["resonator.Q"]
        with pytest.raises(model.ConfigError) as err:
            bundle_from_raw(raw)
        assert "resonator.Q" in str(err.value)

    def test_override_replaces_value(self):
        raw = apply_overrides(dict(DEFAULT_CONFIG_VALUES), ["input.P1_W=0"])
        assert bundle_from_raw(raw).p1_in_W == 0.0

    def test_override_unknown_key_is_an_error(self):
        with pytest.raises(model.ConfigError):
            apply_overrides(dict(DEFAULT_CONFIG_VALUES), ["nope.key=1"])

    def test_celsius_override_converts_to_kelvin(self):
        raw = apply_overrides(dict(DEFAULT_CONFIG_VALUES),
                              ["vapor.temperature_C=43"])
        b = bundle_from_raw(raw)
        assert b.temperature_K == pytest.approx(316.15, abs=1e-9)

    def test_level3_energy_derived_from_wavelengths(self):
        b = default_bundle()
        expected = (CONST.h * CONST.c / 780e-9 + CONST.h * CONST.c / 776e-9)
        assert b.vapor.E31 == pytest.approx(expected, rel=1e-12)

    def test_comments_and_blank_lines_ignored(self):
        raw = parse_config_text("# comment\n\nresonator.Q = 5e7  # inline\n")
        assert raw == {"resonator.Q": "5e7"}

    def test_load_config_from_file(self, tmp_path):
        path = tmp_path / "params.cfg"
        path.write_text(dump_config(default_bundle()), encoding="utf-8")
        assert load_config(path) == default_bundle()

    @given(
        q=st.floats(min_value=1e5, max_value=1e9),
        diameter_um=st.floats(min_value=10.0, max_value=500.0),
        r=st.floats(min_value=1e-4, max_value=0.9),
        gamma=st.floats(min_value=1e-6, max_value=0.5),
        p1=st.floats(min_value=0.0, max_value=1.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_round_trip_is_identical_for_jittered_parameters(
            self, q, diameter_um, r, gamma, p1):
        raw = dict(DEFAULT_CONFIG_VALUES)
        raw["resonator.Q"] = repr(q)
        raw["resonator.major_diameter_um"] = repr(diameter_um)
        raw["resonator.coupling_R"] = repr(r)
        raw["loss.gamma_per_cm"] = repr(gamma)
        raw["input.P1_W"] = repr(p1)
        del raw["resonator.mode_area_cm2"]   # avoid V/A consistency coupling
        b = bundle_from_raw(raw)
        assert bundle_from_raw(parse_config_text(dump_config(b))) == b
