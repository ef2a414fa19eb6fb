"""Closed-form resonator performance algebra and switch quality metrics.

The closed forms follow the high-Q single-coupler idealization (T ~ 1,
critical coupling R = sqrt(gamma L), enhancement f = 1/R^2 = 1/(gamma L)).
The switch metrics are computed with the full steady-state solver, so they
reflect the exact two-coupler equations at the configured operating point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .model import LossModel, ParameterBundle, ResonatorParams, gamma_from_quality_factor
from . import quasistatic

# Nominal reference value for the power at which single- and two-photon loss
# rates balance.  The closed-form result below disagrees with it by many
# orders of magnitude; both are always reported (see README).
QUOTED_BALANCE_POWER_W = 3.7e-7


class OutsideApproximationError(ValueError):
    """gamma*L >= 1: the weak-loss critical-coupling formula does not apply."""


def enhancement_factor(lambda_m: float, q: float, n_e: float,
                       length_m: float) -> float:
    """Circulating-to-input power enhancement f = lambda Q / (2 pi n_e L)."""
    return lambda_m * q / (2.0 * math.pi * n_e * length_m)


def gamma_from_Q(lambda_m: float, q: float, n_e: float) -> float:
    """Linear loss rate (cm^-1) equivalent to the quality factor."""
    return gamma_from_quality_factor(lambda_m, q, n_e)


def critical_coupling(gamma_cm: float, length_cm: float) -> float:
    """Coupling amplitude R = sqrt(gamma L) that nulls the through port in
    the single-coupler idealization.  Warns when gamma*L > 0.1 and refuses
    gamma*L >= 1."""
    gl = gamma_cm * length_cm
    if gl >= 1.0:
        raise OutsideApproximationError(
            f"gamma*L = {gl!r} >= 1 is outside the weak-loss approximation")
    if gl > 0.1:
        warnings.warn(f"gamma*L = {gl:.3g} > 0.1: critical-coupling formula "
                      f"is marginal", stacklevel=2)
    return math.sqrt(gl)


def balance_power(gamma_cm: float, area_cm2: float, alpha_cm_gw: float,
                  f: float) -> float:
    """Input power (W) at which single- and two-photon loss rates are equal,
    gamma A / (alpha f), converted from GW to W."""
    return gamma_cm * area_cm2 / (alpha_cm_gw * f) * 1e9


def balance_residual(gamma_cm: float, area_cm2: float, alpha_cm_gw: float,
                     f: float, power_w: float) -> float:
    """Relative mismatch between the TPA loss rate alpha (f P)^2 / A and the
    linear loss rate gamma f P at a given input power."""
    fp_gw = f * power_w * 1e-9
    tpa = alpha_cm_gw * fp_gw ** 2 / area_cm2
    lin = gamma_cm * fp_gw
    return abs(tpa - lin) / lin


@dataclass(frozen=True)
class SwitchStateQuality:
    """Routing quality of one logic state (control off or on)."""

    intended_fraction: float
    wrong_fraction: float


@dataclass(frozen=True)
class SwitchQuality:
    crosstalk: float
    insertion_loss: float
    control_off: SwitchStateQuality
    control_on: SwitchStateQuality


def switch_quality(res: ResonatorParams, loss: LossModel,
                   p_control_w: float, p_target_w: float) -> SwitchQuality:
    """Worst-case crosstalk and insertion loss over the two logic states.

    Control off: the target (field 2, port B) resonates and should exit in
    waveguide A.  Control on: the control (field 1, established first)
    blocks the cavity and the target should pass straight through in B.
    Crosstalk is the worst wrong-port fraction, insertion loss the worst
    intended-port deficit, both relative to the target input power.
    """
    off = quasistatic.solve_fixed_point(0.0, p_target_w, res, loss)
    on = quasistatic.solve_fixed_point(p_control_w, p_target_w, res, loss,
                                       seed=0.0)
    state_off = SwitchStateQuality(
        intended_fraction=off.outputs.p2a / p_target_w,
        wrong_fraction=off.outputs.p2b / p_target_w)
    state_on = SwitchStateQuality(
        intended_fraction=on.outputs.p2b / p_target_w,
        wrong_fraction=on.outputs.p2a / p_target_w)
    return SwitchQuality(
        crosstalk=max(state_off.wrong_fraction, state_on.wrong_fraction),
        insertion_loss=max(1.0 - state_off.intended_fraction,
                           1.0 - state_on.intended_fraction),
        control_off=state_off,
        control_on=state_on)


@dataclass(frozen=True)
class PerfReport:
    f: float                    # power enhancement factor
    R_crit: float               # critical coupling amplitude
    gamma_Q: float              # Q-derived loss rate, cm^-1
    gamma_configured: float     # configured loss rate, cm^-1
    P_c: float                  # balance power from the closed form, W
    P_c_quoted: float           # nominal reference balance power, W
    P_c_ratio: float            # closed form / reference
    balance_residual: float     # loss-rate balance residual at P_c
    crosstalk: float
    insertion_loss: float


def perf_report(bundle: ParameterBundle,
                use_q_derived_gamma: bool = False) -> PerfReport:
    """Full performance report at the bundle's operating point.

    ``use_q_derived_gamma`` selects which loss rate feeds the critical
    coupling and balance power; both rates are always reported.
    """
    res = bundle.resonator
    loss = bundle.loss
    gamma_q = gamma_from_Q(res.lambda1, res.Q, res.n_eff)
    gamma = gamma_q if use_q_derived_gamma else loss.gamma_lin
    f = enhancement_factor(res.lambda1, res.Q, res.n_eff, res.L_m)
    r_crit = critical_coupling(gamma, res.L_cm)
    p_c = balance_power(gamma, res.A, loss.alpha, f)
    resid = balance_residual(gamma, res.A, loss.alpha, f, p_c)
    target = bundle.p2_in_W if bundle.p2_in_W > 0 else QUOTED_BALANCE_POWER_W * 1e3
    control = bundle.p1_in_W if bundle.p1_in_W > 0 else target
    quality = switch_quality(res, loss, control, target)
    return PerfReport(f=f, R_crit=r_crit, gamma_Q=gamma_q,
                      gamma_configured=loss.gamma_lin,
                      P_c=p_c, P_c_quoted=QUOTED_BALANCE_POWER_W,
                      P_c_ratio=p_c / QUOTED_BALANCE_POWER_W,
                      balance_residual=resid,
                      crosstalk=quality.crosstalk,
                      insertion_loss=quality.insertion_loss)
