"""Two-photon and single-photon absorption model for rubidium vapor.

Single-atom rates come from second-order perturbation theory with the
ladder of levels 5S -> 5P -> 5D; matrix elements use the isotropic
orientation average <|d.E|^2> = d^2 E^2 / 3 for randomly oriented dipoles.
Device-level absorption is anchored to the baseline integrated rates
``R20``/``R10`` and rescaled with density, detuning, and intensity; the
chain through the mode geometry converts the baseline rate into an
effective TPA coefficient in cm/GW.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import CONST, ResonatorParams, VaporParams


class VirtualLevelResonanceError(ZeroDivisionError):
    """Zero detuning from the intermediate level: the rate formula diverges."""


class TemperatureRangeError(ValueError):
    """Requested density is outside the supported temperature window."""


TEMPERATURE_RANGE_K = (250.0, 500.0)

# Vapor-pressure correlation constants (torr as a function of kelvin),
# stored to full precision; no refitting.
_VP_A = 15.88253
_VP_B = 4529.635
_VP_C = 0.00058663
_VP_D = 2.99138

# Ideal-gas conversion from pressure (torr) and temperature (K) to cm^-3.
_IDEAL_GAS_TORR = 9.63e18


@dataclass(frozen=True)
class RateResult:
    """Cross-TPA, single-photon, and self-TPA rates (s^-1)."""

    R2: float
    R1: float
    Rs: float


@dataclass(frozen=True)
class FluxQuantities:
    """Round-trip and single-photon flux chain for the effective TPA coefficient."""

    dt_roundtrip: float    # s
    photon_energy: float   # J
    P_f: float             # single-photon energy flux, W
    L0: float              # baseline TPA loss, cm^-1
    alpha0: float          # baseline effective TPA coefficient, cm/GW


def _matrix_element(dipole_m: float, e_field: float) -> float:
    """Isotropically averaged dipole interaction energy q d E / sqrt(3) (J)."""
    return CONST.q * dipole_m * e_field / math.sqrt(3.0)


def single_atom_tpa_rate(d12: float, d23: float, e_field: float,
                         delta_J: float, gamma2: float) -> float:
    """Cross two-photon absorption rate of one atom (s^-1).

    ``delta_J`` is the detuning of photon 1 from the intermediate level in
    joules; ``gamma2`` the half-width of the upper level.
    """
    if delta_J == 0.0:
        raise VirtualLevelResonanceError("detuning from the virtual level is zero")
    if gamma2 <= 0.0:
        raise ValueError("gamma2 must be positive")
    m21 = _matrix_element(d12, e_field)
    m32 = _matrix_element(d23, e_field)
    return 8.0 * (m32 * m21) ** 2 / (CONST.hbar ** 2 * delta_J ** 2) / gamma2


def single_atom_1pa_rate(d12: float, e_field: float,
                         delta_J: float, gamma1: float) -> float:
    """Single-photon absorption rate of one atom (s^-1), Lorentzian in detuning."""
    if gamma1 <= 0.0:
        raise ValueError("gamma1 must be positive")
    m21 = _matrix_element(d12, e_field)
    return 2.0 * m21 ** 2 * gamma1 / (delta_J ** 2 + (CONST.hbar * gamma1) ** 2)


def detuning_energy(delta_lambda_nm: float, lambda_nm: float = 780.0) -> float:
    """Convert a wavelength detuning (nm) to energy (J), h c dl / l^2."""
    lam = lambda_nm * 1e-9
    return CONST.h * CONST.c * (delta_lambda_nm * 1e-9) / lam ** 2


def self_tpa_ratio(delta_lambda_diff_nm: float, lambda_center_nm: float,
                   gamma2: float) -> float:
    """Ratio of same-frequency to cross TPA rates, gamma2^2/(dw^2 + gamma2^2).

    The same-frequency process is off two-photon resonance by the angular
    frequency difference dw = 2 pi c dl / l^2 of the two beams, so only the
    collision-broadened tail of the upper level contributes.
    """
    if gamma2 <= 0.0:
        raise ValueError("gamma2 must be positive")
    lam = lambda_center_nm * 1e-9
    d_omega = 2.0 * math.pi * CONST.c * (delta_lambda_diff_nm * 1e-9) / lam ** 2
    return gamma2 ** 2 / (d_omega ** 2 + gamma2 ** 2)


def scaled_rates(vapor: VaporParams, i1_norm: float, i2_norm: float) -> RateResult:
    """Baseline-anchored rates at density ``vapor.rho`` and detuning
    ``vapor.delta_lambda``.

    ``i1_norm``/``i2_norm`` are the circulating intensities normalized to the
    single-photon intensities of the baseline calculation:

        R2 = (rho/rho0) (delta0/delta)^2 (I1 I2 / I10 I20) R20
        R1 = (rho/rho0) (delta0/delta)^2 (I1 / I10) R10

    ``Rs`` is filled by :func:`rate_summary`; here it is 0.
    """
    if i1_norm < 0 or i2_norm < 0:
        raise ValueError("normalized intensities must be >= 0")
    if vapor.delta_lambda == 0.0:
        raise VirtualLevelResonanceError("detuning from the virtual level is zero")
    prefactor = (vapor.rho / vapor.rho0) * (vapor.delta0_lambda
                                            / vapor.delta_lambda) ** 2
    return RateResult(R2=prefactor * i1_norm * i2_norm * vapor.R20,
                      R1=prefactor * i1_norm * vapor.R10,
                      Rs=0.0)


def rate_summary(vapor: VaporParams, res: ResonatorParams,
                 i1_norm: float, i2_norm: float) -> RateResult:
    """Scaled rates plus the self-TPA rate for the configured wavelength pair."""
    rates = scaled_rates(vapor, i1_norm, i2_norm)
    dl_nm = abs(res.lambda1 - res.lambda2) * 1e9
    center_nm = 0.5 * (res.lambda1 + res.lambda2) * 1e9
    ratio = self_tpa_ratio(dl_nm, center_nm, vapor.gamma2)
    return RateResult(R2=rates.R2, R1=rates.R1, Rs=rates.R2 * ratio)


def effective_alpha(res: ResonatorParams, r20: float,
                    lambda_m: float) -> FluxQuantities:
    """Convert the baseline TPA rate into an effective coefficient (cm/GW).

    The chain: mode area A = V/(pi D); round-trip time dt = pi D/(c/n_eff);
    single-photon flux P_f = h c / (lambda dt); loss per cm L0 = R20 n_eff/c;
    alpha0 = L0 A / P_f.
    """
    area = res.A if res.A is not None else res.V / (math.pi * res.D * 100.0)
    speed = CONST.c / res.n_eff              # m/s
    dt = res.L_m / speed
    photon_energy = CONST.h * CONST.c / lambda_m
    p_f = photon_energy / dt
    l0 = r20 / (speed * 100.0)               # cm^-1
    alpha0 = l0 * area / p_f * 1e9           # cm/W -> cm/GW
    return FluxQuantities(dt_roundtrip=dt, photon_energy=photon_energy,
                          P_f=p_f, L0=l0, alpha0=alpha0)


def vapor_pressure(temperature_K: float) -> float:
    """Rubidium vapor pressure in torr from the log10 correlation."""
    if temperature_K <= 0:
        raise ValueError("temperature must be positive")
    t = temperature_K
    log10_p = _VP_A - _VP_B / t + _VP_C * t - _VP_D * math.log10(t)
    return 10.0 ** log10_p


def density_from_temperature(temperature_K: float) -> float:
    """Atomic density (cm^-3) from the vapor pressure and the ideal gas law."""
    return vapor_pressure(temperature_K) * _IDEAL_GAS_TORR / temperature_K


def temperature_for_density(rho_cm3: float, tol_K: float = 1e-6) -> float:
    """Invert the density map by bisection over the supported window."""
    lo, hi = TEMPERATURE_RANGE_K
    rho_lo = density_from_temperature(lo)
    rho_hi = density_from_temperature(hi)
    if not (rho_lo <= rho_cm3 <= rho_hi):
        raise TemperatureRangeError(
            f"density {rho_cm3!r} cm^-3 is outside the achievable range "
            f"[{rho_lo:.3e}, {rho_hi:.3e}] for temperatures in "
            f"{TEMPERATURE_RANGE_K} K")
    while hi - lo > tol_K:
        mid = 0.5 * (lo + hi)
        if density_from_temperature(mid) < rho_cm3:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def required_density(delta_lambda_nm, vapor: VaporParams):
    """Density giving the baseline TPA rate at a smaller detuning,
    rho0 (delta/delta0)^2."""
    delta = np.asarray(delta_lambda_nm, dtype=float)
    return vapor.rho0 * (delta / vapor.delta0_lambda) ** 2


def self_tpa_curve(delta_lambda_nm_grid, lambda_center_nm: float,
                   gamma2: float) -> np.ndarray:
    """log10 of the self-to-cross TPA ratio over a wavelength-difference grid."""
    grid = np.asarray(delta_lambda_nm_grid, dtype=float)
    return np.array([math.log10(self_tpa_ratio(dl, lambda_center_nm, gamma2))
                     for dl in grid])


def required_temperature_curve(delta_lambda_nm_grid,
                               vapor: VaporParams) -> np.ndarray:
    """Cell temperature (degrees C) sustaining the required density, per detuning."""
    rhos = required_density(delta_lambda_nm_grid, vapor)
    return np.array([temperature_for_density(r) - 273.15 for r in rhos])
