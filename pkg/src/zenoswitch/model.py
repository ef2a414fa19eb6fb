"""Domain types, physical constants, validation, and config I/O.

Unit conventions used throughout the package:

* Intracavity amplitudes are complex numbers whose squared magnitude is the
  circulating power in watts.
* The intensity entering two-photon-absorption exponents is
  I = |a|^2 / A in GW/cm^2, so that alpha (cm/GW) * I * L (cm) is
  dimensionless.
* Lengths carried by :class:`ResonatorParams` are metres, except the mode
  area (cm^2) and mode volume (cm^3) which follow the usual nonlinear-optics
  bookkeeping.
* Temperatures are kelvin internally; the CLI accepts degrees C and converts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Optional

from scipy.constants import c as _LIGHT_SPEED
from scipy.constants import e as _ELECTRON_CHARGE
from scipy.constants import h as _PLANCK
from scipy.constants import hbar as _HBAR

TWO_PI = 2.0 * math.pi


class ValidationError(ValueError):
    """A parameter violates an invariant; ``field`` names the offender."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class ConfigError(ValueError):
    """Config text could not be parsed or contains unknown/missing keys."""


@dataclass(frozen=True)
class PhysConstants:
    """Fundamental constants (SI). ``hbar`` must equal ``h / (2 pi)``."""

    c: float = _LIGHT_SPEED          # speed of light, m/s
    h: float = _PLANCK               # Planck constant, J s
    hbar: float = _HBAR              # reduced Planck constant, J s
    q: float = _ELECTRON_CHARGE      # elementary charge, C


CONST = PhysConstants()


@dataclass(frozen=True)
class ResonatorParams:
    """Geometry, quality factor, and coupling of the toroidal resonator.

    ``R`` and ``T`` are the amplitude coupling and transmission coefficients
    of the (identical) waveguide couplers; coupling multiplies by ``i R``,
    transmission by the real ``T``, and ``R^2 + T^2 = 1`` for a lossless
    coupler.  ``phi1``/``phi2`` are the round-trip detuning phases of the two
    fields (0 = on resonance).
    """

    Q: float                       # quality factor
    D: float                       # major diameter, m
    d: float                       # minor diameter, m
    n_eff: float                   # effective refractive index
    lambda1: float                 # free-space wavelength of field 1, m
    lambda2: float                 # free-space wavelength of field 2, m
    R: float                       # amplitude coupling coefficient
    T: Optional[float] = None      # amplitude transmission; sqrt(1-R^2) if omitted
    A: Optional[float] = None      # effective mode area, cm^2; V/(pi D) if omitted
    V: Optional[float] = None      # mode volume, cm^3
    phi1: float = 0.0              # round-trip phase of field 1, rad
    phi2: float = 0.0              # round-trip phase of field 2, rad

    @property
    def L_m(self) -> float:
        """Circumference pi*D in metres."""
        return math.pi * self.D

    @property
    def L_cm(self) -> float:
        """Circumference pi*D in centimetres."""
        return self.L_m * 100.0

    @property
    def dt_s(self) -> float:
        """Round-trip travel time pi*D / (c / n_eff) in seconds."""
        return self.L_m / (CONST.c / self.n_eff)

    @property
    def gamma_q_cm(self) -> float:
        """Loss rate (cm^-1) equivalent to Q at lambda1, 2 pi n_eff/(lambda Q)."""
        return gamma_from_quality_factor(self.lambda1, self.Q, self.n_eff)


@dataclass(frozen=True)
class VaporParams:
    """Atomic-vapor parameters for the two-photon absorber.

    The baseline rates ``R20``/``R10`` anchor the density/detuning scaling
    laws; they correspond to density ``rho0`` and detuning ``delta0_lambda``.
    """

    rho: float                     # atomic density, cm^-3
    rho0: float                    # baseline density, cm^-3
    delta_lambda: float            # detuning of photon 1, nm
    delta0_lambda: float           # baseline detuning, nm
    gamma1: float                  # half-width of level 2, s^-1
    gamma2: float                  # half-width of level 3, s^-1
    d12: float                     # dipole moment of transition 1->2, m
    d23: float                     # dipole moment of transition 2->3, m
    R20: float                     # baseline cross-TPA rate, s^-1
    R10: float                     # baseline 1PA rate, s^-1
    E31: float                     # level-3 minus level-1 energy, J


@dataclass(frozen=True)
class LossModel:
    """Linear field loss (cm^-1) and cross-TPA coefficient (cm/GW)."""

    gamma_lin: float
    alpha: float


@dataclass(frozen=True)
class ParameterBundle:
    """Validated parameter set shared by all solvers, plus the drive powers."""

    resonator: ResonatorParams
    vapor: VaporParams
    loss: LossModel
    p1_in_W: float = 0.0           # input power of field 1 in waveguide A, W
    p2_in_W: float = 0.0           # input power of field 2 in waveguide B, W
    temperature_K: float = 316.15  # vapor cell temperature, K

    @property
    def gamma_q_cm(self) -> float:
        """Q-derived loss rate; the configured value is ``loss.gamma_lin``."""
        return self.resonator.gamma_q_cm


def gamma_from_quality_factor(lambda_m: float, q: float, n_eff: float) -> float:
    """Linear loss rate in cm^-1 equivalent to a given quality factor."""
    return TWO_PI * n_eff / (lambda_m * q) / 100.0


def _require(cond: bool, field_name: str, message: str):
    if not cond:
        raise ValidationError(field_name, message)


_COUPLER_TOL = 1e-12
_AREA_TOL = 5e-3


def validate(resonator: ResonatorParams, vapor: VaporParams, loss: LossModel,
             p1_in_W: float = 0.0, p2_in_W: float = 0.0,
             temperature_K: float = 316.15) -> ParameterBundle:
    """Check every invariant and fill derived quantities (T, A).

    Returns a new :class:`ParameterBundle`; raises :class:`ValidationError`
    naming the offending field otherwise.  ``R = 0`` (decoupled resonator)
    is accepted as the boundary of the coupler identity.
    """
    r = resonator
    _require(r.Q > 0, "resonator.Q", "must be positive")
    _require(r.D > 0, "resonator.major_diameter_um", "must be positive")
    _require(0 < r.d < r.D, "resonator.minor_diameter_um",
             "must satisfy 0 < d < D")
    _require(r.n_eff > 0, "resonator.effective_index", "must be positive")
    _require(r.lambda1 > 0, "resonator.wavelength1_nm", "must be positive")
    _require(r.lambda2 > 0, "resonator.wavelength2_nm", "must be positive")
    _require(0.0 <= r.R < 1.0, "resonator.coupling_R", "must lie in [0, 1)")
    _require(math.isfinite(r.phi1), "resonator.phase1_rad", "must be finite")
    _require(math.isfinite(r.phi2), "resonator.phase2_rad", "must be finite")

    t = r.T if r.T is not None else math.sqrt(1.0 - r.R * r.R)
    _require(abs(r.R * r.R + t * t - 1.0) <= _COUPLER_TOL,
             "resonator.coupling_T",
             f"R^2 + T^2 = {r.R * r.R + t * t!r} violates the lossless "
             f"coupler identity beyond {_COUPLER_TOL}")

    area = r.A
    if r.V is not None:
        _require(r.V > 0, "resonator.mode_volume_cm3", "must be positive")
        derived_area = r.V / (math.pi * r.D * 100.0)
        if area is None:
            area = derived_area
        else:
            _require(abs(area - derived_area) <= _AREA_TOL * derived_area,
                     "resonator.mode_area_cm2",
                     f"disagrees with V/(pi D) = {derived_area!r} by more "
                     f"than {_AREA_TOL:.1%}")
    _require(area is not None, "resonator.mode_area_cm2",
             "mode area or mode volume must be given")
    _require(area > 0, "resonator.mode_area_cm2", "must be positive")

    resonator = replace(r, T=t, A=area)

    v = vapor
    _require(v.rho > 0, "vapor.density_per_cc", "must be positive")
    _require(v.rho0 > 0, "vapor.baseline_density_per_cc", "must be positive")
    _require(v.delta_lambda > 0, "vapor.detuning_nm", "must be positive")
    _require(v.delta0_lambda > 0, "vapor.baseline_detuning_nm",
             "must be positive")
    _require(v.gamma1 > 0, "vapor.gamma1_per_s", "must be positive")
    _require(v.gamma2 > 0, "vapor.gamma2_per_s", "must be positive")
    _require(v.d12 > 0, "vapor.dipole1_m", "must be positive")
    _require(v.d23 > 0, "vapor.dipole2_m", "must be positive")
    _require(v.R20 > 0, "vapor.baseline_tpa_rate_per_s", "must be positive")
    _require(v.R10 > 0, "vapor.baseline_1pa_rate_per_s", "must be positive")
    _require(v.E31 > 0, "vapor.level3_energy_J", "must be positive")

    _require(loss.gamma_lin >= 0, "loss.gamma_per_cm", "must be >= 0")
    _require(loss.alpha >= 0, "loss.alpha_cm_per_GW", "must be >= 0")

    _require(p1_in_W >= 0, "input.P1_W", "must be >= 0")
    _require(p2_in_W >= 0, "input.P2_W", "must be >= 0")
    _require(temperature_K > 0, "vapor.temperature_K", "must be positive")

    c = CONST
    _require(c.c > 0 and c.h > 0 and c.hbar > 0 and c.q > 0,
             "constants", "must all be positive")
    _require(abs(c.hbar - c.h / TWO_PI) <= 1e-12 * c.hbar,
             "constants.hbar", "must equal h / (2 pi)")

    return ParameterBundle(resonator=resonator, vapor=vapor, loss=loss,
                           p1_in_W=p1_in_W, p2_in_W=p2_in_W,
                           temperature_K=temperature_K)


# --------------------------------------------------------------------------
# Plain-text key=value config.
#
# Each entry maps a config key to (attribute path, decimal exponent shift
# applied on load).  Shifts are performed on the decimal representation, so
# a bundle written out and re-read is identical bit for bit.
# --------------------------------------------------------------------------

_KEYMAP = {
    "resonator.Q": ("resonator.Q", 0),
    "resonator.major_diameter_um": ("resonator.D", -6),
    "resonator.minor_diameter_um": ("resonator.d", -6),
    "resonator.effective_index": ("resonator.n_eff", 0),
    "resonator.wavelength1_nm": ("resonator.lambda1", -9),
    "resonator.wavelength2_nm": ("resonator.lambda2", -9),
    "resonator.coupling_R": ("resonator.R", 0),
    "resonator.coupling_T": ("resonator.T", 0),
    "resonator.mode_area_cm2": ("resonator.A", 0),
    "resonator.mode_volume_cm3": ("resonator.V", 0),
    "resonator.phase1_rad": ("resonator.phi1", 0),
    "resonator.phase2_rad": ("resonator.phi2", 0),
    "vapor.density_per_cc": ("vapor.rho", 0),
    "vapor.baseline_density_per_cc": ("vapor.rho0", 0),
    "vapor.detuning_nm": ("vapor.delta_lambda", 0),
    "vapor.baseline_detuning_nm": ("vapor.delta0_lambda", 0),
    "vapor.gamma1_per_s": ("vapor.gamma1", 0),
    "vapor.gamma2_per_s": ("vapor.gamma2", 0),
    "vapor.dipole1_m": ("vapor.d12", 0),
    "vapor.dipole2_m": ("vapor.d23", 0),
    "vapor.baseline_tpa_rate_per_s": ("vapor.R20", 0),
    "vapor.baseline_1pa_rate_per_s": ("vapor.R10", 0),
    "vapor.level3_energy_J": ("vapor.E31", 0),
    "vapor.temperature_K": ("temperature_K", 0),
    "loss.gamma_per_cm": ("loss.gamma_lin", 0),
    "loss.alpha_cm_per_GW": ("loss.alpha", 0),
    "input.P1_W": ("p1_in_W", 0),
    "input.P2_W": ("p2_in_W", 0),
}

# Keys that may be omitted; everything else is required.
_OPTIONAL_KEYS = {"resonator.coupling_T", "resonator.mode_area_cm2",
                  "resonator.mode_volume_cm3", "vapor.level3_energy_J"}

# Nominal operating parameters (the shipped default config).  The coupling
# R is not part of the published nominal table; 0.1 keeps the loaded cavity
# lifetime far below the switching times of interest while the through-port
# extinction stays below 1e-3.
DEFAULT_CONFIG_VALUES = {
    "resonator.Q": "5e7",
    "resonator.major_diameter_um": "50.0",
    "resonator.minor_diameter_um": "0.35",
    "resonator.effective_index": "1.30",
    "resonator.wavelength1_nm": "780.0",
    "resonator.wavelength2_nm": "776.0",
    "resonator.coupling_R": "0.1",
    "resonator.mode_area_cm2": "4.83e-9",
    "resonator.mode_volume_cm3": "7.6e-11",
    "resonator.phase1_rad": "0.0",
    "resonator.phase2_rad": "0.0",
    "vapor.density_per_cc": "5.6e10",
    "vapor.baseline_density_per_cc": "1e14",
    "vapor.detuning_nm": "0.05",
    "vapor.baseline_detuning_nm": "2.12",
    "vapor.gamma1_per_s": "1.9e7",
    "vapor.gamma2_per_s": "3.14e8",
    "vapor.dipole1_m": "2.23e-10",
    "vapor.dipole2_m": "4.92e-11",
    "vapor.baseline_tpa_rate_per_s": "9.41e8",
    "vapor.baseline_1pa_rate_per_s": "1.12e8",
    "vapor.temperature_K": "316.15",
    "loss.gamma_per_cm": "2.13e-3",
    "loss.alpha_cm_per_GW": "5.27e5",
    "input.P1_W": "3.7e-4",
    "input.P2_W": "3.7e-4",
}


def _shift_decimal(text: str, shift: int) -> float:
    """Parse a decimal literal scaled by 10**shift (exact decimal shift)."""
    try:
        value = Decimal(text)
    except ArithmeticError as exc:
        raise ConfigError(f"not a number: {text!r}") from exc
    return float(value.scaleb(shift))


def _unshift_decimal(value: float, shift: int) -> str:
    """Render a float in config units, inverting the load-time shift exactly."""
    return str(Decimal(repr(value)).scaleb(-shift))


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into a raw string map. '#' starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', "
                              f"got {stripped!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEYMAP:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply ``key=value`` override strings to a raw config map.

    ``vapor.temperature_C`` is accepted as a convenience and converted to
    kelvin; all other keys must be known config keys.
    """
    out = dict(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if key == "vapor.temperature_C":
            out["vapor.temperature_K"] = repr(float(value) + 273.15)
            continue
        if key not in _KEYMAP:
            raise ConfigError(f"override references unknown key {key!r}")
        out[key] = value
    return out


def bundle_from_raw(raw: dict) -> ParameterBundle:
    """Build and validate a bundle from a raw string map."""
    missing = [k for k in _KEYMAP
               if k not in raw and k not in _OPTIONAL_KEYS]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(sorted(missing)))

    values: dict[str, dict | float] = {"resonator": {}, "vapor": {}, "loss": {}}
    top: dict[str, float] = {}
    for key, text in raw.items():
        attr_path, shift = _KEYMAP[key]
        try:
            value = _shift_decimal(text, shift)
        except ConfigError as exc:
            raise ConfigError(f"{key}: {exc}") from exc
        if not math.isfinite(value):
            raise ConfigError(f"{key}: value {text!r} is not finite")
        if "." in attr_path:
            section, attr = attr_path.split(".")
            values[section][attr] = value
        else:
            top[attr_path] = value

    vap = dict(values["vapor"])
    if "E31" not in vap:
        # Two-photon resonance: level-3 energy is the sum of the photon
        # energies at the two operating wavelengths.
        lam1 = values["resonator"]["lambda1"]
        lam2 = values["resonator"]["lambda2"]
        vap["E31"] = CONST.h * CONST.c / lam1 + CONST.h * CONST.c / lam2

    resonator = ResonatorParams(**values["resonator"])
    vapor = VaporParams(**vap)
    loss = LossModel(**values["loss"])
    return validate(resonator, vapor, loss,
                    p1_in_W=top.get("p1_in_W", 0.0),
                    p2_in_W=top.get("p2_in_W", 0.0),
                    temperature_K=top.get("temperature_K", 316.15))


def load_config(path=None, overrides: list[str] | None = None) -> ParameterBundle:
    """Load a config file (or the built-in defaults) and validate it."""
    if path is None:
        raw = dict(DEFAULT_CONFIG_VALUES)
    else:
        with open(path, "r", encoding="utf-8") as handle:
            raw = parse_config_text(handle.read())
    if overrides:
        raw = apply_overrides(raw, overrides)
    return bundle_from_raw(raw)


def dump_config(bundle: ParameterBundle) -> str:
    """Serialize a bundle to config text; re-loading reproduces it exactly."""
    lookup = {
        "resonator": bundle.resonator,
        "vapor": bundle.vapor,
        "loss": bundle.loss,
    }
    lines = ["# zenoswitch parameter file"]
    for key, (attr_path, shift) in _KEYMAP.items():
        if "." in attr_path:
            section, attr = attr_path.split(".")
            value = getattr(lookup[section], attr)
        else:
            value = getattr(bundle, attr_path)
        if value is None:
            continue
        lines.append(f"{key} = {_unshift_decimal(value, shift)}")
    return "\n".join(lines) + "\n"


def default_bundle() -> ParameterBundle:
    """The validated built-in nominal parameter set."""
    return bundle_from_raw(dict(DEFAULT_CONFIG_VALUES))
