"""Steady-state solution of the coupled intracavity field equations.

The two fields circulate in the same toroid; each sees a linear loss
``gamma`` per cm and a cross two-photon loss ``alpha * I_other`` per cm,
where ``I_other`` is the circulating intensity of the other field.  With
the coupler convention (couple by ``i R``, transmit by real ``T``), the
self-consistent intracavity amplitude for field i is

    E_iR = i R E_in / (1 - exp(i phi_i) exp(-(gamma + alpha I_j) L) T^2)

and the four output fields follow from superposing the directly transmitted
input with the component coupled back out of the ring.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .model import LossModel, ResonatorParams

WATT_TO_GW = 1e-9

DENOMINATOR_FLOOR = 1e-15


class SingularResonanceError(ZeroDivisionError):
    """Lossless on-resonance cavity with T = 1: the response diverges."""


class DivergenceError(RuntimeError):
    """Fixed-point iteration failed to converge; carries the trajectory tail."""

    def __init__(self, message: str, tail: list[tuple[float, float]]):
        super().__init__(message)
        self.tail = tail


class NoSymmetricSolutionError(RuntimeError):
    """No bracketing interval for the symmetric fixed point was found."""


@dataclass(frozen=True)
class OutputPowers:
    """Powers (W) leaving the device at both frequencies and both guides."""

    p1a: float   # field 1, waveguide A (through port of input 1)
    p1b: float   # field 1, waveguide B (coupled across the ring)
    p2a: float   # field 2, waveguide A (coupled across the ring)
    p2b: float   # field 2, waveguide B (through port of input 2)


@dataclass(frozen=True)
class SteadySolution:
    """Converged circulating powers, amplitudes, branch label, and outputs."""

    I1R: float
    I2R: float
    E1R: complex
    E2R: complex
    branch: str                  # field1-dominant | field2-dominant | symmetric
    stable: bool
    spectral_radius: float
    iterations: int
    outputs: OutputPowers


def circulating_intensity(power_w: float, area_cm2: float) -> float:
    """Convert circulating power (W) to intensity in GW/cm^2."""
    return power_w * WATT_TO_GW / area_cm2


def loop_factor(phi: float, intensity_other_gw: float,
                loss: LossModel, res: ResonatorParams) -> complex:
    """One full-loop propagation factor exp(i phi - (gamma + alpha I) L)."""
    exponent = (loss.gamma_lin + loss.alpha * intensity_other_gw) * res.L_cm
    return cmath.exp(complex(-exponent, phi))


def half_loop_factor(phi: float, intensity_other_gw: float,
                     loss: LossModel, res: ResonatorParams) -> complex:
    """Half-loop propagation factor (principal branch by construction)."""
    exponent = (loss.gamma_lin + loss.alpha * intensity_other_gw) * res.L_cm
    return cmath.exp(complex(-0.5 * exponent, 0.5 * phi))


def intracavity_response(e_in: complex, intensity_other_gw: float, phi: float,
                         loss: LossModel, res: ResonatorParams) -> complex:
    """Steady intracavity amplitude for one field given the other's intensity.

    ``intensity_other_gw`` is the circulating intensity of the other field in
    GW/cm^2 (see :func:`circulating_intensity`).
    """
    denom = 1.0 - loop_factor(phi, intensity_other_gw, loss, res) * res.T * res.T
    if abs(denom) < DENOMINATOR_FLOOR:
        raise SingularResonanceError(
            "resonant denominator vanished (lossless cavity with T = 1)")
    return 1j * res.R * e_in / denom


def output_fields(e1r: complex, e2r: complex, e1_in: complex, e2_in: complex,
                  res: ResonatorParams, loss: LossModel,
                  phi1: float | None = None,
                  phi2: float | None = None) -> OutputPowers:
    """Four output powers from the intracavity amplitudes and the inputs.

    Each through port superposes the directly transmitted input with the
    component coupled out after a full loop; the cross-guide ports carry the
    component coupled out at the opposite coupler after half a loop.  The
    attenuation of field i uses the *other* field's intensity (cross-TPA).
    """
    if phi1 is None:
        phi1 = res.phi1
    if phi2 is None:
        phi2 = res.phi2
    i1 = circulating_intensity(abs(e1r) ** 2, res.A)
    i2 = circulating_intensity(abs(e2r) ** 2, res.A)
    g1 = loop_factor(phi1, i2, loss, res)
    g2 = loop_factor(phi2, i1, loss, res)
    h1 = half_loop_factor(phi1, i2, loss, res)
    h2 = half_loop_factor(phi2, i1, loss, res)
    t, r = res.T, res.R
    e1a = t * e1_in + 1j * r * e1r * g1 * t
    e1b = 1j * r * e1r * h1
    e2b = t * e2_in + 1j * r * e2r * g2 * t
    e2a = 1j * r * e2r * h2
    return OutputPowers(p1a=abs(e1a) ** 2, p1b=abs(e1b) ** 2,
                        p2a=abs(e2a) ** 2, p2b=abs(e2b) ** 2)


def _sweep(i1: float, i2: float, p1_in: float, p2_in: float,
           res: ResonatorParams, loss: LossModel,
           phi1: float, phi2: float) -> tuple[float, float]:
    """One iteration: field 1 from the assumed I2, then field 2 from it."""
    e1 = intracavity_response(math.sqrt(p1_in),
                              circulating_intensity(i2, res.A),
                              phi1, loss, res)
    i1_new = abs(e1) ** 2
    e2 = intracavity_response(math.sqrt(p2_in),
                              circulating_intensity(i1_new, res.A),
                              phi2, loss, res)
    return i1_new, abs(e2) ** 2


def _rel_change(new: float, old: float) -> float:
    scale = max(abs(new), abs(old))
    if scale == 0.0:
        return 0.0
    return abs(new - old) / scale


def _spectral_radius(i1: float, i2: float, p1_in: float, p2_in: float,
                     res: ResonatorParams, loss: LossModel,
                     phi1: float, phi2: float,
                     rel_step: float = 1e-6) -> float:
    """Spectral radius of the iteration-map Jacobian by finite differences.

    Central differences with a relative step; a step that would drive an
    intensity negative falls back to a forward difference.
    """
    x = (i1, i2)
    jac = np.zeros((2, 2))
    for j in range(2):
        h = rel_step * max(abs(x[j]), 1e-18)
        lo = x[j] - h
        if lo < 0.0:
            hi_x = list(x)
            hi_x[j] = x[j] + h
            f_hi = _sweep(hi_x[0], hi_x[1], p1_in, p2_in, res, loss, phi1, phi2)
            f_lo = _sweep(x[0], x[1], p1_in, p2_in, res, loss, phi1, phi2)
            scale = h
        else:
            hi_x = list(x)
            lo_x = list(x)
            hi_x[j] = x[j] + h
            lo_x[j] = lo
            f_hi = _sweep(hi_x[0], hi_x[1], p1_in, p2_in, res, loss, phi1, phi2)
            f_lo = _sweep(lo_x[0], lo_x[1], p1_in, p2_in, res, loss, phi1, phi2)
            scale = 2.0 * h
        jac[0, j] = (f_hi[0] - f_lo[0]) / scale
        jac[1, j] = (f_hi[1] - f_lo[1]) / scale
    return float(np.max(np.abs(np.linalg.eigvals(jac))))


def classify_stability(sol: "SteadySolution", p1_in: float, p2_in: float,
                       res: ResonatorParams, loss: LossModel,
                       phi1: float | None = None,
                       phi2: float | None = None) -> tuple[bool, float]:
    """Stability verdict and Jacobian spectral radius for a steady solution."""
    if phi1 is None:
        phi1 = res.phi1
    if phi2 is None:
        phi2 = res.phi2
    radius = _spectral_radius(sol.I1R, sol.I2R, p1_in, p2_in,
                              res, loss, phi1, phi2)
    return radius < 1.0, radius


def _branch_label(i1: float, i2: float) -> str:
    scale = max(i1, i2)
    if scale == 0.0 or abs(i1 - i2) <= 1e-9 * scale:
        return "symmetric"
    return "field1-dominant" if i1 > i2 else "field2-dominant"


def _finish(i1: float, i2: float, iterations: int, p1_in: float, p2_in: float,
            res: ResonatorParams, loss: LossModel, phi1: float, phi2: float,
            branch: str | None = None) -> SteadySolution:
    # One clean sweep so that I1R == |E1R|^2 and I2R == |E2R|^2 exactly.
    e1 = intracavity_response(math.sqrt(p1_in),
                              circulating_intensity(i2, res.A),
                              phi1, loss, res)
    i1 = abs(e1) ** 2
    e2 = intracavity_response(math.sqrt(p2_in),
                              circulating_intensity(i1, res.A),
                              phi2, loss, res)
    i2 = abs(e2) ** 2
    radius = _spectral_radius(i1, i2, p1_in, p2_in, res, loss, phi1, phi2)
    outs = output_fields(e1, e2, math.sqrt(p1_in), math.sqrt(p2_in),
                         res, loss, phi1, phi2)
    return SteadySolution(I1R=i1, I2R=i2, E1R=e1, E2R=e2,
                          branch=branch or _branch_label(i1, i2),
                          stable=radius < 1.0, spectral_radius=radius,
                          iterations=iterations, outputs=outs)


def solve_fixed_point(p1_in: float, p2_in: float,
                      res: ResonatorParams, loss: LossModel,
                      phi1: float | None = None, phi2: float | None = None,
                      seed: float = 0.0, rel_tol: float = 1e-10,
                      max_iter: int = 100_000) -> SteadySolution:
    """Alternate the two response equations until the intensities settle.

    ``seed`` is the initial guess for I2R (W).  Near the unstable symmetric
    point the iteration runs away to one of the two stable asymmetric
    branches; seeds below the symmetric intensity land on the
    field-1-dominant branch, seeds above on the field-2-dominant one.
    """
    if p1_in < 0 or p2_in < 0 or seed < 0:
        raise ValueError("input powers and seed must be >= 0")
    if phi1 is None:
        phi1 = res.phi1
    if phi2 is None:
        phi2 = res.phi2

    i1, i2 = 0.0, seed
    tail: list[tuple[float, float]] = []
    for iteration in range(1, max_iter + 1):
        i1_new, i2_new = _sweep(i1, i2, p1_in, p2_in, res, loss, phi1, phi2)
        change = max(_rel_change(i1_new, i1), _rel_change(i2_new, i2))
        i1, i2 = i1_new, i2_new
        if iteration > 1 and change < rel_tol:
            return _finish(i1, i2, iteration, p1_in, p2_in,
                           res, loss, phi1, phi2)
        tail.append((i1, i2))
        if len(tail) > 10:
            tail.pop(0)
    raise DivergenceError(
        f"no convergence after {max_iter} iterations "
        f"(last relative change {change:.3e})", tail)


def find_symmetric_solution(p_in: float, res: ResonatorParams, loss: LossModel,
                            phi: float | None = None,
                            rel_tol: float = 1e-12) -> SteadySolution:
    """Symmetric fixed point I1R = I2R for equal drives and equal phases.

    Solves I = |response(sqrt(P), I/A)|^2 by bracketing and bisection.  The
    response is strictly decreasing in the assumed intensity, so the root is
    unique when it exists.
    """
    if p_in < 0:
        raise ValueError("input power must be >= 0")
    if phi is None:
        phi = res.phi1
    if p_in == 0.0:
        return _finish(0.0, 0.0, 0, 0.0, 0.0, res, loss, phi, phi,
                       branch="symmetric")

    def responding(i: float) -> float:
        e = intracavity_response(math.sqrt(p_in),
                                 circulating_intensity(i, res.A),
                                 phi, loss, res)
        return abs(e) ** 2

    def gap(i: float) -> float:
        return responding(i) - i

    linear = responding(0.0)
    if linear == 0.0:
        return _finish(0.0, 0.0, 0, p_in, p_in, res, loss, phi, phi,
                       branch="symmetric")
    hi = linear
    for _ in range(200):
        if gap(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise NoSymmetricSolutionError(
            f"no sign change up to assumed intensity {hi!r} W")

    i_star = bisect(gap, 0.0, hi, xtol=1e-300, rtol=max(rel_tol, 1e-15),
                    maxiter=400)
    return _finish(i_star, i_star, 0, p_in, p_in, res, loss, phi, phi,
                   branch="symmetric")


def response_curve(i_assumed_w, p_in: float, res: ResonatorParams,
                   loss: LossModel, phi: float | None = None) -> np.ndarray:
    """Responding circulating power (W) of one field over a grid of assumed
    circulating powers of the other field.

    This is the pointwise evaluation behind the bistability plots: feed the
    assumed I1R grid with the field-2 drive to get I2R(I1R), and vice versa.
    """
    if phi is None:
        phi = res.phi1
    grid = np.asarray(i_assumed_w, dtype=float)
    if np.any(grid < 0):
        raise ValueError("assumed intensities must be >= 0")
    exponent = (loss.gamma_lin
                + loss.alpha * grid * WATT_TO_GW / res.A) * res.L_cm
    g = np.exp(-exponent + 1j * phi)
    denom = 1.0 - g * res.T * res.T
    if np.any(np.abs(denom) < DENOMINATOR_FLOOR):
        raise SingularResonanceError(
            "resonant denominator vanished (lossless cavity with T = 1)")
    amp = 1j * res.R * math.sqrt(p_in) / denom
    return np.abs(amp) ** 2


def residual(sol: SteadySolution, p1_in: float, p2_in: float,
             res: ResonatorParams, loss: LossModel,
             phi1: float | None = None,
             phi2: float | None = None) -> tuple[float, float]:
    """Relative consistency-equation residuals of the two stored amplitudes."""
    if phi1 is None:
        phi1 = res.phi1
    if phi2 is None:
        phi2 = res.phi2
    rhs1 = intracavity_response(math.sqrt(p1_in),
                                circulating_intensity(sol.I2R, res.A),
                                phi1, loss, res)
    rhs2 = intracavity_response(math.sqrt(p2_in),
                                circulating_intensity(sol.I1R, res.A),
                                phi2, loss, res)
    r1 = abs(sol.E1R - rhs1) / abs(sol.E1R) if sol.E1R != 0 else abs(rhs1)
    r2 = abs(sol.E2R - rhs2) / abs(sol.E2R) if sol.E2R != 0 else abs(rhs2)
    return r1, r2
