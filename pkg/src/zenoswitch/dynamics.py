"""Round-trip-resolved time-domain simulation of the switch.

Time advances in steps of the round-trip time.  On each tick the two
intracavity amplitudes are multiplied by one full loop of propagation
(phase, linear loss, cross-TPA loss from the other field's intensity held
at its current value, and the two coupler transmissions) and the freshly
coupled-in input sample is added:

    a_i <- T^2 exp(i phi_i - (gamma + alpha I_j) L) a_i + i R E_in,i

Outputs at each tick are formed from the pre-update amplitudes and the same
input sample, which makes the discrete map exactly passive: the energy in
the output samples never exceeds input plus stored energy, on every prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import LossModel, ResonatorParams
from .quasistatic import (OutputPowers, circulating_intensity,
                          half_loop_factor, loop_factor)


class EmptyRunError(ValueError):
    """Requested duration is shorter than one round trip."""


class NotSwitchedError(RuntimeError):
    """The time series contains no switching transition to measure."""


class IndeterminateStateError(RuntimeError):
    """Neither field dominated for longer than one settling window."""

    def __init__(self, message: str, t_start_s: float):
        super().__init__(message)
        self.t_start_s = t_start_s


@dataclass
class CavityState:
    """Complex intracavity amplitudes and the instantaneous input amplitudes."""

    a1: complex = 0j
    a2: complex = 0j
    e1_in: complex = 0j
    e2_in: complex = 0j


@dataclass(frozen=True)
class Segment:
    """One piece of a drive: hold ``level_w`` from ``start_s`` onward.

    ``shape`` is "cosine" (raised-cosine edge of duration ``ramp_s`` from the
    previous level) or "step" (instantaneous).
    """

    start_s: float
    level_w: float
    shape: str = "cosine"
    ramp_s: float = 10e-12


@dataclass(frozen=True)
class DriveSignal:
    """Piecewise drive powers for port A (field 1) and port B (field 2)."""

    port1: tuple[Segment, ...] = ()
    port2: tuple[Segment, ...] = ()

    def __post_init__(self):
        for name, segs in (("port1", self.port1), ("port2", self.port2)):
            prev_end = -math.inf
            for seg in segs:
                if seg.level_w < 0:
                    raise ValueError(f"{name}: negative drive level")
                if seg.shape not in ("cosine", "step"):
                    raise ValueError(f"{name}: unknown segment shape "
                                     f"{seg.shape!r}")
                if seg.ramp_s < 0:
                    raise ValueError(f"{name}: negative ramp time")
                if seg.start_s < prev_end:
                    raise ValueError(f"{name}: segments overlap at "
                                     f"t = {seg.start_s!r} s")
                prev_end = seg.start_s
                if seg.shape == "cosine":
                    prev_end += seg.ramp_s

    @staticmethod
    def constant(p1_w: float, p2_w: float) -> "DriveSignal":
        return DriveSignal(port1=(Segment(0.0, p1_w),),
                           port2=(Segment(0.0, p2_w),))

    @staticmethod
    def _level(segs: tuple[Segment, ...], t: float) -> float:
        level = 0.0
        for seg in segs:
            if t < seg.start_s:
                break
            if seg.shape == "cosine" and seg.ramp_s > 0:
                x = (t - seg.start_s) / seg.ramp_s
                if x < 1.0:
                    level += (seg.level_w - level) * 0.5 * (1.0 - math.cos(math.pi * x))
                    break
            level = seg.level_w
        return level

    def power1(self, t: float) -> float:
        return self._level(self.port1, t)

    def power2(self, t: float) -> float:
        return self._level(self.port2, t)


@dataclass
class TimeSeries:
    """Sampled powers at round-trip resolution.

    ``i1r``/``i2r`` are the circulating powers, ``out_*`` the four output
    ports, ``in1``/``in2`` the drive powers actually applied (kept in memory
    for energy accounting; not part of the CSV schema).
    """

    dt_s: float
    t: np.ndarray
    i1r: np.ndarray
    i2r: np.ndarray
    out1a: np.ndarray
    out1b: np.ndarray
    out2a: np.ndarray
    out2b: np.ndarray
    in1: np.ndarray = field(repr=False, default=None)
    in2: np.ndarray = field(repr=False, default=None)

    CSV_COLUMNS = ("time_s", "I1R_W", "I2R_W",
                   "out_1A_W", "out_1B_W", "out_2A_W", "out_2B_W")

    def rows(self):
        for k in range(len(self.t)):
            yield (self.t[k], self.i1r[k], self.i2r[k], self.out1a[k],
                   self.out1b[k], self.out2a[k], self.out2b[k])

    def energy_in_out(self) -> tuple[np.ndarray, np.ndarray]:
        """Cumulative input and output energies (J) over every prefix."""
        e_in = np.cumsum(self.in1 + self.in2) * self.dt_s
        e_out = np.cumsum(self.out1a + self.out1b
                          + self.out2a + self.out2b) * self.dt_s
        return e_in, e_out


def step(state: CavityState, e1_next: complex, e2_next: complex,
         res: ResonatorParams, loss: LossModel,
         phi1: float | None = None,
         phi2: float | None = None) -> tuple[CavityState, OutputPowers]:
    """Advance one round trip; returns the new state and the outputs emitted
    at the current tick (from the pre-update amplitudes)."""
    if phi1 is None:
        phi1 = res.phi1
    if phi2 is None:
        phi2 = res.phi2
    t, r = res.T, res.R
    i1 = circulating_intensity(abs(state.a1) ** 2, res.A)
    i2 = circulating_intensity(abs(state.a2) ** 2, res.A)
    g1 = loop_factor(phi1, i2, loss, res)
    g2 = loop_factor(phi2, i1, loss, res)
    h1 = half_loop_factor(phi1, i2, loss, res)
    h2 = half_loop_factor(phi2, i1, loss, res)
    outs = OutputPowers(
        p1a=abs(t * e1_next + 1j * r * g1 * t * state.a1) ** 2,
        p1b=abs(1j * r * h1 * state.a1) ** 2,
        p2a=abs(1j * r * h2 * state.a2) ** 2,
        p2b=abs(t * e2_next + 1j * r * g2 * t * state.a2) ** 2,
    )
    new = CavityState(
        a1=t * t * g1 * state.a1 + 1j * r * e1_next,
        a2=t * t * g2 * state.a2 + 1j * r * e2_next,
        e1_in=e1_next,
        e2_in=e2_next,
    )
    return new, outs


def simulate(drive: DriveSignal, duration_s: float,
             res: ResonatorParams, loss: LossModel,
             phi1: float | None = None,
             phi2: float | None = None) -> TimeSeries:
    """Iterate the round-trip map over ceil(duration/dt) ticks."""
    dt = res.dt_s
    if duration_s < dt:
        raise EmptyRunError(f"duration {duration_s!r} s is shorter than one "
                            f"round trip ({dt!r} s)")
    n = math.ceil(duration_s / dt)
    t = np.arange(n) * dt
    i1r = np.empty(n)
    i2r = np.empty(n)
    out1a = np.empty(n)
    out1b = np.empty(n)
    out2a = np.empty(n)
    out2b = np.empty(n)
    in1 = np.empty(n)
    in2 = np.empty(n)

    state = CavityState()
    for k in range(n):
        tk = t[k]
        p1 = drive.power1(tk)
        p2 = drive.power2(tk)
        in1[k] = p1
        in2[k] = p2
        i1r[k] = abs(state.a1) ** 2
        i2r[k] = abs(state.a2) ** 2
        state, outs = step(state, math.sqrt(p1), math.sqrt(p2),
                           res, loss, phi1, phi2)
        out1a[k] = outs.p1a
        out1b[k] = outs.p1b
        out2a[k] = outs.p2a
        out2b[k] = outs.p2b

    return TimeSeries(dt_s=dt, t=t, i1r=i1r, i2r=i2r, out1a=out1a,
                      out1b=out1b, out2a=out2a, out2b=out2b,
                      in1=in1, in2=in2)


@dataclass(frozen=True)
class SwitchingTimes:
    on_latency_s: float
    off_latency_s: float


def _first_upward_crossing(values: np.ndarray, threshold: float) -> int | None:
    below = values[:-1] < threshold
    above = values[1:] >= threshold
    hits = np.nonzero(below & above)[0]
    return int(hits[0] + 1) if hits.size else None


def switching_times(ts: TimeSeries,
                    threshold_fraction: float = 0.9) -> SwitchingTimes:
    """Switching latencies from a run with one control on-edge and off-edge.

    Field 1 (port A) is the control, field 2 (port B) the target.  The
    on-latency is the first upward crossing of ``threshold_fraction`` times
    the plateau of the transmitted target (out_2B) after the control turns
    on; the off-latency is the analogous crossing of the reflected target
    (out_2A) after the control turns off.  Plateaus are the mean of the
    final 10% of samples in the relevant interval.
    """
    ctrl = ts.in1
    peak = float(ctrl.max())
    if peak <= 0.0:
        raise NotSwitchedError("no control power applied")
    half = 0.5 * peak
    on_idx = _first_upward_crossing(ctrl, half)
    if on_idx is None:
        raise NotSwitchedError("no control on-edge found")
    after_on = ctrl[on_idx:]
    down = np.nonzero((after_on[:-1] >= half) & (after_on[1:] < half))[0]
    if down.size == 0:
        raise NotSwitchedError("no control off-edge found")
    off_idx = on_idx + int(down[0] + 1)

    def latency(channel: np.ndarray, lo: int, hi: int, edge: int) -> float:
        window = channel[lo:hi]
        if window.size < 10:
            raise NotSwitchedError("interval too short to define a plateau")
        plateau = float(np.mean(window[-max(1, window.size // 10):]))
        cross = _first_upward_crossing(window, threshold_fraction * plateau)
        if cross is None:
            raise NotSwitchedError(
                "power never crossed the switching threshold")
        return ts.t[lo + cross] - ts.t[edge]

    on_latency = latency(ts.out2b, on_idx, off_idx, on_idx)
    off_latency = latency(ts.out2a, off_idx, len(ts.t), off_idx)
    return SwitchingTimes(on_latency_s=on_latency, off_latency_s=off_latency)


@dataclass
class MemoryTrace:
    """Bit trace of a memory run: 0 = field-1-dominant, 1 = field-2-dominant."""

    ts: TimeSeries
    bits: np.ndarray
    ambiguous: np.ndarray


def memory_sequence(drive: DriveSignal, duration_s: float,
                    res: ResonatorParams, loss: LossModel,
                    settle_window_s: float = 0.5e-9,
                    tie_fraction: float = 0.01) -> MemoryTrace:
    """Simulate a set/reset schedule and derive the stored bit at each tick.

    A sample is ambiguous when neither circulating power exceeds the other
    by ``tie_fraction`` of the larger (or both are zero).  Ambiguity lasting
    longer than one settling window raises IndeterminateStateError.
    """
    ts = simulate(drive, duration_s, res, loss)
    scale = np.maximum(ts.i1r, ts.i2r)
    ambiguous = (scale == 0.0) | (np.abs(ts.i1r - ts.i2r) < tie_fraction * scale)
    bits = np.where(ts.i1r >= ts.i2r, 0, 1)

    max_run = int(math.ceil(settle_window_s / ts.dt_s))
    run = 0
    for k, amb in enumerate(ambiguous):
        run = run + 1 if amb else 0
        if run > max_run:
            t_start = ts.t[k - run + 1]
            raise IndeterminateStateError(
                f"neither field dominated for more than "
                f"{settle_window_s!r} s starting at t = {t_start!r} s",
                t_start_s=float(t_start))

    # Carry the last determinate bit through short ambiguous stretches.
    determinate = np.nonzero(~ambiguous)[0]
    if determinate.size:
        first = determinate[0]
        bits[:first] = bits[first]
        for k in range(first + 1, len(bits)):
            if ambiguous[k]:
                bits[k] = bits[k - 1]
    return MemoryTrace(ts=ts, bits=bits, ambiguous=ambiguous)
