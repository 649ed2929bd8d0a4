"""Behavioral multi-level memristor model and closed-loop programming emulator.

The pulse response is a bounded geometric approach: a programming pulse moves
the resistance a fixed fraction of the remaining distance toward the rail it
targets (set -> r_min, reset -> r_max). Reads below the programming threshold
never change state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


class ReadDisturbError(Exception):
    """Read voltage at or above the programming threshold would program the device."""


class ProgramTimeoutError(Exception):
    def __init__(self, target, resistance, pulses):
        super().__init__(
            f"did not reach {target:.6g} ohm within {pulses} pulses "
            f"(stuck at {resistance:.6g} ohm)"
        )
        self.target = target
        self.resistance = resistance
        self.pulses = pulses


@dataclass(frozen=True)
class DeviceModel:
    r_min: float = 10e3
    r_max: float = 100e3
    bits: int = 5
    v_prog_threshold: float = 1.0
    v_set: float = 2.0
    v_reset: float = -2.0
    step_fraction: float = 0.1
    noise_sigma_rel: float = 0.0

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max):
            raise ValueError(f"require 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if not (1 <= self.bits <= 7):
            raise ValueError(f"bits must be in 1..7, got {self.bits}")
        if not (0 < self.v_prog_threshold < self.v_set):
            raise ValueError("require 0 < v_prog_threshold < v_set")
        if not (self.v_reset < 0):
            raise ValueError("v_reset must be negative")
        if not (0 < self.step_fraction < 1):
            raise ValueError("step_fraction must be in (0, 1)")
        if self.noise_sigma_rel < 0:
            raise ValueError("noise_sigma_rel must be >= 0")

    @property
    def n_levels(self) -> int:
        return 2 ** self.bits


# Named profiles: the kOhm range covers the hardware configurations, the MOhm
# range matches the high-resistance emulator sweeps.
KOHM_PROFILE = DeviceModel()
MOHM_PROFILE = DeviceModel(r_min=1e6, r_max=10e6)


@dataclass(frozen=True)
class MemristorState:
    resistance: float
    model: DeviceModel = field(default_factory=lambda: KOHM_PROFILE)

    def __post_init__(self):
        if not (self.model.r_min <= self.resistance <= self.model.r_max):
            raise ValueError(
                f"resistance {self.resistance:.6g} outside "
                f"[{self.model.r_min:.6g}, {self.model.r_max:.6g}]"
            )


@dataclass(frozen=True)
class PulseSpec:
    amplitude: float  # signed volts
    width: float = 100e-6  # seconds

    def __post_init__(self):
        if not (self.width > 0):
            raise ValueError("pulse width must be > 0")


def read_current(state: MemristorState, v: float) -> float:
    """Non-destructive read: returns v / R. Refuses voltages that would program."""
    if abs(v) >= state.model.v_prog_threshold:
        raise ReadDisturbError(
            f"|{v}| V >= programming threshold {state.model.v_prog_threshold} V"
        )
    return v / state.resistance


def apply_pulse(
    state: MemristorState, pulse: PulseSpec, rng: np.random.Generator | None = None
) -> MemristorState:
    """One programming pulse; sub-threshold amplitudes leave the state unchanged."""
    m = state.model
    a = pulse.amplitude
    if abs(a) < m.v_prog_threshold:
        return state
    r = state.resistance
    if a > 0:
        r = r - m.step_fraction * (r - m.r_min)
    else:
        r = r + m.step_fraction * (m.r_max - r)
    if m.noise_sigma_rel > 0:
        if rng is None:
            rng = np.random.default_rng()
        r *= 1.0 + rng.normal(0.0, m.noise_sigma_rel)
    r = min(max(r, m.r_min), m.r_max)
    return replace(state, resistance=r)


def conductance_levels(model: DeviceModel) -> np.ndarray:
    """Admissible conductance grid: 2^bits levels uniform between 1/r_max and 1/r_min."""
    return np.linspace(1.0 / model.r_max, 1.0 / model.r_min, model.n_levels)


def quantize(target: float, model: DeviceModel) -> tuple[int, float]:
    """Nearest admissible level to a target resistance; ties go to the lower index.

    Returns (level_index, level_resistance); level 0 is r_max (lowest conductance).
    """
    if not (model.r_min <= target <= model.r_max):
        raise ValueError(
            f"target {target:.6g} outside [{model.r_min:.6g}, {model.r_max:.6g}]"
        )
    g_lo = 1.0 / model.r_max
    g_hi = 1.0 / model.r_min
    dg = (g_hi - g_lo) / (model.n_levels - 1)
    lf = (1.0 / target - g_lo) / dg
    level = int(np.floor(lf))
    if lf - level > 0.5:
        level += 1
    level = min(max(level, 0), model.n_levels - 1)
    return level, 1.0 / (g_lo + level * dg)


@dataclass(frozen=True)
class ProgramResult:
    state: MemristorState
    pulses: int


def _plan_error(g0: float, gt: float, big_g: float, sf: float, k: int) -> tuple[list[int], float]:
    """Pulse schedule of length k driving gap g0 (above r_min) toward gt.

    Each pulse multiplies the gap by q = 1 - sf; a reset pulse additionally adds
    sf * big_g. The schedule is the digit vector d (1 = reset, 0 = set), chosen
    greedily from the heaviest digit (the last pulse) down. Returns (digits,
    absolute gap error).
    """
    q = 1.0 - sf
    need = (gt - q ** k * g0) / (sf * big_g)
    digits = [0] * k
    if need < 0:
        # even an all-set schedule overshoots; error is what remains
        return digits, abs(gt - q ** k * g0)
    for j in range(k, 0, -1):  # digit weight q^(k-j): last pulse weighs most
        w = q ** (k - j)
        if need >= w:
            digits[j - 1] = 1
            need -= w
    return digits, sf * big_g * need


def _plan(state: MemristorState, target: float, tol_abs: float, budget: int):
    """Shortest schedule within the pulse budget whose predicted error fits tol."""
    m = state.model
    g0 = state.resistance - m.r_min
    gt = target - m.r_min
    big_g = m.r_max - m.r_min
    best = None
    for k in range(1, budget + 1):
        digits, err = _plan_error(g0, gt, big_g, m.step_fraction, k)
        if err <= tol_abs:
            return digits
        if best is None or err < best[1]:
            best = (digits, err)
    return best[0] if best else None


def program_to_target(
    state: MemristorState,
    target: float,
    tol_rel: float = 0.01,
    max_pulses: int = 200,
    rng: np.random.Generator | None = None,
) -> ProgramResult:
    """Closed-loop pulse-and-verify programming toward a target resistance.

    Every iteration verifies with a safe read, replans the remaining pulse
    schedule from the measured state, and applies the next pulse. Raises
    ProgramTimeoutError if the tolerance band is not reached in max_pulses.
    """
    m = state.model
    if not (m.r_min <= target <= m.r_max):
        raise ValueError(
            f"target {target:.6g} outside [{m.r_min:.6g}, {m.r_max:.6g}]"
        )
    if not (tol_rel > 0):
        raise ValueError("tol_rel must be > 0")
    v_read = 0.5 * m.v_prog_threshold
    set_pulse = PulseSpec(m.v_set)
    reset_pulse = PulseSpec(m.v_reset)
    tol_abs = tol_rel * target
    pulses = 0
    while True:
        measured = v_read / read_current(state, v_read)
        if abs(measured - target) <= tol_abs:
            return ProgramResult(state=state, pulses=pulses)
        if pulses >= max_pulses:
            raise ProgramTimeoutError(target, state.resistance, pulses)
        schedule = _plan(state, target, tol_abs, max_pulses - pulses)
        pulse = reset_pulse if schedule and schedule[0] else set_pulse
        state = apply_pulse(state, pulse, rng)
        pulses += 1
