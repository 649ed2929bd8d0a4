"""Two-phase clocked behavioral simulation of the gate's latch.

During equalization (clock high) the latch nodes are shunted to v_dd / 2.
During evaluation the differential current imbalance, converted to an initial
voltage imbalance by a transimpedance, diverges under single-pole positive
feedback. If the imbalance cannot reach rail within the evaluation window the
cycle is flagged unresolved and both nodes hold the mid level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gate import GateConfig, VoltageLevels, branch_currents, evaluate


@dataclass(frozen=True)
class ClockSpec:
    period: float = 2e-3
    duty_eq: float = 0.5  # fraction of the period spent in equalization
    n_cycles: int = 4
    sample_dt: float = 1e-5

    def __post_init__(self):
        if not (self.period > 0):
            raise ValueError("period must be > 0")
        if not (0 < self.duty_eq < 1):
            raise ValueError("duty_eq must be in (0, 1)")
        if self.n_cycles < 1:
            raise ValueError("n_cycles must be >= 1")
        if not (0 < self.sample_dt <= self.period / 20):
            raise ValueError("sample_dt must be positive and <= period / 20")


@dataclass(frozen=True)
class TransientParams:
    tau: float = 100e-9  # latch positive-feedback time constant
    r_sense: float = 10e3  # transimpedance: delta-I -> initial imbalance
    v_meta_floor: float = 1e-6  # smallest resolvable initial imbalance

    def __post_init__(self):
        if not (self.tau > 0 and self.r_sense > 0 and self.v_meta_floor > 0):
            raise ValueError("all transient parameters must be > 0")


@dataclass(frozen=True)
class WaveformTrace:
    """Uniformly sampled electrical traces. Input columns use the active-low
    electrical convention: logical 1 maps to v_low, logical 0 to v_high."""

    time: np.ndarray
    clk: np.ndarray
    inputs: np.ndarray  # shape (n, samples)
    ca: np.ndarray
    co: np.ndarray
    cabar: np.ndarray
    cobar: np.ndarray
    resolved: np.ndarray  # per-sample 0/1, constant within a cycle
    cycle_resolved: tuple[bool, ...]


def settle_time(
    delta_i: float, params: TransientParams, levels: VoltageLevels
) -> float | None:
    """Time for the latch to reach rail from the initial current imbalance.

    Returns None (unresolved) when the initial imbalance is below the
    metastability floor.
    """
    dv0 = abs(delta_i) * params.r_sense
    if dv0 < params.v_meta_floor:
        return None
    return max(0.0, params.tau * math.log(levels.v_dd / (2.0 * dv0)))


def isolation_inverter(v_in: float, levels: VoltageLevels) -> float:
    """Output-restoring inverter; its switching point sits below v_dd / 2 so the
    equalization mid level reads as a quiet low output."""
    v_il = levels.v_dd / 4.0
    return levels.v_high if v_in < v_il else 0.0


def simulate(
    config: GateConfig,
    input_sequence,
    clock: ClockSpec | None = None,
    params: TransientParams | None = None,
) -> WaveformTrace:
    """Run one input vector per clock cycle and sample all node voltages."""
    clock = clock or ClockSpec(n_cycles=len(input_sequence))
    params = params or TransientParams()
    input_sequence = [tuple(int(b) for b in v) for v in input_sequence]
    if len(input_sequence) != clock.n_cycles:
        raise ValueError(
            f"{len(input_sequence)} input vectors for {clock.n_cycles} cycles"
        )
    lv = config.levels
    v_mid = lv.v_dd / 2.0
    t_eq = clock.duty_eq * clock.period
    t_eval = clock.period - t_eq

    # per-cycle steady-state decision and settling
    decisions = []
    for vec in input_sequence:
        bc = branch_currents(config, vec)
        out = evaluate(config, vec)
        ts = settle_time(bc.i_in - bc.i_th, params, lv)
        resolved = ts is not None and ts <= t_eval
        decisions.append((out, resolved))

    n_samples = int(round(clock.n_cycles * clock.period / clock.sample_dt))
    time = np.arange(n_samples) * clock.sample_dt
    n = config.n
    clk = np.empty(n_samples)
    inputs = np.empty((n, n_samples))
    ca = np.empty(n_samples)
    co = np.empty(n_samples)
    resolved_col = np.empty(n_samples, dtype=np.int8)
    cycle_flags = tuple(r for _, r in decisions)

    for k in range(n_samples):
        t = time[k]
        c = min(int(t / clock.period), clock.n_cycles - 1)
        offset = t - c * clock.period
        vec = input_sequence[c]
        out, resolved = decisions[c]
        for i in range(n):
            inputs[i, k] = lv.v_low if vec[i] else lv.v_high  # active low
        resolved_col[k] = 1 if resolved else 0
        if offset < t_eq:  # equalization: nodes shunted together
            clk[k] = lv.v_high
            ca[k] = v_mid
            co[k] = v_mid
        else:
            clk[k] = lv.v_low
            te = offset - t_eq
            if not resolved:
                ca[k] = v_mid
                co[k] = v_mid
            else:
                swing = v_mid * math.exp(-te / params.tau)
                win = lv.v_dd - swing
                lose = swing
                if out.ca == 1:
                    ca[k], co[k] = win, lose
                else:
                    ca[k], co[k] = lose, win

    cabar = np.array([isolation_inverter(v, lv) for v in ca])
    cobar = np.array([isolation_inverter(v, lv) for v in co])
    return WaveformTrace(
        time=time,
        clk=clk,
        inputs=inputs,
        ca=ca,
        co=co,
        cabar=cabar,
        cobar=cobar,
        resolved=resolved_col,
        cycle_resolved=cycle_flags,
    )


def write_csv(trace: WaveformTrace, fh) -> None:
    """Stable CSV emission: fixed header, 9 significant digits, time-ordered."""
    n = trace.inputs.shape[0]
    cols = ["t_s", "clk_v"]
    cols += [f"in{i + 1}_v" for i in range(n)]
    cols += ["ca_v", "co_v", "cabar_v", "cobar_v", "resolved"]
    fh.write(",".join(cols) + "\n")
    for k in range(len(trace.time)):
        row = [trace.time[k], trace.clk[k]]
        row += [trace.inputs[i, k] for i in range(n)]
        row += [trace.ca[k], trace.co[k], trace.cabar[k], trace.cobar[k]]
        fh.write(",".join(f"{v:.9g}" for v in row))
        fh.write(f",{int(trace.resolved[k])}\n")
