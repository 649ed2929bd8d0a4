"""Steady-state evaluation of a memristive current-mode threshold logic gate.

A gate compares the current drawn through the active input memristors
against the current through the (always-active) threshold memristors.
All memristances are in ohms, voltages in volts, currents in amperes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# Currents within this relative band count as a tie; the tie rule decides.
TIE_EPS_REL = 1e-9

MAX_FAN_IN = 16


class TieRule(Enum):
    INPUT_WINS = "input_wins"
    THRESHOLD_WINS = "threshold_wins"


class DimensionMismatchError(ValueError):
    pass


class FanInError(ValueError):
    pass


@dataclass(frozen=True)
class VoltageLevels:
    """Supply and logic levels. v_dd drives the differential branches and must
    stay below the device programming threshold so reads cannot program."""

    v_dd: float = 0.65
    v_high: float = 0.9
    v_low: float = 0.0

    def __post_init__(self):
        if not (self.v_low < self.v_dd < self.v_high):
            raise ValueError(
                f"require v_low < v_dd < v_high, got "
                f"{self.v_low}, {self.v_dd}, {self.v_high}"
            )


@dataclass(frozen=True)
class GateConfig:
    """One gate instance: input-branch and threshold-branch memristances."""

    input_memristances: tuple[float, ...]
    threshold_memristances: tuple[float, ...]
    levels: VoltageLevels = field(default_factory=VoltageLevels)
    tie_rule: TieRule = TieRule.INPUT_WINS

    def __post_init__(self):
        object.__setattr__(
            self, "input_memristances", tuple(float(m) for m in self.input_memristances)
        )
        object.__setattr__(
            self,
            "threshold_memristances",
            tuple(float(m) for m in self.threshold_memristances),
        )
        if len(self.input_memristances) < 1 or len(self.threshold_memristances) < 1:
            raise ValueError("need at least one input and one threshold memristance")
        if len(self.input_memristances) > MAX_FAN_IN:
            raise FanInError(f"fan-in {len(self.input_memristances)} > {MAX_FAN_IN}")
        for m in self.input_memristances + self.threshold_memristances:
            if not (m > 0):
                raise ValueError(f"memristance must be positive, got {m}")

    @property
    def n(self) -> int:
        return len(self.input_memristances)

    def scaled(self, lam: float) -> "GateConfig":
        """Every memristance multiplied by lam > 0 (truth table is invariant)."""
        return GateConfig(
            tuple(lam * m for m in self.input_memristances),
            tuple(lam * m for m in self.threshold_memristances),
            self.levels,
            self.tie_rule,
        )


@dataclass(frozen=True)
class BranchCurrents:
    i_in: float
    i_th: float


@dataclass(frozen=True)
class GateOutput:
    ca: int
    co: int


@dataclass(frozen=True)
class TruthTable:
    """Outputs of an n-input Boolean function, indexed by the input vector read
    as a binary number with x1 as the most significant bit."""

    n: int
    outputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(int(b) for b in self.outputs))
        if len(self.outputs) != 2 ** self.n:
            raise ValueError(f"expected {2 ** self.n} outputs, got {len(self.outputs)}")
        if any(b not in (0, 1) for b in self.outputs):
            raise ValueError("outputs must be 0/1")

    @staticmethod
    def from_bitstring(s: str, n: int | None = None) -> "TruthTable":
        """Bitstring with the all-ones input first (descending index order)."""
        bits = [int(c) for c in s.strip()]
        if n is None:
            n = (len(bits) - 1).bit_length()
        if len(bits) != 2 ** n:
            raise ValueError(f"bitstring length {len(bits)} is not 2^{n}")
        return TruthTable(n, tuple(reversed(bits)))

    def to_bitstring(self) -> str:
        return "".join(str(b) for b in reversed(self.outputs))

    def complement(self) -> "TruthTable":
        return TruthTable(self.n, tuple(1 - b for b in self.outputs))


def bits_of_index(k: int, n: int) -> tuple[int, ...]:
    """Input vector (x1..xn) for truth-table index k; x1 is the MSB of k."""
    return tuple((k >> (n - 1 - i)) & 1 for i in range(n))


def index_of_bits(bits) -> int:
    k = 0
    for b in bits:
        k = (k << 1) | int(b)
    return k


class GateKind(Enum):
    CONSTANT_ZERO = "constant-0"
    CONSTANT_ONE = "constant-1"
    AND = "AND"
    OR = "OR"
    NAND = "NAND"
    NOR = "NOR"
    MAJORITY = "MAJ"
    DICTATOR = "dictator"
    OTHER_THRESHOLD = "threshold"
    NON_MONOTONE = "non-monotone"


@dataclass(frozen=True)
class GateClass:
    kind: GateKind
    k: int | None = None  # majority rank, when applicable
    index: int | None = None  # dictating input, 0-based

    def label(self) -> str:
        if self.kind is GateKind.AND:
            return f"AND (MAJ-{self.k})"
        if self.kind is GateKind.OR:
            return "OR (MAJ-1)"
        if self.kind is GateKind.MAJORITY:
            return f"MAJ-{self.k}"
        if self.kind is GateKind.DICTATOR:
            return f"dictator(x{self.index + 1})"
        return self.kind.value


def _check_bits(config: GateConfig, bits) -> tuple[int, ...]:
    bits = tuple(int(b) for b in bits)
    if len(bits) != config.n:
        raise DimensionMismatchError(
            f"input has {len(bits)} bits, gate expects {config.n}"
        )
    if any(b not in (0, 1) for b in bits):
        raise ValueError("input bits must be 0/1")
    return bits


def branch_currents(config: GateConfig, bits) -> BranchCurrents:
    """Currents drawn by the active input memristors and by the threshold bank."""
    bits = _check_bits(config, bits)
    v = config.levels.v_dd
    i_in = v * sum(1.0 / m for m, b in zip(config.input_memristances, bits) if b)
    i_th = v * sum(1.0 / m for m in config.threshold_memristances)
    return BranchCurrents(i_in=i_in, i_th=i_th)


def _compare(i_in: float, i_th: float, tie_rule: TieRule) -> int:
    """1 if the input branch wins the current comparison, 0 otherwise."""
    if abs(i_in - i_th) <= TIE_EPS_REL * max(abs(i_in), abs(i_th)):
        return 1 if tie_rule is TieRule.INPUT_WINS else 0
    return 1 if i_in > i_th else 0


def evaluate(config: GateConfig, bits) -> GateOutput:
    bc = branch_currents(config, bits)
    ca = _compare(bc.i_in, bc.i_th, config.tie_rule)
    return GateOutput(ca=ca, co=1 - ca)


def truth_table(config: GateConfig) -> TruthTable:
    """Exhaustive evaluation over all 2^n input corners."""
    n = config.n
    outs = tuple(evaluate(config, bits_of_index(k, n)).ca for k in range(2 ** n))
    return TruthTable(n, outs)


def classify(tt: TruthTable) -> GateClass:
    n, outs = tt.n, tt.outputs
    if all(b == 0 for b in outs):
        return GateClass(GateKind.CONSTANT_ZERO)
    if all(b == 1 for b in outs):
        return GateClass(GateKind.CONSTANT_ONE)

    # dictator: output copies one input
    for i in range(n):
        if all(outs[k] == bits_of_index(k, n)[i] for k in range(2 ** n)):
            return GateClass(GateKind.DICTATOR, index=i)

    maj = _majority_rank(outs, n)
    if maj is not None:
        if maj == n and n >= 2:
            return GateClass(GateKind.AND, k=maj)
        if maj == 1 and n >= 2:
            return GateClass(GateKind.OR, k=maj)
        return GateClass(GateKind.MAJORITY, k=maj)

    comp = tuple(1 - b for b in outs)
    cmaj = _majority_rank(comp, n)
    if cmaj == n and n >= 2:
        return GateClass(GateKind.NAND, k=cmaj)
    if cmaj == 1 and n >= 2:
        return GateClass(GateKind.NOR, k=cmaj)

    if _is_monotone(outs, n):
        return GateClass(GateKind.OTHER_THRESHOLD)
    return GateClass(GateKind.NON_MONOTONE)


def _majority_rank(outs, n) -> int | None:
    """k such that outs = [popcount >= k], or None."""
    by_count: dict[int, set[int]] = {}
    for k in range(2 ** n):
        by_count.setdefault(bin(k).count("1"), set()).add(outs[k])
    if any(len(v) != 1 for v in by_count.values()):
        return None
    step = [next(iter(by_count[c])) for c in range(n + 1)]
    for k in range(1, n + 1):
        if step == [0] * k + [1] * (n + 1 - k):
            return k
    return None


def _is_monotone(outs, n) -> bool:
    # flipping any input 0 -> 1 must never turn the output off
    for k in range(2 ** n):
        for i in range(n):
            mask = 1 << i
            if not (k & mask) and outs[k] > outs[k | mask]:
                return False
    return True


@dataclass(frozen=True)
class BoundaryMap:
    """Classification of the relaxed input cube [0,1]^n on a uniform grid,
    plus the separating hyperplane sum(a_i * g_i) = g_threshold."""

    axes: tuple[np.ndarray, ...]
    grid: np.ndarray  # shape (res,)*n, values 0/1; index order (a1, a2, ...)
    conductances: tuple[float, ...]
    g_threshold: float


def decision_hyperplane(config: GateConfig) -> tuple[tuple[float, ...], float]:
    """Coefficients (g_1..g_n) and right-hand side g_T of the boundary."""
    g = tuple(1.0 / m for m in config.input_memristances)
    g_t = sum(1.0 / m for m in config.threshold_memristances)
    return g, g_t


def boundary_grid(config: GateConfig, resolution: int) -> BoundaryMap:
    """Map the decision boundary over relaxed activations in [0,1]^n.

    Grid export is limited to n in {2, 3}; for higher fan-in use
    decision_hyperplane directly.
    """
    if config.n not in (2, 3):
        raise FanInError(f"grid export supports n in {{2, 3}}, got n={config.n}")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    g, g_t = decision_hyperplane(config)
    axes = tuple(np.linspace(0.0, 1.0, resolution) for _ in range(config.n))
    mesh = np.meshgrid(*axes, indexing="ij")
    lhs = sum(gi * a for gi, a in zip(g, mesh))
    tie = np.abs(lhs - g_t) <= TIE_EPS_REL * np.maximum(np.abs(lhs), abs(g_t))
    if config.tie_rule is TieRule.INPUT_WINS:
        grid = ((lhs > g_t) | tie).astype(np.int8)
    else:
        grid = ((lhs > g_t) & ~tie).astype(np.int8)
    return BoundaryMap(axes=axes, grid=grid, conductances=g, g_threshold=g_t)
