"""Feedforward composition of threshold gates.

Gates are wired CA/CO-output to input slot; the isolation inverters restore
levels between stages, so composition is ideal Boolean evaluation in
topological order. Both output taps are first class: CO is always the
complement of CA.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass

from .gate import GateConfig, TruthTable, bits_of_index, evaluate


@dataclass(frozen=True)
class Source:
    """Driver of a gate input slot: a primary input ('in', index) or a gate tap
    ('gate', name, 'CA'|'CO')."""

    kind: str  # "in" | "gate"
    name: str | None = None
    index: int | None = None
    tap: str | None = None

    @staticmethod
    def primary(index: int) -> "Source":
        return Source(kind="in", index=index)

    @staticmethod
    def gate_tap(name: str, tap: str) -> "Source":
        if tap not in ("CA", "CO"):
            raise ValueError(f"tap must be CA or CO, got {tap!r}")
        return Source(kind="gate", name=name, tap=tap)

    def describe(self) -> str:
        if self.kind == "in":
            return f"in{self.index + 1}"
        return f"{self.name}.{self.tap}"


@dataclass(frozen=True)
class Wire:
    source: Source
    gate: str
    slot: int  # 0-based input slot of the destination gate


@dataclass(frozen=True)
class Netlist:
    gates: dict[str, GateConfig]
    wires: tuple[Wire, ...]
    primary_inputs: int
    primary_outputs: tuple[tuple[str, str], ...]  # (gate name, tap)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str


def _diag(code, message):
    return Diagnostic(code=code, message=message)


def validate(net: Netlist) -> list[Diagnostic]:
    """Structural checks; an empty list means the netlist is well formed."""
    diags = []
    driven: dict[tuple[str, int], list[Wire]] = {}
    deps: dict[str, set[str]] = {name: set() for name in net.gates}

    for w in net.wires:
        if w.gate not in net.gates:
            diags.append(_diag("UnknownGate", f"wire targets unknown gate {w.gate!r}"))
            continue
        n = net.gates[w.gate].n
        if not (0 <= w.slot < n):
            diags.append(
                _diag("BadSlot", f"gate {w.gate!r} has no input slot {w.slot + 1} (fan-in {n})")
            )
            continue
        src = w.source
        if src.kind == "in":
            if not (0 <= src.index < net.primary_inputs):
                diags.append(
                    _diag("UnknownInput", f"primary input in{src.index + 1} does not exist")
                )
                continue
        else:
            if src.name not in net.gates:
                diags.append(
                    _diag("UnknownGate", f"wire driven by unknown gate {src.name!r}")
                )
                continue
            deps[w.gate].add(src.name)
        driven.setdefault((w.gate, w.slot), []).append(w)

    for name, cfg in net.gates.items():
        for slot in range(cfg.n):
            ws = driven.get((name, slot), [])
            if not ws:
                diags.append(
                    _diag("UnwiredInput", f"gate {name!r} input slot {slot + 1} is not driven")
                )
            elif len(ws) > 1:
                srcs = ", ".join(w.source.describe() for w in ws)
                diags.append(
                    _diag(
                        "MultiplyDriven",
                        f"gate {name!r} input slot {slot + 1} driven by {srcs}",
                    )
                )

    for gname, tap in net.primary_outputs:
        if gname not in net.gates:
            diags.append(_diag("UnknownGate", f"output taps unknown gate {gname!r}"))
        if tap not in ("CA", "CO"):
            diags.append(_diag("BadTap", f"output tap must be CA or CO, got {tap!r}"))

    try:
        tuple(graphlib.TopologicalSorter(deps).static_order())
    except graphlib.CycleError as e:
        cycle = " -> ".join(e.args[1])
        diags.append(_diag("CycleError", f"gate dependency cycle: {cycle}"))
    return diags


class NetlistError(Exception):
    def __init__(self, diagnostics):
        super().__init__("; ".join(d.message for d in diagnostics))
        self.diagnostics = diagnostics


def _topo_order(net: Netlist) -> list[str]:
    deps: dict[str, set[str]] = {name: set() for name in net.gates}
    for w in net.wires:
        if w.source.kind == "gate":
            deps[w.gate].add(w.source.name)
    return list(graphlib.TopologicalSorter(deps).static_order())


def evaluate_network(net: Netlist, inputs) -> tuple[int, ...]:
    """Bits at the primary output taps for one primary input vector."""
    diags = validate(net)
    if diags:
        raise NetlistError(diags)
    inputs = tuple(int(b) for b in inputs)
    if len(inputs) != net.primary_inputs:
        raise NetlistError(
            [_diag("DimensionMismatch",
                   f"{len(inputs)} input bits for {net.primary_inputs} primaries")]
        )
    by_dest = {(w.gate, w.slot): w.source for w in net.wires}
    values: dict[tuple[str, str], int] = {}
    for name in _topo_order(net):
        cfg = net.gates[name]
        bits = []
        for slot in range(cfg.n):
            src = by_dest[(name, slot)]
            if src.kind == "in":
                bits.append(inputs[src.index])
            else:
                bits.append(values[(src.name, src.tap)])
        out = evaluate(cfg, bits)
        values[(name, "CA")] = out.ca
        values[(name, "CO")] = out.co
    return tuple(values[(g, tap)] for g, tap in net.primary_outputs)


def network_truth_table(net: Netlist) -> list[TruthTable]:
    """One truth table per primary output, by exhaustive enumeration."""
    n = net.primary_inputs
    if n > 16:
        raise NetlistError([_diag("FanIn", f"{n} primary inputs > 16")])
    rows = [evaluate_network(net, bits_of_index(k, n)) for k in range(2 ** n)]
    return [
        TruthTable(n, tuple(r[j] for r in rows))
        for j in range(len(net.primary_outputs))
    ]
