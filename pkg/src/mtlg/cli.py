"""Command-line surface.

Exit codes: 0 ok, 2 usage/parse errors, 3 model errors (infeasible target,
out-of-range device request, netlist diagnostics, unresolved evaluation).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import device as dev_mod
from . import files, netlist as net_mod, synth as synth_mod, transient as tr_mod
from .gate import (
    GateConfig,
    TieRule,
    bits_of_index,
    boundary_grid,
    branch_currents,
    classify,
    decision_hyperplane,
    evaluate,
    truth_table,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MODEL = 3


class ModelError(Exception):
    pass


def _load_config(args) -> files.ProjectConfig:
    if getattr(args, "config", None):
        return files.load_project_config(args.config)
    return files.ProjectConfig()


def _gate_from_args(args, cfg: files.ProjectConfig) -> GateConfig:
    tie = files.parse_tie_rule(args.tie_rule) if args.tie_rule else cfg.tie_rule
    if getattr(args, "gate_file", None):
        gc = files.load_gate_config(args.gate_file, levels=cfg.levels)
        if args.tie_rule:
            gc = GateConfig(gc.input_memristances, gc.threshold_memristances,
                            levels=gc.levels, tie_rule=tie)
        return gc
    if not args.weights:
        raise files.ParseError("need --weights or --gate-file")
    ms, ths = files.parse_weights(args.weights)
    return GateConfig(ms, ths, levels=cfg.levels, tie_rule=tie)


def _parse_bits(text: str, n: int | None = None) -> tuple[int, ...]:
    text = text.strip()
    if not text or any(c not in "01" for c in text):
        raise files.ParseError(f"input must be a 0/1 string, got {text!r}")
    bits = tuple(int(c) for c in text)
    if n is not None and len(bits) != n:
        raise ModelError(f"input has {len(bits)} bits, gate expects {n}")
    return bits


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w"), True


def cmd_eval(args) -> int:
    cfg = _load_config(args)
    gate = _gate_from_args(args, cfg)
    bits = _parse_bits(args.input, gate.n)
    out = evaluate(gate, bits)
    bc = branch_currents(gate, bits)
    print(f"CA={out.ca} CO={out.co} Iin={bc.i_in:.5g} Ith={bc.i_th:.5g}")
    return EXIT_OK


def _print_table(tt, prefix=""):
    for k in range(2 ** tt.n):
        bits = "".join(str(b) for b in bits_of_index(k, tt.n))
        print(f"{prefix}{bits} {tt.outputs[k]} {1 - tt.outputs[k]}")
    print(f"{prefix}class={classify(tt).label()}")


def cmd_truth(args) -> int:
    cfg = _load_config(args)
    if args.netlist:
        tie = files.parse_tie_rule(args.tie_rule) if args.tie_rule else cfg.tie_rule
        net = files.parse_netlist_file(args.netlist, levels=cfg.levels, tie_rule=tie)
        diags = net_mod.validate(net)
        if diags:
            raise net_mod.NetlistError(diags)
        tables = net_mod.network_truth_table(net)
        for (gname, tap), tt in zip(net.primary_outputs, tables):
            print(f"output {gname}.{tap}:")
            _print_table(tt, prefix="  ")
        return EXIT_OK
    gate = _gate_from_args(args, cfg)
    print("inputs ca co")
    _print_table(truth_table(gate))
    return EXIT_OK


def cmd_boundary(args) -> int:
    cfg = _load_config(args)
    gate = _gate_from_args(args, cfg)
    g, g_t = decision_hyperplane(gate)
    fh, close = _open_out(args.out)
    try:
        coeffs = ",".join(f"{x:.9g}" for x in g)
        fh.write(f"# hyperplane: {coeffs},{g_t:.9g}\n")
        cls = classify(truth_table(gate))
        fh.write(
            f"# class: {cls.label()} (corner truth table, tie_rule="
            f"{gate.tie_rule.value})\n"
        )
        fh.write(
            "# note: points on the boundary sum(a_i*g_i) = g_T follow the tie "
            "rule; the class flips between AND-like and OR-like as the "
            "threshold conductance crosses the single-input conductances\n"
        )
        if gate.n in (2, 3):
            bm = boundary_grid(gate, args.res)
            fh.write(",".join(f"a{i + 1}" for i in range(gate.n)) + ",class\n")
            for idx in np.ndindex(bm.grid.shape):
                coords = ",".join(f"{bm.axes[d][i]:.9g}" for d, i in enumerate(idx))
                fh.write(f"{coords},{int(bm.grid[idx])}\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_wave(args) -> int:
    cfg = _load_config(args)
    gate = _gate_from_args(args, cfg)
    seq = [_parse_bits(v, gate.n) for v in args.inputs.split(",")]
    clock = cfg.clock(n_cycles=len(seq))
    trace = tr_mod.simulate(gate, seq, clock, cfg.transient)
    fh, close = _open_out(args.out)
    try:
        tr_mod.write_csv(trace, fh)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = _load_config(args)
    tie = files.parse_tie_rule(args.tie_rule) if args.tie_rule else cfg.tie_rule
    tap = "CA"
    target = args.target.strip()
    if set(target) <= {"0", "1"} and len(target) >= 2:
        tt = synth_mod.TruthTable.from_bitstring(target, args.n)
    else:
        if not args.n:
            raise files.ParseError("named targets need --n")
        try:
            tt, tap = synth_mod.named_truth_table(target, args.n)
        except ValueError as e:
            raise files.ParseError(str(e)) from None
    spec = synth_mod.SynthesisSpec(
        target=tt, device=cfg.device, tie_rule=tie, min_margin_rel=args.margin
    )
    result = synth_mod.synthesize(spec)
    if not result.feasible:
        w = result.infeasibility_witness
        detail = ""
        if w is not None:
            detail = " witness: " + " vs ".join(
                "".join(str(b) for b in bits) for bits in w
            )
        raise ModelError(f"target is not realizable with positive weights;{detail}")
    print(f"feasible: yes (function read at {tap} output)")
    print("memristances_ohm: " + ",".join(f"{m:.6g}" for m in result.memristances))
    print(f"threshold_ohm: {result.threshold_memristance:.6g}")
    print("conductances_s: " + ",".join(f"{g:.6g}" for g in result.conductances)
          + f" g_threshold={result.g_threshold:.6g}")
    print(f"achieved_margin_rel: {result.achieved_margin:.6g}")
    q = result.quantized_config
    print("quantized_ohm: "
          + ",".join(f"{m:.6g}" for m in q.input_memristances)
          + f";{q.threshold_memristances[0]:.6g}"
          + (" (verified)" if result.quantized_ok
             else f" (FAILS at row {result.quantized_failure_row})"))
    if args.out:
        files.save_gate_config(q if args.quantized else GateConfig(
            result.memristances, (result.threshold_memristance,),
            levels=cfg.levels, tie_rule=tie), args.out)
        print(f"wrote gate config to {args.out}")
    return EXIT_OK


def cmd_program(args) -> int:
    cfg = _load_config(args)
    model = cfg.device
    target = files.parse_resistance(args.target)
    start = files.parse_resistance(args.start) if args.start else model.r_max
    rng = np.random.default_rng(cfg.seed) if model.noise_sigma_rel > 0 else None
    try:
        state = dev_mod.MemristorState(resistance=start, model=model)
        result = dev_mod.program_to_target(
            state, target, tol_rel=args.tol, max_pulses=args.max_pulses, rng=rng
        )
    except (ValueError, dev_mod.ProgramTimeoutError) as e:
        raise ModelError(str(e)) from None
    level, level_r = dev_mod.quantize(result.state.resistance, model)
    print(f"pulses={result.pulses} final_resistance_ohm={result.state.resistance:.6g} "
          f"nearest_level={level} level_resistance_ohm={level_r:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mtlg",
        description="Memristive current-mode threshold logic gate toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, gate=True):
        sp.add_argument("--config", help="project config file (YAML)")
        sp.add_argument("--tie-rule", dest="tie_rule",
                        help="input_wins or threshold_wins")
        if gate:
            sp.add_argument("--weights",
                            help="M1,...,Mn;TH1,... with k/M suffixes")
            sp.add_argument("--gate-file", dest="gate_file",
                            help="gate config file written by synth")

    sp = sub.add_parser("eval", help="evaluate one input vector")
    common(sp)
    sp.add_argument("--input", required=True, help="bit string, e.g. 11")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("truth", help="full truth table with classification")
    common(sp)
    sp.add_argument("--netlist", help="netlist file instead of a single gate")
    sp.set_defaults(func=cmd_truth)

    sp = sub.add_parser("boundary", help="decision-boundary grid over [0,1]^n")
    common(sp)
    sp.add_argument("--res", type=int, default=101, help="grid resolution per axis")
    sp.add_argument("--out", help="output CSV path (default stdout)")
    sp.set_defaults(func=cmd_boundary)

    sp = sub.add_parser("wave", help="two-phase transient waveform CSV")
    common(sp)
    sp.add_argument("--inputs", required=True,
                    help="comma-separated input vectors, one per clock cycle")
    sp.add_argument("--out", help="output CSV path (default stdout)")
    sp.set_defaults(func=cmd_wave)

    sp = sub.add_parser("synth", help="synthesize weights for a Boolean target")
    common(sp, gate=False)
    sp.add_argument("--target", required=True,
                    help="AND, OR, NAND, NOR, XOR, XNOR, MAJ:k, DICT:i, or a "
                         "truth-table bitstring (all-ones input first)")
    sp.add_argument("--n", type=int, help="input count for named targets")
    sp.add_argument("--margin", type=float, default=0.05,
                    help="required relative current margin")
    sp.add_argument("--out", help="write the synthesized gate config here")
    sp.add_argument("--quantized", action="store_true",
                    help="write the quantized config instead of the continuous one")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("program", help="closed-loop device programming emulation")
    common(sp, gate=False)
    sp.add_argument("--target", required=True, help="target resistance, e.g. 33k")
    sp.add_argument("--start", help="starting resistance (default r_max)")
    sp.add_argument("--tol", type=float, default=0.01, help="relative tolerance")
    sp.add_argument("--max-pulses", dest="max_pulses", type=int, default=200)
    sp.set_defaults(func=cmd_program)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except files.ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, net_mod.NetlistError, synth_mod.DeviceRangeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MODEL
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
