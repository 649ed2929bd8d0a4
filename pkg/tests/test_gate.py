from fractions import Fraction

import numpy as np
import pytest

from mtlg.gate import (
    DimensionMismatchError,
    FanInError,
    GateConfig,
    GateKind,
    TieRule,
    TruthTable,
    VoltageLevels,
    bits_of_index,
    boundary_grid,
    branch_currents,
    classify,
    decision_hyperplane,
    evaluate,
    index_of_bits,
    truth_table,
)
from oracles import exact_branch_currents, exact_truth_table

AND_HW = GateConfig((60.5e3, 60e3), (33e3,))
OR_HW = GateConfig((33.8e3, 18.3e3), (41.6e3,))
OR3_HW = GateConfig((31.5e3, 30e3, 28.2e3), (68.2e3,))


class TestBranchCurrents:
    def test_and_config_both_active(self):
        bc = branch_currents(AND_HW, (1, 1))
        i_in, i_th = exact_branch_currents((60.5e3, 60e3), (33e3,), (1, 1), 0.65)
        assert bc.i_in == pytest.approx(float(i_in), rel=1e-12)
        assert bc.i_th == pytest.approx(float(i_th), rel=1e-12)
        # the numbers themselves
        assert bc.i_in == pytest.approx(21.577e-6, rel=1e-4)
        assert bc.i_th == pytest.approx(19.697e-6, rel=1e-4)

    def test_all_zero_input_draws_nothing(self):
        assert branch_currents(OR3_HW, (0, 0, 0)).i_in == 0.0

    def test_or_config_single_input(self):
        bc = branch_currents(OR_HW, (0, 1))
        assert bc.i_in == pytest.approx(35.52e-6, rel=1e-3)
        assert bc.i_th == pytest.approx(15.63e-6, rel=1e-3)
        assert bc.i_in > bc.i_th

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            branch_currents(AND_HW, (1, 0, 1))


class TestEvaluate:
    def test_and_corners(self):
        cas = [evaluate(AND_HW, b).ca for b in [(0, 0), (0, 1), (1, 0), (1, 1)]]
        assert cas == [0, 0, 0, 1]

    def test_or_corners(self):
        cas = [evaluate(OR_HW, b).ca for b in [(0, 0), (0, 1), (1, 0), (1, 1)]]
        assert cas == [0, 1, 1, 1]

    def test_complementarity(self):
        for k in range(8):
            out = evaluate(OR3_HW, bits_of_index(k, 3))
            assert out.co == 1 - out.ca

    def test_mega_ohm_dictator(self):
        cfg = GateConfig((8e6, 2e6, 4e6), (2e6,))
        for k in range(8):
            bits = bits_of_index(k, 3)
            assert evaluate(cfg, bits).ca == bits[1]  # f = x2


class TestTruthTable:
    def test_and_table(self):
        assert truth_table(AND_HW).outputs == (0, 0, 0, 1)

    def test_or3_table(self):
        assert truth_table(OR3_HW).outputs == (0, 1, 1, 1, 1, 1, 1, 1)

    def test_mega_ohm_or(self):
        cfg = GateConfig((3e6, 3e6), (5e6,))
        assert truth_table(cfg).outputs == (0, 1, 1, 1)

    def test_tie_majority(self):
        cfg = GateConfig((2e6, 2e6, 2e6), (1e6,))
        tt = truth_table(cfg)
        want = tuple(1 if sum(bits_of_index(k, 3)) >= 2 else 0 for k in range(8))
        assert tt.outputs == want

    def test_tie_rule_flips_tie_rows(self):
        iw = GateConfig((2e6, 2e6, 2e6), (1e6,), tie_rule=TieRule.INPUT_WINS)
        tw = GateConfig((2e6, 2e6, 2e6), (1e6,), tie_rule=TieRule.THRESHOLD_WINS)
        want_tw = tuple(1 if sum(bits_of_index(k, 3)) >= 3 else 0 for k in range(8))
        assert truth_table(tw).outputs == want_tw
        assert truth_table(iw).outputs != truth_table(tw).outputs

    def test_matches_exact_oracle(self):
        for cfg in (AND_HW, OR_HW, OR3_HW):
            assert truth_table(cfg).outputs == exact_truth_table(
                cfg.input_memristances, cfg.threshold_memristances
            )

    def test_bitstring_roundtrip(self):
        tt = TruthTable.from_bitstring("1000")
        assert tt.outputs == (0, 0, 0, 1)
        assert tt.to_bitstring() == "1000"

    def test_fan_in_guard(self):
        with pytest.raises(FanInError):
            GateConfig(tuple([10e3] * 17), (10e3,))


class TestClassify:
    def test_named_two_input(self):
        assert classify(TruthTable(2, (0, 0, 0, 1))).kind is GateKind.AND
        assert classify(TruthTable(2, (0, 1, 1, 1))).kind is GateKind.OR
        assert classify(TruthTable(2, (1, 1, 1, 0))).kind is GateKind.NAND
        assert classify(TruthTable(2, (1, 0, 0, 0))).kind is GateKind.NOR
        assert classify(TruthTable(2, (0, 1, 1, 0))).kind is GateKind.NON_MONOTONE

    def test_constants(self):
        assert classify(TruthTable(2, (0, 0, 0, 0))).kind is GateKind.CONSTANT_ZERO
        assert classify(TruthTable(2, (1, 1, 1, 1))).kind is GateKind.CONSTANT_ONE

    def test_majority(self):
        maj2 = tuple(1 if sum(bits_of_index(k, 3)) >= 2 else 0 for k in range(8))
        c = classify(TruthTable(3, maj2))
        assert c.kind is GateKind.MAJORITY and c.k == 2

    def test_dictator(self):
        d = tuple(bits_of_index(k, 3)[1] for k in range(8))
        c = classify(TruthTable(3, d))
        assert c.kind is GateKind.DICTATOR and c.index == 1
        assert c.label() == "dictator(x2)"

    def test_monotone_non_symmetric(self):
        # x2 or x3
        f = tuple(
            1 if (bits_of_index(k, 3)[1] or bits_of_index(k, 3)[2]) else 0
            for k in range(8)
        )
        assert classify(TruthTable(3, f)).kind is GateKind.OTHER_THRESHOLD


class TestBoundary:
    def test_hyperplane_12(self):
        bm = boundary_grid(GateConfig((3e6, 3e6), (2.5e6,)), 101)
        # line a1 + a2 = 1.2, i.e. a1/3 + a2/3 = 1/2.5 in micro-siemens
        g, g_t = bm.conductances, bm.g_threshold
        assert (g_t / g[0]) == pytest.approx(1.2, rel=1e-12)
        a = np.linspace(0, 1, 101)
        for i, a1 in enumerate(a):
            col = bm.grid[i]
            ones = np.nonzero(col)[0]
            want = 1.2 - a1
            if want > 1.0:
                assert len(ones) == 0
            else:
                a2_first = a[ones[0]]
                assert abs(a2_first - want) <= 0.01 + 1e-9

    def test_equal_weights_line_through_corners(self):
        bm = boundary_grid(GateConfig((3e6, 3e6), (3e6,)), 11)
        # corners (1,0) and (0,1) lie on the line; tie -> input wins -> class 1
        assert bm.grid[10, 0] == 1
        assert bm.grid[0, 10] == 1
        assert bm.grid[0, 0] == 0
        assert bm.grid[10, 10] == 1

    def test_scale_invariance(self):
        base = GateConfig((3e6, 3e6), (2.5e6,))
        a = boundary_grid(base, 51)
        b = boundary_grid(base.scaled(4.0), 51)
        assert np.array_equal(a.grid, b.grid)

    def test_grid_guards(self):
        with pytest.raises(FanInError):
            boundary_grid(GateConfig((1e6,) * 4, (1e6,)), 11)
        with pytest.raises(ValueError):
            boundary_grid(GateConfig((3e6, 3e6), (2.5e6,)), 1)

    def test_hyperplane_only_for_high_fan_in(self):
        g, g_t = decision_hyperplane(GateConfig((1e6,) * 5, (2e6,)))
        assert len(g) == 5
        assert g_t == pytest.approx(0.5e-6, rel=1e-12)


class TestIndexing:
    def test_bits_roundtrip(self):
        for n in (1, 2, 3, 4):
            for k in range(2 ** n):
                assert index_of_bits(bits_of_index(k, n)) == k

    def test_x1_is_msb(self):
        assert bits_of_index(4, 3) == (1, 0, 0)


class TestVoltageLevels:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            VoltageLevels(v_dd=1.0, v_high=0.9)
