"""Memristive current-mode threshold logic gate toolkit."""

from .device import (
    DeviceModel,
    KOHM_PROFILE,
    MOHM_PROFILE,
    MemristorState,
    ProgramResult,
    ProgramTimeoutError,
    PulseSpec,
    ReadDisturbError,
    apply_pulse,
    conductance_levels,
    program_to_target,
    quantize,
    read_current,
)
from .gate import (
    BoundaryMap,
    BranchCurrents,
    GateClass,
    GateConfig,
    GateKind,
    GateOutput,
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
from .netlist import (
    Netlist,
    NetlistError,
    Source,
    Wire,
    evaluate_network,
    network_truth_table,
    validate,
)
from .synth import (
    DeviceRangeError,
    InfeasibleTargetError,
    SynthesisResult,
    SynthesisSpec,
    VerifyReport,
    check_separability,
    named_truth_table,
    synthesize,
    verify,
    verify_config,
)
from .transient import (
    ClockSpec,
    TransientParams,
    WaveformTrace,
    isolation_inverter,
    settle_time,
    simulate,
    write_csv,
)

__version__ = "0.1.0"
