"""Processing-using-DRAM toolkit.

Pipeline: build a gate netlist for an operation, lower it to a
majority/complement graph, optimize, map operands to subarray rows, emit
the row-activation program, and execute it on a bit-accurate simulated
subarray with vertically laid-out operands.  A separate classifier labels
profiled functions with their dominant data-movement bottleneck.
"""

from .logic import (
    Gate,
    MajGraph,
    Netlist,
    TruthTable,
    equivalent,
    eval_majgraph,
    eval_netlist,
    format_netlist,
    parse_netlist,
    truth_table,
)
from .synthesis import RewriteRule, SynthesisReport, lower_to_maj, optimize, verify_rules
from .codegen import (
    ActivationCount,
    Command,
    MicroProgram,
    RowMap,
    SubarrayConfig,
    activation_count,
    allocate_rows,
    estimate_cost_static,
    format_microprogram,
    parse_microprogram,
    schedule,
    verify_program,
)
from .subarray import ExecutionReport, SubarrayState, new_subarray
from .transpose import HorizontalBlock, VerticalBlock, to_horizontal, to_vertical
from .oplib import OP_KINDS, CompiledOp, build_netlist, compile_op, execute_op, oracle
from .costmodel import CostParams, CostReport, compare, estimate
from .classifier import (
    BottleneckClass,
    MetricsRecord,
    Thresholds,
    classify,
    compute_lfmr,
    ingest_csv,
    recommend,
)

__version__ = "0.1.0"
