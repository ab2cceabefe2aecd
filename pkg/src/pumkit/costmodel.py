"""Analytical latency/energy/throughput accounting for command programs.

All numeric defaults are placeholders for relative comparisons between
programs; none are calibrated against hardware.  Absolute platform
comparisons are explicitly out of scope.

Accounting: each command contributes its per-command latency; energy
charges one activation per row touched (two for AAP, three for TRA) plus
one precharge per command.
"""

from __future__ import annotations

from dataclasses import dataclass

from .codegen import MicroProgram, activation_count
from .errors import ConfigError

NOT_CALIBRATED = "analytical estimate with placeholder parameters; not hardware-calibrated"


@dataclass(frozen=True)
class CostParams:
    t_aap_ns: float = 100.0
    t_tra_ns: float = 150.0
    e_act_pj: float = 900.0
    e_pre_pj: float = 300.0
    transpose_ns_per_word: float = 10.0
    banks: int = 1
    columns_per_subarray: int = 65536

    def __post_init__(self):
        for name in ("t_aap_ns", "t_tra_ns", "e_act_pj", "e_pre_pj",
                     "transpose_ns_per_word", "banks", "columns_per_subarray"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"cost parameter {name} must be strictly positive")


@dataclass(frozen=True)
class CostReport:
    latency_ns: float
    energy_pj: float
    throughput_ops_per_s: float
    aap_count: int
    tra_count: int
    total_activations: int

    def render(self) -> str:
        return (
            f"latency:     {self.latency_ns:.1f} ns\n"
            f"energy:      {self.energy_pj:.1f} pJ\n"
            f"throughput:  {self.throughput_ops_per_s:.3e} ops/s\n"
            f"commands:    {self.aap_count} AAP + {self.tra_count} TRA "
            f"({self.total_activations} activations)\n"
            f"note:        {NOT_CALIBRATED}"
        )


def transpose_cost_ns(word_count: int, params: CostParams | None = None) -> float:
    """Layout-conversion overhead for moving `word_count` operand words."""
    if params is None:
        params = CostParams()
    return word_count * params.transpose_ns_per_word


def estimate(program: MicroProgram, params: CostParams | None = None) -> CostReport:
    """Linear per-command cost roll-up for one program."""
    if params is None:
        params = CostParams()
    counts = activation_count(program)
    latency = counts.aap * params.t_aap_ns + counts.tra * params.t_tra_ns
    energy = (counts.total * params.e_act_pj
              + (counts.aap + counts.tra) * params.e_pre_pj)
    if latency > 0:
        throughput = params.banks * params.columns_per_subarray / (latency * 1e-9)
    else:
        throughput = float("inf")
    return CostReport(latency, energy, throughput,
                      counts.aap, counts.tra, counts.total)


@dataclass(frozen=True)
class CompareResult:
    """Elementwise ratios of report `a` relative to report `b`."""

    latency_ratio: float | None
    energy_ratio: float | None
    throughput_ratio: float | None
    undefined: tuple[str, ...]


def compare(a: CostReport, b: CostReport) -> CompareResult:
    undefined = []

    def ratio(x: float, y: float, name: str) -> float | None:
        if y == 0 or y != y or y == float("inf"):
            undefined.append(name)
            return None
        return x / y

    lat = ratio(a.latency_ns, b.latency_ns, "latency")
    en = ratio(a.energy_pj, b.energy_pj, "energy")
    thr = ratio(a.throughput_ops_per_s, b.throughput_ops_per_s, "throughput")
    return CompareResult(lat, en, thr, tuple(undefined))
