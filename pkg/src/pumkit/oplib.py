"""The operation library: builders, oracles, and the end-to-end path.

Sixteen operation kinds are supported; each has a gate-netlist builder
(the compiled circuit's source of truth) and a host-side integer oracle
(the reference the compiled program is verified against).

Integer semantics are unsigned and modular.  Per-kind output widths:

* ``add``            w+1 bits, carry-out in the top bit
* ``sub``            w bits, modulo 2^w
* ``mul``            2w bits, full product
* ``div``            w-bit quotient; division by zero yields all ones
* ``eq/neq/gt/lt``   1 bit
* ``max/min/if_then_else/relu``   w bits
* ``bitcount``       bit_length(w) bits
* ``and_n/or_n/xor_n``            w bits over n >= 2 operands

``relu`` alone reads the top input bit as a two's-complement sign and
clamps negatives to zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .codegen import (
    MicroProgram,
    RowMap,
    SubarrayConfig,
    allocate_rows,
    schedule,
)
from .errors import ArityError, CapacityError, PumError
from .logic import Gate, MajGraph, Netlist
from .subarray import new_subarray
from .synthesis import SynthesisReport, lower_to_maj, optimize
from .transpose import HorizontalBlock, to_horizontal, to_vertical

OP_KINDS = (
    "and_n", "or_n", "xor_n",
    "eq", "neq", "gt", "lt", "max", "min",
    "add", "sub", "mul", "div",
    "if_then_else",
    "bitcount", "relu",
)

N_ARY = frozenset(("and_n", "or_n", "xor_n"))

MAX_WIDTH = 64


def op_signature(kind: str, width: int, n_inputs: int = 2) -> tuple[tuple[int, ...], int]:
    """(operand widths, output width) for one operation instance."""
    _check_kind_width(kind, width, n_inputs)
    w = width
    if kind in N_ARY:
        return (w,) * n_inputs, w
    if kind in ("eq", "neq", "gt", "lt"):
        return (w, w), 1
    if kind in ("max", "min"):
        return (w, w), w
    if kind == "add":
        return (w, w), w + 1
    if kind == "sub":
        return (w, w), w
    if kind == "mul":
        return (w, w), 2 * w
    if kind == "div":
        return (w, w), w
    if kind == "if_then_else":
        return (1, w, w), w
    if kind == "bitcount":
        return (w,), w.bit_length()
    return (w,), w  # relu


def _check_kind_width(kind: str, width: int, n_inputs: int):
    if kind not in OP_KINDS:
        raise ValueError(f"unknown operation {kind!r}")
    if not 1 <= width <= MAX_WIDTH:
        raise ValueError(f"width {width} outside 1..{MAX_WIDTH}")
    if kind in N_ARY and n_inputs < 2:
        raise ValueError(f"{kind} needs at least 2 operands")


# --- host oracle -------------------------------------------------------------


def oracle(kind: str, width: int, operands: tuple[int, ...] | list[int]) -> int:
    """Reference integer semantics for one lane (totalized, pure)."""
    w = width
    mask = (1 << w) - 1
    if kind in N_ARY:
        acc = operands[0] & mask
        for v in operands[1:]:
            v &= mask
            acc = acc & v if kind == "and_n" else (acc | v if kind == "or_n" else acc ^ v)
        return acc
    if kind == "if_then_else":
        cond, a, b = operands
        return (a if cond & 1 else b) & mask
    if kind in ("bitcount", "relu"):
        a = operands[0] & mask
        if kind == "bitcount":
            return bin(a).count("1")
        return 0 if (a >> (w - 1)) & 1 else a
    a, b = operands[0] & mask, operands[1] & mask
    if kind == "eq":
        return int(a == b)
    if kind == "neq":
        return int(a != b)
    if kind == "gt":
        return int(a > b)
    if kind == "lt":
        return int(a < b)
    if kind == "max":
        return max(a, b)
    if kind == "min":
        return min(a, b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return (a - b) & mask
    if kind == "mul":
        return a * b
    if kind == "div":
        return a // b if b else mask
    raise ValueError(f"unknown operation {kind!r}")


# --- netlist builders ---------------------------------------------------------


class _NB:
    """Gate accumulator with constant-identity folding."""

    def __init__(self):
        self.gates: list[Gate] = []
        self._not_cache: dict[str, str] = {}

    def _emit(self, kind: str, *ops: str) -> str:
        gid = f"g{len(self.gates)}"
        self.gates.append(Gate(gid, kind, tuple(ops)))
        return gid

    def NOT(self, a: str) -> str:
        if a == "0":
            return "1"
        if a == "1":
            return "0"
        hit = self._not_cache.get(a)
        if hit is None:
            hit = self._emit("NOT", a)
            self._not_cache[a] = hit
        return hit

    def AND(self, a: str, b: str) -> str:
        if a == "0" or b == "0":
            return "0"
        if a == "1":
            return b
        if b == "1":
            return a
        return self._emit("AND", a, b)

    def OR(self, a: str, b: str) -> str:
        if a == "1" or b == "1":
            return "1"
        if a == "0":
            return b
        if b == "0":
            return a
        return self._emit("OR", a, b)

    def XOR(self, a: str, b: str) -> str:
        if a == "0":
            return b
        if b == "0":
            return a
        if a == "1":
            return self.NOT(b)
        if b == "1":
            return self.NOT(a)
        return self._emit("XOR", a, b)

    def mux(self, sel: str, a: str, b: str) -> str:
        """sel ? a : b"""
        return self.OR(self.AND(sel, a), self.AND(self.NOT(sel), b))

    def reduce(self, kind: str, refs: list[str]) -> str:
        refs = list(refs)
        op = {"AND": self.AND, "OR": self.OR, "XOR": self.XOR}[kind]
        while len(refs) > 1:
            nxt = [op(refs[i], refs[i + 1]) for i in range(0, len(refs) - 1, 2)]
            if len(refs) % 2:
                nxt.append(refs[-1])
            refs = nxt
        return refs[0]

    def full_add(self, a: str, b: str, c: str) -> tuple[str, str]:
        x = self.XOR(a, b)
        return self.XOR(x, c), self.OR(self.AND(a, b), self.AND(x, c))

    def ripple_add(self, A: list[str], B: list[str]) -> tuple[list[str], str]:
        out = []
        carry = "0"
        for a, b in zip(A, B):
            s, carry = self.full_add(a, b, carry)
            out.append(s)
        return out, carry

    def ripple_sub(self, A: list[str], B: list[str]) -> tuple[list[str], str]:
        """A - B; returns (difference bits, borrow-out)."""
        out = []
        borrow = "0"
        for a, b in zip(A, B):
            x = self.XOR(a, b)
            out.append(self.XOR(x, borrow))
            borrow = self.OR(self.AND(self.NOT(a), b),
                             self.AND(self.NOT(x), borrow))
        return out, borrow


def _operand_bits(widths: tuple[int, ...]) -> list[list[str]]:
    bits = []
    base = 0
    for w in widths:
        bits.append([f"in{base + i}" for i in range(w)])
        base += w
    return bits


def build_netlist(kind: str, width: int, n_inputs: int = 2) -> Netlist:
    """Gate-level reference circuit for one operation instance."""
    widths, out_width = op_signature(kind, width, n_inputs)
    ops = _operand_bits(widths)
    nb = _NB()
    w = width

    if kind in N_ARY:
        gate = {"and_n": "AND", "or_n": "OR", "xor_n": "XOR"}[kind]
        outs = [nb.reduce(gate, [ops[i][j] for i in range(len(ops))])
                for j in range(w)]
    elif kind in ("eq", "neq"):
        diff = nb.reduce("OR", [nb.XOR(a, b) for a, b in zip(ops[0], ops[1])])
        outs = [nb.NOT(diff) if kind == "eq" else diff]
    elif kind in ("gt", "lt"):
        A, B = (ops[0], ops[1]) if kind == "gt" else (ops[1], ops[0])
        g = "0"
        for a, b in zip(A, B):
            g = nb.OR(nb.AND(a, nb.NOT(b)),
                      nb.AND(nb.NOT(nb.XOR(a, b)), g))
        outs = [g]
    elif kind in ("max", "min"):
        g = "0"
        for a, b in zip(ops[0], ops[1]):
            g = nb.OR(nb.AND(a, nb.NOT(b)),
                      nb.AND(nb.NOT(nb.XOR(a, b)), g))
        if kind == "max":
            outs = [nb.mux(g, a, b) for a, b in zip(ops[0], ops[1])]
        else:
            outs = [nb.mux(g, b, a) for a, b in zip(ops[0], ops[1])]
    elif kind == "add":
        sums, carry = nb.ripple_add(ops[0], ops[1])
        outs = sums + [carry]
    elif kind == "sub":
        outs, _ = nb.ripple_sub(ops[0], ops[1])
    elif kind == "mul":
        acc = ["0"] * (2 * w)
        for i in range(w):
            carry = "0"
            for j in range(w):
                p = nb.AND(ops[0][j], ops[1][i])
                acc[i + j], carry = nb.full_add(acc[i + j], p, carry)
            k = i + w
            while carry != "0" and k < 2 * w:
                s = nb.XOR(acc[k], carry)
                carry = nb.AND(acc[k], carry)
                acc[k] = s
                k += 1
        outs = acc
    elif kind == "div":
        R = ["0"] * w
        Q = ["0"] * w
        for i in reversed(range(w)):
            shifted = [ops[0][i]] + R  # remainder << 1 | dividend bit, w+1 bits
            divisor = ops[1] + ["0"]
            diff, borrow = nb.ripple_sub(shifted, divisor)
            q = nb.NOT(borrow)
            Q[i] = q
            R = [nb.mux(q, diff[k], shifted[k]) for k in range(w)]
        outs = Q
    elif kind == "if_then_else":
        cond = ops[0][0]
        outs = [nb.mux(cond, a, b) for a, b in zip(ops[1], ops[2])]
    elif kind == "bitcount":
        cnt: list[str] = []
        for bit in ops[0]:
            carry = bit
            for k in range(len(cnt)):
                if carry == "0":
                    break
                s = nb.XOR(cnt[k], carry)
                carry = nb.AND(cnt[k], carry)
                cnt[k] = s
            if carry != "0":
                cnt.append(carry)
        outs = (cnt + ["0"] * out_width)[:out_width]
    else:  # relu: a non-negative result always has a zero top bit
        keep = nb.NOT(ops[0][w - 1])
        outs = [nb.AND(bit, keep) for bit in ops[0][: w - 1]] + ["0"]

    return Netlist(sum(widths), nb.gates, outs)


# --- compiled artifacts ---------------------------------------------------------


@dataclass(frozen=True)
class CompiledOp:
    kind: str
    width: int
    n_inputs: int
    operand_widths: tuple[int, ...]
    out_width: int
    netlist: Netlist
    graph: MajGraph
    rowmap: RowMap
    program: MicroProgram
    report: SynthesisReport
    verified_cases: int


def _verify_compiled(kind, width, widths, out_width, program, cfg, n_inputs) -> int:
    in_bits = sum(widths)
    if in_bits <= 12:
        cases = [tuple((t >> sum(widths[:k])) & ((1 << widths[k]) - 1)
                       for k in range(len(widths)))
                 for t in range(1 << in_bits)]
    else:
        rng = random.Random(f"{kind}:{width}:{n_inputs}")
        n_cases = 4096 if width <= 8 else 256
        cases = [tuple(rng.randrange(1 << wk) for wk in widths)
                 for _ in range(n_cases)]
    vcfg = SubarrayConfig(total_rows=cfg.total_rows, columns=len(cases),
                          data_row_count=cfg.data_row_count)
    lanes = [[case[k] for case in cases] for k in range(len(widths))]
    got = _run_lanes(program, widths, out_width, lanes, vcfg)
    for case, out in zip(cases, got):
        want = oracle(kind, width, case)
        if out != want:
            raise PumError(
                f"compiled {kind} width {width} disagrees with oracle on "
                f"{case}: got {out}, want {want}"
            )
    return len(cases)


def compile_op(kind: str, width: int, cfg: SubarrayConfig | None = None,
               effort: int = 2, n_inputs: int = 2) -> CompiledOp:
    """Run the full pipeline for one operation and verify the result."""
    widths, out_width = op_signature(kind, width, n_inputs)
    if cfg is None:
        cfg = SubarrayConfig()
    netlist = build_netlist(kind, width, n_inputs)
    graph, report = optimize(lower_to_maj(netlist), effort)
    rowmap = allocate_rows(graph, cfg)
    program = schedule(graph, rowmap, cfg, name=kind, width=width)
    cases = _verify_compiled(kind, width, widths, out_width, program, cfg, n_inputs)
    return CompiledOp(kind, width, n_inputs, widths, out_width, netlist,
                      graph, rowmap, program, report, cases)


_COMPILE_CACHE: dict[tuple, CompiledOp] = {}


def compile_op_cached(kind: str, width: int, cfg: SubarrayConfig | None = None,
                      effort: int = 2, n_inputs: int = 2) -> CompiledOp:
    if cfg is None:
        cfg = SubarrayConfig()
    key = (kind, width, effort, n_inputs, cfg.total_rows, cfg.data_row_count)
    hit = _COMPILE_CACHE.get(key)
    if hit is None:
        hit = compile_op(kind, width, cfg, effort, n_inputs)
        _COMPILE_CACHE[key] = hit
    return hit


def _run_lanes(program: MicroProgram, widths, out_width, inputs, cfg) -> list[int]:
    lanes = len(inputs[0]) if inputs else 0
    state = new_subarray(cfg)
    base = 0
    for k, w in enumerate(widths):
        to_vertical(HorizontalBlock(tuple(inputs[k]), w), state, base)
        base += w
    state.run_program(program)
    return list(to_horizontal(state, base, out_width, lanes).values)


def execute_op(compiled: CompiledOp, inputs: list[list[int]],
               cfg: SubarrayConfig | None = None) -> list[int]:
    """Transpose operands in, run the program, transpose results out."""
    if cfg is None:
        cfg = SubarrayConfig()
    if len(inputs) != len(compiled.operand_widths):
        raise ArityError(
            f"{compiled.kind} takes {len(compiled.operand_widths)} operand "
            f"lists, got {len(inputs)}"
        )
    lanes = len(inputs[0])
    for lst in inputs[1:]:
        if len(lst) != lanes:
            raise ArityError("operand lists must have equal lane counts")
    if lanes > cfg.columns:
        raise CapacityError(
            f"{lanes} lanes exceed the {cfg.columns}-column subarray"
        )
    if lanes == 0:
        return []
    return _run_lanes(compiled.program, compiled.operand_widths,
                      compiled.out_width, inputs, cfg)
