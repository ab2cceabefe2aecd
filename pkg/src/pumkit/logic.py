"""Gate-level and majority-level logic representations.

Two DAG forms carry an operation through the pipeline:

* ``Netlist``  -- AND/OR/NOT/XOR gates; the functional reference for an
  operation and the input to lowering.
* ``MajGraph`` -- three-input majority nodes with complementable edges;
  the only form the row-activation backend accepts.

Both evaluate bit-parallel: a value is a Python int whose bit ``c`` is
lane ``c``.  Truth tables and equivalence checks ride on the same bulk
evaluator with standard enumeration masks, so exhaustive comparison is
cheap up to the 16-input guard.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import ArityError, NetlistFormatError, TableSizeError

MAX_TABLE_INPUTS = 16

GATE_ARITY = {"AND": 2, "OR": 2, "XOR": 2, "NOT": 1}

CONST_ZERO = "0"
CONST_ONE = "1"

# An edge is (ref, complemented).  Refs are "0", "1", "in<i>", and
# "g<j>" / "n<j>" for netlist gates / majority nodes.
Edge = tuple[str, bool]

_IN_RE = re.compile(r"^in(\d+)$")
_GATE_RE = re.compile(r"^g(\d+)$")
_NODE_RE = re.compile(r"^n(\d+)$")


def input_index(ref: str) -> int | None:
    m = _IN_RE.match(ref)
    return int(m.group(1)) if m else None


def node_index(ref: str) -> int | None:
    m = _NODE_RE.match(ref)
    return int(m.group(1)) if m else None


def _maj(x: int, y: int, z: int) -> int:
    return (x & y) | (x & z) | (y & z)


def _enum_masks(n: int) -> list[int]:
    """Enumeration patterns: bit t of mask i equals bit i of t."""
    total = 1 << n
    all_ones = (1 << total) - 1
    masks = []
    for i in range(n):
        block = 1 << i
        masks.append((all_ones // ((1 << block) + 1)) << block)
    return masks


@dataclass(frozen=True)
class Gate:
    gid: str
    kind: str
    operands: tuple[str, ...]


class Netlist:
    """Topologically ordered AND/OR/NOT/XOR gate DAG."""

    __slots__ = ("input_count", "gates", "outputs", "_order")

    def __init__(self, input_count: int, gates: Sequence[Gate], outputs: Sequence[str]):
        if input_count < 0:
            raise ArityError("input count must be non-negative")
        defined: dict[str, int] = {}
        for pos, g in enumerate(gates):
            if _GATE_RE.match(g.gid) is None:
                raise NetlistFormatError(f"bad gate id {g.gid!r}")
            if g.gid in defined:
                raise NetlistFormatError(f"duplicate gate id {g.gid!r}")
            if g.kind not in GATE_ARITY:
                raise NetlistFormatError(f"unknown gate kind {g.kind!r}")
            if len(g.operands) != GATE_ARITY[g.kind]:
                raise ArityError(
                    f"{g.gid}: {g.kind} takes {GATE_ARITY[g.kind]} operands, got {len(g.operands)}"
                )
            for ref in g.operands:
                self._check_ref(ref, input_count, defined, g.gid)
            defined[g.gid] = pos
        for ref in outputs:
            self._check_ref(ref, input_count, defined, "outputs")
        object.__setattr__(self, "input_count", input_count)
        object.__setattr__(self, "gates", tuple(gates))
        object.__setattr__(self, "outputs", tuple(outputs))
        object.__setattr__(self, "_order", defined)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("Netlist is immutable")

    @staticmethod
    def _check_ref(ref: str, input_count: int, defined: dict[str, int], where: str):
        if ref in (CONST_ZERO, CONST_ONE):
            return
        idx = input_index(ref)
        if idx is not None:
            if idx >= input_count:
                raise NetlistFormatError(f"{where}: input {ref!r} out of range")
            return
        if _GATE_RE.match(ref):
            if ref not in defined:
                raise NetlistFormatError(f"{where}: reference to undefined gate {ref!r}")
            return
        raise NetlistFormatError(f"{where}: unknown reference {ref!r}")

    @property
    def output_count(self) -> int:
        return len(self.outputs)

    def eval_bulk(self, words: Sequence[int], lanes: int) -> list[int]:
        """Evaluate all lanes at once; word i packs input i across lanes."""
        if len(words) != self.input_count:
            raise ArityError(f"expected {self.input_count} input words, got {len(words)}")
        mask = (1 << lanes) - 1
        env: dict[str, int] = {CONST_ZERO: 0, CONST_ONE: mask}
        for i, w in enumerate(words):
            env[f"in{i}"] = w & mask
        for g in self.gates:
            a = env[g.operands[0]]
            if g.kind == "NOT":
                env[g.gid] = a ^ mask
                continue
            b = env[g.operands[1]]
            if g.kind == "AND":
                env[g.gid] = a & b
            elif g.kind == "OR":
                env[g.gid] = a | b
            else:  # XOR
                env[g.gid] = a ^ b
        return [env[ref] for ref in self.outputs]

    def eval(self, assignment: Sequence[int]) -> tuple[int, ...]:
        if len(assignment) != self.input_count:
            raise ArityError(
                f"expected {self.input_count} input bits, got {len(assignment)}"
            )
        out = self.eval_bulk([b & 1 for b in assignment], 1)
        return tuple(out)


class MajGraph:
    """Majority-node DAG with complementable edges.

    Node k is referenced as ``n<k>``; each node holds exactly three
    operand edges.  Complements live on edges, never as explicit nodes.
    """

    __slots__ = ("input_count", "nodes", "outputs")

    def __init__(
        self,
        input_count: int,
        nodes: Sequence[tuple[Edge, Edge, Edge]],
        outputs: Sequence[Edge],
    ):
        if input_count < 0:
            raise ArityError("input count must be non-negative")
        for k, edges in enumerate(nodes):
            if len(edges) != 3:
                raise ArityError(f"n{k}: majority node takes exactly 3 edges")
            for ref, neg in edges:
                self._check_ref(ref, input_count, k, f"n{k}")
        for ref, neg in outputs:
            self._check_ref(ref, input_count, len(nodes), "outputs")
        object.__setattr__(self, "input_count", input_count)
        object.__setattr__(self, "nodes", tuple(tuple(e) for e in nodes))
        object.__setattr__(self, "outputs", tuple(outputs))

    def __setattr__(self, name, value):
        raise AttributeError("MajGraph is immutable")

    @staticmethod
    def _check_ref(ref: str, input_count: int, before: int, where: str):
        if ref in (CONST_ZERO, CONST_ONE):
            return
        idx = input_index(ref)
        if idx is not None:
            if idx >= input_count:
                raise NetlistFormatError(f"{where}: input {ref!r} out of range")
            return
        idx = node_index(ref)
        if idx is not None:
            if idx >= before:
                raise NetlistFormatError(f"{where}: forward reference {ref!r}")
            return
        raise NetlistFormatError(f"{where}: unknown reference {ref!r}")

    @property
    def output_count(self) -> int:
        return len(self.outputs)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def depth(self) -> int:
        """Longest node chain from any input/constant to any output."""
        d = [0] * len(self.nodes)
        for k, edges in enumerate(self.nodes):
            best = 0
            for ref, _ in edges:
                j = node_index(ref)
                if j is not None and d[j] > best:
                    best = d[j]
            d[k] = best + 1
        out = 0
        for ref, _ in self.outputs:
            j = node_index(ref)
            if j is not None and d[j] > out:
                out = d[j]
        return out

    def eval_bulk(self, words: Sequence[int], lanes: int) -> list[int]:
        if len(words) != self.input_count:
            raise ArityError(f"expected {self.input_count} input words, got {len(words)}")
        mask = (1 << lanes) - 1
        vals: dict[str, int] = {CONST_ZERO: 0, CONST_ONE: mask}
        for i, w in enumerate(words):
            vals[f"in{i}"] = w & mask
        for k, edges in enumerate(self.nodes):
            ops = []
            for ref, neg in edges:
                v = vals[ref]
                ops.append(v ^ mask if neg else v)
            vals[f"n{k}"] = _maj(*ops)
        out = []
        for ref, neg in self.outputs:
            v = vals[ref]
            out.append(v ^ mask if neg else v)
        return out

    def eval(self, assignment: Sequence[int]) -> tuple[int, ...]:
        if len(assignment) != self.input_count:
            raise ArityError(
                f"expected {self.input_count} input bits, got {len(assignment)}"
            )
        return tuple(self.eval_bulk([b & 1 for b in assignment], 1))


Circuit = Union[Netlist, MajGraph]


def eval_netlist(netlist: Netlist, assignment: Sequence[int]) -> tuple[int, ...]:
    return netlist.eval(assignment)


def eval_majgraph(graph: MajGraph, assignment: Sequence[int]) -> tuple[int, ...]:
    return graph.eval(assignment)


@dataclass(frozen=True)
class TruthTable:
    """Exhaustive function table; mask j packs output j over all 2^n rows."""

    input_count: int
    masks: tuple[int, ...]

    def __len__(self) -> int:
        return 1 << self.input_count

    def row(self, t: int) -> tuple[int, ...]:
        return tuple((m >> t) & 1 for m in self.masks)

    def rows(self) -> list[tuple[int, ...]]:
        return [self.row(t) for t in range(len(self))]

    def ones(self, output: int = 0) -> int:
        return bin(self.masks[output]).count("1")


def truth_table(circuit: Circuit) -> TruthTable:
    n = circuit.input_count
    if n > MAX_TABLE_INPUTS:
        raise TableSizeError(
            f"refusing exhaustive table for {n} inputs (limit {MAX_TABLE_INPUTS})"
        )
    masks = circuit.eval_bulk(_enum_masks(n), 1 << n)
    return TruthTable(n, tuple(masks))


def equivalent(x: Circuit, y: Circuit) -> bool:
    """True iff the two circuits have identical truth tables."""
    if x.input_count != y.input_count:
        raise ArityError(
            f"input counts differ: {x.input_count} vs {y.input_count}"
        )
    if x.output_count != y.output_count:
        raise ArityError(
            f"output counts differ: {x.output_count} vs {y.output_count}"
        )
    return truth_table(x) == truth_table(y)


# --- netlist text format ------------------------------------------------
#
#   inputs 2
#   g0 = AND in0 in1
#   g1 = NOT g0
#   outputs g1
#
# '#' starts a comment; blank lines are ignored.


def parse_netlist(text: str) -> Netlist:
    input_count = None
    gates: list[Gate] = []
    outputs: list[str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if input_count is None:
            if toks[0] != "inputs" or len(toks) != 2 or not toks[1].isdigit():
                raise NetlistFormatError(f"line {lineno}: expected 'inputs <n>' header")
            input_count = int(toks[1])
            continue
        if outputs is not None:
            raise NetlistFormatError(f"line {lineno}: content after outputs footer")
        if toks[0] == "outputs":
            outputs = toks[1:]
            continue
        if len(toks) < 4 or toks[1] != "=":
            raise NetlistFormatError(f"line {lineno}: expected '<gate> = <KIND> <ops...>'")
        gid, kind, ops = toks[0], toks[2], tuple(toks[3:])
        if kind not in GATE_ARITY:
            raise NetlistFormatError(f"line {lineno}: unknown gate kind {kind!r}")
        gates.append(Gate(gid, kind, ops))
    if input_count is None:
        raise NetlistFormatError("missing 'inputs <n>' header")
    if outputs is None:
        raise NetlistFormatError("missing 'outputs ...' footer")
    try:
        return Netlist(input_count, gates, outputs)
    except (NetlistFormatError, ArityError) as e:
        raise NetlistFormatError(str(e)) from e


def format_netlist(netlist: Netlist) -> str:
    lines = [f"inputs {netlist.input_count}"]
    for g in netlist.gates:
        lines.append(f"{g.gid} = {g.kind} {' '.join(g.operands)}")
    lines.append("outputs " + " ".join(netlist.outputs))
    return "\n".join(lines) + "\n"
