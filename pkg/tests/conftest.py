import random

import pytest

from pumkit.logic import Gate, MajGraph, Netlist

GATE_KINDS = ("AND", "OR", "XOR", "NOT")

_acceptance_lines: list[str] = []


def record_acceptance(line: str):
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.line(line)


def random_majgraph(rng: random.Random, n_inputs: int = 4, n_nodes: int = 8,
                    n_outputs: int | None = None) -> MajGraph:
    refs = ["0", "1"] + [f"in{i}" for i in range(n_inputs)]
    nodes = []
    for k in range(n_nodes):
        nodes.append(tuple(
            (rng.choice(refs), rng.random() < 0.3) for _ in range(3)
        ))
        refs.append(f"n{k}")
    n_out = n_outputs if n_outputs is not None else rng.randint(1, 3)
    outputs = [(rng.choice(refs), rng.random() < 0.3) for _ in range(n_out)]
    return MajGraph(n_inputs, nodes, outputs)


def random_netlist(rng: random.Random, n_inputs: int = 4, n_gates: int = 10,
                   n_outputs: int | None = None) -> Netlist:
    refs = ["0", "1"] + [f"in{i}" for i in range(n_inputs)]
    gates = []
    for k in range(n_gates):
        kind = rng.choice(GATE_KINDS)
        arity = 1 if kind == "NOT" else 2
        gates.append(Gate(f"g{k}", kind,
                          tuple(rng.choice(refs) for _ in range(arity))))
        refs.append(f"g{k}")
    n_out = n_outputs if n_outputs is not None else rng.randint(1, 3)
    outputs = [rng.choice(refs) for _ in range(n_out)]
    return Netlist(n_inputs, gates, outputs)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xDA7A)
