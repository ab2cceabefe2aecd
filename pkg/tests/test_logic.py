import pytest
from hypothesis import given
from hypothesis import strategies as st

from pumkit.errors import ArityError, NetlistFormatError, TableSizeError
from pumkit.logic import (
    Gate,
    MajGraph,
    Netlist,
    equivalent,
    eval_majgraph,
    eval_netlist,
    format_netlist,
    parse_netlist,
    truth_table,
)
from pumkit.oplib import build_netlist

from conftest import random_majgraph

import random


AND2 = Netlist(2, [Gate("g0", "AND", ("in0", "in1"))], ["g0"])
OR2 = Netlist(2, [Gate("g0", "OR", ("in0", "in1"))], ["g0"])
XOR2 = Netlist(2, [Gate("g0", "XOR", ("in0", "in1"))], ["g0"])
NOT1 = Netlist(1, [Gate("g0", "NOT", ("in0",))], ["g0"])

MAJ_AB0 = MajGraph(2, [(("in0", False), ("in1", False), ("0", False))], [("n0", False)])
MAJ_AB1 = MajGraph(2, [(("in0", False), ("in1", False), ("1", False))], [("n0", False)])
MAJ_ABC = MajGraph(3, [(("in0", False), ("in1", False), ("in2", False))], [("n0", False)])


class TestEvalNetlist:
    def test_and(self):
        assert eval_netlist(AND2, (1, 1)) == (1,)
        assert eval_netlist(AND2, (1, 0)) == (0,)

    def test_xor(self):
        assert eval_netlist(XOR2, (1, 0)) == (1,)
        assert eval_netlist(XOR2, (1, 1)) == (0,)

    def test_ripple_adder(self):
        adder = build_netlist("add", 4)
        a, b = 5, 6
        bits = [(a >> i) & 1 for i in range(4)] + [(b >> i) & 1 for i in range(4)]
        out = eval_netlist(adder, bits)
        total = sum(bit << i for i, bit in enumerate(out))
        assert total == 11
        assert out[4] == 0  # carry

    def test_arity_error(self):
        with pytest.raises(ArityError):
            eval_netlist(AND2, (1,))


class TestEvalMajGraph:
    def test_maj_with_zero(self):
        assert eval_majgraph(MAJ_AB0, (1, 1)) == (1,)
        assert eval_majgraph(MAJ_AB0, (1, 0)) == (0,)

    def test_maj_with_one(self):
        assert eval_majgraph(MAJ_AB1, (0, 1)) == (1,)

    def test_complementary_pair_dominates(self):
        g = MajGraph(2, [(("in0", False), ("in0", True), ("in1", False))],
                     [("n0", False)])
        for a in (0, 1):
            assert eval_majgraph(g, (a, 1)) == (1,)
            assert eval_majgraph(g, (a, 0)) == (0,)

    def test_arity_error(self):
        with pytest.raises(ArityError):
            eval_majgraph(MAJ_ABC, (1, 0))

    @given(st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)),
           st.tuples(st.booleans(), st.booleans(), st.booleans()))
    def test_maj_node_truth(self, bits, negs):
        g = MajGraph(3, [tuple((f"in{i}", negs[i]) for i in range(3))],
                     [("n0", False)])
        effective = [bits[i] ^ negs[i] for i in range(3)]
        assert eval_majgraph(g, bits) == (int(sum(effective) >= 2),)

    def test_double_complement_is_identity(self, rng):
        g = random_majgraph(rng)
        ref, neg = g.outputs[0]
        twice = MajGraph(g.input_count, g.nodes,
                         [(ref, (not (not neg)))] + list(g.outputs[1:]))
        assert truth_table(g) == truth_table(twice)


class TestTruthTable:
    def test_and_table(self):
        assert truth_table(AND2).rows() == [(0,), (0,), (0,), (1,)]

    def test_not_table(self):
        assert truth_table(NOT1).rows() == [(1,), (0,)]

    def test_maj_has_four_ones(self):
        assert truth_table(MAJ_ABC).ones() == 4

    def test_size_guard(self):
        wide = Netlist(17, [], ["in0"])
        with pytest.raises(TableSizeError):
            truth_table(wide)

    def test_agrees_with_eval(self, rng):
        for _ in range(20):
            g = random_majgraph(rng, n_inputs=3, n_nodes=6)
            table = truth_table(g)
            for t in range(8):
                bits = [(t >> i) & 1 for i in range(3)]
                assert table.row(t) == g.eval(bits)

    def test_eval_deterministic(self, rng):
        g = random_majgraph(rng)
        bits = [rng.randint(0, 1) for _ in range(g.input_count)]
        assert g.eval(bits) == g.eval(bits)


class TestEquivalent:
    def test_and_is_maj_with_zero(self):
        assert equivalent(AND2, MAJ_AB0)

    def test_or_is_maj_with_one(self):
        assert equivalent(OR2, MAJ_AB1)

    def test_and_is_not_or(self):
        assert not equivalent(AND2, OR2)

    def test_input_mismatch(self):
        with pytest.raises(ArityError):
            equivalent(AND2, NOT1)

    def test_output_mismatch(self):
        two_out = Netlist(2, [Gate("g0", "AND", ("in0", "in1"))], ["g0", "g0"])
        with pytest.raises(ArityError):
            equivalent(AND2, two_out)


class TestTextFormat:
    TEXT = "inputs 2\ng0 = AND in0 in1\ng1 = NOT g0\noutputs g1\n"

    def test_round_trip(self):
        n = parse_netlist(self.TEXT)
        assert format_netlist(n) == self.TEXT
        assert parse_netlist(format_netlist(n)).gates == n.gates

    def test_comments_and_blanks(self):
        n = parse_netlist("# nand\ninputs 2\n\ng0 = AND in0 in1  # both\noutputs g0\n")
        assert n.input_count == 2 and len(n.gates) == 1

    @pytest.mark.parametrize("text", [
        "g0 = AND in0 in1\noutputs g0\n",          # missing header
        "inputs 2\ng0 = AND in0 in1\n",            # missing footer
        "inputs 2\ng0 = NAND in0 in1\noutputs g0\n",   # unknown kind
        "inputs 2\ng0 = AND in0\noutputs g0\n",        # bad arity
        "inputs 2\ng0 = AND in0 in5\noutputs g0\n",    # input out of range
        "inputs 2\ng0 = AND in0 g1\noutputs g0\n",     # forward reference
        "inputs 2\ng0 = AND in0 in1\ng0 = OR in0 in1\noutputs g0\n",  # dup id
        "inputs 2\ng0 = AND in0 in1\noutputs g0\ng1 = OR in0 in1\n",  # after footer
    ])
    def test_rejects_malformed(self, text):
        with pytest.raises(NetlistFormatError):
            parse_netlist(text)


def test_netlist_immutable():
    with pytest.raises(AttributeError):
        AND2.input_count = 3


def test_majgraph_validates_structure():
    with pytest.raises(ArityError):
        MajGraph(2, [(("in0", False), ("in1", False))], [("n0", False)])
    with pytest.raises(NetlistFormatError):
        MajGraph(1, [(("in0", False), ("n1", False), ("0", False))], [("n0", False)])
