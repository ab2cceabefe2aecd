import pytest

from pumkit.codegen import SubarrayConfig, activation_count
from pumkit.errors import ArityError, CapacityError
from pumkit.logic import eval_netlist, truth_table
from pumkit.oplib import (
    N_ARY,
    OP_KINDS,
    build_netlist,
    compile_op,
    compile_op_cached,
    execute_op,
    op_signature,
    oracle,
)

CFG = SubarrayConfig(columns=64)


def run(kind, width, inputs, n_inputs=2, effort=2):
    compiled = compile_op_cached(kind, width, CFG, effort=effort, n_inputs=n_inputs)
    return execute_op(compiled, inputs, CFG)


class TestOracle:
    def test_division_by_zero_sentinel(self):
        assert oracle("div", 4, (9, 0)) == 15

    def test_subtraction_wraps(self):
        assert oracle("sub", 4, (3, 5)) == 14

    def test_three_way_xor(self):
        assert oracle("xor_n", 1, (1, 1, 1)) == 1

    def test_equality(self):
        assert oracle("eq", 4, (7, 7)) == 1
        assert oracle("eq", 4, (7, 6)) == 0

    def test_relu_clamps_negative(self):
        assert oracle("relu", 4, (0b1010,)) == 0
        assert oracle("relu", 4, (0b0101,)) == 0b0101

    def test_bitcount(self):
        assert oracle("bitcount", 8, (0xFF,)) == 8

    def test_add_reports_carry(self):
        assert oracle("add", 4, (15, 1)) == 16


class TestSignatures:
    def test_sixteen_kinds(self):
        assert len(OP_KINDS) == 16
        assert len(set(OP_KINDS)) == 16

    def test_add_has_carry_column(self):
        assert op_signature("add", 4) == ((4, 4), 5)

    def test_mul_full_product(self):
        assert op_signature("mul", 8) == ((8, 8), 16)

    def test_predication_takes_condition_lane(self):
        assert op_signature("if_then_else", 8) == ((1, 8, 8), 8)

    def test_bitcount_output_width(self):
        assert op_signature("bitcount", 8) == ((8,), 4)

    def test_n_ary(self):
        assert op_signature("and_n", 2, 5) == ((2,) * 5, 2)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            op_signature("nosuch", 4)

    def test_width_bounds(self):
        with pytest.raises(ValueError):
            op_signature("add", 0)
        with pytest.raises(ValueError):
            op_signature("add", 65)


class TestNetlists:
    @pytest.mark.parametrize("kind", OP_KINDS)
    def test_netlist_matches_oracle_exhaustively(self, kind):
        width = 3
        n_inputs = 3 if kind in N_ARY else 2
        widths, out_w = op_signature(kind, width, n_inputs)
        net = build_netlist(kind, width, n_inputs)
        assert net.input_count == sum(widths)
        in_bits = sum(widths)
        for t in range(1 << in_bits):
            operands = []
            shift = 0
            for w in widths:
                operands.append((t >> shift) & ((1 << w) - 1))
                shift += w
            bits = [(t >> i) & 1 for i in range(in_bits)]
            got = sum(b << i for i, b in enumerate(eval_netlist(net, bits)))
            assert got == oracle(kind, width, operands), (kind, operands)

    def test_adder_netlist_uses_xor_gates(self):
        net = build_netlist("add", 2)
        assert any(g.kind == "XOR" for g in net.gates)


class TestCompile:
    def test_add_verified_exhaustively(self):
        compiled = compile_op_cached("add", 4, CFG)
        assert compiled.verified_cases == 256

    def test_div_verified_exhaustively_including_zero(self):
        compiled = compile_op_cached("div", 4, CFG)
        assert compiled.verified_cases == 256  # all (a, b), b = 0 included

    def test_compiled_artifact_is_consistent(self):
        compiled = compile_op_cached("max", 4, CFG)
        assert compiled.program.name == "max"
        assert compiled.program.width == 4
        assert compiled.program.data_rows == 8 + 4
        assert compiled.rowmap.data_rows_used == 12

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            compile_op("nosuch", 4, CFG)

    def test_cache_returns_same_object(self):
        a = compile_op_cached("eq", 4, CFG)
        b = compile_op_cached("eq", 4, CFG)
        assert a is b


class TestExecute:
    def test_add_with_carry_lane(self):
        out = run("add", 4, [[5, 0, 15], [6, 0, 1]])
        assert [v & 15 for v in out] == [11, 0, 0]
        assert [v >> 4 for v in out] == [0, 0, 1]

    def test_if_then_else(self):
        assert run("if_then_else", 8, [[1, 0], [9, 9], [4, 4]]) == [9, 4]

    def test_max(self):
        assert run("max", 4, [[3, 12], [7, 2]]) == [7, 12]

    def test_min(self):
        assert run("min", 4, [[3, 12], [7, 2]]) == [3, 2]

    def test_div_sentinel_lane(self):
        assert run("div", 4, [[9, 9], [0, 3]]) == [15, 3]

    def test_n_ary_and(self):
        assert run("and_n", 1, [[1, 1], [1, 0], [1, 1]], n_inputs=3) == [1, 0]

    def test_simd_lanes_match_solo_runs(self, rng):
        compiled = compile_op_cached("mul", 4, CFG)
        lanes_a = [rng.randrange(16) for _ in range(16)]
        lanes_b = [rng.randrange(16) for _ in range(16)]
        together = execute_op(compiled, [lanes_a, lanes_b], CFG)
        solo = [execute_op(compiled, [[a], [b]], CFG)[0]
                for a, b in zip(lanes_a, lanes_b)]
        assert together == solo

    def test_lane_overflow(self):
        compiled = compile_op_cached("add", 4, CFG)
        with pytest.raises(CapacityError):
            execute_op(compiled, [[0] * 65, [0] * 65], CFG)

    def test_unequal_lanes(self):
        compiled = compile_op_cached("add", 4, CFG)
        with pytest.raises(ArityError):
            execute_op(compiled, [[1, 2], [1]], CFG)

    def test_wrong_operand_count(self):
        compiled = compile_op_cached("add", 4, CFG)
        with pytest.raises(ArityError):
            execute_op(compiled, [[1, 2]], CFG)

    def test_empty_lanes(self):
        compiled = compile_op_cached("add", 4, CFG)
        assert execute_op(compiled, [[], []], CFG) == []


class TestOptimizationBenefit:
    @pytest.mark.parametrize("kind", ["add", "sub", "mul", "div", "bitcount"])
    def test_effort2_strictly_beats_effort0(self, kind):
        e0 = compile_op_cached(kind, 4, CFG, effort=0)
        e2 = compile_op_cached(kind, 4, CFG, effort=2)
        assert activation_count(e2.program).total < activation_count(e0.program).total

    @pytest.mark.parametrize("kind", OP_KINDS)
    def test_effort2_never_worse(self, kind):
        n_inputs = 3 if kind in N_ARY else 2
        e0 = compile_op_cached(kind, 4, CFG, effort=0, n_inputs=n_inputs)
        e2 = compile_op_cached(kind, 4, CFG, effort=2, n_inputs=n_inputs)
        assert activation_count(e2.program).total <= activation_count(e0.program).total

    @pytest.mark.parametrize("kind", OP_KINDS)
    def test_static_estimate_never_worse(self, kind):
        from pumkit.codegen import estimate_cost_static

        n_inputs = 3 if kind in N_ARY else 2
        e0 = compile_op_cached(kind, 4, CFG, effort=0, n_inputs=n_inputs)
        e2 = compile_op_cached(kind, 4, CFG, effort=2, n_inputs=n_inputs)
        assert estimate_cost_static(e2.graph) <= estimate_cost_static(e0.graph)
