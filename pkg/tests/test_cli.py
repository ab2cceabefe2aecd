import random

import pytest

from pumkit.cli import main
from pumkit.codegen import format_microprogram, parse_microprogram
from pumkit.oplib import oracle


def write(path, lines):
    path.write_text("\n".join(str(x) for x in lines) + "\n")


class TestCompile:
    def test_emits_parseable_file(self, tmp_path, capsys):
        out = tmp_path / "add4.up"
        assert main(["compile", "--op", "add", "--width", "4",
                     "-o", str(out)]) == 0
        text = out.read_text()
        assert text.startswith("UP/1\nop=add width=4 data_rows=13\n")
        assert format_microprogram(parse_microprogram(text)) == text
        stdout = capsys.readouterr().out
        assert "activations" in stdout
        assert "not hardware-calibrated" in stdout

    def test_unknown_op_exits_2(self, tmp_path, capsys):
        assert main(["compile", "--op", "nosuch", "--width", "4",
                     "-o", str(tmp_path / "x.up")]) == 2

    def test_bad_width_exits_2(self, tmp_path):
        assert main(["compile", "--op", "add", "--width", "0",
                     "-o", str(tmp_path / "x.up")]) == 2

    def test_capacity_error_exits_3(self, tmp_path):
        assert main(["--set", "subarray.rows=16", "--set", "subarray.data_rows=4",
                     "compile", "--op", "add", "--width", "4",
                     "-o", str(tmp_path / "x.up")]) == 3

    def test_n_input_logic(self, tmp_path):
        out = tmp_path / "and4.up"
        assert main(["compile", "--op", "and_n", "--inputs", "4",
                     "--width", "1", "-o", str(out)]) == 0
        prog = parse_microprogram(out.read_text())
        assert prog.name == "and_n"
        assert prog.data_rows == 5  # four 1-bit operands + one output


class TestRun:
    def compile_add(self, tmp_path):
        out = tmp_path / "add4.up"
        assert main(["compile", "--op", "add", "--width", "4",
                     "-o", str(out)]) == 0
        return out

    def test_single_lane_add(self, tmp_path, capsys):
        prog = self.compile_add(tmp_path)
        a, b, out = tmp_path / "a.txt", tmp_path / "b.txt", tmp_path / "out.txt"
        write(a, [5])
        write(b, [6])
        assert main(["run", str(prog), "--inputs", str(a), str(b),
                     "-o", str(out)]) == 0
        assert out.read_text() == "11\n"
        assert "activations" in capsys.readouterr().out

    def test_mismatched_lane_counts_exit_3(self, tmp_path):
        prog = self.compile_add(tmp_path)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        write(a, [5, 7])
        write(b, [6])
        assert main(["run", str(prog), "--inputs", str(a), str(b)]) == 3

    def test_randomized_lanes_match_host_addition(self, tmp_path):
        prog = self.compile_add(tmp_path)
        rng = random.Random(7)
        xs = [rng.randrange(16) for _ in range(64)]
        ys = [rng.randrange(16) for _ in range(64)]
        a, b, out = tmp_path / "a.txt", tmp_path / "b.txt", tmp_path / "o.txt"
        write(a, xs)
        write(b, ys)
        assert main(["run", str(prog), "--inputs", str(a), str(b),
                     "-o", str(out)]) == 0
        got = [int(l) for l in out.read_text().splitlines()]
        assert got == [x + y for x, y in zip(xs, ys)]

    def test_n_ary_run_derives_operand_count(self, tmp_path):
        prog = tmp_path / "or3.up"
        assert main(["compile", "--op", "or_n", "--inputs", "3",
                     "--width", "2", "-o", str(prog)]) == 0
        files = []
        for i, vals in enumerate(([1, 2], [2, 0], [0, 1])):
            f = tmp_path / f"v{i}.txt"
            write(f, vals)
            files.append(str(f))
        out = tmp_path / "out.txt"
        assert main(["run", str(prog), "--inputs", *files, "-o", str(out)]) == 0
        assert [int(l) for l in out.read_text().splitlines()] == [3, 3]

    def test_bad_program_file_exits_2(self, tmp_path):
        bad = tmp_path / "bad.up"
        bad.write_text("not a program\n")
        a = tmp_path / "a.txt"
        write(a, [1])
        assert main(["run", str(bad), "--inputs", str(a)]) == 2

    def test_bad_operand_value_exits_2(self, tmp_path):
        prog = self.compile_add(tmp_path)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        a.write_text("5\nbogus\n")
        write(b, [6, 6])
        assert main(["run", str(prog), "--inputs", str(a), str(b)]) == 2

    def test_out_of_range_operand_exits_3(self, tmp_path):
        prog = self.compile_add(tmp_path)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        write(a, [16])
        write(b, [6])
        assert main(["run", str(prog), "--inputs", str(a), str(b)]) == 3


class TestClassify:
    HEADER = "function,llc_mpki,temporal_locality,arithmetic_intensity,lfmr@1,lfmr@16"
    ARCHETYPES = [
        "stream,50,0.03,0.05,0.95,0.93",
        "chase,2,0.05,0.05,0.92,0.90",
        "tile,2,0.05,0.05,0.90,0.30",
        "share,3,0.85,0.05,0.20,0.50",
        "hot,1,0.90,0.05,0.10,0.10",
        "dense,1,0.80,2.0,0.10,0.10",
    ]

    def test_archetype_fixture_yields_six_classes(self, tmp_path):
        src = tmp_path / "m.csv"
        out = tmp_path / "labeled.csv"
        src.write_text("\n".join([self.HEADER] + self.ARCHETYPES) + "\n")
        assert main(["classify", str(src), "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        classes = [l.split(",")[6] for l in lines[1:]]
        assert len(set(classes)) == 6

    def test_empty_file(self, tmp_path, capsys):
        src = tmp_path / "empty.csv"
        src.write_text("")
        assert main(["classify", str(src)]) == 0
        assert capsys.readouterr().out == ""

    def test_bad_header_exits_2(self, tmp_path):
        src = tmp_path / "m.csv"
        src.write_text("who,what\n")
        assert main(["classify", str(src)]) == 2

    def test_out_of_range_exits_3(self, tmp_path):
        src = tmp_path / "m.csv"
        src.write_text(f"{self.HEADER}\nf,1,1.5,0.1,0.5,0.5\n")
        assert main(["classify", str(src)]) == 3

    def test_threshold_override_changes_labels(self, tmp_path):
        src = tmp_path / "m.csv"
        src.write_text(f"{self.HEADER}\nf,5,0.03,0.05,0.95,0.93\n")
        out1, out2 = tmp_path / "o1.csv", tmp_path / "o2.csv"
        assert main(["classify", str(src), "-o", str(out1)]) == 0
        assert main(["--set", "classify.mpki_high=4",
                     "classify", str(src), "-o", str(out2)]) == 0
        assert "dram-latency-bound" in out1.read_text()
        assert "dram-bandwidth-bound" in out2.read_text()


class TestTranspose:
    def test_round_trip(self, tmp_path):
        values = tmp_path / "v.txt"
        rows = tmp_path / "rows.txt"
        back = tmp_path / "back.txt"
        write(values, [5, 0, 15, 9])
        assert main(["transpose", str(values), "--width", "4",
                     "-o", str(rows)]) == 0
        text = rows.read_text().splitlines()
        assert text == ["1011", "0010", "1010", "0011"]  # bit i of value j at (i, j)
        assert main(["transpose", str(rows), "--width", "4", "--reverse",
                     "-o", str(back)]) == 0
        assert back.read_text() == values.read_text()


class TestConfigHandling:
    def test_config_file_applies(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text(
            "# tiny array\n"
            "subarray.rows = 64\n"
            "subarray.columns = 16\n"
            "cost.t_aap_ns = 10\n"
        )
        out = tmp_path / "eq.up"
        assert main(["--config", str(cfgfile), "compile", "--op", "eq",
                     "--width", "2", "-o", str(out)]) == 0

    def test_unknown_key_exits_2(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("subarray.banana = 7\n")
        out = tmp_path / "x.up"
        assert main(["--config", str(cfgfile), "compile", "--op", "eq",
                     "--width", "2", "-o", str(out)]) == 2

    def test_bad_override_exits_2(self, tmp_path):
        assert main(["--set", "cost.t_aap_ns=fast", "compile", "--op", "eq",
                     "--width", "2", "-o", str(tmp_path / "x.up")]) == 2
