import hashlib
import json
import os
import subprocess
import sys

from geosim.cli import main

RUN = [sys.executable, "-m", "geosim.cli"]


def invoke(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRun:
    def test_identity_ten_snapshot_blocks(self, capsys, tmp_path):
        out = tmp_path / "t.jsonl"
        code, _stdout, err = invoke(
            ["run", "--scenario", "scenarios/identity.gsim",
             "--out", str(out)], capsys)
        assert code == 0
        lines = out.read_text().splitlines()
        recs = [json.loads(l) for l in lines]
        assert recs[0]["record"] == "header" and recs[0]["seed"] == 0
        ticks = sorted({r["tick"] for r in recs if r["record"] == "automaton"})
        assert ticks == list(range(1, 11))
        states = {r["state"]["level"] for r in recs if r["record"] == "automaton"}
        assert states == {1}
        assert "final tick 10" in err

    def test_same_seed_identical_digests(self, capsys, tmp_path):
        digests = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.jsonl"
            code, _o, _e = invoke(
                ["run", "--scenario", "scenarios/schelling.gsim",
                 "--ticks", "5", "--seed", "21", "--out", str(out)], capsys)
            assert code == 0
            digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
        assert digests[0] == digests[1]

    def test_stdout_run_is_deterministic(self, capsys):
        code1, out1, _ = invoke(
            ["run", "--scenario", "scenarios/majority.gsim"], capsys)
        code2, out2, _ = invoke(
            ["run", "--scenario", "scenarios/majority.gsim"], capsys)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_invalid_scenario_exit_1_no_output(self, capsys, tmp_path):
        bad = tmp_path / "bad.gsim"
        bad.write_text("automaton x {\n  transition ghost\n}\nrun {\n  ticks 1\n}\n")
        out = tmp_path / "t.jsonl"
        code, stdout, err = invoke(
            ["run", "--scenario", str(bad), "--out", str(out)], capsys)
        assert code == 1
        assert not out.exists()
        assert "ghost" in err and stdout == ""

    def test_missing_file_exit_1(self, capsys):
        code, _o, err = invoke(["run", "--scenario", "nope.gsim"], capsys)
        assert code == 1 and "error" in err

    def test_runtime_rule_failure_exit_2(self, capsys, tmp_path):
        bad = tmp_path / "crash.gsim"
        bad.write_text(
            "georef lattice 3 3 clamp\n"
            "rule t transition {\n  v := 1 / self.v\n}\n"
            "automaton a {\n  state v : number = 0\n  transition t\n}\n"
            "place a at 1 1\n"
            "run {\n  ticks 2\n}\n")
        code, _o, err = invoke(["run", "--scenario", str(bad)], capsys)
        assert code == 2
        assert "division by zero" in err

    def test_table_format_output(self, capsys):
        code, out, _ = invoke(
            ["run", "--scenario", "scenarios/identity.gsim",
             "--format", "table"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("#")
        assert any("automaton" in l and "level=1" in l for l in lines)
        code2, out2, _ = invoke(
            ["run", "--scenario", "scenarios/identity.gsim",
             "--format", "table"], capsys)
        assert out2 == out

    def test_trace_output(self, capsys, tmp_path):
        trace = tmp_path / "events.jsonl"
        code, _o, _e = invoke(
            ["run", "--scenario", "scenarios/identity.gsim",
             "--out", str(tmp_path / "t.jsonl"), "--trace", str(trace)],
            capsys)
        assert code == 0
        events = [json.loads(l) for l in trace.read_text().splitlines()]
        assert len(events) == 10
        assert all(e["record"] == "event" for e in events)


class TestCheck:
    def test_valid_file_exit_0(self, capsys):
        code, out, _ = invoke(["check", "scenarios/patrol.gsim"], capsys)
        assert code == 0

    def test_rule_type_error_exit_1_names_rule(self, capsys, tmp_path):
        bad = tmp_path / "bad.gsim"
        bad.write_text(
            "georef lattice 3 3 clamp\n"
            "rule t transition {\n  v := self.v + true\n}\n"
            "automaton a {\n  state v : number = 0\n  transition t\n}\n"
            "run {\n  ticks 1\n}\n")
        code, out, _ = invoke(["check", str(bad)], capsys)
        assert code == 1
        assert "a/t" in out and "bool" in out

    def test_missing_file_exit_1(self, capsys):
        code, _o, err = invoke(["check", "missing.gsim"], capsys)
        assert code == 1


class TestConformance:
    def test_no_args_reproduces_checked_in_matrix(self, capsys):
        from geosim.conformance.matrix import shipped_matrix_text
        code, out, _ = invoke(["conformance"], capsys)
        assert code == 0
        assert out == shipped_matrix_text()

    def test_scenario_argument_prints_profile_row(self, capsys):
        code, out, _ = invoke(["conformance", "scenarios/patrol.gsim"], capsys)
        assert code == 0
        assert "scenario" in out
        assert "goals" in out

    def test_methodology_argument(self, capsys):
        code, out, _ = invoke(["conformance", "GAIA"], capsys)
        assert code == 0
        assert "GAIA does not provide details" in out

    def test_bogus_name_exit_1(self, capsys):
        code, _o, err = invoke(["conformance", "WATERFALL"], capsys)
        assert code == 1

    def test_records_format_is_machine_readable(self, capsys):
        code, out, _ = invoke(["conformance", "--format", "records"], capsys)
        assert code == 0
        recs = [json.loads(l) for l in out.splitlines()]
        assert len(recs) == 17 * 9
        marks = {r["mark"] for r in recs}
        assert marks == {"covered", "uncovered", "annotated"}


class TestEntryPoint:
    def test_console_script_runs(self):
        proc = subprocess.run(
            RUN + ["conformance"], capture_output=True, text=True,
            cwd=os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
        assert proc.returncode == 0
        assert "MAS-CommonKADS" in proc.stdout
