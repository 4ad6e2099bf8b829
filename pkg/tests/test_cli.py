"""End-to-end checks of the cbtopo command line."""
import json

import pytest

from cbtopo.cli import main
from cbtopo.serialize import dumps, task_to_obj

from helpers import cx, identity_task, vtx


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def task_file(tmp_path, capsys):
    """Colored 3-chain task written by the build command itself."""
    path = tmp_path / "task.json"
    code, out, err = run_cli(["build", "--n", "2", "--out", str(path)], capsys)
    assert code == 0
    return path


class TestBuild:
    def test_stdout_json_with_stderr_summary(self, capsys):
        code, out, err = run_cli(["build", "--n", "1"], capsys)
        assert code == 0
        obj = json.loads(out)
        assert set(obj) == {"input", "output", "carrier", "colored"}
        assert obj["colored"] is True
        assert "input: vertices=6 facets=9 dimension=1" in err
        assert "carrier: entries=15" in err

    def test_out_file_with_stdout_summary(self, tmp_path, capsys):
        path = tmp_path / "t.json"
        code, out, err = run_cli(["build", "--n", "2", "--out", str(path)], capsys)
        assert code == 0
        assert "input: vertices=9 facets=27 dimension=2" in out
        assert err == ""
        obj = json.loads(path.read_text())
        assert len(obj["carrier"]) == 63

    def test_colorless_flag(self, capsys):
        code, out, err = run_cli(["build", "--n", "2", "--colorless"], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["colored"] is False
        verdicts = {v["value"] for f in obj["output"]["facets"] for v in f}
        assert verdicts == {"0", "1"}
        assert "colored: false" in err

    @pytest.mark.parametrize("argv", [["build", "--n", "0"],
                                      ["build", "--n", "2", "--block-index", "-1"]])
    def test_parameter_errors(self, argv, capsys):
        code, out, err = run_cli(argv, capsys)
        assert code == 2
        assert err.startswith("error:")


class TestAnalyze:
    def test_colored_claims_confirmed(self, task_file, capsys):
        code, out, err = run_cli(["analyze", str(task_file), "--t", "1"], capsys)
        assert code == 0
        assert "carrier monotonic: PASS" in out
        assert "carrier rigid: PASS" in out
        assert "carrier name-preserving: PASS" in out
        assert "obstruction: unsolvable_by_obstruction" in out
        assert "claims: CONFIRMED (4/4)" in out

    def test_colorless_claims_confirmed(self, tmp_path, capsys):
        path = tmp_path / "flat.json"
        assert run_cli(["build", "--n", "2", "--colorless", "--out", str(path)], capsys)[0] == 0
        code, out, err = run_cli(["analyze", str(path), "--t", "1"], capsys)
        assert code == 0
        assert "claims: CONFIRMED (2/2)" in out
        assert "rigid" not in out

    def test_component_acyclicity_reported(self, task_file, capsys):
        _, out, _ = run_cli(["analyze", str(task_file), "--t", "1"], capsys)
        assert "output component 0: reduced_betti=[0, 0, 0]" in out
        assert "output component 1: reduced_betti=[0, 0, 0]" in out

    def test_broken_carrier_fails_claims(self, task_file, tmp_path, capsys):
        obj = json.loads(task_file.read_text())
        all_zero = [{"chain": c, "block": 0, "value": "0"} for c in range(3)]
        hits = 0
        for entry in obj["carrier"]:
            if sorted(v["chain"] for v in entry["simplex"]) == [0, 1, 2] and all(
                v["value"] == "1" for v in entry["simplex"]
            ):
                entry["image_facets"] = [all_zero]
                hits += 1
        assert hits == 1, "expected exactly one all-commit facet"
        broken = tmp_path / "broken.json"
        broken.write_text(json.dumps(obj))
        code, out, err = run_cli(["analyze", str(broken), "--t", "1"], capsys)
        assert code == 4
        assert "carrier monotonic: FAIL" in out
        assert "claims: FAILED (3/4)" in out

    def test_resilience_out_of_range(self, task_file, capsys):
        code, out, err = run_cli(["analyze", str(task_file), "--t", "2"], capsys)
        assert code == 2
        assert "0 < t < (n+1)/2" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run_cli(["analyze", str(tmp_path / "nope.json"), "--t", "1"], capsys)
        assert code == 3

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "garbled.json"
        path.write_text("{not json")
        code, _, err = run_cli(["analyze", str(path), "--t", "1"], capsys)
        assert code == 3

    def test_well_formed_json_malformed_task(self, tmp_path, capsys):
        path = tmp_path / "halftask.json"
        path.write_text(json.dumps({"input": {"facets": [[{"chain": 0, "block": 0, "value": "1"}]]}}))
        code, _, err = run_cli(["analyze", str(path), "--t", "1"], capsys)
        assert code == 3
        assert "cannot load task" in err


class TestSearch:
    def test_no_map_on_the_split_task(self, task_file, capsys):
        code, out, err = run_cli(
            ["search", str(task_file), "--t", "1", "--N", "1"], capsys
        )
        assert code == 0
        head, _, tail = out.rpartition("\n}")
        report = json.loads(head + "\n}")
        assert report["verdict"] == "no_map_up_to_depth"
        assert "no carried simplicial map up to depth 1" in tail

    def test_map_found_on_identity_task(self, tmp_path, capsys):
        task = identity_task(cx([vtx(0, "1"), vtx(1, "1"), vtx(2, "1")]))
        path = tmp_path / "identity.json"
        path.write_text(dumps(task_to_obj(task)))
        code, out, err = run_cli(["search", str(path), "--t", "1", "--N", "0"], capsys)
        assert code == 0
        assert "map found at depth 0" in out

    def test_budget_exhaustion(self, task_file, capsys):
        code, _, err = run_cli(
            ["search", str(task_file), "--t", "1", "--N", "1", "--budget", "1"], capsys
        )
        assert code == 5
        assert "error:" in err

    def test_negative_depth(self, task_file, capsys):
        code, _, err = run_cli(
            ["search", str(task_file), "--t", "1", "--N", "-1"], capsys
        )
        assert code == 2


class TestSimulate:
    def test_exhaustive_finds_atomicity_violation(self, capsys):
        code, out, err = run_cli(
            ["simulate", "--n", "2", "--t", "1", "--depth", "10"], capsys
        )
        assert code == 0
        assert "violation found after 8 events:" in out
        assert "violation[atomicity]:" in out
        assert "mandate abort" in out
        assert "realized inputs:" in out

    def test_fault_free_run_is_clean(self, capsys):
        code, out, err = run_cli(
            ["simulate", "--n", "2", "--t", "0", "--no-suspend", "--depth", "12"],
            capsys,
        )
        assert code == 0
        assert "no violation found within depth 12" in out

    def test_resilience_window(self, capsys):
        code, _, err = run_cli(["simulate", "--n", "2", "--t", "2"], capsys)
        assert code == 2

    def test_state_budget(self, capsys):
        code, _, err = run_cli(
            ["simulate", "--n", "2", "--t", "1", "--budget", "1"], capsys
        )
        assert code == 5

    def test_random_mode_is_deterministic(self, capsys):
        argv = ["simulate", "--n", "2", "--t", "1", "--random", "--seed", "5",
                "--trials", "60"]
        first = run_cli(argv, capsys)
        second = run_cli(argv, capsys)
        assert first == second
        assert first[0] == 0

    def test_trace_out_writes_jsonl(self, tmp_path, capsys):
        path = tmp_path / "trace.jsonl"
        code, out, _ = run_cli(
            ["simulate", "--n", "2", "--t", "1", "--depth", "10",
             "--trace-out", str(path)],
            capsys,
        )
        assert code == 0
        lines = [json.loads(line) for line in path.read_text().splitlines()]
        assert lines[0]["type"] == "meta"
        assert lines[-1]["type"] == "verdict"
        assert lines[-1]["ok"] is False

    def test_unknown_protocol_is_a_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["simulate", "--n", "2", "--t", "1", "--protocol", "3pc"])
        assert excinfo.value.code == 2


class TestExport:
    def test_dot_output_skeleton(self, task_file, capsys):
        code, out, err = run_cli(
            ["export", str(task_file), "--which", "output"], capsys
        )
        assert code == 0
        assert out.startswith("graph task_output {")
        assert out.count(" -- ") == 6  # two triangles
        assert out.count("fillcolor") == 6
        assert '"v0.0=1" [fillcolor="palegreen"];' in out
        assert '"v0.0=0" [fillcolor="lightsteelblue"];' in out

    def test_json_output_skeleton(self, task_file, capsys):
        code, out, err = run_cli(
            ["export", str(task_file), "--format", "json"], capsys
        )
        assert code == 0
        obj = json.loads(out)
        assert len(obj["nodes"]) == 9
        assert len(obj["edges"]) == 27
        assert {n["value"] for n in obj["nodes"]} == {"0", "1", "bot"}

    def test_out_file(self, task_file, tmp_path, capsys):
        path = tmp_path / "graph.dot"
        code, out, err = run_cli(
            ["export", str(task_file), "--out", str(path)], capsys
        )
        assert code == 0
        assert "wrote input 1-skeleton: 9 nodes, 27 edges" in out
        assert path.read_text().startswith("graph task_input {")

    def test_byte_determinism(self, task_file, capsys):
        argv = ["export", str(task_file), "--format", "json", "--which", "output"]
        first = run_cli(argv, capsys)
        second = run_cli(argv, capsys)
        assert first == second


class TestTopLevel:
    def test_no_arguments_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 2

    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == 2
