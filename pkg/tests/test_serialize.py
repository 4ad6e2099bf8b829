"""JSON round trips for vertices, complexes, tasks, reports, traces."""
import json

import pytest

from cbtopo import CbtConfig, build_task, decide
from cbtopo.errors import InvalidTask
from cbtopo.forksim import ScheduleAction, TwoPhaseCommit, check_trace, run
from cbtopo.serialize import (
    complex_from_obj,
    complex_to_obj,
    dumps,
    report_to_obj,
    schedule_from_obj,
    schedule_to_obj,
    simplex_from_obj,
    simplex_to_obj,
    task_from_obj,
    task_to_obj,
    trace_to_jsonl,
    vertex_from_obj,
    vertex_to_obj,
)
from cbtopo.simplicial import barycentric_subdivide

from helpers import cx, free, identity_task, sx, vtx


class TestVertexObjects:
    def test_colored_round_trip(self):
        v = vtx(1, "bot", block=3)
        obj = vertex_to_obj(v)
        assert obj == {"chain": 1, "block": 3, "value": "bot"}
        assert vertex_from_obj(obj) == v

    def test_colorless_round_trip(self):
        v = free("0")
        obj = vertex_to_obj(v)
        assert obj == {"chain": None, "block": None, "value": "0"}
        assert vertex_from_obj(obj) == v

    def test_subdivision_vertex_shape(self):
        result = barycentric_subdivide(cx([vtx(0, "1"), vtx(1, "1")]), 1)
        barycenter = next(
            v for v in result.complex.vertex_set if len(v.below) == 2
        )
        obj = vertex_to_obj(barycenter)
        assert set(obj) == {"level", "carrier", "below"}
        assert obj["level"] == 1
        assert len(obj["below"]) == 2

    def test_unserializable_vertex(self):
        with pytest.raises(TypeError, match="cannot serialize"):
            vertex_to_obj("v0.0=1")

    @pytest.mark.parametrize(
        "obj",
        [
            {"chain": 0, "block": 0},  # missing value
            {"chain": 0, "value": "1"},  # missing block
            {"chain": 0, "block": 0, "value": "2"},  # bad code
            {"chain": 0, "block": None, "value": "1"},  # half-labeled
            {"chain": None, "block": 4, "value": "1"},
        ],
    )
    def test_malformed_vertex_objects(self, obj):
        with pytest.raises(InvalidTask):
            vertex_from_obj(obj)


class TestComplexObjects:
    def test_simplex_round_trip(self):
        s = sx(vtx(0, "1"), vtx(1, "bot"))
        assert simplex_from_obj(simplex_to_obj(s)) == s

    def test_complex_round_trip(self):
        c = cx([vtx(0, "1"), vtx(1, "0")], [vtx(2, "bot")])
        assert complex_from_obj(complex_to_obj(c)) == c

    def test_missing_facets_key(self):
        with pytest.raises(InvalidTask, match="'facets' list"):
            complex_from_obj({"simplices": []})
        with pytest.raises(InvalidTask, match="'facets' list"):
            complex_from_obj([])


class TestTaskObjects:
    @pytest.mark.parametrize("colorless", [False, True])
    def test_cbt_task_round_trip(self, colorless, cbt_tasks, colorless_tasks):
        task = (colorless_tasks if colorless else cbt_tasks)[1]
        again = task_from_obj(task_to_obj(task))
        assert again == task
        assert again.colored == task.colored

    def test_identity_task_round_trip(self):
        task = identity_task(cx([vtx(0, "1"), vtx(1, "0")]))
        assert task_from_obj(task_to_obj(task)) == task

    def test_obj_shape(self, cbt_tasks):
        obj = task_to_obj(cbt_tasks[1])
        assert set(obj) == {"input", "output", "carrier", "colored"}
        assert obj["colored"] is True
        entry = obj["carrier"][0]
        assert set(entry) == {"simplex", "image_facets"}

    def test_missing_top_level_key(self):
        with pytest.raises(InvalidTask, match="malformed task object"):
            task_from_obj({})

    def test_malformed_carrier_entry(self, cbt_tasks):
        obj = task_to_obj(cbt_tasks[1])
        del obj["carrier"][0]["image_facets"]
        with pytest.raises(InvalidTask, match="malformed carrier entry"):
            task_from_obj(obj)

    def test_reloaded_task_is_revalidated(self, cbt_tasks):
        obj = task_to_obj(cbt_tasks[1])
        # poison one carrier image with a verdict outside the output complex
        obj["carrier"][0]["image_facets"] = [
            [{"chain": 9, "block": 9, "value": "1"}]
        ]
        with pytest.raises(InvalidTask):
            task_from_obj(obj)


class TestReportObjects:
    def test_obstruction_report_shape(self, cbt_tasks):
        report = decide(cbt_tasks[2], t=1, max_depth=0)
        obj = report_to_obj(report)
        assert obj["verdict"] == "unsolvable_by_obstruction"
        assert obj["parameters"] == {"n": 2, "t": 1, "depth": None}
        evidence = obj["evidence"]
        assert evidence["skeleton_reduced_b0"] == 0
        assert evidence["output_components"] == 2
        assert len(evidence["witnesses"]) == 2
        assert evidence["witness_components"] == [1, 0]
        assert evidence["assignment"] is None
        json.loads(dumps(obj))  # JSON-clean

    def test_map_report_shape(self):
        task = identity_task(cx([vtx(0, "1"), vtx(1, "1"), vtx(2, "1")]))
        report = decide(task, t=1, max_depth=0)
        obj = report_to_obj(report)
        assert obj["verdict"] == "map_found"
        assert obj["evidence"]["witnesses"] is None
        pairs = obj["evidence"]["assignment"]
        assert {tuple(sorted(p)) for p in pairs} == {("from", "to")}
        assert obj["nodes_explored"] >= 1


class TestTraceJsonl:
    def schedule(self):
        return [
            ScheduleAction(kind="step", chain=1),
            ScheduleAction(kind="suspend", chain=1),
            ScheduleAction(kind="step", chain=0),
            ScheduleAction(kind="step", chain=2),
            ScheduleAction(kind="deliver", sequence=0),
            ScheduleAction(kind="deliver", sequence=1),
        ]

    def test_line_structure(self):
        trace = run(2, 1, TwoPhaseCommit(), self.schedule())
        text = trace_to_jsonl(trace, check_trace(trace))
        assert text.endswith("\n")
        lines = [json.loads(line) for line in text.splitlines()]
        assert lines[0]["type"] == "meta"
        assert lines[0]["n"] == 2 and lines[0]["protocol"] == "2pc"
        kinds = [line["type"] for line in lines]
        assert kinds.count("event") == len(self.schedule())
        assert kinds[-2] == "outcome"
        assert kinds[-1] == "verdict"
        outcome = lines[-2]
        assert outcome["realized"] == ["1", "bot", "1"]
        assert outcome["suspended"] == [1]
        verdict = lines[-1]
        assert verdict["ok"] is False
        assert verdict["violations"][0]["kind"] == "atomicity"

    def test_compact_lines_and_optional_verdict(self):
        trace = run(2, 1, TwoPhaseCommit(), self.schedule()[:1])
        text = trace_to_jsonl(trace)
        assert ": " not in text  # compact separators
        types = [json.loads(line)["type"] for line in text.splitlines()]
        assert types == ["meta", "event", "outcome"]

    def test_deliver_events_embed_the_message(self):
        trace = run(
            2,
            1,
            TwoPhaseCommit(),
            [ScheduleAction(kind="step", chain=1), ScheduleAction(kind="deliver", sequence=0)],
        )
        lines = [json.loads(line) for line in trace_to_jsonl(trace).splitlines()]
        deliver = lines[2]
        assert deliver["kind"] == "deliver"
        assert deliver["message"] == {
            "from": 1,
            "to": 0,
            "seq": 0,
            "payload": {"kind": "vote", "value": "1"},
        }


class TestScheduleObjects:
    def test_round_trip(self):
        schedule = [
            ScheduleAction(kind="step", chain=0),
            ScheduleAction(kind="deliver", sequence=3),
            ScheduleAction(kind="crash", chain=2),
            ScheduleAction(kind="suspend", chain=1),
        ]
        obj = schedule_to_obj(schedule)
        assert obj[1] == {"kind": "deliver", "seq": 3}
        assert obj[2] == {"kind": "crash", "chain": 2}
        assert schedule_from_obj(obj) == schedule


class TestDumps:
    def test_trailing_newline_and_determinism(self, cbt_tasks):
        obj = task_to_obj(cbt_tasks[1])
        first = dumps(obj)
        second = dumps(task_to_obj(cbt_tasks[1]))
        assert first == second
        assert first.endswith("\n")
        assert json.loads(first) == obj
