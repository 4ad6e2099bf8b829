"""Deterministic JSON forms for complexes, tasks, reports, and traces.

Every serializer walks its object in canonical order, so equal objects
always produce byte-identical text.
"""
from __future__ import annotations

import json
from typing import Any, Dict, List, Sequence

from .errors import InvalidTask
from .forksim import ExecutionTrace, Message, ScheduleAction, SimEvent, ViolationReport
from .simplicial import (
    BlockRef,
    Complex,
    Simplex,
    SubdivisionVertex,
    Value,
    Vertex,
    make_complex,
)
from .solvability import SolvabilityReport
from .tasks import CarrierMap, Task

__all__ = [
    "dumps",
    "vertex_to_obj",
    "vertex_from_obj",
    "simplex_to_obj",
    "simplex_from_obj",
    "complex_to_obj",
    "complex_from_obj",
    "task_to_obj",
    "task_from_obj",
    "report_to_obj",
    "trace_to_jsonl",
    "schedule_to_obj",
    "schedule_from_obj",
]


def dumps(obj: Any) -> str:
    """Pretty JSON with a trailing newline; stable for equal inputs."""
    return json.dumps(obj, indent=2) + "\n"


def vertex_to_obj(vertex: Any) -> Dict[str, Any]:
    if isinstance(vertex, SubdivisionVertex):
        return {
            "level": vertex.level,
            "carrier": simplex_to_obj(vertex.carrier),
            "below": simplex_to_obj(vertex.below),
        }
    if not isinstance(vertex, Vertex):
        raise TypeError(f"cannot serialize vertex {vertex!r}")
    return {
        "chain": vertex.block.chain if vertex.block else None,
        "block": vertex.block.block if vertex.block else None,
        "value": vertex.value.value,
    }


def vertex_from_obj(obj: Dict[str, Any]) -> Vertex:
    try:
        chain = obj["chain"]
        block = obj["block"]
        value = Value.from_code(obj["value"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidTask(f"malformed vertex object {obj!r}: {exc}") from None
    if (chain is None) != (block is None):
        raise InvalidTask(f"vertex {obj!r} must set chain and block together")
    ref = None if chain is None else BlockRef(chain=chain, block=block)
    return Vertex(block=ref, value=value)


def simplex_to_obj(simplex: Simplex) -> List[Dict[str, Any]]:
    return [vertex_to_obj(v) for v in simplex]


def simplex_from_obj(obj: Sequence[Dict[str, Any]]) -> Simplex:
    return Simplex(vertex_from_obj(v) for v in obj)


def complex_to_obj(complex_: Complex) -> Dict[str, Any]:
    return {"facets": [simplex_to_obj(f) for f in complex_.facets]}


def complex_from_obj(obj: Dict[str, Any]) -> Complex:
    try:
        facets = obj["facets"]
    except (KeyError, TypeError):
        raise InvalidTask("complex object needs a 'facets' list") from None
    return make_complex([[vertex_from_obj(v) for v in facet] for facet in facets])


def task_to_obj(task: Task) -> Dict[str, Any]:
    carrier = [
        {
            "simplex": simplex_to_obj(simplex),
            "image_facets": [simplex_to_obj(f) for f in image.facets],
        }
        for simplex, image in task.carrier.items()
    ]
    return {
        "input": complex_to_obj(task.input),
        "output": complex_to_obj(task.output),
        "carrier": carrier,
        "colored": task.colored,
    }


def task_from_obj(obj: Dict[str, Any]) -> Task:
    try:
        input_complex = complex_from_obj(obj["input"])
        output_complex = complex_from_obj(obj["output"])
        entries_raw = obj["carrier"]
        colored = bool(obj["colored"])
    except (KeyError, TypeError) as exc:
        raise InvalidTask(f"malformed task object: {exc}") from None
    entries = {}
    for entry in entries_raw:
        try:
            simplex = simplex_from_obj(entry["simplex"])
            image = make_complex(
                [[vertex_from_obj(v) for v in f] for f in entry["image_facets"]]
            )
        except (KeyError, TypeError) as exc:
            raise InvalidTask(f"malformed carrier entry: {exc}") from None
        entries[simplex] = image
    return Task(
        input=input_complex,
        output=output_complex,
        carrier=CarrierMap(entries),
        colored=colored,
    )


def report_to_obj(report: SolvabilityReport) -> Dict[str, Any]:
    witnesses = None
    if report.witnesses is not None:
        witnesses = [simplex_to_obj(s) for s in report.witnesses]
    assignment = None
    if report.assignment is not None:
        assignment = [
            {"from": vertex_to_obj(u), "to": vertex_to_obj(w)}
            for u, w in report.assignment
        ]
    return {
        "verdict": report.verdict.value,
        "parameters": {"n": report.n, "t": report.t, "depth": report.depth},
        "evidence": {
            "input_components": report.input_components,
            "output_components": report.output_components,
            "skeleton_reduced_b0": report.skeleton_betti0,
            "witnesses": witnesses,
            "witness_components": (
                list(report.witness_components) if report.witness_components else None
            ),
            "assignment": assignment,
        },
        "nodes_explored": report.nodes_explored,
        "note": report.note,
    }


def _message_to_obj(message: Message) -> Dict[str, Any]:
    return {
        "from": message.sender,
        "to": message.receiver,
        "seq": message.sequence,
        "payload": dict(message.payload),
    }


def _event_to_obj(event: SimEvent) -> Dict[str, Any]:
    obj: Dict[str, Any] = {"type": "event", "kind": event.kind}
    if event.kind == "deliver":
        obj["message"] = _message_to_obj(event.message)
    else:
        obj["chain"] = event.chain
    return obj


def trace_to_jsonl(trace: ExecutionTrace, report: ViolationReport | None = None) -> str:
    """One JSON object per line: metadata, events, outcome, optional verdict."""
    lines = [
        json.dumps(
            {
                "type": "meta",
                "n": trace.n,
                "t": trace.t,
                "protocol": trace.protocol,
                "inputs": [v.value for v in trace.inputs],
            },
            separators=(",", ":"),
        )
    ]
    for event in trace.events:
        lines.append(json.dumps(_event_to_obj(event), separators=(",", ":")))
    lines.append(
        json.dumps(
            {
                "type": "outcome",
                "decided": [v.value if v else None for v in trace.outcome],
                "realized": [v.value for v in trace.realized],
                "crashed": sorted(trace.crashed),
                "suspended": sorted(trace.suspended),
                "quiescent": trace.quiescent,
            },
            separators=(",", ":"),
        )
    )
    if report is not None:
        lines.append(
            json.dumps(
                {
                    "type": "verdict",
                    "ok": report.ok,
                    "violations": [
                        {"kind": v.kind, "detail": v.detail, "chains": list(v.chains)}
                        for v in report.violations
                    ],
                },
                separators=(",", ":"),
            )
        )
    return "\n".join(lines) + "\n"


def schedule_to_obj(schedule: Sequence[ScheduleAction]) -> List[Dict[str, Any]]:
    out = []
    for action in schedule:
        if action.kind == "deliver":
            out.append({"kind": "deliver", "seq": action.sequence})
        else:
            out.append({"kind": action.kind, "chain": action.chain})
    return out


def schedule_from_obj(obj: Sequence[Dict[str, Any]]) -> List[ScheduleAction]:
    actions = []
    for entry in obj:
        kind = entry.get("kind")
        if kind == "deliver":
            actions.append(ScheduleAction(kind="deliver", sequence=entry.get("seq")))
        else:
            actions.append(ScheduleAction(kind=kind, chain=entry.get("chain")))
    return actions
