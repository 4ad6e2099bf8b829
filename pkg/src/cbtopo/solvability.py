"""Deciding task solvability under bounded crash resilience.

Two complementary engines: a connectivity obstruction that certifies
unsolvability outright, and an exhaustive backtracking search for a carried
simplicial map from an iterated barycentric subdivision of the restricted
input into the output complex.  Absence of such a map at depth N also rules
out every smaller depth, so an exhausted search is reported as holding up to
the depth it ran at.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Tuple

from .connectivity import connected_components, reduced_betti
from .errors import BadResilience, NotColored, ResourceBound
from .simplicial import Complex, Simplex, Vertex, barycentric_subdivide
from .tasks import Task, restrict_to_skeleton, colorless_projection

__all__ = [
    "Verdict",
    "SolvabilityReport",
    "connectivity_obstruction",
    "search_carried_simplicial_map",
    "decide",
    "DEFAULT_NODE_BUDGET",
    "NODE_BUDGET_ENV",
]

DEFAULT_NODE_BUDGET = 10_000_000
NODE_BUDGET_ENV = "CBTOPO_NODE_BUDGET"


class Verdict(Enum):
    UNSOLVABLE_BY_OBSTRUCTION = "unsolvable_by_obstruction"
    NO_MAP_UP_TO_DEPTH = "no_map_up_to_depth"
    MAP_FOUND = "map_found"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SolvabilityReport:
    """Verdict plus the evidence that backs it.

    ``witnesses`` holds a pair of input simplices whose carriers land in
    distinct output components when the obstruction fires; ``assignment``
    holds the vertex map when the search succeeds.
    """

    verdict: Verdict
    n: int
    t: int
    depth: int | None = None
    input_components: int | None = None
    output_components: int | None = None
    skeleton_betti0: int | None = None
    witnesses: Tuple[Simplex, Simplex] | None = None
    witness_components: Tuple[int, int] | None = None
    assignment: Tuple[Tuple[Any, Vertex], ...] | None = None
    nodes_explored: int = 0
    note: str = ""

    def __post_init__(self) -> None:
        if self.verdict is Verdict.UNSOLVABLE_BY_OBSTRUCTION:
            if self.witnesses is None or self.skeleton_betti0 is None:
                raise ValueError("obstruction verdicts must carry witnesses and a certificate")
        if self.verdict is Verdict.MAP_FOUND and self.assignment is None:
            raise ValueError("map verdicts must carry the vertex assignment")


def _node_budget(explicit: int | None) -> int:
    if explicit is not None:
        if explicit < 1:
            raise ValueError("node budget must be positive")
        return explicit
    raw = os.environ.get(NODE_BUDGET_ENV)
    if raw is not None:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{NODE_BUDGET_ENV} must be an integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"{NODE_BUDGET_ENV} must be positive")
        return value
    return DEFAULT_NODE_BUDGET


def _check_resilience(task: Task, t: int) -> int:
    n = task.input.dimension
    if t < 1 or 2 * t >= n + 1:
        raise BadResilience(f"resilience must satisfy 0 < t < (n+1)/2 with n={n}, got t={t}")
    return n


def connectivity_obstruction(task: Task, t: int) -> SolvabilityReport:
    """Certify unsolvability from a connected input facing a split output.

    When the t-skeleton of the input is path-connected, the output complex
    is disconnected, and two input simplices are carried into different
    output components, no continuous (hence no simplicial) decision map can
    exist; the report then names that witness pair.  Anything short of that
    pattern yields an inconclusive report.
    """
    if task.colored:
        raise NotColored("the obstruction check expects a colorless task")
    n = _check_resilience(task, t)
    restricted = restrict_to_skeleton(task, t)
    input_parts = connected_components(restricted.input)
    output_parts = connected_components(task.output)
    betti0 = reduced_betti(restricted.input, 0).reduced_betti[0]
    base = dict(
        n=n,
        t=t,
        input_components=len(input_parts),
        output_components=len(output_parts),
        skeleton_betti0=betti0,
    )
    if len(input_parts) != 1:
        return SolvabilityReport(
            verdict=Verdict.INCONCLUSIVE,
            note="input skeleton is not connected",
            **base,
        )
    if len(output_parts) < 2:
        return SolvabilityReport(
            verdict=Verdict.INCONCLUSIVE,
            note="output complex is connected",
            **base,
        )
    component_of = {v: i for i, part in enumerate(output_parts) for v in part}
    found: list[tuple[int, Simplex]] = []
    seen_components: set[int] = set()
    for simplex in restricted.input.simplices():
        touched = {component_of[v] for v in restricted.carrier[simplex].vertices}
        if len(touched) == 1:
            component = next(iter(touched))
            if component not in seen_components:
                seen_components.add(component)
                found.append((component, simplex))
                if len(found) == 2:
                    break
    if len(found) < 2:
        return SolvabilityReport(
            verdict=Verdict.INCONCLUSIVE,
            note="no simplex pair is carried into distinct output components",
            **base,
        )
    (comp_a, witness_a), (comp_b, witness_b) = found
    return SolvabilityReport(
        verdict=Verdict.UNSOLVABLE_BY_OBSTRUCTION,
        witnesses=(witness_a, witness_b),
        witness_components=(comp_a, comp_b),
        note=(
            "connected input skeleton cannot map into a disconnected output: "
            f"{witness_a} is carried into component {comp_a} while "
            f"{witness_b} is carried into component {comp_b}"
        ),
        **base,
    )


def search_carried_simplicial_map(
    task: Task, t: int, depth: int, *, node_budget: int | None = None
) -> SolvabilityReport:
    """Exhaustive search for a carried simplicial map at subdivision depth N.

    The input is restricted to its t-skeleton and subdivided N times.  The
    search assigns an output vertex to every subdivision vertex so that each
    vertex lands inside the carrier of the simplex it subdivides and every
    subdivided facet maps onto a simplex of the output.  Vertices are
    processed tightest carrier first; each attempted assignment counts
    against the node budget.
    """
    n = _check_resilience(task, t)
    if depth < 0:
        raise ValueError("subdivision depth must be non-negative")
    budget = _node_budget(node_budget)
    restricted = restrict_to_skeleton(task, t)
    subdivided, carrier_of = barycentric_subdivide(restricted.input, depth)
    output = task.output
    output_facets = [f.vertex_set for f in output.facets]
    all_facets_mask = (1 << len(output_facets)) - 1
    output_vertices = list(output.vertices)
    vertex_bit = {
        w: sum(1 << i for i, fs in enumerate(output_facets) if w in fs)
        for w in output_vertices
    }
    domains: Dict[Any, tuple] = {
        u: restricted.carrier[carrier_of[u]].vertices for u in subdivided.vertices
    }
    order = sorted(subdivided.vertices, key=lambda u: (len(domains[u]), u.sort_key()))
    position = {u: i for i, u in enumerate(order)}
    sub_facets = list(subdivided.facets)
    incidence: Dict[Any, list[int]] = {u: [] for u in order}
    for fid, facet in enumerate(sub_facets):
        for u in facet:
            incidence[u].append(fid)

    candidates = [all_facets_mask] * len(sub_facets)
    chosen: list[Any] = [None] * len(order)
    choice_index = [0] * len(order)
    undo_stack: list[list[tuple[int, int]]] = [[] for _ in order]
    nodes = 0
    level = 0
    while True:
        if level == len(order):
            assignment = tuple(
                sorted(
                    ((u, chosen[position[u]]) for u in subdivided.vertices),
                    key=lambda pair: pair[0].sort_key(),
                )
            )
            return SolvabilityReport(
                verdict=Verdict.MAP_FOUND,
                n=n,
                t=t,
                depth=depth,
                assignment=assignment,
                nodes_explored=nodes,
                note=f"carried simplicial map found at subdivision depth {depth}",
            )
        u = order[level]
        domain = domains[u]
        placed = False
        while choice_index[level] < len(domain):
            w = domain[choice_index[level]]
            nodes += 1
            if nodes > budget:
                raise ResourceBound(
                    f"carried-map search exceeded the node budget of {budget}",
                    explored=nodes,
                )
            w_mask = vertex_bit[w]
            undo: list[tuple[int, int]] = []
            feasible = True
            for fid in incidence[u]:
                new_mask = candidates[fid] & w_mask
                if new_mask == 0:
                    feasible = False
                    break
                if new_mask != candidates[fid]:
                    undo.append((fid, candidates[fid]))
                    candidates[fid] = new_mask
            if feasible:
                chosen[level] = w
                undo_stack[level] = undo
                placed = True
                break
            for fid, old in undo:
                candidates[fid] = old
            choice_index[level] += 1
        if placed:
            level += 1
            if level < len(order):
                choice_index[level] = 0
            continue
        level -= 1
        if level < 0:
            return SolvabilityReport(
                verdict=Verdict.NO_MAP_UP_TO_DEPTH,
                n=n,
                t=t,
                depth=depth,
                nodes_explored=nodes,
                note=(
                    "no carried simplicial map exists at subdivision depth "
                    f"{depth} or below"
                ),
            )
        for fid, old in undo_stack[level]:
            candidates[fid] = old
        undo_stack[level] = []
        chosen[level] = None
        choice_index[level] += 1


def decide(
    task: Task, t: int, max_depth: int, *, node_budget: int | None = None
) -> SolvabilityReport:
    """Combine the obstruction with searches at increasing subdivision depth.

    Colored tasks are projected to their colorless form first.  The
    obstruction verdict is final when it fires; otherwise the search runs at
    depths 0..max_depth and the first map found wins.
    """
    if max_depth < 0:
        raise ValueError("maximum depth must be non-negative")
    if task.colored:
        task = colorless_projection(task)
    report = connectivity_obstruction(task, t)
    if report.verdict is Verdict.UNSOLVABLE_BY_OBSTRUCTION:
        return report
    last = report
    for depth in range(max_depth + 1):
        last = search_carried_simplicial_map(task, t, depth, node_budget=node_budget)
        if last.verdict is Verdict.MAP_FOUND:
            return last
    return last
