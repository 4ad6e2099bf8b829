"""Shared builders and independent oracles for the test suite.

Every oracle here recomputes its answer from first principles (BFS, span
enumeration, product enumeration) so that agreement with the library is a
genuine cross-check rather than a tautology.
"""
from __future__ import annotations

import itertools
from collections import deque
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence

from cbtopo.simplicial import (
    BlockRef,
    Complex,
    Simplex,
    Value,
    Vertex,
    barycentric_subdivide,
)
from cbtopo.tasks import CarrierMap, Task, restrict_to_skeleton


def vtx(chain: int, code: str, block: int = 0) -> Vertex:
    """Colored vertex from a chain index and a value code."""
    return Vertex(BlockRef(chain=chain, block=block), Value.from_code(code))


def free(code: str) -> Vertex:
    """Colorless vertex from a value code."""
    return Vertex(None, Value.from_code(code))


def sx(*vertices: Any) -> Simplex:
    return Simplex(vertices)


def cx(*facets: Iterable[Any]) -> Complex:
    return Complex(Simplex(f) for f in facets)


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def bfs_components(complex_: Complex) -> list[frozenset]:
    """Connected components via BFS over the 1-skeleton, no union-find."""
    adjacency: Dict[Any, set] = {v: set() for v in complex_.vertices}
    for edge in complex_.simplices_of_dim(1):
        u, v = edge.vertices
        adjacency[u].add(v)
        adjacency[v].add(u)
    seen: set = set()
    parts: list[frozenset] = []
    for start in complex_.vertices:
        if start in seen:
            continue
        queue = deque([start])
        part = {start}
        seen.add(start)
        while queue:
            u = queue.popleft()
            for w in adjacency[u]:
                if w not in part:
                    part.add(w)
                    seen.add(w)
                    queue.append(w)
        parts.append(frozenset(part))
    return sorted(parts, key=lambda p: min(v.sort_key() for v in p))


def xor_span_rank(rows: Sequence[int]) -> int:
    """GF(2) rank by enumerating the span; exponential, for tiny matrices."""
    span = {0}
    for row in rows:
        span |= {s ^ row for s in span}
    size = len(span)
    assert size & (size - 1) == 0, "span size must be a power of two"
    return size.bit_length() - 1


def brute_force_depth0_map(task: Task, t: int) -> Optional[Dict[Any, Vertex]]:
    """Exhaustive product search for an undivided carried simplicial map.

    Mirrors the search semantics at subdivision depth 0: each input vertex of
    the t-skeleton must map into the carrier of its own singleton simplex and
    every skeleton facet must land inside a single output facet.
    """
    restricted = restrict_to_skeleton(task, t)
    vertices = restricted.input.vertices
    domains = [restricted.carrier[Simplex([v])].vertices for v in vertices]
    total = 1
    for domain in domains:
        total *= len(domain)
        assert total <= 2_000_000, "oracle given a task too large to enumerate"
    output_facet_sets = [f.vertex_set for f in task.output.facets]
    facets = restricted.input.facets
    for choice in itertools.product(*domains):
        assign = dict(zip(vertices, choice))
        if all(
            any({assign[v] for v in facet} <= fs for fs in output_facet_sets)
            for facet in facets
        ):
            return assign
    return None


def assignment_is_valid(
    task: Task, t: int, depth: int, assignment: Sequence[tuple]
) -> bool:
    """Re-verify a reported carried simplicial map from scratch."""
    restricted = restrict_to_skeleton(task, t)
    subdivided, carrier_of = barycentric_subdivide(restricted.input, depth)
    mapping = dict(assignment)
    if set(mapping) != set(subdivided.vertices):
        return False
    for u, w in mapping.items():
        if not restricted.carrier[carrier_of[u]].has_vertex(w):
            return False
    output_facet_sets = [f.vertex_set for f in task.output.facets]
    for facet in subdivided.facets:
        image = {mapping[u] for u in facet}
        if not any(image <= fs for fs in output_facet_sets):
            return False
    return True


# ---------------------------------------------------------------------------
# Toy task builders
# ---------------------------------------------------------------------------


def identity_task(complex_: Complex) -> Task:
    """Colored task asking each configuration to reproduce itself."""
    entries = {s: Complex([s]) for s in complex_.simplices()}
    return Task(input=complex_, output=complex_, carrier=CarrierMap(entries), colored=True)


def split_vote_task(input_complex: Complex, side_of: Mapping[Any, str]) -> Task:
    """Colorless task whose output is two isolated verdict vertices.

    Each input simplex is carried onto the single verdict chosen by its
    canonical first vertex, so any connected input using both verdicts
    admits an obstruction witness pair.
    """
    zero, one = free("0"), free("1")
    output = cx([zero], [one])
    verdict = {"0": Complex([Simplex([zero])]), "1": Complex([Simplex([one])])}
    entries = {}
    for s in input_complex.simplices():
        lead = min(s, key=lambda v: v.sort_key())
        entries[s] = verdict[side_of[lead]]
    return Task(
        input=input_complex, output=output, carrier=CarrierMap(entries), colored=False
    )


def random_connected_complex(rng, n_vertices: int, codes: str = "01") -> Complex:
    """Connected 2-dimensional complex: a triangle, a spanning path, extras."""
    assert n_vertices >= 3
    vertices = [vtx(i, rng.choice(codes)) for i in range(n_vertices)]
    facets: list[list] = [vertices[:3]]
    for i in range(n_vertices - 1):
        facets.append([vertices[i], vertices[i + 1]])
    for _ in range(rng.randrange(0, n_vertices)):
        i, j = rng.sample(range(n_vertices), 2)
        facets.append([vertices[i], vertices[j]])
    return cx(*facets)


def replace_image(task: Task, simplex: Simplex, image: Complex) -> Task:
    """Copy of ``task`` with one carrier image swapped out."""
    entries = {s: img for s, img in task.carrier.items()}
    assert simplex in entries
    entries[simplex] = image
    return Task(
        input=task.input,
        output=task.output,
        carrier=CarrierMap(entries),
        colored=task.colored,
    )
