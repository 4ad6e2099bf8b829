"""The cross-chain transaction task family.

One transaction spans n+1 chains.  Each chain contributes a single vertex
whose value records what happened to its local leg: not committed, locally
committed, or invalidated because the containing branch was suspended by a
fork.  The output side records the global verdict: every chain must end up
with the same all-abort or all-commit decision, and a suspended leg forces
the all-abort verdict.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable

from .simplicial import BlockRef, Complex, Simplex, Value, Vertex, make_complex
from .tasks import CarrierMap, Task, colorless_projection

__all__ = [
    "CbtConfig",
    "build_input_complex",
    "build_output_complex",
    "build_carrier_map",
    "build_task",
    "build_colorless_task",
]

_INPUT_VALUES = (Value.ZERO, Value.ONE, Value.BOTTOM)


@dataclass(frozen=True)
class CbtConfig:
    """Parameters of one task instance: n+1 chains, one block per chain."""

    n: int
    block_index: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("the task needs at least two chains (n >= 1)")
        if self.block_index < 0:
            raise ValueError("block index must be non-negative")

    def block(self, chain: int) -> BlockRef:
        return BlockRef(chain=chain, block=self.block_index)


def build_input_complex(config: CbtConfig) -> Complex:
    """All assignments of a value to each chain; facets pick one per chain.

    The complex has 3(n+1) vertices and 3^(n+1) facets of dimension n; a
    vertex set spans a simplex exactly when its chains are pairwise distinct.
    """
    n = config.n
    facets = []
    for values in itertools.product(_INPUT_VALUES, repeat=n + 1):
        facets.append(
            Simplex(
                Vertex(config.block(chain), value) for chain, value in enumerate(values)
            )
        )
    return Complex(facets)


def build_output_complex(config: CbtConfig) -> Complex:
    """Two facets: the all-abort simplex and the all-commit simplex."""
    n = config.n
    abort = Simplex(Vertex(config.block(chain), Value.ZERO) for chain in range(n + 1))
    commit = Simplex(Vertex(config.block(chain), Value.ONE) for chain in range(n + 1))
    return Complex([abort, commit])


def _allowed_output_vertices(simplex: Simplex) -> set[Vertex]:
    """Output vertices permitted for one input simplex.

    Three base rules drive the image: all legs locally committed allows only
    the commit verdict; a suspended leg forces the abort verdict; a mix of
    committed and uncommitted legs leaves both verdicts open.  Every face of
    the simplex is a possible partial view of the same transaction, so the
    image must also keep whatever the base rules allow on each face —
    otherwise narrowing attention to a sub-view could *widen* the verdict
    set, and the map would not be monotonic.  Accumulating the base rules
    over all faces collapses to a closed form:

    - every leg committed: commit vertices only, one per chain;
    - otherwise: an abort vertex for every chain, plus a commit vertex for
      every chain whose leg was not suspended (its singleton face still
      allows commit).
    """
    values = [v.value for v in simplex]
    if all(value is Value.ONE for value in values):
        return {Vertex(v.block, Value.ONE) for v in simplex}
    allowed: set[Vertex] = set()
    for vertex in simplex:
        allowed.add(Vertex(vertex.block, Value.ZERO))
        if vertex.value is not Value.BOTTOM:
            allowed.add(Vertex(vertex.block, Value.ONE))
    return allowed


def build_carrier_map(config: CbtConfig) -> CarrierMap:
    input_complex = build_input_complex(config)
    output_complex = build_output_complex(config)
    entries: Dict[Simplex, Complex] = {}
    for simplex in input_complex.simplices():
        entries[simplex] = output_complex.induced_subcomplex(
            _allowed_output_vertices(simplex)
        )
    return CarrierMap(entries)


def build_task(config: CbtConfig) -> Task:
    return Task(
        input=build_input_complex(config),
        output=build_output_complex(config),
        carrier=build_carrier_map(config),
        colored=True,
    )


def build_colorless_task(config: CbtConfig) -> Task:
    """The task with output block identities stripped, for solvability checks."""
    return colorless_projection(build_task(config))
