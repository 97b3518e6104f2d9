"""Additive subgraph scoring: coefficient bundle and direct evaluation.

The score of a vertex set S in a (di)graph is

    alpha1 * w(arcs inside S) + alpha2 * w(arcs S -> out)
    + alpha3 * w(arcs out -> S) + beta * w(vertices of S).

Undirected graphs are treated as digraphs with each edge {u, v} carried by
the single arc (u, v) with u < v; reductions that target undirected inputs
always set alpha2 == alpha3, so the orientation never shows through.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from ..graphs import EmbeddedGraph

# Coefficients, weights and partial sums must stay inside signed 64 bits.
_BOUND = 2**63


@dataclass(frozen=True)
class ScoringParams:
    alpha1: int
    alpha2: int
    alpha3: int
    beta: int
    k: int
    threshold: int | None = None


def iter_arcs(g: EmbeddedGraph) -> Iterator[tuple[int, int, int]]:
    """Yield (u, v, weight) for every arc; undirected edges oriented u < v."""
    if g.directed:
        for (u, v), w in sorted(g.arc_weight.items()):
            yield u, v, w
    else:
        for (u, v), w in sorted(g.edge_weight.items()):
            yield u, v, w


def _checked(value: int) -> int:
    if not -_BOUND < value < _BOUND:
        raise OverflowError("score %d exceeds the 64-bit pipeline range" % value)
    return value


def kss_score(g: EmbeddedGraph, s: Iterable[int], params: ScoringParams) -> int:
    """Evaluate the four-part additive score of a vertex set directly."""
    chosen = set(s)
    if not chosen <= g.vertex_set():
        raise ValueError("scored set contains unknown vertices")
    inside = leaving = entering = 0
    for u, v, w in iter_arcs(g):
        if u in chosen:
            if v in chosen:
                inside += w
            else:
                leaving += w
        elif v in chosen:
            entering += w
    vertex_sum = sum(g.weight[v] for v in chosen)
    return _checked(
        params.alpha1 * inside
        + params.alpha2 * leaving
        + params.alpha3 * entering
        + params.beta * vertex_sum
    )
