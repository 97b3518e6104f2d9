"""Balanced fundamental-cycle separators on triangulated embeddings.

A proper weight assignment caps vertex weights at 1/4 and sums to 1; any
triangulated planar graph then has a fundamental cycle (w.r.t. a layered
spanning tree) whose strict interior and strict exterior each carry at
most 3/4 of the weight, and the cycle length is bounded by twice the
peeling depth plus one.  Weights are exact rationals throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graphs import EmbeddedGraph, canonical_walk, edge_key, induced_subgraph, trace_faces
from .layering import Layering, outerplanar_layering

BALANCE = Fraction(3, 4)


class DegenerateSupportError(ValueError):
    """Support and universe are both too small for capped proper weights."""


class ProviderUnavailableError(RuntimeError):
    """The requested separator-family provider is not implemented."""


@dataclass(frozen=True)
class ProperWeightAssignment:
    weight: dict[int, Fraction]

    def __post_init__(self):
        total = Fraction(0)
        for v, w in self.weight.items():
            if w < 0 or w > Fraction(1, 4):
                raise ValueError("weight of %r outside [0, 1/4]" % (v,))
            total += w
        if total != 1:
            raise ValueError("weights sum to %s, not 1" % (total,))

    def of(self, v: int) -> Fraction:
        return self.weight.get(v, Fraction(0))

    def side(self, vertices) -> Fraction:
        return sum((self.of(v) for v in vertices), Fraction(0))


@dataclass(frozen=True)
class CycleSeparator:
    cycle: tuple[int, ...]
    interior: frozenset[int]
    exterior: frozenset[int]

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.cycle)

    @property
    def strict_interior(self) -> frozenset[int]:
        return self.interior - self.vertex_set

    @property
    def strict_exterior(self) -> frozenset[int]:
        return self.exterior - self.vertex_set


@dataclass(frozen=True)
class AnnotatedSeparator:
    heavy: frozenset[int]
    light: frozenset[int]
    discarded: frozenset[int]
    interior: frozenset[int]
    exterior: frozenset[int]
    measured: bool


def proper_uniform(support, universe) -> ProperWeightAssignment:
    """Uniform weights on the support, capped at 1/4 with surplus spread.

    Fewer than four support vertices cannot carry weight 1 under the cap;
    the surplus is then spread uniformly over the rest of the universe.
    """
    support = frozenset(support)
    universe = frozenset(universe)
    if not support:
        raise ValueError("empty support")
    if not support <= universe:
        raise ValueError("support not contained in universe")
    weight = {v: Fraction(0) for v in universe}
    if len(support) >= 4:
        share = Fraction(1, len(support))
        for v in support:
            weight[v] = share
    else:
        if len(universe) < 4:
            raise DegenerateSupportError(
                "universe of %d cannot carry capped weights" % len(universe)
            )
        rest = universe - support
        spread = (1 - Fraction(len(support), 4)) / len(rest)
        for v in support:
            weight[v] = Fraction(1, 4)
        for v in rest:
            weight[v] = spread
    return ProperWeightAssignment(weight)


def _check_triangulated(g: EmbeddedGraph) -> None:
    if g.n < 3 or len(g.components()) != 1:
        raise ValueError("separator needs a connected graph on >= 3 vertices")
    walks, _ = trace_faces(g.rotation)
    for walk in walks:
        if len(walk) != 3 or len(set(walk)) != 3:
            raise ValueError("input embedding is not triangulated")


def _layered_spanning_tree(
    g: EmbeddedGraph, layering: Layering
) -> dict[int, int | None]:
    """Parent pointers: outer-triangle star plus one edge to the layer below."""
    layer0 = sorted(v for v in g.vertices if layering[v] == 0)
    root = layer0[0]
    parent: dict[int, int | None] = {root: None}
    for v in layer0[1:]:
        if not g.has_edge(root, v):
            raise ValueError("outer layer is not a clique of the outer face")
        parent[v] = root
    for v in sorted(g.vertices):
        if v in parent:
            continue
        below = [u for u in g.neighbors(v) if layering[u] == layering[v] - 1]
        if not below:
            raise ValueError("vertex %d has no neighbor one layer below" % v)
        parent[v] = min(below)
    return parent


def _fundamental_cycle(parent, u: int, v: int) -> tuple[int, ...]:
    up = [u]
    seen = {u}
    a = u
    while parent[a] is not None:
        a = parent[a]
        up.append(a)
        seen.add(a)
    down = [v]
    b = v
    while b not in seen:
        b = parent[b]
        down.append(b)
    cut = up.index(b)
    return tuple(up[:cut] + [b] + list(reversed(down[:-1])))


def _strict_sides(
    g: EmbeddedGraph, cycle: tuple[int, ...]
) -> tuple[frozenset[int], frozenset[int]]:
    """Vertices strictly inside/outside the cycle, by face flood fill.

    Faces are merged across every edge not on the cycle; the region holding
    the designated outer face is the exterior.
    """
    walks, dart_face = trace_faces(g.rotation)
    cyc_edges = {
        edge_key(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))
    }
    region = list(range(len(walks)))

    def find(a: int) -> int:
        while region[a] != a:
            region[a] = region[region[a]]
            a = region[a]
        return a

    for (u, v), fid in dart_face.items():
        if u < v and edge_key(u, v) not in cyc_edges:
            ra, rb = find(fid), find(dart_face[(v, u)])
            if ra != rb:
                region[ra] = rb

    outer_canon = canonical_walk(g.outer_faces[0])
    outer_id = next(
        i for i, walk in enumerate(walks) if canonical_walk(walk) == outer_canon
    )
    outer_region = find(outer_id)
    on_cycle = set(cycle)
    strict_ext: set[int] = set()
    for i, walk in enumerate(walks):
        if find(i) == outer_region:
            strict_ext.update(walk)
    strict_ext -= on_cycle
    strict_int = g.vertex_set() - on_cycle - strict_ext
    return frozenset(strict_int), frozenset(strict_ext)


def verify_separator(
    g: EmbeddedGraph, c: CycleSeparator, w: ProperWeightAssignment | None = None
) -> None:
    """Assert the cycle-separator invariants; raises ValueError on violation."""
    cyc = c.cycle
    if len(cyc) < 3 or len(set(cyc)) != len(cyc):
        raise ValueError("separator cycle is not simple")
    for i, u in enumerate(cyc):
        if not g.has_edge(u, cyc[(i + 1) % len(cyc)]):
            raise ValueError("separator cycle misses edge of the graph")
    if c.interior | c.exterior != g.vertex_set():
        raise ValueError("interior and exterior do not cover the graph")
    if c.interior & c.exterior != c.vertex_set:
        raise ValueError("interior and exterior overlap off the cycle")
    inner, outer = c.strict_interior, c.strict_exterior
    for u, v in g.edges:
        if (u in inner and v in outer) or (v in inner and u in outer):
            raise ValueError("edge crosses the separator")
    if w is not None:
        if w.side(inner) > BALANCE or w.side(outer) > BALANCE:
            raise ValueError("separator is not 3/4-balanced")


def fundamental_cycle_separator(
    g: EmbeddedGraph, w: ProperWeightAssignment
) -> CycleSeparator:
    """Balanced fundamental cycle w.r.t. the layered spanning tree.

    Candidate cycles come from non-tree edges in ascending (min, max)
    endpoint order; the first 3/4-balanced one is returned, so reruns are
    deterministic.  Cycle length is at most 2 * depth + 1.
    """
    _check_triangulated(g)
    layering = outerplanar_layering(g)
    parent = _layered_spanning_tree(g, layering)
    tree_edges = {
        edge_key(v, p) for v, p in parent.items() if p is not None
    }
    bound = 2 * layering.depth + 1
    for u, v in sorted(g.edges):
        if edge_key(u, v) in tree_edges:
            continue
        cycle = _fundamental_cycle(parent, u, v)
        if len(cycle) > bound:
            raise ValueError("fundamental cycle exceeds the depth bound")
        strict_int, strict_ext = _strict_sides(g, cycle)
        if w.side(strict_int) <= BALANCE and w.side(strict_ext) <= BALANCE:
            sep = CycleSeparator(
                cycle=cycle,
                interior=strict_int | frozenset(cycle),
                exterior=strict_ext | frozenset(cycle),
            )
            verify_separator(g, sep, w)
            return sep
    raise RuntimeError("no balanced fundamental cycle; input invariants broken")


def make_cycle_separator(g: EmbeddedGraph, cycle) -> CycleSeparator:
    """Classify the sides of an explicit simple cycle via the embedding."""
    cycle = tuple(cycle)
    strict_int, strict_ext = _strict_sides(g, cycle)
    sep = CycleSeparator(
        cycle=cycle,
        interior=strict_int | frozenset(cycle),
        exterior=strict_ext | frozenset(cycle),
    )
    verify_separator(g, sep)
    return sep


def split_by_cycle(
    g: EmbeddedGraph, c: CycleSeparator
) -> tuple[EmbeddedGraph, EmbeddedGraph]:
    """Induced interior and exterior sides, both containing the cycle."""
    verify_separator(g, c)
    return induced_subgraph(g, c.interior), induced_subgraph(g, c.exterior)


def trivial_family(c: CycleSeparator, k: int) -> list[AnnotatedSeparator]:
    """Singleton family: the whole cycle heavy; measured iff |C| <= 40 sqrt(k)."""
    cyc = c.vertex_set
    measured = len(cyc) * len(cyc) <= 1600 * k
    return [
        AnnotatedSeparator(
            heavy=cyc,
            light=frozenset(),
            discarded=frozenset(),
            interior=c.interior,
            exterior=c.exterior,
            measured=measured,
        )
    ]


def family_provider_generate(
    g: EmbeddedGraph,
    c: CycleSeparator,
    k: int,
    provider: str = "trivial",
) -> list[AnnotatedSeparator]:
    """Annotated separator family for a cycle separator.

    The trivial provider is exhaustive by construction but only measured
    for short cycles; the full-contract construction (iterative separator
    replacement) is intentionally not implemented and requesting it is a
    refusal, not a fallback.
    """
    verify_separator(g, c)
    if provider == "trivial":
        return trivial_family(c, k)
    if provider == "full":
        raise ProviderUnavailableError(
            "full-contract separator families are not implemented; "
            "use --separator-family trivial"
        )
    raise ValueError("unknown separator-family provider %r" % (provider,))
