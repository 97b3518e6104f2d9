"""Outerplanar peeling, BFS layers, Baker slabs, and face triangulation.

Layers are 0-based and depth = max layer + 1: a graph is t-outerplanar when
the boundary-removal process finishes within layers 0..t-1.  The peel depth
depends on which face plays the outer role, so callers that need a small
depth search over candidate faces (`best_outer_face`); data-structure
defaults use the canonical face pick from graphs.py.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import (
    EmbeddedGraph,
    FaceWalk,
    canonical_walk,
    choose_outer_face,
    edge_key,
    faces_from_rotation,
)

Rotation = dict[int, tuple[int, ...]]


@dataclass(frozen=True)
class Layering:
    layer: dict[int, int]

    @property
    def depth(self) -> int:
        return max(self.layer.values(), default=-1) + 1

    def __getitem__(self, v: int) -> int:
        return self.layer[v]


def _components_of(rot: Rotation) -> list[tuple[int, ...]]:
    seen: set[int] = set()
    out = []
    for s in sorted(rot):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in rot[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(tuple(sorted(comp)))
    return out


def _walk_darts(walk: FaceWalk) -> set[tuple[int, int]]:
    t = len(walk)
    if t < 2:
        return set()
    return {(walk[i], walk[(i + 1) % t]) for i in range(t)}


def peel_from_face(rot0: Rotation, outer: FaceWalk) -> dict[int, int]:
    """Peel one connected component starting from the given boundary face.

    Each round removes the vertices on the current boundary face of every
    surviving piece; the next boundary of a piece is the face of the
    restricted embedding that absorbed the cut (tracked through darts that
    survive from faces incident to removed vertices).
    """
    layer: dict[int, int] = {}
    alive = set(rot0)
    rot = dict(rot0)
    boundaries: list[FaceWalk] = [outer]
    i = -1
    while alive:
        i += 1
        remove: set[int] = set()
        for walk in boundaries:
            remove.update(walk)
        remove &= alive
        if not remove:
            # Stale boundary (cannot occur when boundaries are recomputed
            # each round); fall back to removing everything.
            remove = set(alive)
        for v in remove:
            layer[v] = i
        faces = faces_from_rotation({v: rot[v] for v in alive})
        seeds: set[tuple[int, int]] = set()
        for f in faces:
            if any(v in remove for v in f):
                for u, v in _walk_darts(f):
                    if u not in remove and v not in remove:
                        seeds.add((u, v))
        alive -= remove
        rot = {v: tuple(u for u in rot[v] if u in alive) for v in alive}
        if not alive:
            break
        boundaries = []
        for comp in _components_of(rot):
            comp_rot = {v: rot[v] for v in comp}
            if not any(comp_rot.values()):
                boundaries.append(comp)
                continue
            comp_faces = faces_from_rotation(comp_rot)
            chosen = None
            for f in sorted(comp_faces, key=canonical_walk):
                if _walk_darts(f) & seeds:
                    chosen = f
                    break
            if chosen is None:
                chosen = choose_outer_face(comp_faces)
            boundaries.append(chosen)
    return layer


def best_outer_face(rot0: Rotation) -> tuple[FaceWalk, dict[int, int]]:
    """Face of one component minimizing the peel depth, with its layering."""
    if not any(rot0.values()):
        return tuple(sorted(rot0)), {v: 0 for v in rot0}
    faces = sorted(faces_from_rotation(rot0), key=canonical_walk)
    best: tuple[FaceWalk, dict[int, int]] | None = None
    best_depth = None
    for f in faces:
        lay = peel_from_face(rot0, f)
        depth = max(lay.values())
        if best_depth is None or depth < best_depth:
            best = (f, lay)
            best_depth = depth
    assert best is not None
    return best


def outerplanar_layering(g: EmbeddedGraph, minimize: bool = False) -> Layering:
    """Peel layering per component; minimize=True searches candidate faces
    for the smallest depth, else the graph's designated outer faces drive."""
    out: dict[int, int] = {}
    for comp in g.components():
        rot0 = {v: tuple(u for u in g.rotation[v] if u in comp) for v in comp}
        if minimize:
            _, lay = best_outer_face(rot0)
        else:
            walk = next(f for f in g.outer_faces if f and f[0] in comp)
            lay = peel_from_face(rot0, walk) if any(rot0.values()) else {v: 0 for v in comp}
        out.update(lay)
    return Layering(out)


def outerplanarity_over_faces(g: EmbeddedGraph) -> int:
    """Smallest peel depth achievable by re-choosing the outer face of each
    component within the given rotation.  Sound upper-bound certificate for
    t-outerplanarity."""
    return outerplanar_layering(g, minimize=True).depth


def bfs_layering(g: EmbeddedGraph, root: int | None = None) -> Layering:
    """0-based BFS layers; disconnected graphs get one root per component.

    Default root of a component is the smallest vertex of its designated
    outer face, so BFS layers majorize peel layers.
    """
    if root is not None and root not in g.rotation:
        raise KeyError(f"root {root} not in graph")
    lay: dict[int, int] = {}
    for comp in g.components():
        if root is not None and root in comp:
            r = root
        else:
            walk = next(f for f in g.outer_faces if f and f[0] in comp)
            r = min(walk)
        lay[r] = 0
        frontier = [r]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for w in g.rotation[u]:
                    if w not in lay:
                        lay[w] = d
                        nxt.append(w)
            frontier = nxt
    return Layering(lay)


def baker_partition(g: EmbeddedGraph, d: int) -> list[frozenset[int]]:
    """Partition V into A_1..A_d by BFS layer mod d; removing any A_i leaves
    a (d-1)-outerplanar graph."""
    if d < 1:
        raise ValueError("d must be positive")
    lay = bfs_layering(g)
    out = [set() for _ in range(d)]
    for v, l in lay.layer.items():
        out[l % d].add(v)
    return [frozenset(s) for s in out]


def slab_components(
    g: EmbeddedGraph, layering: Layering, removed: frozenset[int]
) -> list[tuple[tuple[int, ...], int]]:
    """Connected components of G - removed with the number of distinct BFS
    layers each one spans (its outerplanarity certificate)."""
    keep = [v for v in g.vertices if v not in removed]
    rot = {v: tuple(u for u in g.rotation[v] if u not in removed) for v in keep}
    out = []
    for comp in _components_of(rot):
        span = len({layering[v] for v in comp})
        out.append((comp, span))
    return out


@dataclass(frozen=True)
class TriangulationResult:
    graph: EmbeddedGraph
    delta: frozenset[tuple[int, int]]
    degenerate: bool = False


def _valid_chord(walk: FaceWalk, edges: set, i: int, j: int) -> bool:
    t = len(walk)
    a, b = walk[i], walk[j]
    if a == b:
        return False
    if (j - i) % t == 1 or (i - j) % t == 1:
        return False
    return edge_key(a, b) not in edges


def _first_chord(walk: FaceWalk, edges: set) -> tuple[int, int] | None:
    t = len(walk)
    for i in range(t):
        for j in range(i + 2, t):
            if _valid_chord(walk, edges, i, j):
                return (i, j)
    return None


def _split_walk(walk: FaceWalk, i: int, j: int) -> tuple[FaceWalk, FaceWalk]:
    # Chord between occurrences i < j of a face walk: side A keeps the part
    # outside [i, j], side B the part inside.
    a_side = (walk[i], walk[j]) + walk[j + 1 :] + walk[:i]
    b_side = (walk[j], walk[i]) + walk[i + 1 : j]
    return a_side, b_side


class _Triangulator:
    """Mutable rotation + face worklist; inserts chords keeping planarity."""

    def __init__(self, g: EmbeddedGraph):
        self.rot = {v: list(g.rotation[v]) for v in g.vertices}
        self.edges = set(g.edges)
        self.delta: set[tuple[int, int]] = set()

    def insert_edge(self, a: int, b: int, after_a: int, after_b: int) -> None:
        # Each endpoint slots the new neighbor right after a given existing
        # neighbor, i.e. into a specific face corner.
        self.rot[a].insert(self.rot[a].index(after_a) + 1, b)
        self.rot[b].insert(self.rot[b].index(after_b) + 1, a)
        k = edge_key(a, b)
        self.edges.add(k)
        self.delta.add(k)

    def add_chord(self, walk: FaceWalk, i: int, j: int) -> tuple[FaceWalk, FaceWalk]:
        a, b = walk[i], walk[j]
        t = len(walk)
        self.insert_edge(a, b, walk[(i - 1) % t], walk[(j - 1) % t])
        return _split_walk(walk, i, j)

    def triangulate_face(self, walk: FaceWalk) -> None:
        stack = [walk]
        while stack:
            f = stack.pop()
            if len(f) <= 3:
                continue
            ch = _first_chord(f, self.edges)
            if ch is None:
                raise RuntimeError(f"no valid chord in face walk {f}")
            a_side, b_side = self.add_chord(f, *ch)
            stack.append(a_side)
            stack.append(b_side)

    def fan_outer(self, walk: FaceWalk) -> FaceWalk:
        """Triangulate the outer face, keeping a shrinking walk designated as
        outer; prefers fan chords from the smallest outer vertex."""
        outer = walk
        while len(outer) > 3:
            apex_pos = outer.index(min(outer))
            outer = outer[apex_pos:] + outer[:apex_pos]
            t = len(outer)
            ch = None
            for j in range(2, t - 1):
                if _valid_chord(outer, self.edges, 0, j):
                    ch = (0, j)
                    break
            if ch is None:
                ch = _first_chord(outer, self.edges)
            if ch is None:
                raise RuntimeError(f"no valid chord in outer walk {outer}")
            a_side, b_side = self.add_chord(outer, *ch)
            # Keep the longer side as outer so holes close from one end.
            if len(a_side) >= len(b_side):
                outer = a_side
                self.triangulate_face(b_side)
            else:
                outer = b_side
                self.triangulate_face(a_side)
        return outer


def triangulate(g: EmbeddedGraph) -> TriangulationResult:
    """Add chords (and bridges between components) until every face is a
    triangle; added edges carry weight 0 and are reported as the delta set.

    The result's designated outer face is a triangle chosen so the peel
    depth grows by at most one layer over the input's best face.
    """
    if g.n < 3:
        return TriangulationResult(graph=g, delta=frozenset(), degenerate=True)
    tri = _Triangulator(g)
    # Bridge components at their designated outer faces, in id order.
    comps = g.components()
    if len(comps) > 1:
        walks = []
        for comp in comps:
            walks.append(next(f for f in g.outer_faces if f and f[0] in comp))
        for wa, wb in zip(walks, walks[1:]):
            a = min(wa)
            b = min(wb)
            if len(wa) >= 2:
                after_a = wa[(wa.index(a) - 1) % len(wa)]
            else:
                after_a = None
            if len(wb) >= 2:
                after_b = wb[(wb.index(b) - 1) % len(wb)]
            else:
                after_b = None
            # Isolated endpoints have an empty rotation; append directly.
            if after_a is None:
                tri.rot[a].append(b)
            if after_b is None:
                tri.rot[b].append(a)
            if after_a is not None and after_b is not None:
                tri.insert_edge(a, b, after_a, after_b)
            else:
                if after_a is not None:
                    tri.rot[a].insert(tri.rot[a].index(after_a) + 1, b)
                if after_b is not None:
                    tri.rot[b].insert(tri.rot[b].index(after_b) + 1, a)
                k = edge_key(a, b)
                tri.edges.add(k)
                tri.delta.add(k)
    # Choose the outer face by minimal peel depth, then triangulate inner
    # faces with arbitrary valid chords and fan the outer face.
    rot_now = {v: tuple(tri.rot[v]) for v in g.vertices}
    outer_walk, _ = best_outer_face(rot_now)
    inner = [f for f in sorted(faces_from_rotation(rot_now), key=canonical_walk)
             if canonical_walk(f) != canonical_walk(outer_walk)]
    for f in inner:
        tri.triangulate_face(f)
    final_outer = tri.fan_outer(outer_walk)
    ew = dict(g.edge_weight)
    for k in tri.delta:
        ew[k] = 0
    out = EmbeddedGraph(
        vertices=g.vertices,
        weight=dict(g.weight),
        cost=dict(g.cost),
        edges=frozenset(tri.edges),
        edge_weight=ew,
        rotation={v: tuple(tri.rot[v]) for v in g.vertices},
        outer_faces=(final_outer,),
        directed=g.directed,
        arcs=g.arcs,
        arc_weight=dict(g.arc_weight),
        labels=g.labels,
    )
    return TriangulationResult(graph=out, delta=frozenset(tri.delta))
