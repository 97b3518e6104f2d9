"""Pattern-graph combinatorics: psi, separations, small-graph isomorphism.

Pattern graphs are small (multi)graphs given by an edge multiset over integer
nodes; parallel edges and self loops carry multiplicities.  All algorithms
here are exhaustive and meant for patterns of at most a dozen nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product
from math import ceil

import networkx as nx

from .graphs import GraphFormatError

PatternEdge = tuple[int, int]


def pattern_edge_key(u: int, v: int) -> PatternEdge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class PatternGraph:
    nodes: tuple[int, ...]
    multi: tuple[tuple[PatternEdge, int], ...]

    @property
    def edge_dict(self) -> dict[PatternEdge, int]:
        return dict(self.multi)

    @property
    def simple(self) -> bool:
        return all(m == 1 and u != v for (u, v), m in self.multi)

    @property
    def edge_count(self) -> int:
        return sum(m for _, m in self.multi)

    def degree(self, v: int) -> int:
        d = 0
        for (a, b), m in self.multi:
            if a == v:
                d += m
            if b == v:
                d += m
        return d

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for (a, b), _ in self.multi:
            if a == v and b != v:
                out.add(b)
            if b == v and a != v:
                out.add(a)
        return out


def make_pattern(nodes, edges: dict[PatternEdge, int]) -> PatternGraph:
    ns = tuple(sorted(nodes))
    nset = set(ns)
    norm: dict[PatternEdge, int] = {}
    for (u, v), m in edges.items():
        if u not in nset or v not in nset:
            raise ValueError(f"edge ({u},{v}) references unknown node")
        if m < 1:
            raise ValueError("multiplicities must be positive")
        k = pattern_edge_key(u, v)
        norm[k] = norm.get(k, 0) + m
    return PatternGraph(nodes=ns, multi=tuple(sorted(norm.items())))


def pattern_is_planar(h: PatternGraph) -> bool:
    G = nx.Graph()
    G.add_nodes_from(h.nodes)
    G.add_edges_from((u, v) for (u, v), _ in h.multi if u != v)
    ok, _ = nx.check_planarity(G)
    return ok


def parse_pattern(text: str) -> PatternGraph:
    """Instance file format; repeated e lines raise multiplicities and
    self-loop e lines are allowed (multigraph mode)."""
    header = None
    nodes: set[int] = set()
    edges: dict[PatternEdge, int] = {}
    count = 0
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        tag = parts[0]
        if tag == "p":
            if header is not None:
                raise GraphFormatError("duplicate p line", ln)
            if len(parts) < 4 or parts[1] != "planar":
                raise GraphFormatError("expected 'p planar <n> <m>'", ln)
            header = (int(parts[2]), int(parts[3]))
        elif header is None:
            raise GraphFormatError("first non-comment line must be the p line", ln)
        elif tag == "v":
            nodes.add(int(parts[1]))
        elif tag == "e":
            if len(parts) < 3:
                raise GraphFormatError("expected 'e <u> <v> [<w>]'", ln)
            u, v = int(parts[1]), int(parts[2])
            k = pattern_edge_key(u, v)
            edges[k] = edges.get(k, 0) + 1
            nodes.add(u)
            nodes.add(v)
            count += 1
        else:
            raise GraphFormatError(f"unknown line tag {tag!r}", ln)
    if header is None:
        raise GraphFormatError("missing p line")
    n, m = header
    if count != m:
        raise GraphFormatError(f"p line declares {m} edges but {count} given")
    if len(nodes) > n:
        raise GraphFormatError(f"p line declares {n} nodes but {len(nodes)} referenced")
    fill = 0
    while len(nodes) < n:
        while fill in nodes:
            fill += 1
        nodes.add(fill)
    return make_pattern(nodes, edges)


def psi(h: PatternGraph) -> int:
    """Minimum vertex count any model of h must have: max(|U|, ceil(2|F|/5))."""
    return max(len(h.nodes), ceil(2 * h.edge_count / 5))


def induced_pattern(h: PatternGraph, keep) -> PatternGraph:
    ks = frozenset(keep)
    return PatternGraph(
        nodes=tuple(sorted(ks & set(h.nodes))),
        multi=tuple((e, m) for e, m in h.multi if e[0] in ks and e[1] in ks),
    )


def remove_pattern_edges(h: PatternGraph, drop) -> PatternGraph:
    ds = {pattern_edge_key(*e) for e in drop}
    return PatternGraph(
        nodes=h.nodes,
        multi=tuple((e, m) for e, m in h.multi if e not in ds),
    )


def find_isomorphism(h1: PatternGraph, h2: PatternGraph, fixed=frozenset()):
    """Multiplicity-preserving isomorphism from h1 to h2 fixing `fixed`
    nodes pointwise, or None.  Exhaustive permutation search with degree
    pruning."""
    fixed = frozenset(fixed)
    if not (fixed <= set(h1.nodes) and fixed <= set(h2.nodes)):
        raise ValueError("fixed nodes must belong to both graphs")
    if len(h1.nodes) != len(h2.nodes) or h1.edge_count != h2.edge_count:
        return None
    e1, e2 = h1.edge_dict, h2.edge_dict
    deg1 = {v: h1.degree(v) for v in h1.nodes}
    deg2 = {v: h2.degree(v) for v in h2.nodes}
    if sorted(deg1.values()) != sorted(deg2.values()):
        return None
    for v in fixed:
        if deg1[v] != deg2[v]:
            return None
    for u, v in combinations(sorted(fixed), 2):
        if e1.get(pattern_edge_key(u, v), 0) != e2.get(pattern_edge_key(u, v), 0):
            return None
    free1 = [v for v in h1.nodes if v not in fixed]
    free2 = [v for v in h2.nodes if v not in fixed]
    for perm in permutations(free2):
        if any(deg1[a] != deg2[b] for a, b in zip(free1, perm)):
            continue
        f = {v: v for v in fixed}
        f.update(zip(free1, perm))
        ok = True
        for (a, b), m in h1.multi:
            if e2.get(pattern_edge_key(f[a], f[b]), 0) != m:
                ok = False
                break
        if ok:
            return f
    return None


def graphs_isomorphic(h1: PatternGraph, h2: PatternGraph, fixed=frozenset()) -> bool:
    return find_isomorphism(h1, h2, fixed) is not None


@dataclass(frozen=True)
class Separation:
    X: frozenset[int]
    Y: frozenset[int]

    @property
    def separator(self) -> frozenset[int]:
        return self.X & self.Y

    @property
    def size(self) -> int:
        return len(self.X & self.Y)


def is_separation(h: PatternGraph, X, Y) -> bool:
    Xs, Ys = frozenset(X), frozenset(Y)
    if Xs | Ys != set(h.nodes):
        return False
    only_x = Xs - Ys
    only_y = Ys - Xs
    for (u, v), _ in h.multi:
        if (u in only_x and v in only_y) or (u in only_y and v in only_x):
            return False
    return True


def _components_without(h: PatternGraph, removed: frozenset[int]) -> list[tuple[int, ...]]:
    left = [v for v in h.nodes if v not in removed]
    seen: set[int] = set()
    out = []
    for s in left:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in h.neighbors(u):
                if w not in removed and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(tuple(sorted(comp)))
    return out


def enumerate_separations(h: PatternGraph, t: int) -> list[Separation]:
    """One labeled representative per isomorphism class of separations of
    size at most t (isomorphisms fix the separator pointwise).

    Per separator Z: the components of H - Z are grouped into classes by
    isomorphism of H[Z + component] relative to Z; each multiset assignment
    of class members to the X side yields one representative.  Distinct Z
    never collide (the pointwise-fixed separator determines Z), and swapping
    two components of one class is an automorphism, so the count is exact.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    out: list[Separation] = []
    nodes = sorted(h.nodes)
    for zsize in range(0, min(t, len(nodes)) + 1):
        for zc in combinations(nodes, zsize):
            Z = frozenset(zc)
            comps = _components_without(h, Z)
            classes: list[list[tuple[int, ...]]] = []
            for comp in comps:
                side = induced_pattern(h, Z | set(comp))
                placed = False
                for cls in classes:
                    rep = induced_pattern(h, Z | set(cls[0]))
                    if graphs_isomorphic(rep, side, fixed=Z):
                        cls.append(comp)
                        placed = True
                        break
                if not placed:
                    classes.append([comp])
            for counts in product(*(range(len(cls) + 1) for cls in classes)):
                X = set(Z)
                Y = set(Z)
                for cls, cnt in zip(classes, counts):
                    for i, comp in enumerate(cls):
                        (X if i < cnt else Y).update(comp)
                out.append(Separation(frozenset(X), frozenset(Y)))
    return out
