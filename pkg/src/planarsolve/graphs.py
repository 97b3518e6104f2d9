"""Embedded planar graphs: parsing, planarity, rotation systems, faces.

Vertex ids are dense 0-based integers after parsing; original file ids are
kept as labels for output.  A graph carries its combinatorial embedding as a
rotation system plus one designated outer face per connected component.
Graphs are immutable; subgraph operations return new objects and inherit the
rotation (a restriction of a planar rotation system is again planar).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import networkx as nx

Edge = tuple[int, int]
FaceWalk = tuple[int, ...]


class GraphFormatError(ValueError):
    """Instance file is malformed; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PlanarityError(ValueError):
    """Graph is not planar (or the supplied rotation is not genus 0)."""

    def __init__(self, message: str, witness_edges: tuple[Edge, ...] = ()):
        self.witness_edges = witness_edges
        super().__init__(message)


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class EmbeddedGraph:
    vertices: tuple[int, ...]
    weight: dict[int, int]
    cost: dict[int, int]
    edges: frozenset[Edge]
    edge_weight: dict[Edge, int]
    rotation: dict[int, tuple[int, ...]]
    outer_faces: tuple[FaceWalk, ...]
    directed: bool = False
    arcs: tuple[Edge, ...] = ()
    arc_weight: dict[Edge, int] = field(default_factory=dict)
    labels: dict[int, int] | None = None

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.rotation[v]

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self.edges

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    def label_of(self, v: int) -> int:
        return v if self.labels is None else self.labels[v]

    def components(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        out: list[tuple[int, ...]] = []
        for s in self.vertices:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self.rotation[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        stack.append(w)
            out.append(tuple(sorted(comp)))
        return out


def trace_faces(
    rotation: dict[int, tuple[int, ...]],
) -> tuple[list[FaceWalk], dict[Edge, int]]:
    """Face walks of the rotation system plus the dart-to-face index map.

    A walk (w0, ..., w_{t-1}) stands for the dart cycle (w0->w1, ...,
    w_{t-1}->w0).  Every dart lies on exactly one face.  Isolated vertices
    contribute no walk here and are accounted for separately in the Euler
    check.
    """
    pos: dict[int, dict[int, int]] = {
        v: {u: i for i, u in enumerate(nbrs)} for v, nbrs in rotation.items()
    }
    unused: set[Edge] = set()
    for v in sorted(rotation):
        for u in rotation[v]:
            unused.add((v, u))
    faces: list[FaceWalk] = []
    dart_face: dict[Edge, int] = {}
    for start in sorted(unused):
        if start not in unused:
            continue
        walk: list[int] = []
        dart = start
        while dart in unused:
            unused.discard(dart)
            dart_face[dart] = len(faces)
            u, v = dart
            walk.append(u)
            nbrs = rotation[v]
            dart = (v, nbrs[(pos[v][u] + 1) % len(nbrs)])
        faces.append(tuple(walk))
    return faces, dart_face


def faces_from_rotation(
    rotation: dict[int, tuple[int, ...]],
) -> list[FaceWalk]:
    """All face walks of the rotation system, as closed vertex sequences."""
    return trace_faces(rotation)[0]


def canonical_walk(walk: FaceWalk) -> FaceWalk:
    """Lexicographically smallest cyclic rotation; orientation preserved."""
    if not walk:
        return walk
    return min(tuple(walk[i:] + walk[:i]) for i in range(len(walk)))


def choose_outer_face(faces: list[FaceWalk]) -> FaceWalk:
    """Deterministic outer-face pick: most distinct vertices, then smallest
    canonical walk."""
    if not faces:
        return ()
    return min(faces, key=lambda f: (-len(set(f)), canonical_walk(f)))


def _component_faces(
    rotation: dict[int, tuple[int, ...]], comp: tuple[int, ...]
) -> list[FaceWalk]:
    sub = {v: rotation[v] for v in comp}
    return faces_from_rotation(sub)


def _euler_check(g_vertices, rotation) -> None:
    # V - E + F = 2 must hold per connected component for a genus-0 rotation.
    seen: set[int] = set()
    for s in sorted(g_vertices):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in rotation[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        ecount = sum(len(rotation[v]) for v in comp) // 2
        fcount = len(_component_faces(rotation, tuple(comp))) if ecount else 1
        if len(comp) - ecount + fcount != 2:
            raise PlanarityError(
                "rotation system is not a planar embedding "
                f"(component of {s}: V={len(comp)} E={ecount} F={fcount})"
            )


def compute_rotation(
    vertices: tuple[int, ...], edges: frozenset[Edge]
) -> dict[int, tuple[int, ...]]:
    """Planar rotation system via the LR planarity test, deterministic for a
    fixed vertex/edge order.  Raises PlanarityError with a Kuratowski-style
    witness subgraph on failure."""
    G = nx.Graph()
    G.add_nodes_from(sorted(vertices))
    G.add_edges_from(sorted(edges))
    ok, cert = nx.check_planarity(G, counterexample=True)
    if not ok:
        witness = tuple(sorted(edge_key(u, v) for u, v in cert.edges()))
        raise PlanarityError("graph is not planar", witness)
    data = cert.get_data()
    return {v: tuple(data[v]) for v in sorted(vertices)}


def build_graph(
    vertices,
    edges,
    weight=None,
    cost=None,
    rotation=None,
    directed: bool = False,
    arcs=(),
    arc_weight=None,
    edge_weight=None,
    labels=None,
) -> EmbeddedGraph:
    """Assemble and validate an EmbeddedGraph; computes the embedding when no
    rotation is supplied."""
    vs = tuple(sorted(vertices))
    vset = set(vs)
    es: set[Edge] = set()
    for u, v in edges:
        if u == v:
            raise GraphFormatError(f"self loop at vertex {u}")
        if u not in vset or v not in vset:
            raise GraphFormatError(f"edge ({u},{v}) references unknown vertex")
        k = edge_key(u, v)
        if k in es:
            raise GraphFormatError(f"duplicate edge ({k[0]},{k[1]})")
        es.add(k)
    if rotation is None:
        rotation = compute_rotation(vs, frozenset(es))
    else:
        rotation = {v: tuple(rotation.get(v, ())) for v in vs}
        for v in vs:
            if sorted(rotation[v]) != sorted(u for u in vset if edge_key(u, v) in es and u != v):
                raise GraphFormatError(f"rotation at vertex {v} does not list its neighbors")
        _euler_check(vs, rotation)
    outer: list[FaceWalk] = []
    seen: set[int] = set()
    for s in vs:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in rotation[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        fs = _component_faces(rotation, tuple(sorted(comp)))
        outer.append(choose_outer_face(fs) if fs else (min(comp),))
    w = {v: int((weight or {}).get(v, 0)) for v in vs}
    c = {v: int((cost or {}).get(v, 1)) for v in vs}
    for v in vs:
        if c[v] < 1:
            raise GraphFormatError(f"vertex {v} has non-positive cost {c[v]}")
    ew = {k: int((edge_weight or {}).get(k, 0)) for k in es}
    aw = dict(arc_weight or {})
    return EmbeddedGraph(
        vertices=vs,
        weight=w,
        cost=c,
        edges=frozenset(es),
        edge_weight=ew,
        rotation=rotation,
        outer_faces=tuple(sorted(outer, key=lambda f: min(f) if f else -1)),
        directed=directed,
        arcs=tuple(arcs),
        arc_weight={(u, v): int(x) for (u, v), x in aw.items()},
        labels=labels,
    )


def parse_graph(text: str) -> EmbeddedGraph:
    """Parse the instance file format.

    ``p planar <n> <m> [directed]`` then ``v <id> [<weight> [<cost>]]``,
    ``e <u> <v> [<w>]`` (or ``a`` in directed mode), optional
    ``r <id> <neighbors...>`` rotation lines, ``#`` comments.  Missing
    weights default to 0, missing costs to 1.
    """
    header = None
    vlines: dict[int, tuple[int, int]] = {}
    elines: list[tuple[int, int, int, int]] = []
    rlines: dict[int, tuple[int, ...]] = {}
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
                raise GraphFormatError("expected 'p planar <n> <m> [directed]'", ln)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphFormatError("n and m must be integers", ln) from None
            directed = len(parts) > 4 and parts[4] == "directed"
            if len(parts) > 4 and not directed:
                raise GraphFormatError(f"unknown p-line flag {parts[4]!r}", ln)
            header = (n, m, directed)
        elif header is None:
            raise GraphFormatError("first non-comment line must be the p line", ln)
        elif tag == "v":
            if len(parts) < 2 or len(parts) > 4:
                raise GraphFormatError("expected 'v <id> [<weight> [<cost>]]'", ln)
            try:
                vid = int(parts[1])
                w = int(parts[2]) if len(parts) > 2 else 0
                c = int(parts[3]) if len(parts) > 3 else 1
            except ValueError:
                raise GraphFormatError("v line fields must be integers", ln) from None
            if vid in vlines:
                raise GraphFormatError(f"duplicate v line for {vid}", ln)
            vlines[vid] = (w, c)
        elif tag in ("e", "a"):
            want = "a" if header[2] else "e"
            if tag != want:
                raise GraphFormatError(f"expected {want!r} lines for this mode", ln)
            if len(parts) < 3 or len(parts) > 4:
                raise GraphFormatError(f"expected '{tag} <u> <v> [<w>]'", ln)
            try:
                u, v = int(parts[1]), int(parts[2])
                w = int(parts[3]) if len(parts) > 3 else 0
            except ValueError:
                raise GraphFormatError("edge fields must be integers", ln) from None
            if u == v:
                raise GraphFormatError(f"self loop at vertex {u}", ln)
            elines.append((u, v, w, ln))
        elif tag == "r":
            if len(parts) < 2:
                raise GraphFormatError("expected 'r <id> <neighbors...>'", ln)
            try:
                vid = int(parts[1])
                nbrs = tuple(int(x) for x in parts[2:])
            except ValueError:
                raise GraphFormatError("r line fields must be integers", ln) from None
            if vid in rlines:
                raise GraphFormatError(f"duplicate r line for {vid}", ln)
            rlines[vid] = nbrs
        else:
            raise GraphFormatError(f"unknown line tag {tag!r}", ln)
    if header is None:
        raise GraphFormatError("missing p line")
    n, m, directed = header
    if len(elines) != m:
        raise GraphFormatError(f"p line declares {m} edges but {len(elines)} given")

    orig_ids = set(vlines)
    for u, v, _, _ in elines:
        orig_ids.add(u)
        orig_ids.add(v)
    for vid, nbrs in rlines.items():
        orig_ids.add(vid)
        orig_ids.update(nbrs)
    if len(orig_ids) > n:
        raise GraphFormatError(f"p line declares {n} vertices but {len(orig_ids)} referenced")
    # Vertices may be declared only through the count: pad with the smallest
    # unused non-negative ids.
    fill = 0
    while len(orig_ids) < n:
        while fill in orig_ids:
            fill += 1
        orig_ids.add(fill)
    order = sorted(orig_ids)
    dense = {orig: i for i, orig in enumerate(order)}
    labels = {i: orig for orig, i in dense.items()}

    weight = {dense[v]: wc[0] for v, wc in vlines.items()}
    cost = {dense[v]: wc[1] for v, wc in vlines.items()}
    edges: set[Edge] = set()
    edge_weight: dict[Edge, int] = {}
    arcs: list[Edge] = []
    arc_weight: dict[Edge, int] = {}
    if directed:
        seen_arcs: set[Edge] = set()
        for u, v, w, ln in elines:
            du, dv = dense[u], dense[v]
            if (du, dv) in seen_arcs:
                raise GraphFormatError(f"duplicate arc ({u},{v})", ln)
            seen_arcs.add((du, dv))
            arcs.append((du, dv))
            arc_weight[(du, dv)] = w
            edges.add(edge_key(du, dv))
    else:
        for u, v, w, ln in elines:
            k = edge_key(dense[u], dense[v])
            if k in edges:
                raise GraphFormatError(f"duplicate edge ({u},{v})", ln)
            edges.add(k)
            edge_weight[k] = w

    rotation = None
    if rlines:
        if set(rlines) != {v for v in orig_ids if any(
            edge_key(dense[v], dense[u]) in edges for u in orig_ids if u != v
        )} and set(rlines) != orig_ids:
            raise GraphFormatError("rotation lines must cover every vertex with an edge")
        rotation = {dense[v]: tuple(dense[u] for u in nbrs) for v, nbrs in rlines.items()}
        for i in range(n):
            rotation.setdefault(i, ())
    return build_graph(
        vertices=range(n),
        edges=edges,
        weight=weight,
        cost=cost,
        rotation=rotation,
        directed=directed,
        arcs=tuple(arcs),
        arc_weight=arc_weight,
        edge_weight=edge_weight,
        labels=labels,
    )


def write_graph(g: EmbeddedGraph, include_rotation: bool = False) -> str:
    """Serialize in the instance file format using original labels."""
    lab = g.label_of
    lines = [f"p planar {g.n} {len(g.arcs) if g.directed else g.m}"
             + (" directed" if g.directed else "")]
    for v in g.vertices:
        lines.append(f"v {lab(v)} {g.weight[v]} {g.cost[v]}")
    if g.directed:
        for u, v in g.arcs:
            lines.append(f"a {lab(u)} {lab(v)} {g.arc_weight[(u, v)]}")
    else:
        for u, v in sorted(g.edges):
            lines.append(f"e {lab(u)} {lab(v)} {g.edge_weight[(u, v)]}")
    if include_rotation:
        for v in g.vertices:
            if g.rotation[v]:
                lines.append(f"r {lab(v)} " + " ".join(str(lab(u)) for u in g.rotation[v]))
    return "\n".join(lines) + "\n"


def induced_subgraph(g: EmbeddedGraph, keep) -> EmbeddedGraph:
    """Induced subgraph on `keep`, inheriting weights, costs, and rotation.

    Outer faces are re-chosen canonically per component of the restriction.
    """
    ks = frozenset(keep) & g.vertex_set()
    rotation = {v: tuple(u for u in g.rotation[v] if u in ks) for v in sorted(ks)}
    edges = frozenset(e for e in g.edges if e[0] in ks and e[1] in ks)
    arcs = tuple((u, v) for u, v in g.arcs if u in ks and v in ks)
    outer: list[FaceWalk] = []
    seen: set[int] = set()
    for s in sorted(ks):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in rotation[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        fs = _component_faces(rotation, tuple(sorted(comp)))
        outer.append(choose_outer_face(fs) if fs else (min(comp),))
    return EmbeddedGraph(
        vertices=tuple(sorted(ks)),
        weight={v: g.weight[v] for v in sorted(ks)},
        cost={v: g.cost[v] for v in sorted(ks)},
        edges=edges,
        edge_weight={e: g.edge_weight[e] for e in edges},
        rotation=rotation,
        outer_faces=tuple(sorted(outer, key=lambda f: min(f) if f else -1)),
        directed=g.directed,
        arcs=arcs,
        arc_weight={a: g.arc_weight[a] for a in arcs},
        labels=g.labels,
    )


def with_outer_faces(g: EmbeddedGraph, outer: tuple[FaceWalk, ...]) -> EmbeddedGraph:
    return replace(g, outer_faces=outer)


def compute_embedding(vertices, edges) -> EmbeddedGraph:
    """Embed an abstract simple graph (planarity failure raises)."""
    return build_graph(vertices=vertices, edges=edges)
