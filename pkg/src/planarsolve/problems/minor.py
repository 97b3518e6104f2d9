"""Rooted minor search: cheapest subgraph contracting to a pattern graph.

A model of the pattern H assigns every chosen vertex to a pattern node so
that each node's class is connected, contracting the classes reproduces
the adjacency of H exactly, and each node's class contains its root
vertices.  Requests describe partial models cut by a separation (X, Y) of
H: classes of X are under construction, the separator nodes X & Y may
still grow, and their pebbled parts carry a color function, a component
partition, and the set of separator edges not yet realised.

Edge weights must be non-negative; the glue step adds child values and
doubled separator edges would otherwise let a sum under-report the union.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

from ..framework import (
    POS_INF,
    ProblemPlugin,
    RunOutcome,
    Stats,
    enumerate_pebble_sets,
    pebble_cap,
    solve_problem,
)
from ..graphs import EmbeddedGraph
from ..partitions import (
    canonical_partition,
    enumerate_coloring_extensions,
    enumerate_partitions,
    join,
    refines,
    restrict_partition,
)
from ..patterns import (
    PatternGraph,
    Separation,
    _components_without,
    induced_pattern,
    make_pattern,
    pattern_edge_key,
    pattern_is_planar,
)

_SEPARATION_CACHE: dict = {}


def separation_catalog(h: PatternGraph, t: int) -> tuple[Separation, ...]:
    """Memoized list of every labeled separation of size at most t.

    Requests must stay labeled: root constraints and colorings name
    concrete pattern nodes, so collapsing separations up to separator-
    fixing isomorphism would identify requests with different answers."""
    key = (h, t)
    got = _SEPARATION_CACHE.get(key)
    if got is None:
        found = []
        nodes = sorted(h.nodes)
        for zsize in range(min(t, len(nodes)) + 1):
            for zc in combinations(nodes, zsize):
                Z = frozenset(zc)
                comps = _components_without(h, Z)
                for pick in product((False, True), repeat=len(comps)):
                    xs, ys = set(Z), set(Z)
                    for into_x, comp in zip(pick, comps):
                        (xs if into_x else ys).update(comp)
                    found.append(Separation(frozenset(xs), frozenset(ys)))
        got = tuple(
            sorted(found, key=lambda s: (tuple(sorted(s.X)), tuple(sorted(s.Y))))
        )
        _SEPARATION_CACHE[key] = got
    return got


@dataclass(frozen=True)
class MinorRequest:
    """Partial-model request against a separation (X, Y) of the pattern.

    pebble:   chosen vertices on the current boundary portals
    coloring: separator node -> its pebbled class part (covers the pebble)
    parts:    component partition of the pebble inside the partial model
    missing:  separator edges of H[X & Y] the model does not realise yet
    budget:   bound on the number of chosen vertices
    """

    pebble: frozenset
    X: frozenset
    Y: frozenset
    coloring: tuple
    parts: tuple
    missing: frozenset
    budget: int


@dataclass(frozen=True)
class ModelWitness:
    """Chosen subgraph plus the node assignment that realises a request."""

    vertices: frozenset
    edges: frozenset
    assignment: tuple

    def weight(self, g: EmbeddedGraph) -> int:
        return sum(g.edge_weight[e] for e in self.edges)


def _subsets(items):
    items = tuple(items)
    for size in range(len(items) + 1):
        yield from combinations(items, size)


def _request_key(r: MinorRequest):
    return (
        tuple(sorted(r.pebble)),
        tuple(sorted(r.X)),
        tuple(sorted(r.Y)),
        tuple((u, tuple(sorted(img))) for u, img in r.coloring),
        tuple(tuple(sorted(b)) for b in r.parts),
        tuple(sorted(r.missing)),
        r.budget,
    )


def _min_connected(members, edge_items):
    """Minimum spanning connection under non-negative weights:
    (cost, edge set) or None when the members cannot be connected."""
    vs = sorted(members)
    if len(vs) <= 1:
        return 0, frozenset()
    parent = {v: v for v in vs}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    total = 0
    picked = []
    for w, e in sorted((w, e) for e, w in edge_items):
        ru, rv = find(e[0]), find(e[1])
        if ru != rv:
            parent[ru] = rv
            total += w
            picked.append(e)
    root = find(vs[0])
    if any(find(v) != root for v in vs):
        return None
    return total, frozenset(picked)


def _grouping_outcomes(members, pebbles, edge_items):
    """Cheapest ways to split one class into connected groups.

    Every group must hold a pebble (otherwise nothing can reattach it
    later), and the outcome key is the induced pebble partition."""
    best: dict = {}
    for parts in enumerate_partitions(frozenset(members)):
        if any(not blk & pebbles for blk in parts):
            continue
        total = 0
        edges: set = set()
        ok = True
        for blk in parts:
            got = _min_connected(
                blk, [(e, w) for e, w in edge_items if e[0] in blk and e[1] in blk]
            )
            if got is None:
                ok = False
                break
            total += got[0]
            edges |= got[1]
        if not ok:
            continue
        key = canonical_partition(blk & pebbles for blk in parts)
        cur = best.get(key)
        if cur is None or total < cur[0]:
            best[key] = (total, frozenset(edges))
    return best


def _node_partition(parts, colored: frozenset):
    return canonical_partition(b for b in parts if b & colored)


def fulfills_request(sub, f, request: MinorRequest, h: PatternGraph, mu=None) -> bool:
    """Direct check that a subgraph with a node assignment realises a
    request: budget, class structure, root containment, per-node component
    partitions, and exact contracted adjacency H[X] minus the missing
    edges.  `sub` is a ModelWitness or a (vertices, edges) pair."""
    if isinstance(sub, ModelWitness):
        verts, edges = sub.vertices, sub.edges
    else:
        verts, edges = sub
    verts = frozenset(verts)
    edges = frozenset((u, v) if u <= v else (v, u) for u, v in edges)
    for u, v in edges:
        if u == v or u not in verts or v not in verts:
            return False
    if len(verts) > request.budget:
        return False
    X = request.X
    fmap = {u: frozenset(vs) for u, vs in (f.items() if isinstance(f, dict) else f)}
    if set(fmap) != set(X):
        return False
    if any(not img for img in fmap.values()):
        return False
    acc: set = set()
    for img in fmap.values():
        if acc & img:
            return False
        acc |= img
    if acc != verts:
        return False
    for node, pins in (mu or {}).items():
        pins = frozenset(pins)
        if not pins:
            continue
        if node in fmap:
            if not pins <= fmap[node]:
                return False
        elif pins & verts:
            return False
    Z = X & request.Y
    cmap = {u: frozenset(vs) for u, vs in request.coloring}
    if set(cmap) != set(Z):
        return False
    covered: set = set()
    for u, img in cmap.items():
        if not img <= fmap[u]:
            return False
        covered |= img
    if frozenset(covered) != request.pebble:
        return False
    node_of = {}
    for u, img in fmap.items():
        for v in img:
            node_of[v] = u
    adj: dict = {v: [] for v in verts}
    for a, b in edges:
        if node_of[a] == node_of[b]:
            adj[a].append(b)
            adj[b].append(a)
    for u in sorted(fmap):
        img = fmap[u]
        comps = []
        seen: set = set()
        for s in sorted(img):
            if s in seen:
                continue
            comp = {s}
            stack = [s]
            while stack:
                a = stack.pop()
                for b in adj[a]:
                    if b not in comp:
                        comp.add(b)
                        stack.append(b)
            seen |= comp
            comps.append(frozenset(comp))
        if u in Z:
            want = [c & cmap[u] for c in comps]
            # a pebble-free component could never reattach across the cut
            if any(not wc for wc in want):
                return False
            if canonical_partition(want) != _node_partition(request.parts, cmap[u]):
                return False
        elif len(comps) != 1:
            return False
    modeled: set = set()
    for a, b in edges:
        ua, ub = node_of[a], node_of[b]
        if ua != ub:
            modeled.add(pattern_edge_key(ua, ub))
    hx = {e for e, _ in induced_pattern(h, X).multi}
    zedges = {e for e in hx if e[0] in Z and e[1] in Z}
    if not set(request.missing) <= zedges:
        return False
    return modeled == hx - set(request.missing)


class MinorPlugin(ProblemPlugin):
    """Requests carry a separation of the pattern plus the boundary data of
    a partial model; the answer direction is minimisation."""

    name = "minor"
    locality = 1
    direction = "min"

    def __init__(self, h: PatternGraph, k: int, mu=None, t=None):
        if not h.simple:
            raise ValueError("pattern must be simple (no loops or parallel edges)")
        if k < 0:
            raise ValueError("size budget must be non-negative")
        self.h = h
        nodes = set(h.nodes)
        cleaned: dict = {}
        for u, vs in (mu or {}).items():
            if u not in nodes:
                raise ValueError(f"root map references unknown node {u}")
            vs = frozenset(vs)
            if vs:
                cleaned[u] = vs
        self.mu = cleaned
        self._k = k
        if t is None:
            t = math.floor(12000 * math.sqrt(k) * math.log2(max(k, 2)) ** 8)
        if t < 0:
            raise ValueError("separation size bound must be non-negative")
        self._t = t
        self._hx_cache: dict = {}

    @property
    def k(self) -> int:
        return self._k

    def initial_state(self, g: EmbeddedGraph):
        if g.directed:
            raise ValueError("minor search needs an undirected instance")
        if any(w < 0 for w in g.edge_weight.values()):
            raise ValueError("minor search needs non-negative edge weights")
        return None

    def restrict_state(self, state, g: EmbeddedGraph):
        # root sets stay whole: a piece that lost a root can never claim a
        # model using that node, and the request simply stays infeasible
        return None

    def request_pebble(self, r: MinorRequest):
        return r.pebble

    def _separations(self):
        # separator sizes never exceed the node count, so capping there is
        # exact rather than an approximation of the configured bound
        return separation_catalog(self.h, min(self._t, len(self.h.nodes)))

    def enumerate_requests(self, d, g, portals, pebble, state):
        top = min(d, self._k)
        m = pebble.vertices
        if len(m) > top:
            return ()
        out = []
        for sep in self._separations():
            Z = sep.X & sep.Y
            if len(Z) > len(m):
                continue
            zedges = tuple(sorted(e for e, _ in induced_pattern(self.h, Z).multi))
            for col in enumerate_coloring_extensions(Z, m, self.mu):
                for parts in enumerate_partitions(m):
                    if not refines(parts, col):
                        continue
                    for miss in _subsets(zedges):
                        for bud in range(top + 1):
                            out.append(
                                MinorRequest(
                                    m, sep.X, sep.Y, col, parts,
                                    frozenset(miss), bud,
                                )
                            )
        return tuple(out)

    def top_requests(self):
        U = frozenset(self.h.nodes)
        return (MinorRequest(frozenset(), U, frozenset(), (), (), frozenset(), self._k),)

    def combine(self, separator, pebble, interior, exterior, ctx):
        out = self.make_table()
        g_int, g_ext = ctx.interior_graph, ctx.exterior_graph
        vi, ve = g_int.vertex_set(), g_ext.vertex_set()
        shared = vi & ve
        m = pebble.vertices
        required = m & separator.pebbled
        if not required <= shared:
            return out
        pool = sorted((separator.pebbled & shared) - ctx.portals.vertices - m)
        m_int, m_ex = m & vi, m & ve
        budget = ctx.child_budget
        light = separator.light
        base_light = len(required & light)
        max_total = max((r.budget for r in ctx.requests), default=-1)
        if max_total < 0:
            return out
        for extra in _subsets(pool):
            fresh = required | frozenset(extra)
            if ctx.cap is not None:
                if base_light + sum(1 for v in extra if v in light) > ctx.cap:
                    continue
            pin_int, pin_ex = m_int | fresh, m_ex | fresh
            if max(len(fresh), len(pin_int), len(pin_ex)) > budget:
                continue
            cands1 = sorted(
                ((r, v) for r, v in interior.items()
                 if v != POS_INF and r.pebble == pin_int),
                key=lambda rv: _request_key(rv[0]),
            )
            if not cands1:
                continue
            cands2 = sorted(
                ((r, v) for r, v in exterior.items()
                 if v != POS_INF and r.pebble == pin_ex),
                key=lambda rv: _request_key(rv[0]),
            )
            if not cands2:
                continue
            for r1, v1 in cands1:
                col1 = dict(r1.coloring)
                node1 = {v: u for u, img in r1.coloring for v in img}
                live1 = self._pattern_edges(r1.X) - r1.missing
                for r2, v2 in cands2:
                    total = r1.budget + r2.budget - len(fresh)
                    if total < 0 or total > max_total:
                        continue
                    if (r1.X & r2.X) - (r1.Y & r2.Y):
                        continue
                    col2 = dict(r2.coloring)
                    node2 = {v: u for u, img in r2.coloring for v in img}
                    if any(node1.get(v) != node2.get(v) for v in fresh):
                        continue
                    union_x = r1.X | r2.X
                    # an edge survives as realised when one side models it;
                    # edges outside a side's H[X_i] are claims it never made
                    realised = live1 | (self._pattern_edges(r2.X) - r2.missing)
                    joined = join(r1.parts, r2.parts)
                    restricted = restrict_partition(joined, m)
                    # blocks are colour-pure: merges happen through shared
                    # vertices whose colours were just checked to agree
                    node_of = dict(node1)
                    node_of.update(node2)
                    counts: dict = {}
                    bare: set = set()
                    for blk in joined:
                        u = node_of[min(blk)]
                        counts[u] = counts.get(u, 0) + 1
                        if not blk & m:
                            bare.add(u)
                    for req in ctx.requests:
                        if req.budget != total:
                            continue
                        if req.X != union_x:
                            continue
                        if req.parts != restricted:
                            continue
                        if req.missing != self._pattern_edges(req.X) - realised:
                            continue
                        ok = True
                        for u, img in req.coloring:
                            if not img & m_int <= col1.get(u, frozenset()):
                                ok = False
                                break
                            if not img & m_ex <= col2.get(u, frozenset()):
                                ok = False
                                break
                        if ok:
                            for u, cnt in counts.items():
                                if u in req.Y:
                                    # component pebbles all drop out: the
                                    # parent could never reattach the block
                                    if u in bare:
                                        ok = False
                                        break
                                elif cnt > 1:
                                    # node left the separator with its class
                                    # still split into several components
                                    ok = False
                                    break
                        if not ok:
                            continue
                        wit = None
                        if ctx.track_witness:
                            wit = self._merge_witness(
                                interior.witness(r1), exterior.witness(r2), req)
                        out.update(req, v1 + v2, wit)
        return out

    def _pattern_edges(self, view: frozenset) -> frozenset:
        got = self._hx_cache.get(view)
        if got is None:
            got = frozenset(e for e, _ in induced_pattern(self.h, view).multi)
            self._hx_cache[view] = got
        return got

    def _merge_witness(self, w1, w2, req: MinorRequest):
        """Union of the side witnesses, kept only when it verifies against
        the parent request with label-identical node names."""
        if w1 is None or w2 is None:
            return None
        fmap: dict = {}
        for u, img in w1.assignment:
            fmap[u] = fmap.get(u, frozenset()) | img
        for u, img in w2.assignment:
            fmap[u] = fmap.get(u, frozenset()) | img
        if frozenset(fmap) != req.X:
            return None
        merged = ModelWitness(
            w1.vertices | w2.vertices,
            w1.edges | w2.edges,
            tuple(sorted(fmap.items())),
        )
        if not fulfills_request(merged, fmap, req, self.h, self.mu):
            return None
        return merged

    def brute_force(self, inst, track_witness=False):
        g, portals = inst.graph, inst.portals
        out = self.make_table()
        for mset in enumerate_pebble_sets(portals, inst.d, self.locality, inst.x):
            for r in self.enumerate_requests(inst.d, g, portals, mset, inst.state):
                out.ensure(r)
        cap = pebble_cap(inst.d, self.locality, inst.x)
        top = min(inst.d, self._k)
        allowed = sorted(v for v in g.vertices if v not in portals.discarded)
        pebbled, light = portals.pebbled, portals.light
        seps = self._separations()
        edge_pool = sorted(g.edges)
        for size in range(min(top, len(allowed)) + 1):
            for combo in combinations(allowed, size):
                chosen = frozenset(combo)
                m = chosen & pebbled
                if cap is not None and len(m & light) > cap:
                    continue
                inner = [
                    (e, g.edge_weight[e])
                    for e in edge_pool
                    if e[0] in chosen and e[1] in chosen
                ]
                for sep in seps:
                    if len(sep.X) > size or (size and not sep.X):
                        continue
                    self._sweep(out, g, chosen, m, inner, sep, size, top,
                                track_witness)
        return out

    def _sweep(self, out, g, chosen, m, inner, sep, size, top, track):
        X = sep.X
        mu = self.mu
        for u in X:
            if not mu.get(u, frozenset()) <= chosen:
                return
        forced: dict = {}
        for u, pins in mu.items():
            for v in pins:
                if v in chosen:
                    if u not in X:
                        return
                    forced[v] = u
        order = sorted(chosen)
        xs = sorted(X)

        def rec(i, assign, used):
            if i == len(order):
                if len(used) == len(xs):
                    yield dict(assign)
                return
            v = order[i]
            if v in forced:
                u = forced[v]
                assign[v] = u
                yield from rec(i + 1, assign, used | {u})
                del assign[v]
                return
            remaining = len(order) - i
            for u in xs:
                grown = used | {u}
                if len(xs) - len(grown) > remaining - 1:
                    continue
                assign[v] = u
                yield from rec(i + 1, assign, grown)
                del assign[v]

        for assign in rec(0, {}, frozenset()):
            fmap = {u: frozenset(v for v in chosen if assign[v] == u) for u in xs}
            self._assemble(out, chosen, m, inner, sep, fmap, size, top, track)

    def _assemble(self, out, chosen, m, inner, sep, fmap, size, top, track):
        Z = sep.X & sep.Y
        hedges = {e for e, _ in self.h.multi}
        fixed_cost = 0
        fixed_edges: set = set()
        options = []
        for u in sorted(fmap):
            members = fmap[u]
            eu = [(e, w) for e, w in inner if e[0] in members and e[1] in members]
            if u in Z:
                cu = members & m
                if not cu:
                    return
                outs = _grouping_outcomes(members, cu, eu)
                if not outs:
                    return
                options.append(sorted(outs.items()))
            else:
                if members & m:
                    # a pebbled vertex can only be described by the boundary
                    # data of a separator node; this split needs u in Z
                    return
                got = _min_connected(members, eu)
                if got is None:
                    return
                fixed_cost += got[0]
                fixed_edges |= got[1]
        missing_base: set = set()
        choice: list = []
        xs = sorted(fmap)
        for i, u1 in enumerate(xs):
            for u2 in xs[i + 1:]:
                key = pattern_edge_key(u1, u2)
                if key not in hedges:
                    # non-adjacent nodes: crossing edges stay out of the
                    # subgraph, nothing to pick
                    continue
                cross = [
                    (w, e)
                    for e, w in inner
                    if (e[0] in fmap[u1] and e[1] in fmap[u2])
                    or (e[0] in fmap[u2] and e[1] in fmap[u1])
                ]
                best = min(cross, default=None)
                in_z = u1 in Z and u2 in Z
                if best is None:
                    if not in_z:
                        return
                    missing_base.add(key)
                elif in_z:
                    choice.append((key, best[0], best[1]))
                else:
                    fixed_cost += best[0]
                    fixed_edges.add(best[1])
        col = tuple((u, frozenset(fmap[u] & m)) for u in sorted(Z))
        for picks in product(*options):
            parts = canonical_partition(
                blk for pp, _got in picks for blk in pp)
            base_cost = fixed_cost + sum(got[0] for _pp, got in picks)
            base_edges = set(fixed_edges)
            for _pp, got in picks:
                base_edges |= got[1]
            for mask in _subsets(choice):
                cost = base_cost + sum(w for _key, w, _e in mask)
                modelled = {key for key, _w, _e in mask}
                miss = frozenset(
                    missing_base
                    | {key for key, _w, _e in choice if key not in modelled}
                )
                edges = frozenset(base_edges | {e for _key, _w, e in mask})
                wit = None
                if track:
                    wit = ModelWitness(chosen, edges, tuple(sorted(fmap.items())))
                for bud in range(size, top + 1):
                    out.update(
                        MinorRequest(m, sep.X, sep.Y, col, parts, miss, bud),
                        cost,
                        wit,
                    )


def minor_plugin(h: PatternGraph, k: int, mu=None, t=None) -> MinorPlugin:
    return MinorPlugin(h, k, mu=mu, t=t)


def solve_minor(g: EmbeddedGraph, h: PatternGraph, k: int, mu=None, t=None,
                config=None, stats=None) -> RunOutcome:
    """Top-level rooted minor run; a non-planar pattern is an immediate no."""
    st = stats if stats is not None else Stats()
    if not pattern_is_planar(h):
        return RunOutcome(POS_INF, None, None, (), st)
    plugin = MinorPlugin(h, k, mu=mu, t=t)
    return solve_problem(plugin, g, config, st)


def reduce_subgraph_isomorphism(h: PatternGraph, g: EmbeddedGraph | None = None) -> MinorPlugin:
    """Subgraph embedding as minor search: with budget |nodes(H)| every
    class is a single vertex and contraction is the identity."""
    if g is not None and g.directed:
        raise ValueError("subgraph embedding needs an undirected instance")
    return MinorPlugin(h, len(h.nodes))


def reduce_steiner_partition(g: EmbeddedGraph, families, k: int) -> MinorPlugin:
    """Group Steiner forest: connect each family inside its own component.

    The pattern is an independent set with one node per family and the
    family members as roots; edgeless patterns force the classes to stay
    mutually unconnected in the chosen subgraph."""
    fams = [frozenset(f) for f in families]
    if not fams:
        raise ValueError("need at least one family")
    seen: set = set()
    for f in fams:
        if not f:
            raise ValueError("families must be non-empty")
        if f & seen:
            raise ValueError("families must be disjoint")
        seen |= f
    unknown = seen - set(g.vertices)
    if unknown:
        raise ValueError(f"unknown vertices in families: {sorted(unknown)}")
    h = make_pattern(range(len(fams)), {})
    mu = {i: f for i, f in enumerate(fams)}
    return MinorPlugin(h, k, mu=mu)
