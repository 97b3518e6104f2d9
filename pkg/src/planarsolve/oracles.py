"""Deliberately naive brute-force solvers used as ground truth in tests.

Each enumerator evaluates its problem's definition directly on explicit
candidate sets and shares no scoring or combine code with the solver
pipeline; the two routes are meant to be reviewed side by side.  Caps keep
the exhaustive loops at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product

from .graphs import EmbeddedGraph, edge_key
from .patterns import PatternGraph, Separation, pattern_edge_key

NEG_INF = float("-inf")
POS_INF = float("inf")

DEFAULT_CAP = 22
MODEL_VERTEX_CAP = 8
MODEL_NODE_CAP = 4

SUBSET_PROBLEMS = ("kss", "mwis", "dks", "cut", "cut-directed", "wpvc", "mwif")


class OracleCapError(ValueError):
    """The instance exceeds the size the naive enumeration may touch."""


@dataclass(frozen=True)
class OracleResult:
    value: int | float
    witness: frozenset[int] | None
    examined: int


def _forest(g: EmbeddedGraph, chosen: frozenset[int]) -> bool:
    parent = {v: v for v in chosen}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in g.edges:
        if u in chosen and v in chosen:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
    return True


def _independent(g: EmbeddedGraph, chosen: frozenset[int]) -> bool:
    return all(u not in chosen or v not in chosen for u, v in g.edges)


def oracle_score(problem: str, g: EmbeddedGraph, chosen, params=None):
    """Re-evaluate a candidate set under the problem's own formula.

    Infeasible candidates (dependent sets for mwis, cyclic sets for mwif)
    score the minus-infinity sentinel so witnesses can be re-checked.
    """
    chosen = frozenset(chosen)
    if problem == "kss":
        inside = leaving = entering = 0
        arcs = g.arc_weight if g.directed else g.edge_weight
        for (u, v), w in arcs.items():
            if u in chosen:
                if v in chosen:
                    inside += w
                else:
                    leaving += w
            elif v in chosen:
                entering += w
        return (
            params.alpha1 * inside
            + params.alpha2 * leaving
            + params.alpha3 * entering
            + params.beta * sum(g.weight[v] for v in chosen)
        )
    if problem == "mwis":
        if not _independent(g, chosen):
            return NEG_INF
        return sum(g.weight[v] for v in chosen)
    if problem == "mwif":
        if not _forest(g, chosen):
            return NEG_INF
        return sum(g.weight[v] for v in chosen)
    if problem == "dks":
        # unweighted count: how many edges the chosen set induces
        return sum(1 for u, v in g.edges if u in chosen and v in chosen)
    if problem == "cut":
        return sum(1 for u, v in g.edges if (u in chosen) != (v in chosen))
    if problem == "cut-directed":
        return sum(1 for u, v in g.arc_weight if u in chosen and v not in chosen)
    if problem == "wpvc":
        return sum(
            w
            for (u, v), w in g.edge_weight.items()
            if u in chosen or v in chosen
        )
    raise ValueError("unknown problem id %r" % (problem,))


def brute_force_solve(
    problem: str,
    g: EmbeddedGraph,
    k: int,
    params=None,
    cap: int = DEFAULT_CAP,
) -> OracleResult:
    """Exhaustively enumerate candidate vertex sets and keep the best score.

    Candidates are the non-empty subsets passing the problem's cost or size
    filter (cost exactly k for kss, size exactly k for dks/cut, cost or
    size at most k otherwise); the empty set seeds the optimum when the
    filter admits it and is not counted as examined.  Ties keep the first
    witness in enumeration order (subsets by size, then lexicographic).
    """
    if g.n > cap:
        raise OracleCapError("instance has %d vertices, oracle cap is %d" % (g.n, cap))
    if k < 0:
        raise ValueError("negative budget")
    if problem == "kss" and params is None:
        raise ValueError("kss oracle needs scoring parameters")
    if problem == "cut-directed":
        if not g.directed:
            raise ValueError("cut-directed oracle needs a directed instance")
    elif problem != "kss" and g.directed:
        raise ValueError("%s oracle needs an undirected instance" % problem)

    if problem in ("dks", "cut", "cut-directed"):
        sizes = range(k, k + 1) if 0 < k <= g.n else range(0)
        empty_ok = k == 0
    else:
        sizes = range(1, min(k, g.n) + 1)
        if problem == "kss":
            empty_ok = k == 0
        else:
            empty_ok = True

    def admits(chosen: frozenset[int]) -> bool:
        if problem == "kss":
            return sum(g.cost[v] for v in chosen) == k
        if problem == "wpvc":
            return sum(g.cost[v] for v in chosen) <= k
        return True

    best, best_witness = NEG_INF, None
    if empty_ok:
        best, best_witness = oracle_score(problem, g, frozenset(), params), frozenset()
    examined = 0
    for size in sizes:
        for combo in combinations(g.vertices, size):
            chosen = frozenset(combo)
            if not admits(chosen):
                continue
            examined += 1
            value = oracle_score(problem, g, chosen, params)
            if value > best:
                best, best_witness = value, chosen
    return OracleResult(best, best_witness, examined)


def _mst_cost(vertices, intra) -> int | None:
    """Kruskal over the given intra-class edges; None when disconnected."""
    if len(vertices) <= 1:
        return 0
    parent = {v: v for v in vertices}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    total, used = 0, 0
    for w, u, v in sorted(intra):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            total += w
            used += 1
    return total if used == len(vertices) - 1 else None


def _min_exact_spanning(vertices, intra, count) -> int | None:
    """Cheapest connected spanning edge subset of an exact size, or None."""
    if len(vertices) <= 1:
        return 0 if count == 0 else None
    if count < len(vertices) - 1 or count > len(intra):
        return None
    best = None
    for picked in combinations(intra, count):
        parent = {v: v for v in vertices}

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        merged = 0
        for _, u, v in picked:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                merged += 1
        if merged == len(vertices) - 1:
            total = sum(w for w, _, _ in picked)
            if best is None or total < best:
                best = total
    return best


def _class_maps(order, n_cls, forced):
    """Assignments of the ordered vertices to classes, every class non-empty."""
    counts = [0] * n_cls
    assign: list[int] = []

    def rec(pos: int, empties: int):
        if len(order) - pos < empties:
            return
        if pos == len(order):
            yield tuple(assign)
            return
        v = order[pos]
        choices = (forced[v],) if v in forced else range(n_cls)
        for c in choices:
            grew = 1 if counts[c] == 0 else 0
            counts[c] += 1
            assign.append(c)
            yield from rec(pos + 1, empties - grew)
            assign.pop()
            counts[c] -= 1

    yield from rec(0, n_cls)


def _model_cost(g, nodes, mult, order, assign, parallel) -> int | float:
    """Minimum subgraph weight realising the class map, or +inf.

    Per class: spanning tree (simple contraction) or exactly tree + loop
    surplus edges (parallel contraction).  Per pattern edge: the required
    number of cheapest crossing edges; crossing edges of non-adjacent
    classes are simply left out of the subgraph.
    """
    n_cls = len(nodes)
    cls: list[list[int]] = [[] for _ in range(n_cls)]
    where = dict(zip(order, assign))
    for v, c in where.items():
        cls[c].append(v)
    intra: list[list[tuple[int, int, int]]] = [[] for _ in range(n_cls)]
    cross: dict[tuple[int, int], list[int]] = {}
    for (u, v), w in g.edge_weight.items():
        cu, cv = where.get(u), where.get(v)
        if cu is None or cv is None:
            continue
        if cu == cv:
            intra[cu].append((w, u, v))
        else:
            cross.setdefault((min(cu, cv), max(cu, cv)), []).append(w)
    total = 0
    for i, u in enumerate(nodes):
        loops = mult.get((u, u), 0)
        if parallel:
            part = _min_exact_spanning(cls[i], intra[i], len(cls[i]) - 1 + loops)
        else:
            part = _mst_cost(cls[i], intra[i])
        if part is None:
            return POS_INF
        total += part
    for i in range(n_cls):
        for j in range(i + 1, n_cls):
            need = mult.get(pattern_edge_key(nodes[i], nodes[j]), 0)
            if need == 0:
                continue
            avail = sorted(cross.get((i, j), ()))
            if len(avail) < need:
                return POS_INF
            total += sum(avail[:need])
    return total


def brute_force_models(
    g: EmbeddedGraph,
    h: PatternGraph,
    mu=None,
    k: int | None = None,
    *,
    parallel: bool | None = None,
    vertex_cap: int = MODEL_VERTEX_CAP,
    node_cap: int = MODEL_NODE_CAP,
) -> OracleResult:
    """Minimum-weight contraction model of a pattern, by exhaustive search.

    Enumerates vertex sets of at most k vertices and all maps of their
    vertices onto pattern nodes (classes connected, pins of mu respected).
    Simple contraction discards parallel edges and loops, so surplus
    intra-class edges are free and only adjacency must be realised;
    parallel contraction must reproduce edge multiplicities and loop
    counts exactly.  The mode follows the pattern unless overridden.
    """
    if g.directed:
        raise ValueError("model search is defined on undirected instances")
    if g.n > vertex_cap:
        raise OracleCapError(
            "host has %d vertices, model cap is %d" % (g.n, vertex_cap)
        )
    if len(h.nodes) > node_cap:
        raise OracleCapError(
            "pattern has %d nodes, model cap is %d" % (len(h.nodes), node_cap)
        )
    if parallel is None:
        parallel = not h.simple
    if not parallel and not h.simple:
        raise ValueError("simple-contraction pattern must be a simple graph")
    if not parallel and any(w < 0 for w in g.edge_weight.values()):
        raise ValueError("simple-mode model search needs non-negative weights")

    nodes = list(h.nodes)
    mult = h.edge_dict
    pins = {u: frozenset() for u in nodes}
    if mu:
        for u, vs in mu.items():
            if u not in pins:
                raise ValueError("pin for unknown pattern node %r" % (u,))
            pins[u] = frozenset(vs)
    required = frozenset().union(*pins.values()) if pins else frozenset()
    if not required <= g.vertex_set():
        raise ValueError("pinned vertices missing from the host graph")
    forced = {}
    for i, u in enumerate(nodes):
        for v in pins[u]:
            if v in forced:
                return OracleResult(POS_INF, None, 0)
            forced[v] = i

    budget = g.n if k is None else min(k, g.n)
    if not nodes:
        return OracleResult(0, frozenset(), 1)
    best, best_witness, examined = POS_INF, None, 0
    for size in range(max(len(nodes), len(required)), budget + 1):
        for combo in combinations(g.vertices, size):
            chosen = frozenset(combo)
            if not required <= chosen:
                continue
            for assign in _class_maps(combo, len(nodes), forced):
                examined += 1
                cost = _model_cost(g, nodes, mult, combo, assign, parallel)
                if cost < best:
                    best, best_witness = cost, chosen
    return OracleResult(best, best_witness, examined)


def brute_force_subiso(
    g: EmbeddedGraph, h: PatternGraph, cap: int = DEFAULT_CAP
) -> OracleResult:
    """Minimum-weight subgraph isomorphic to a simple pattern."""
    if g.directed:
        raise ValueError("subgraph isomorphism is defined on undirected instances")
    if not h.simple:
        raise ValueError("subgraph isomorphism pattern must be simple")
    if g.n > cap:
        raise OracleCapError("host has %d vertices, oracle cap is %d" % (g.n, cap))
    nodes = list(h.nodes)
    wanted = [e for e, m in h.edge_dict.items() if m]
    best, best_witness, examined = POS_INF, None, 0
    for image in permutations(g.vertices, len(nodes)):
        examined += 1
        phi = dict(zip(nodes, image))
        total = 0
        for a, b in wanted:
            w = g.edge_weight.get(edge_key(phi[a], phi[b]))
            if w is None:
                break
            total += w
        else:
            if total < best:
                best, best_witness = total, frozenset(image)
    return OracleResult(best, best_witness, examined)


def brute_force_steiner(
    g: EmbeddedGraph, terminals, k: int, cap: int = DEFAULT_CAP
) -> OracleResult:
    """Minimum-weight subgraph tying each terminal set into its own component.

    Assumes non-negative edge weights; a group's cheapest connector is then
    a spanning tree of its vertex set.
    """
    if g.directed:
        raise ValueError("steiner grouping is defined on undirected instances")
    if g.n > cap:
        raise OracleCapError("instance has %d vertices, oracle cap is %d" % (g.n, cap))
    if any(w < 0 for w in g.edge_weight.values()):
        raise ValueError("steiner oracle needs non-negative weights")
    tsets = [frozenset(t) for t in terminals]
    all_terms = frozenset().union(*tsets) if tsets else frozenset()
    if not all_terms <= g.vertex_set():
        raise ValueError("terminal missing from the graph")
    if sum(len(t) for t in tsets) != len(all_terms):
        return OracleResult(POS_INF, None, 0)
    budget = min(k, g.n)
    if len(all_terms) > budget or k < 0:
        return OracleResult(POS_INF, None, 0)
    free_pool = sorted(g.vertex_set() - all_terms)
    groups_base = [sorted(t) for t in tsets]
    best, best_witness, examined = POS_INF, None, 0
    for extra in range(budget - len(all_terms) + 1):
        for free in combinations(free_pool, extra):
            # slot 0 leaves the vertex isolated in the subgraph
            for assign in product(range(len(tsets) + 1), repeat=extra):
                examined += 1
                groups = [list(base) for base in groups_base]
                for v, slot in zip(free, assign):
                    if slot:
                        groups[slot - 1].append(v)
                total = 0
                for grp in groups:
                    gset = set(grp)
                    intra = [
                        (w, u, v)
                        for (u, v), w in g.edge_weight.items()
                        if u in gset and v in gset
                    ]
                    part = _mst_cost(grp, intra)
                    if part is None:
                        total = POS_INF
                        break
                    total += part
                if total < best:
                    best, best_witness = total, all_terms | frozenset(free)
    return OracleResult(best, best_witness, examined)


def _marked_components(g: EmbeddedGraph, chosen, marked):
    """Component partition of the marked vertices inside g[chosen], encoded
    as blocks sorted by minimum element."""
    parent = {v: v for v in chosen}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in g.edges:
        if u in chosen and v in chosen:
            parent[find(u)] = find(v)
    groups: dict = {}
    for v in marked:
        groups.setdefault(find(v), set()).add(v)
    return tuple(sorted((frozenset(b) for b in groups.values()), key=min))


def _node_assignments(verts, xs):
    """Total maps of the vertices onto the nodes, every node used."""
    xs = sorted(xs)
    vs = sorted(verts)
    if not xs:
        if not vs:
            yield {}
        return
    if len(vs) < len(xs):
        return
    for assign in product(range(len(xs)), repeat=len(vs)):
        if len(set(assign)) != len(xs):
            continue
        out: dict = {}
        for v, i in zip(vs, assign):
            out.setdefault(xs[i], set()).add(v)
        yield {u: frozenset(s) for u, s in out.items()}


def _requests_kss(table, plugin, inst, light_cap) -> None:
    g, portals = inst.graph, inst.portals
    budget = min(inst.d, plugin.params.k)
    allowed = sorted(v for v in g.vertices if v not in portals.discarded)
    for size in range(min(budget, len(allowed)) + 1):
        for combo in combinations(allowed, size):
            chosen = frozenset(combo)
            spent = sum(g.cost[v] for v in chosen)
            if spent > budget:
                continue
            pinned = chosen & portals.pebbled
            if light_cap is not None and len(pinned & portals.light) > light_cap:
                continue
            value = oracle_score("kss", g, chosen, plugin.params)
            table.update((pinned, spent), value, None)


def _requests_mwif(table, plugin, inst, light_cap) -> None:
    g, portals = inst.graph, inst.portals
    budget = min(inst.d, plugin.k)
    allowed = sorted(v for v in g.vertices if v not in portals.discarded)
    for size in range(min(budget, len(allowed)) + 1):
        for combo in combinations(allowed, size):
            chosen = frozenset(combo)
            pinned = chosen & portals.pebbled
            if light_cap is not None and len(pinned & portals.light) > light_cap:
                continue
            if not _forest(g, chosen):
                continue
            parts = _marked_components(g, chosen, pinned)
            value = sum(g.weight[v] for v in chosen)
            for bud in range(size, budget + 1):
                table.update((pinned, parts, bud), value, None)


def _requests_minor(table, plugin, inst) -> None:
    from .problems.minor import fulfills_request

    g, portals = inst.graph, inst.portals
    h, mu = plugin.h, plugin.mu
    if g.n > 5:
        raise OracleCapError("minor request oracle capped at 5 host vertices")
    if len(h.nodes) > MODEL_NODE_CAP:
        raise OracleCapError(
            "minor request oracle capped at %d pattern nodes" % MODEL_NODE_CAP
        )
    by_pebble: dict = {}
    for r, _v in table.items():
        by_pebble.setdefault(r.pebble, []).append(r)
    allowed = sorted(v for v in g.vertices if v not in portals.discarded)
    for size in range(len(allowed) + 1):
        for combo in combinations(allowed, size):
            verts = frozenset(combo)
            pinned = verts & portals.pebbled
            cands = [r for r in by_pebble.get(pinned, ()) if size <= r.budget]
            if not cands:
                continue
            by_x: dict = {}
            for r in cands:
                by_x.setdefault(r.X, []).append(r)
            pool = sorted(e for e in g.edges if e[0] in verts and e[1] in verts)
            esubsets = []
            for esize in range(len(pool) + 1):
                for esel in combinations(pool, esize):
                    esubsets.append(
                        (frozenset(esel), sum(g.edge_weight[e] for e in esel))
                    )
            for x, group in sorted(by_x.items(), key=lambda kv: tuple(sorted(kv[0]))):
                for f in _node_assignments(verts, x):
                    for eset, weight in esubsets:
                        for r in group:
                            if fulfills_request((verts, eset), f, r, h, mu):
                                table.update(r, weight, None)


def brute_force_requests(plugin, inst, cap: int = DEFAULT_CAP):
    """Reference lookup table for one instance, built by direct sweeps.

    Request keys come from the plug-in's own enumeration (the shared
    vocabulary); every value is recomputed here against the request
    definition, so the combine machinery never touches these entries.
    """
    from .framework import enumerate_pebble_sets, pebble_cap

    g, portals = inst.graph, inst.portals
    if g.n > cap:
        raise OracleCapError("instance has %d vertices, oracle cap is %d" % (g.n, cap))
    table = plugin.make_table()
    for mset in enumerate_pebble_sets(portals, inst.d, plugin.locality, inst.x):
        for r in plugin.enumerate_requests(inst.d, g, portals, mset, inst.state):
            table.ensure(r)
    light_cap = pebble_cap(inst.d, plugin.locality, inst.x)
    if plugin.name == "kss":
        _requests_kss(table, plugin, inst, light_cap)
    elif plugin.name == "mwif":
        _requests_mwif(table, plugin, inst, light_cap)
    elif plugin.name == "minor":
        _requests_minor(table, plugin, inst)
    else:
        raise ValueError("no request oracle for plug-in %r" % (plugin.name,))
    return table


def _separation_isomorphic(h: PatternGraph, sep_z, x1, x2) -> bool:
    """Automorphism of h fixing the separator pointwise, mapping x1 to x2."""
    if len(x1) != len(x2):
        return False
    mult = h.edge_dict
    a1, a2 = sorted(x1 - sep_z), sorted(x2 - sep_z)
    others = set(h.nodes)
    b1, b2 = sorted(others - x1), sorted(others - x2)
    pairs = [
        (u, v) for i, u in enumerate(h.nodes) for v in h.nodes[i:]
    ]
    for pa in permutations(a2):
        for pb in permutations(b2):
            phi = {v: v for v in sep_z}
            phi.update(zip(a1, pa))
            phi.update(zip(b1, pb))
            if all(
                mult.get(pattern_edge_key(phi[u], phi[v]), 0)
                == mult.get(pattern_edge_key(u, v), 0)
                for u, v in pairs
            ):
                return True
    return False


def brute_force_separations(h: PatternGraph, t: int) -> list[Separation]:
    """All separations of size at most t, deduplicated by pairwise checks.

    Isomorphic separations share the separator pointwise, so candidates
    are grouped by separator and compared exhaustively within the group.
    """
    if t < 0:
        raise ValueError("negative separator budget")
    nodes = sorted(h.nodes)
    node_set = frozenset(nodes)
    reps: list[Separation] = []
    for xr in range(len(nodes) + 1):
        for xs in combinations(nodes, xr):
            x = frozenset(xs)
            rest = node_set - x
            for zr in range(min(t, xr) + 1):
                for zs in combinations(xs, zr):
                    z = frozenset(zs)
                    strict_x = x - z
                    if any(
                        m
                        and (
                            (u in strict_x and v in rest)
                            or (v in strict_x and u in rest)
                        )
                        for (u, v), m in h.edge_dict.items()
                    ):
                        continue
                    y = rest | z
                    if any(
                        rep.separator == z
                        and _separation_isomorphic(h, z, rep.X, x)
                        for rep in reps
                    ):
                        continue
                    reps.append(Separation(x, y))
    return reps
