"""Additive-score subgraph selection and its four classical reductions.

The plugin solves the exact-cost variant: choose a vertex set whose costs
sum to the request budget and maximise

    alpha1 * w(arcs inside) + alpha2 * w(arcs leaving)
    + alpha3 * w(arcs entering) + beta * w(vertices).

Independent set, densest-k-subgraph, (k, n-k)-cut, and partial vertex
cover are coefficient choices on a reweighted copy of the input;
at-most-k variants run one exact-cost instance per budget and keep the
best run.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

from ..framework import (
    NEG_INF,
    ProblemPlugin,
    RunOutcome,
    Stats,
    enumerate_pebble_sets,
    pebble_cap,
    solve_problem,
)
from ..graphs import EmbeddedGraph
from .scoring import ScoringParams, kss_score


def _subsets(items):
    for size in range(len(items) + 1):
        yield from combinations(items, size)


class ScoringPlugin(ProblemPlugin):
    """Requests are (pinned portal subset, exact cost).

    Locality is 3 because a set's score reads arcs one step outside it, so
    a solution of cost k touches at most 3k consecutive layers.
    """

    name = "kss"
    locality = 3
    direction = "max"

    def __init__(self, params: ScoringParams):
        if params.k < 0:
            raise ValueError("cost target must be non-negative")
        self.params = params

    @property
    def k(self) -> int:
        return self.params.k

    def initial_state(self, g: EmbeddedGraph):
        return None

    def restrict_state(self, state, g: EmbeddedGraph):
        return None

    def prepare_piece(self, g: EmbeddedGraph, piece: EmbeddedGraph):
        """Layer deletion drops arcs between a kept vertex and a deleted
        one, which shifts that vertex's leaving/entering terms.  Those lost
        terms depend only on the single kept endpoint, so they fold into
        the vertex weights (with beta renormalized to 1) and the piece
        scores every surviving set exactly as the full graph would."""
        par = self.params
        gone = g.vertex_set() - piece.vertex_set()
        if not gone or (par.alpha2 == 0 and par.alpha3 == 0):
            return piece, self
        comp = {v: 0 for v in piece.vertices}
        if g.directed:
            for (u, v), w in g.arc_weight.items():
                if u in comp and v in gone:
                    comp[u] += par.alpha2 * w
                elif u in gone and v in comp:
                    comp[v] += par.alpha3 * w
        else:
            for (u, v), w in g.edge_weight.items():
                if u in comp and v in gone:
                    comp[u] += par.alpha2 * w
                elif u in gone and v in comp:
                    comp[v] += par.alpha3 * w
        weight = {v: par.beta * g.weight[v] + comp[v] for v in piece.vertices}
        fixed = replace(piece, weight=weight)
        return fixed, ScoringPlugin(replace(par, beta=1))

    def enumerate_requests(self, d, g, portals, pebble, state):
        top = min(d, self.params.k)
        return tuple((pebble.vertices, bud) for bud in range(top + 1))

    def top_requests(self):
        return ((frozenset(), self.params.k),)

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
        # arcs the two children both scored: present in both side graphs
        if ctx.graph.directed:
            common = sorted(set(g_int.arc_weight) & set(g_ext.arc_weight))
            arcs = [(u, v, ctx.graph.arc_weight[(u, v)]) for u, v in common]
        else:
            common = sorted(g_int.edges & g_ext.edges)
            arcs = [(u, v, ctx.graph.edge_weight[(u, v)]) for u, v in common]
        m_int, m_ex = m & vi, m & ve
        par = self.params
        cost, weight = ctx.graph.cost, ctx.graph.weight
        budget = ctx.child_budget
        light = separator.light
        base_light = len(required & light)
        for extra in _subsets(pool):
            fresh = required | frozenset(extra)
            if ctx.cap is not None:
                if base_light + sum(1 for v in extra if v in light) > ctx.cap:
                    continue
            spent = sum(cost[v] for v in fresh)
            if spent > budget:
                continue
            over = par.beta * sum(weight[v] for v in fresh)
            for u, v, w in arcs:
                inside_u, inside_v = u in fresh, v in fresh
                if inside_u and inside_v:
                    over += par.alpha1 * w
                elif inside_u:
                    over += par.alpha2 * w
                elif inside_v:
                    over += par.alpha3 * w
            pin_int, pin_ex = m_int | fresh, m_ex | fresh
            for req in ctx.requests:
                total = req[1]
                for part in range(spent, budget + 1):
                    rest = total - part + spent
                    if rest < 0 or rest > budget:
                        continue
                    v1, w1 = ctx.lookup_entry(interior, (pin_int, part))
                    if v1 == NEG_INF:
                        continue
                    v2, w2 = ctx.lookup_entry(exterior, (pin_ex, rest))
                    if v2 == NEG_INF:
                        continue
                    wit = None
                    if ctx.track_witness and w1 is not None and w2 is not None:
                        wit = w1 | w2
                    out.update(req, v1 + v2 - over, wit)
        return out

    def brute_force(self, inst, track_witness=False):
        g, portals = inst.graph, inst.portals
        out = self.make_table()
        for mset in enumerate_pebble_sets(portals, inst.d, self.locality, inst.x):
            for r in self.enumerate_requests(inst.d, g, portals, mset, inst.state):
                out.ensure(r)
        cap = pebble_cap(inst.d, self.locality, inst.x)
        budget = min(inst.d, self.params.k)
        allowed = [v for v in g.vertices if v not in portals.discarded]
        pebbled, light = portals.pebbled, portals.light
        # unit minimum cost means no admissible set is larger than the budget
        for size in range(min(budget, len(allowed)) + 1):
            for combo in combinations(allowed, size):
                chosen = frozenset(combo)
                spent = sum(g.cost[v] for v in chosen)
                if spent > budget:
                    continue
                pinned = chosen & pebbled
                if cap is not None and len(pinned & light) > cap:
                    continue
                value = kss_score(g, chosen, self.params)
                out.update((pinned, spent), value, chosen if track_witness else None)
        return out


# ---------------------------------------------------------------------------
# reductions


@dataclass(frozen=True)
class ScoringReduction:
    """Exact-cost runs covering one at-most-k problem on a reweighted copy.

    Each run is (parameters, top query); the assembled answer is the best
    run value, so infeasible budgets contribute their minus-infinity
    sentinel and never win.
    """

    problem: str
    graph: EmbeddedGraph
    runs: tuple[tuple[ScoringParams, tuple], ...]


def _unit_costs(g: EmbeddedGraph) -> EmbeddedGraph:
    return replace(g, cost={v: 1 for v in g.vertices})


def _unit_edges(g: EmbeddedGraph) -> EmbeddedGraph:
    if g.directed:
        return replace(g, arc_weight={a: 1 for a in g.arc_weight})
    return replace(g, edge_weight={e: 1 for e in g.edges})


def _check_budget(k: int) -> None:
    if k < 0:
        raise ValueError("negative budget")


def reduce_mwis(g: EmbeddedGraph, k: int) -> ScoringReduction:
    """Independent set of size at most k: unit inside-arc weight with a
    penalty coefficient that strictly dominates any vertex-weight total."""
    if g.directed:
        raise ValueError("independent set needs an undirected instance")
    _check_budget(k)
    wmax = max((g.weight[v] for v in g.vertices), default=0)
    penalty = -(g.n * max(wmax, 0) + 1)
    graph = _unit_edges(_unit_costs(g))
    runs = tuple(
        (ScoringParams(penalty, 0, 0, 1, size), (frozenset(), size))
        for size in range(k + 1)
    )
    return ScoringReduction("mwis", graph, runs)


def reduce_dks(g: EmbeddedGraph, k: int) -> ScoringReduction:
    """Most induced edges over sets of size exactly k (unweighted)."""
    if g.directed:
        raise ValueError("densest subgraph needs an undirected instance")
    _check_budget(k)
    params = ScoringParams(1, 0, 0, 0, k)
    graph = _unit_edges(_unit_costs(g))
    return ScoringReduction("dks", graph, ((params, (frozenset(), k)),))


def reduce_cut(g: EmbeddedGraph, k: int, directed: bool = False) -> ScoringReduction:
    """Maximum (k, n-k)-cut, counting edges; the directed variant counts
    only arcs leaving the chosen side."""
    if directed != g.directed:
        raise ValueError(
            "cut variant and instance direction disagree "
            "(use directed=True with a directed instance)"
        )
    _check_budget(k)
    params = ScoringParams(0, 1, 0 if directed else 1, 0, k)
    name = "cut-directed" if directed else "cut"
    graph = _unit_edges(_unit_costs(g))
    return ScoringReduction(name, graph, ((params, (frozenset(), k)),))


def reduce_wpvc(g: EmbeddedGraph, k: int) -> ScoringReduction:
    """Partial vertex cover: weight of touched edges under a cost budget."""
    if g.directed:
        raise ValueError("vertex cover needs an undirected instance")
    _check_budget(k)
    runs = tuple(
        (ScoringParams(1, 1, 1, 0, bud), (frozenset(), bud)) for bud in range(k + 1)
    )
    return ScoringReduction("wpvc", g, runs)


def run_reduction(red: ScoringReduction, config=None, stats=None) -> RunOutcome:
    """Solve every run and keep the best; residue reports the winning run
    index and residue_values the per-run answers."""
    shared = stats if stats is not None else Stats()
    best_val, best_wit, best_idx = NEG_INF, None, None
    vals = []
    for i, (params, _query) in enumerate(red.runs):
        outcome = solve_problem(ScoringPlugin(params), red.graph, config, shared)
        vals.append(outcome.value)
        if outcome.value > best_val:
            best_val, best_wit, best_idx = outcome.value, outcome.witness, i
    return RunOutcome(best_val, best_wit, best_idx, tuple(vals), shared)
