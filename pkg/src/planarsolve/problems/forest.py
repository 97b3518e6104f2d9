"""Maximum-weight induced forest: at most k vertices, induced subgraph
acyclic, vertex weight sum maximised.

Requests pin the portal intersection of the solution, the component
partition of that intersection, and a size budget.  Gluing two children
guesses the separator part of the solution, then accepts a partition pair
when the joined partitions restrict to the parent's partition and the
pair stays acyclic once the edges counted by both sides are cut from the
exterior partition.
"""

from __future__ import annotations

from itertools import combinations

from ..framework import (
    NEG_INF,
    ProblemPlugin,
    enumerate_pebble_sets,
    pebble_cap,
)
from ..graphs import EmbeddedGraph
from ..partitions import (
    canonical_partition,
    enumerate_partitions,
    is_acyclic_pair,
    join,
    restrict_partition,
)


def _subsets(items):
    for size in range(len(items) + 1):
        yield from combinations(items, size)


def _forest_components(g: EmbeddedGraph, chosen: frozenset, marked: frozenset):
    """(is_forest, component partition of marked) inside g[chosen]."""
    parent = {v: v for v in chosen}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in g.edges:
        if u in chosen and v in chosen:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False, ()
            parent[ru] = rv
    groups: dict = {}
    for v in marked:
        groups.setdefault(find(v), set()).add(v)
    return True, canonical_partition(groups.values())


def _within_blocks(parts, cut) -> bool:
    block_of = {}
    for i, blk in enumerate(parts):
        for v in blk:
            block_of[v] = i
    return all(block_of[u] == block_of[v] for u, v in cut)


def _cut_residue(parts, cut):
    """Partition after deleting the doubled edges from a realising forest.

    Inside each block the edges form trees; cutting them leaves one piece
    per edge-class member.  The first member of each edge class keeps the
    block's remaining vertices attached, the rest split into singletons.
    Returns None when a cut edge joins two blocks, which no forest
    realises.
    """
    block_of = {}
    for i, blk in enumerate(parts):
        for v in blk:
            block_of[v] = i
    parent = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in cut:
        if block_of[u] != block_of[v]:
            return None
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    blocks = []
    for blk in parts:
        classes: dict = {}
        for v in sorted(blk):
            classes.setdefault(find(v), []).append(v)
        blocks.append({vs[0] for vs in classes.values()})
        for vs in classes.values():
            for v in vs[1:]:
                blocks.append({v})
    return canonical_partition(blocks)


class ForestPlugin(ProblemPlugin):
    """Requests are (pinned portal subset, its component partition, budget)."""

    name = "mwif"
    locality = 1
    direction = "max"

    def __init__(self, k: int):
        if k < 0:
            raise ValueError("size budget must be non-negative")
        self._k = k

    @property
    def k(self) -> int:
        return self._k

    def initial_state(self, g: EmbeddedGraph):
        return None

    def restrict_state(self, state, g: EmbeddedGraph):
        return None

    def enumerate_requests(self, d, g, portals, pebble, state):
        top = min(d, self._k)
        m = pebble.vertices
        if len(m) > top:
            return ()
        return tuple(
            (m, parts, bud)
            for parts in enumerate_partitions(m)
            for bud in range(top + 1)
        )

    def top_requests(self):
        return ((frozenset(), (), self._k),)

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
        shared_edges = sorted(g_int.edges & g_ext.edges)
        m_int, m_ex = m & vi, m & ve
        budget = ctx.child_budget
        light = separator.light
        base_light = len(required & light)
        weight = ctx.graph.weight
        for extra in _subsets(pool):
            fresh = required | frozenset(extra)
            if ctx.cap is not None:
                if base_light + sum(1 for v in extra if v in light) > ctx.cap:
                    continue
            pin_int, pin_ex = m_int | fresh, m_ex | fresh
            if max(len(fresh), len(pin_int), len(pin_ex)) > budget:
                continue
            cut = [e for e in shared_edges if e[0] in fresh and e[1] in fresh]
            over = sum(weight[v] for v in fresh)
            for p_int in enumerate_partitions(pin_int):
                # both sides keep the doubled edges, so their endpoints are
                # connected inside each child and must share a block
                if not _within_blocks(p_int, cut):
                    continue
                for p_ext in enumerate_partitions(pin_ex):
                    residue = _cut_residue(p_ext, cut)
                    if residue is None:
                        continue
                    if not is_acyclic_pair(p_int, residue):
                        continue
                    joined = restrict_partition(join(p_int, p_ext), m)
                    for req in ctx.requests:
                        if req[1] != joined:
                            continue
                        total = req[2]
                        for part in range(budget + 1):
                            rest = total - part + len(fresh)
                            if rest < 0 or rest > budget:
                                continue
                            v1, w1 = ctx.lookup_entry(interior, (pin_int, p_int, part))
                            if v1 == NEG_INF:
                                continue
                            v2, w2 = ctx.lookup_entry(exterior, (pin_ex, p_ext, rest))
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
        top = min(inst.d, self._k)
        allowed = [v for v in g.vertices if v not in portals.discarded]
        pebbled, light = portals.pebbled, portals.light
        for size in range(min(top, len(allowed)) + 1):
            for combo in combinations(allowed, size):
                chosen = frozenset(combo)
                pinned = chosen & pebbled
                if cap is not None and len(pinned & light) > cap:
                    continue
                ok, parts = _forest_components(g, chosen, pinned)
                if not ok:
                    continue
                value = sum(g.weight[v] for v in chosen)
                wit = chosen if track_witness else None
                for bud in range(size, top + 1):
                    out.update((pinned, parts, bud), value, wit)
        return out


def mwif_plugin(k: int) -> ForestPlugin:
    return ForestPlugin(k)
