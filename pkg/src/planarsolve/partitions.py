"""Partition algebra: joins, acyclic pairs, component partitions, colorings.

A Partition is a tuple of disjoint non-empty frozensets in canonical order:
blocks sorted by their minimum element.  The canonical tuple is used directly
as lookup-table key material, so every constructor funnels through
`canonical_partition`.
"""

from __future__ import annotations

from itertools import product

from .graphs import EmbeddedGraph

Partition = tuple[frozenset[int], ...]
Coloring = tuple[tuple[int, frozenset[int]], ...]
Counting = tuple[tuple[tuple[int, int], int], ...]


def canonical_partition(blocks) -> Partition:
    cleaned = [frozenset(b) for b in blocks if b]
    seen: set[int] = set()
    for b in cleaned:
        if seen & b:
            raise ValueError("blocks are not disjoint")
        seen |= b
    return tuple(sorted(cleaned, key=min))


def ground_set(p: Partition) -> frozenset[int]:
    out: set[int] = set()
    for b in p:
        out |= b
    return frozenset(out)


def singletons(ground) -> Partition:
    return tuple(frozenset((v,)) for v in sorted(ground))


class _DSU:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, a, b) -> bool:
        """Returns False when a and b were already joined (a cycle)."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def join(p: Partition, q: Partition) -> Partition:
    """Finest common coarsening; elements missing from one ground set are
    treated as singletons there."""
    dsu = _DSU()
    block_of_q: dict[int, int] = {}
    for j, b in enumerate(q):
        dsu.find(("q", j))
        for v in b:
            block_of_q[v] = j
    for i, b in enumerate(p):
        dsu.find(("p", i))
        for v in b:
            j = block_of_q.get(v)
            if j is not None:
                dsu.union(("p", i), ("q", j))
    members: dict = {}
    for i, b in enumerate(p):
        members.setdefault(dsu.find(("p", i)), set()).update(b)
    for j, b in enumerate(q):
        members.setdefault(dsu.find(("q", j)), set()).update(b)
    return canonical_partition(members.values())


def is_acyclic_pair(p: Partition, q: Partition) -> bool:
    """True iff the bipartite element-block graph of p and q is acyclic.

    An element appearing in a block of p and a block of q contributes an edge
    between the two blocks; two such elements sharing both blocks already
    form a cycle (parallel edges count).
    """
    dsu = _DSU()
    block_of_q: dict[int, int] = {}
    for j, b in enumerate(q):
        for v in b:
            block_of_q[v] = j
    for i, b in enumerate(p):
        for v in sorted(b):
            j = block_of_q.get(v)
            if j is None:
                continue
            if not dsu.union(("p", i), ("q", j)):
                return False
    return True


def components_partition(g: EmbeddedGraph, subset, marked) -> Partition:
    """Partition of `marked` by connectivity inside g[subset]."""
    sub = frozenset(subset)
    mk = frozenset(marked)
    if not mk <= sub:
        raise ValueError("marked vertices must lie inside the subset")
    seen: set[int] = set()
    blocks = []
    for s in sorted(sub):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.rotation[u]:
                if w in sub and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        blk = comp & mk
        if blk:
            blocks.append(blk)
    return canonical_partition(blocks)


def enumerate_partitions(ground):
    """All partitions of the ground set, via restricted growth strings."""
    elems = sorted(ground)
    n = len(elems)
    if n == 0:
        yield ()
        return

    def rec(i: int, blocks: list[set[int]]):
        if i == n:
            yield canonical_partition(blocks)
            return
        v = elems[i]
        for b in blocks:
            b.add(v)
            yield from rec(i + 1, blocks)
            b.remove(v)
        blocks.append({v})
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


def restrict_partition(p: Partition, subset) -> Partition:
    sub = frozenset(subset)
    return canonical_partition(b & sub for b in p)


def enumerate_coloring_extensions(Z, M, mu: dict[int, frozenset[int]] | None):
    """All colorings c: Z -> 2^M with non-empty disjoint covering images,
    respecting the pinned assignments mu (node -> vertex set).

    Yields nothing when no extension exists (|Z| > |M|, or some vertex of M
    is pinned to a node outside Z).
    """
    zs = tuple(sorted(Z))
    ms = tuple(sorted(M))
    mu = mu or {}
    pinned: dict[int, int] = {}
    for u, vs in mu.items():
        for v in vs:
            if v in ms and u not in zs:
                return
            if v in ms:
                pinned[v] = u
    if len(zs) > len(ms):
        return
    if not zs:
        if not ms:
            yield ()
        return
    free = [v for v in ms if v not in pinned]
    for assign in product(range(len(zs)), repeat=len(free)):
        images: dict[int, set[int]] = {u: set() for u in zs}
        for v, u in pinned.items():
            images[u].add(v)
        for v, i in zip(free, assign):
            images[zs[i]].add(v)
        if all(images[u] for u in zs):
            yield tuple((u, frozenset(images[u])) for u in zs)


def coloring_class_of(c: Coloring, v: int) -> int:
    for u, img in c:
        if v in img:
            return u
    raise KeyError(f"vertex {v} not colored")


def enumerate_counting_functions(edges: dict[tuple[int, int], int]):
    """All functions delta with 0 <= delta(e) <= multiplicity(e)."""
    keys = sorted(edges)
    for vals in product(*(range(edges[k] + 1) for k in keys)):
        yield tuple(zip(keys, vals))


def refines(p: Partition, c: Coloring) -> bool:
    """True iff no block of p mixes two colors of c."""
    colored: set[int] = set()
    color: dict[int, int] = {}
    for u, img in c:
        for v in img:
            color[v] = u
            colored.add(v)
    if ground_set(p) != colored:
        raise ValueError("partition ground set does not match colored set")
    for b in p:
        if len({color[v] for v in b}) > 1:
            return False
    return True
