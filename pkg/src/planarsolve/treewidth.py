"""Tree decompositions for layered planar graphs, plus balanced binarization.

Construction is by greedy elimination orders (min-degree and min-fill; the
better width wins).  For outerplanar inputs min-degree provably stays at
width 2; deeper layerings are covered by a hard budget check of 6d - 1, so
an out-of-budget decomposition is a loud error, never a silent overrun.
Balancing merges up to two boundary bags into each split bag, giving width
at most 3w + 2 and logarithmic depth.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import EmbeddedGraph
from .layering import outerplanarity_over_faces

DEPTH_CONSTANT = 4


@dataclass(frozen=True)
class TreeDecomposition:
    root: int
    parent: dict[int, int | None]
    children: dict[int, tuple[int, ...]]
    bags: dict[int, frozenset[int]]
    depth_constant: int | None = None

    def nodes(self) -> list[int]:
        return sorted(self.bags)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    @property
    def depth(self) -> int:
        best = 0
        stack = [(self.root, 0)]
        while stack:
            u, d = stack.pop()
            best = max(best, d)
            for ch in self.children[u]:
                stack.append((ch, d + 1))
        return best

    def subtree_vertices(self, u: int) -> frozenset[int]:
        """Union of the bags of u and its descendants."""
        out: set[int] = set()
        stack = [u]
        while stack:
            a = stack.pop()
            out |= self.bags[a]
            stack.extend(self.children[a])
        return frozenset(out)


def _elimination_order(g: EmbeddedGraph, rule: str) -> list[int]:
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    order: list[int] = []
    remaining = set(g.vertices)
    while remaining:
        if rule == "degree":
            v = min(remaining, key=lambda x: (len(adj[x]), x))
        else:
            def fill(x: int) -> int:
                nbrs = sorted(adj[x])
                return sum(
                    1
                    for i, a in enumerate(nbrs)
                    for b in nbrs[i + 1 :]
                    if b not in adj[a]
                )

            v = min(remaining, key=lambda x: (fill(x), len(adj[x]), x))
        order.append(v)
        nbrs = adj.pop(v)
        remaining.discard(v)
        for a in nbrs:
            adj[a].discard(v)
            adj[a] |= nbrs - {a}
    return order


def _decomposition_from_order(
    g: EmbeddedGraph, order: list[int]
) -> TreeDecomposition:
    """One bag per vertex: the vertex plus its later fill-graph neighbors."""
    if not order:
        return TreeDecomposition(0, {0: None}, {0: ()}, {0: frozenset()})
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    bags: dict[int, frozenset[int]] = {}
    parent: dict[int, int | None] = {}
    for v in order:
        later = {u for u in adj[v] if pos[u] > pos[v]}
        bags[v] = frozenset(later | {v})
        parent[v] = min(later, key=lambda u: pos[u]) if later else None
        for a in later:
            adj[a].discard(v)
            adj[a] |= later - {a}
    root = order[-1]
    for v in order[:-1]:
        if parent[v] is None:
            parent[v] = root
    children: dict[int, list[int]] = {v: [] for v in order}
    for v, p in parent.items():
        if p is not None:
            children[p].append(v)
    return TreeDecomposition(
        root,
        parent,
        {v: tuple(sorted(ch)) for v, ch in children.items()},
        bags,
    )


def outerplanar_tree_decomposition(
    g: EmbeddedGraph, d: int, verify_depth: bool = True
) -> TreeDecomposition:
    """Width-budgeted decomposition of a graph of peeling depth at most d.

    The budget 6d - 1 is double the 3d - 1 treewidth guarantee for
    d-outerplanar graphs; both greedy orders are tried and exceeding the
    budget raises instead of returning an oversized decomposition.
    verify_depth=False skips the peel-depth precheck for callers that own
    the depth invariant; the width budget is enforced either way.
    """
    if d < 1 and g.n > 0:
        raise ValueError("depth budget must be positive")
    if verify_depth:
        actual = outerplanarity_over_faces(g)
        if actual > d:
            raise ValueError(
                "graph peels at depth %d, budget is %d" % (actual, d)
            )
    best: TreeDecomposition | None = None
    for rule in ("degree", "fill"):
        t = _decomposition_from_order(g, _elimination_order(g, rule))
        if best is None or t.width < best.width:
            best = t
    assert best is not None
    budget = 6 * d - 1 if g.n else 0
    if g.n and best.width > budget:
        raise RuntimeError(
            "elimination width %d exceeds the %d budget for depth %d"
            % (best.width, budget, d)
        )
    return best


def validate_decomposition(g: EmbeddedGraph, t: TreeDecomposition) -> list[str]:
    """Check the three decomposition axioms; empty list means valid."""
    problems: list[str] = []
    nodes = set(t.bags)
    if t.root not in nodes:
        return ["root %r is not a node" % (t.root,)]
    seen: set[int] = set()
    stack = [t.root]
    while stack:
        u = stack.pop()
        if u in seen:
            return ["node %r reached twice; not a tree" % (u,)]
        seen.add(u)
        for ch in t.children.get(u, ()):
            if t.parent.get(ch) != u:
                problems.append("parent pointer of %r disagrees" % (ch,))
            stack.append(ch)
    if seen != nodes:
        problems.append("unreachable nodes %s" % sorted(nodes - seen))
    if problems:
        return problems

    holding: dict[int, set[int]] = {}
    for u in t.nodes():
        for v in t.bags[u]:
            holding.setdefault(v, set()).add(u)
    for v in sorted(g.vertices):
        if v not in holding:
            problems.append("vertex %d in no bag" % v)
    for u, v in sorted(g.edges):
        if not any(
            u in t.bags[node] and v in t.bags[node] for node in t.bags
        ):
            problems.append("edge (%d, %d) in no bag" % (u, v))
    for v, where in sorted(holding.items()):
        comp = {next(iter(where))}
        stack = list(comp)
        while stack:
            u = stack.pop()
            near = list(t.children[u])
            if t.parent[u] is not None:
                near.append(t.parent[u])
            for w in near:
                if w in where and w not in comp:
                    comp.add(w)
                    stack.append(w)
        if comp != where:
            problems.append("vertex %d has a disconnected trace" % v)
    return problems


def _binarize(t: TreeDecomposition) -> tuple[dict[int, frozenset[int]], dict[int, tuple[int, ...]], int]:
    """Duplicate-bag chains so every node has at most two children."""
    bags = dict(t.bags)
    children: dict[int, tuple[int, ...]] = {}
    next_id = max(bags) + 1
    for u in t.nodes():
        kids = list(t.children[u])
        if len(kids) <= 2:
            children[u] = tuple(kids)
            continue
        cur = u
        while len(kids) > 2:
            copy = next_id
            next_id += 1
            bags[copy] = t.bags[u]
            children[cur] = (kids[0], copy)
            kids = kids[1:]
            cur = copy
        children[cur] = tuple(kids)
    return bags, children, t.root


class _Balancer:
    """Boundary-anchored centroid splitting of a binary decomposition tree."""

    def __init__(self, bags, children, root):
        self.bags = bags
        self.adj: dict[int, set[int]] = {u: set() for u in bags}
        for u, kids in children.items():
            for ch in kids:
                self.adj[u].add(ch)
                self.adj[ch].add(u)
        self.out_bags: dict[int, frozenset[int]] = {}
        self.out_children: dict[int, list[int]] = {}
        self.next_id = 0
        self.root = self.build(frozenset(bags), frozenset())

    def new_node(self, bag: frozenset[int]) -> int:
        u = self.next_id
        self.next_id += 1
        self.out_bags[u] = bag
        self.out_children[u] = []
        return u

    def components(self, s: frozenset[int], removed: int) -> list[frozenset[int]]:
        left = set(s) - {removed}
        comps = []
        while left:
            start = min(left)
            comp = {start}
            stack = [start]
            while stack:
                a = stack.pop()
                for b in self.adj[a]:
                    if b in left and b not in comp:
                        comp.add(b)
                        stack.append(b)
            left -= comp
            comps.append(frozenset(comp))
        return comps

    def centroid(self, s: frozenset[int]) -> int:
        best, best_key = None, None
        for c in sorted(s):
            worst = max((len(x) for x in self.components(s, c)), default=0)
            if best_key is None or worst < best_key:
                best, best_key = c, worst
        assert best is not None
        return best

    def path_between(self, s: frozenset[int], a: int, b: int) -> list[int]:
        prev = {a: a}
        stack = [a]
        while stack:
            u = stack.pop()
            if u == b:
                break
            for w in self.adj[u]:
                if w in s and w not in prev:
                    prev[w] = u
                    stack.append(w)
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return list(reversed(path))

    def split_node(self, s: frozenset[int], anchors: frozenset[int]) -> int:
        if len(anchors) == 2:
            r1, r2 = sorted(anchors)
            half = len(s) / 2
            for c in self.path_between(s, r1, r2):
                sides = self.components(s, c)
                big = 0
                for comp in sides:
                    if r1 in comp or r2 in comp:
                        big = max(big, len(comp))
                if big <= half:
                    return c
            raise AssertionError("no balanced split point on anchor path")
        return self.centroid(s)

    def build(self, s: frozenset[int], anchors: frozenset[int]) -> int:
        c = self.split_node(s, anchors)
        bag = frozenset().union(self.bags[c], *(self.bags[r] for r in anchors))
        root = self.new_node(bag)
        comps = sorted(
            self.components(s, c), key=lambda comp: (-len(comp), min(comp))
        )
        subs = []
        for comp in comps:
            touch = {u for u in self.adj[c] if u in comp}
            sub_anchor = (anchors & comp) | touch
            subs.append(self.build(comp, frozenset(sub_anchor)))
        attach = root
        while len(subs) > 2:
            spine = self.new_node(bag)
            self.out_children[attach].append(subs.pop(0))
            self.out_children[attach].append(spine)
            attach = spine
        self.out_children[attach].extend(subs)
        return root


def balance_binary(t: TreeDecomposition) -> TreeDecomposition:
    """Binary, depth-balanced equivalent decomposition; width <= 3w + 2."""
    bags, children, root = _binarize(t)
    bal = _Balancer(bags, children, root)
    parent: dict[int, int | None] = {bal.root: None}
    for u, kids in bal.out_children.items():
        for ch in kids:
            parent[ch] = u
    out = TreeDecomposition(
        bal.root,
        parent,
        {u: tuple(kids) for u, kids in bal.out_children.items()},
        bal.out_bags,
        depth_constant=DEPTH_CONSTANT,
    )
    if out.width > 3 * t.width + 2:
        raise AssertionError("balanced width exceeds 3w + 2")
    return out


def dump_decomposition(t: TreeDecomposition) -> str:
    """Text dump: one `b <node> <vertices...>` line per bag, then parents."""
    lines = []
    for u in t.nodes():
        lines.append("b %d %s" % (u, " ".join(str(v) for v in sorted(t.bags[u]))))
    for u in t.nodes():
        p = t.parent[u]
        lines.append("p %d %d" % (u, -1 if p is None else p))
    return "\n".join(lines).rstrip() + "\n"
