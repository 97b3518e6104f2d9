"""Divide-and-conquer engine over request tables on planar graphs.

The engine recurses on instances (d, graph, portal triple, slack x,
state): `solve` splits along a balanced cycle separator and combines the
child tables per pebble set, `clean` shrinks oversized portal sets before
delegating back, and `base` runs a tree-decomposition DP once the
parameter is small.  Problem semantics (request encoding, scoring, the
combine formula) live entirely in a ProblemPlugin; the engine treats
requests as opaque dictionary keys and only ever asks for their pebble.

Tables are exact in the max/min sense: every enumerated request has an
entry, missing child entries during a combine count as the worst value
(and are tallied), so partial branches can only under-claim, never
over-claim.  The invariant monitor checks size budgets always and the
asymptotic formula clauses only when the configured thresholds are
analysis-faithful; at desk-scale thresholds those formulas are vacuously
off-scale and the operative guarantee is the cap-inclusion arithmetic of
the same-parameter branch.
"""

from __future__ import annotations

import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from itertools import combinations

from .graphs import EmbeddedGraph, induced_subgraph
from .layering import (
    baker_partition,
    bfs_layering,
    outerplanarity_over_faces,
    triangulate,
)
from .separators import (
    family_provider_generate,
    fundamental_cycle_separator,
    proper_uniform,
)
from .treewidth import outerplanar_tree_decomposition

NEG_INF = float("-inf")
POS_INF = float("inf")


class InvariantViolation(RuntimeError):
    """A recursion invariant failed in strict mode; the message is the
    violated clause."""


class PebbleBudgetError(RuntimeError):
    """Closed-form pebble count exceeds the configured budget."""


def worst_value(direction: str) -> float:
    return NEG_INF if direction == "max" else POS_INF


def is_better(direction: str, a, b) -> bool:
    return a > b if direction == "max" else a < b


def _log2(d) -> float:
    return math.log2(d) if d > 1 else 0.0


# ---------------------------------------------------------------------------
# portal triples and pebble sets


@dataclass(frozen=True)
class PortalSet:
    """Disjoint heavy / light / discarded boundary classes."""

    heavy: frozenset[int] = frozenset()
    light: frozenset[int] = frozenset()
    discarded: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.heavy & self.light or (self.heavy | self.light) & self.discarded:
            raise ValueError("portal classes must be pairwise disjoint")

    @property
    def vertices(self) -> frozenset[int]:
        return self.heavy | self.light | self.discarded

    @property
    def pebbled(self) -> frozenset[int]:
        return self.heavy | self.light

    def restrict(self, keep) -> "PortalSet":
        keep = frozenset(keep)
        return PortalSet(self.heavy & keep, self.light & keep, self.discarded & keep)

    def merge(self, heavy=(), light=(), discarded=()) -> "PortalSet":
        """Add vertices classwise; on conflict discarded beats heavy beats
        light, so a vertex never ends up in two classes."""
        di = self.discarded | frozenset(discarded)
        he = (self.heavy | frozenset(heavy)) - di
        li = (self.light | frozenset(light)) - di - he
        return PortalSet(he, li, di)


EMPTY_PORTALS = PortalSet()


def merge_portals(a: PortalSet, b: PortalSet) -> PortalSet:
    return a.merge(heavy=b.heavy, light=b.light, discarded=b.discarded)


@dataclass(frozen=True)
class PebbleSet:
    """Pinned subset of the heavy and light portals; light_count is the
    number of light vertices in it and is what the caps constrain."""

    vertices: frozenset[int]
    light_count: int


def make_pebble(vertices, portals: PortalSet) -> PebbleSet:
    vs = frozenset(vertices)
    if not vs <= portals.pebbled:
        raise ValueError("pebble vertices must be heavy or light portals")
    return PebbleSet(vs, len(vs & portals.light))


def is_measured(portals: PortalSet, x, d: int, alpha: int) -> str:
    """Classify (portals, x) against the size budgets for parameter d.

    Returns "measured", "almost", or "neither".  Heavy budget is
    40*x*alpha*sqrt(d), light budget 60*x*alpha*d*log2(d); the slack x may
    reach max(200*log2(d)^7, 1) for almost-measured and only
    max(40*log2(d)^7, 1) for measured.  All comparisons are inclusive.
    """
    if d < 1:
        return "neither"
    log = _log2(d)
    if x > max(200 * log**7, 1):
        return "neither"
    if len(portals.heavy) > 40 * x * alpha * math.sqrt(d):
        return "neither"
    if len(portals.light) > 60 * x * alpha * d * log:
        return "neither"
    if x <= max(40 * log**7, 1):
        return "measured"
    return "almost"


def pebble_cap(d: int, alpha: int, x) -> int | None:
    """Light-vertex cap floor(20*x*alpha*sqrt(d)*log2(d)); None = uncapped."""
    if x is None or x == POS_INF:
        return None
    return math.floor(20 * x * alpha * math.sqrt(d) * _log2(d))


def pebble_count(portals: PortalSet, cap: int | None) -> int:
    """Closed-form size of the pebble-set space:
    2^|heavy| * sum_{i<=cap} C(|light|, i)."""
    nl = len(portals.light)
    top = nl if cap is None else min(cap, nl)
    if top < 0:
        return 0
    return (1 << len(portals.heavy)) * sum(math.comb(nl, i) for i in range(top + 1))


def _subsets_by_size(items: list[int]):
    for size in range(len(items) + 1):
        yield from combinations(items, size)


def enumerate_pebble_sets(
    portals: PortalSet,
    d: int,
    alpha: int,
    x,
    cap: int | None = None,
    limit: int | None = None,
) -> list[PebbleSet]:
    """All pebble sets M with at most `cap` light vertices, deterministically
    ordered: heavy subsets by (size, lexicographic), then light additions
    likewise.  The cap defaults to pebble_cap(d, alpha, x); pass it
    explicitly to override.  If the closed-form count exceeds `limit` the
    call refuses up front instead of enumerating.
    """
    if cap is None:
        cap = pebble_cap(d, alpha, x)
    if limit is not None:
        total = pebble_count(portals, cap)
        if total > limit:
            raise PebbleBudgetError(
                "%d pebble sets exceed the budget %d" % (total, limit)
            )
    heavy = sorted(portals.heavy)
    light = sorted(portals.light)
    top = len(light) if cap is None else min(cap, len(light))
    out: list[PebbleSet] = []
    for hs in _subsets_by_size(heavy):
        for i in range(top + 1):
            for ls in combinations(light, i):
                out.append(PebbleSet(frozenset(hs + ls), i))
    return out


# ---------------------------------------------------------------------------
# instances and tables


@dataclass(frozen=True)
class Instance:
    """One recursion node: parameter d, graph, portal triple, slack x, and
    the plugin-owned request state.  x is a float so the uncapped base DP
    can use infinity."""

    d: int
    graph: EmbeddedGraph
    portals: PortalSet
    x: float
    state: object = None


class LookupTable:
    """Request table with exactly one value per enumerated request.

    Missing keys mean the request was never enumerated; combine treats
    them as the worst value and counts them.  update() replaces only on a
    strict improvement, so ties keep the first witness seen and reruns
    are reproducible.
    """

    __slots__ = ("direction", "values", "witnesses")

    def __init__(self, direction: str):
        if direction not in ("max", "min"):
            raise ValueError("direction must be 'max' or 'min'")
        self.direction = direction
        self.values: dict = {}
        self.witnesses: dict = {}

    def worst(self) -> float:
        return worst_value(self.direction)

    def better(self, a, b) -> bool:
        return is_better(self.direction, a, b)

    def ensure(self, request) -> None:
        self.values.setdefault(request, self.worst())

    def update(self, request, value, witness=None) -> None:
        cur = self.values.get(request)
        if cur is None or self.better(value, cur):
            self.values[request] = value
            if witness is not None:
                self.witnesses[request] = witness
            elif request in self.witnesses:
                del self.witnesses[request]

    def get(self, request):
        return self.values.get(request)

    def witness(self, request):
        return self.witnesses.get(request)

    def absorb(self, other: "LookupTable") -> None:
        for r, v in other.values.items():
            self.update(r, v, other.witnesses.get(r))

    def items(self):
        return self.values.items()

    def __len__(self) -> int:
        return len(self.values)


# ---------------------------------------------------------------------------
# configuration, stats, invariant monitor


@dataclass(frozen=True)
class SolveConfig:
    """Engine knobs.  Defaults suit desk-scale instances; the
    analysis-faithful thresholds are astronomically larger and only the
    invariant monitor cares about the difference.  clean_threshold
    overrides the slack level that triggers portal cleaning (the default
    40*log2(d)^7 is unreachable on small inputs)."""

    n_threshold: int = 12
    d_threshold: int = 8
    relaxed: bool = False
    pebble_budget: int = 4096
    family_provider: str = "trivial"
    track_witness: bool = False
    check_invariants: bool = False
    clean_threshold: float | None = None


class Stats:
    """Run counters; mutation is lock-guarded so concurrently evaluated
    branches cannot drop updates."""

    def __init__(self):
        self._lock = threading.Lock()
        self.counters: dict[str, int] = {}
        self.max_depth = 0
        self.max_table = 0
        self.violations: list[str] = []

    def bump(self, name: str, by: int = 1) -> None:
        with self._lock:
            self.counters[name] = self.counters.get(name, 0) + by

    def observe_depth(self, depth: int) -> None:
        with self._lock:
            if depth > self.max_depth:
                self.max_depth = depth

    def observe_table(self, size: int) -> None:
        with self._lock:
            if size > self.max_table:
                self.max_table = size

    def note_violation(self, clause: str) -> None:
        with self._lock:
            self.violations.append(clause)

    def as_dict(self) -> dict:
        return {
            "counters": dict(sorted(self.counters.items())),
            "max_depth": self.max_depth,
            "max_table_size": self.max_table,
            "violations": list(self.violations),
        }


@dataclass(frozen=True)
class CallRecord:
    """Snapshot of one recursion-node entry for the invariant monitor.

    parent carries the (d, z) coordinates of the combining parent, where
    z is x for the separator recursion and x + 2y for cleaning.  For the
    cleaning routine heavy/light/discarded describe the merged portal
    triple and x_portal / y_heavy / y_light the split parts.
    """

    algorithm: str
    d: int
    x: float
    n: int
    alpha: int
    heavy: int
    light: int
    discarded: int = 0
    y: int = 0
    x_portal: int = 0
    y_heavy: int = 0
    y_light: int = 0
    parent: tuple | None = None
    d_threshold: int = 8
    analysis_faithful: bool = False
    reason: str = "recursion"


def check_invariants(record: CallRecord) -> list[str]:
    """Violated input-invariant clauses for one recursion node.

    Size budgets are asserted always.  The formula clauses (slack upper
    bound with the -44*log2(d) margin, the cleaning floor d >= 2^(7*alpha),
    the base ceiling d <= 2^(7*alpha+2), and cross-call monotonicity of
    z*sqrt(d)*log2(d)) hold only in the asymptotic regime, so they are
    asserted only for analysis-faithful records; desk-scale records get
    the operative max(., 1)-guarded validity bound instead.
    """
    r = record
    out: list[str] = []
    if r.d < 1:
        return ["d >= 1"]
    log = _log2(r.d)
    z = r.x + 2 * r.y if r.algorithm == "clean" else r.x

    if r.algorithm in ("solve", "clean"):
        if r.analysis_faithful:
            if r.x > 200 * log**7 - 44 * log:
                out.append("x <= 200*log2(d)^7 - 44*log2(d)")
        elif r.x > max(200 * log**7, 1):
            out.append("x <= max(200*log2(d)^7, 1)")
        if r.heavy > 40 * z * r.alpha * math.sqrt(r.d):
            out.append("|B_he| <= 40*z*alpha*sqrt(d)")
        if r.light > 60 * z * r.alpha * r.d * log:
            out.append("|B_li| <= 60*z*alpha*d*log2(d)")
    if r.algorithm == "clean":
        if log > 0 and r.y >= 22 * log:
            out.append("y < 22*log2(d)")
        if r.analysis_faithful and r.d < 2 ** (7 * r.alpha):
            out.append("d >= 2^(7*alpha)")
        if r.x_portal > (0.75**r.y) * 50 * r.d**6:
            out.append("|X_he u X_li| <= (3/4)^y * 50*d^6")
        if r.y_heavy > 40 * (2 * r.y) * r.alpha * math.sqrt(r.d):
            out.append("|Y_he| <= 40*(2y)*alpha*sqrt(d)")
        if r.y_light > 60 * (2 * r.y) * r.alpha * r.d * log:
            out.append("|Y_li| <= 60*(2y)*alpha*d*log2(d)")
    if r.algorithm == "base":
        if r.analysis_faithful:
            if r.d > 2 ** (7 * r.alpha + 2):
                out.append("d <= 2^(7*alpha+2)")
        elif r.reason == "threshold" and r.d >= r.d_threshold:
            out.append("d < d-threshold")
        if r.x != POS_INF and r.x > max(200 * log**7, 1):
            out.append("x <= max(200*log2(d)^7, 1)")
    if r.parent is not None and r.analysis_faithful:
        d1, z1 = r.parent
        if z1 * math.sqrt(d1) * _log2(d1) > z * math.sqrt(r.d) * log:
            out.append("z1*sqrt(d1)*log2(d1) <= z2*sqrt(d2)*log2(d2)")
    return out


# ---------------------------------------------------------------------------
# problem plugins


@dataclass
class CombineContext:
    """Everything a combine step may consult beyond its four arguments.

    d is the parameter the separator cap was taken at (the virtual parent
    for the shrunk-parameter branch); request_d is the parameter of the
    request space being filled.  Child tables were built over
    interior_graph and exterior_graph; arcs inside the separator that
    appear in both side graphs are the double-counted ones a combine
    formula must subtract once.  requests holds exactly the parent
    requests this application must fill.
    """

    plugin: "ProblemPlugin"
    d: int
    request_d: int
    child_budget: int
    alpha: int
    cap: int | None
    portals: PortalSet
    x: float
    state: object
    graph: EmbeddedGraph
    interior_graph: EmbeddedGraph
    exterior_graph: EmbeddedGraph
    requests: tuple = ()
    track_witness: bool = False
    stats: Stats | None = None

    @property
    def direction(self) -> str:
        return self.plugin.direction

    def worst(self) -> float:
        return worst_value(self.plugin.direction)

    def lookup(self, table: LookupTable, request) -> float:
        """Child-table value; a missing entry is the worst value and is
        tallied, so contract gaps surface in the stats."""
        v = table.get(request)
        if v is None:
            if self.stats is not None:
                self.stats.bump("missing_child_lookups")
            return self.worst()
        return v

    def lookup_entry(self, table: LookupTable, request):
        v = table.get(request)
        if v is None:
            if self.stats is not None:
                self.stats.bump("missing_child_lookups")
            return self.worst(), None
        return v, table.witness(request)


class ProblemPlugin(ABC):
    """A request-variant problem: request encoding, scoring, and the glue
    step over a separator.

    The engine treats requests as opaque dictionary keys; it only asks
    for the pebble of a request (request_pebble) to apply the separator
    admissibility filters.  Encodings must not depend on the parameter d
    except through ranges monotone in d (for example a budget capped at
    min(d, k)), because the base DP answers requests for the original d
    out of tables built for a larger internal parameter.  brute_force is
    the recursion's base case: direct enumeration over the instance
    graph, one entry per enumerated request.
    """

    name = "problem"
    locality = 1
    direction = "max"

    @property
    @abstractmethod
    def k(self) -> int:
        """Global solution budget; also the top-level parameter d."""

    @abstractmethod
    def initial_state(self, g: EmbeddedGraph):
        """Request state for the whole input graph."""

    @abstractmethod
    def restrict_state(self, state, g: EmbeddedGraph):
        """Project the state onto a subgraph instance."""

    @abstractmethod
    def enumerate_requests(self, d, g, portals, pebble, state) -> tuple:
        """All requests whose pebble is the given set."""

    @abstractmethod
    def combine(self, separator, pebble, interior, exterior, ctx) -> LookupTable:
        """Fill ctx.requests for one pebble set from the two child tables;
        must be pure (replay with the same arguments gives the same
        fragment)."""

    @abstractmethod
    def brute_force(self, inst: Instance, track_witness: bool = False) -> LookupTable:
        """Exhaustive table for a small instance."""

    @abstractmethod
    def top_requests(self) -> tuple:
        """Requests whose best value answers the original problem."""

    def request_pebble(self, request) -> frozenset[int]:
        """Pebble of an encoded request; default is the first slot."""
        return request[0]

    def prepare_piece(self, g: EmbeddedGraph, piece: EmbeddedGraph):
        """Adjust a layer-residue piece so scores inside it match scores in
        the full graph; returns (piece graph, plugin to solve it with).
        The default is the identity: problems whose value reads only the
        chosen vertices and the edges among them lose nothing when other
        layers are deleted."""
        return piece, self

    def make_table(self) -> LookupTable:
        return LookupTable(self.direction)

    def extract_answer(self, table: LookupTable, query=None):
        """(value, witness) for one query, or the best over top_requests."""
        if query is not None:
            v = table.get(query)
            return (table.worst() if v is None else v), table.witness(query)
        best, wit = table.worst(), None
        for r in self.top_requests():
            v = table.get(r)
            if v is not None and table.better(v, best):
                best, wit = v, table.witness(r)
        return best, wit


# ---------------------------------------------------------------------------
# the engine


class _Engine:
    def __init__(self, plugin: ProblemPlugin, config: SolveConfig, stats=None):
        self.plugin = plugin
        self.config = config
        self.stats = stats if stats is not None else Stats()
        self.alpha = plugin.locality
        self.faithful = config.d_threshold >= 2 ** (7 * plugin.locality)

    # ---- policy helpers ---------------------------------------------------

    def clean_trigger(self, d: int) -> float:
        if self.config.clean_threshold is not None:
            return self.config.clean_threshold
        return 40 * _log2(d) ** 7

    def monitor(self, record: CallRecord, inst: Instance | None = None) -> None:
        if inst is not None and not inst.portals.vertices <= inst.graph.vertex_set():
            raise InvariantViolation("portal vertices must lie in the graph")
        if self.config.relaxed:
            return
        for clause in check_invariants(record):
            self.stats.note_violation(clause)
            raise InvariantViolation(clause)

    def request_space(self, d, g, portals, x, state, limit="budget"):
        lim = self.config.pebble_budget if limit == "budget" else limit
        pebbles = enumerate_pebble_sets(portals, d, self.alpha, x, limit=lim)
        self.stats.bump("pebble_sets", len(pebbles))
        plugin = self.plugin
        return [
            (m, tuple(plugin.enumerate_requests(d, g, portals, m, state)))
            for m in pebbles
        ]

    def _fresh_table(self, space) -> LookupTable:
        res = self.plugin.make_table()
        for _, reqs in space:
            for r in reqs:
                res.ensure(r)
        return res

    def brute(self, inst: Instance) -> LookupTable:
        if not inst.portals.vertices <= inst.graph.vertex_set():
            raise InvariantViolation("portal vertices must lie in the graph")
        self.stats.bump("brute_force_calls")
        t = self.plugin.brute_force(inst, track_witness=self.config.track_witness)
        self.stats.observe_table(len(t))
        return t

    # ---- combine orchestration -------------------------------------------

    def apply_combine(
        self,
        res: LookupTable,
        space,
        sep: PortalSet,
        apply_d: int,
        child_d: int,
        t_int: LookupTable,
        t_ext: LookupTable,
        g_int: EmbeddedGraph,
        g_ext: EmbeddedGraph,
        *,
        request_d: int,
        portals: PortalSet,
        x,
        state,
        graph: EmbeddedGraph,
        cap="auto",
    ) -> None:
        """One request-table glue step over an annotated separator.

        Requests that touch a discarded separator vertex or exceed the
        light cap are skipped (other separators fill them); so are whole
        pebbles that a shrunk-parameter side deleted.
        """
        plugin, cfg = self.plugin, self.config
        if cap == "auto":
            # the separator joins the family with unit slack
            cap = pebble_cap(apply_d, self.alpha, 1)
        alive = g_int.vertex_set() | g_ext.vertex_set()
        ctx0 = CombineContext(
            plugin=plugin,
            d=apply_d,
            request_d=request_d,
            child_budget=min(child_d, plugin.k),
            alpha=self.alpha,
            cap=cap,
            portals=portals,
            x=x,
            state=state,
            graph=graph,
            interior_graph=g_int,
            exterior_graph=g_ext,
            track_witness=cfg.track_witness,
            stats=self.stats,
        )
        for pebble, reqs in space:
            if not pebble.vertices <= alive:
                continue
            live = []
            for r in reqs:
                m = plugin.request_pebble(r)
                if m & sep.discarded:
                    continue
                if cap is not None and len(m & sep.light) > cap:
                    continue
                live.append(r)
            if not live:
                continue
            ctx = replace(ctx0, requests=tuple(live))
            frag = plugin.combine(sep, pebble, t_int, t_ext, ctx)
            self.stats.bump("combines")
            if cfg.check_invariants:
                again = plugin.combine(sep, pebble, t_int, t_ext, ctx)
                if again.values != frag.values:
                    raise InvariantViolation("combine replay mismatch")
            res.absorb(frag)

    # ---- separator recursion ----------------------------------------------

    def solve(self, inst: Instance, depth: int = 0, parent=None) -> LookupTable:
        cfg = self.config
        g, d, x, bp = inst.graph, inst.d, inst.x, inst.portals
        self.stats.bump("solve_calls")
        self.stats.observe_depth(depth)
        if d < 1:
            raise InvariantViolation("d >= 1")
        if g.n < cfg.n_threshold:
            return self.brute(inst)
        if d < cfg.d_threshold:
            return self.base_call(inst, depth, reason="threshold", parent=parent)
        if x >= self.clean_trigger(d):
            t = self.clean_call(
                d, g, x, 0, bp, EMPTY_PORTALS, inst.state, depth, parent
            )
            space = self.request_space(d, g, bp, x, inst.state)
            res = self._fresh_table(space)
            res.absorb(t)
            return res
        rec = CallRecord(
            "solve",
            d,
            x,
            g.n,
            self.alpha,
            len(bp.heavy),
            len(bp.light),
            len(bp.discarded),
            parent=parent,
            d_threshold=cfg.d_threshold,
            analysis_faithful=self.faithful,
        )
        self.monitor(rec, inst)
        if cfg.check_invariants and outerplanarity_over_faces(g) > self.alpha * d:
            raise InvariantViolation("graph must be alpha*d-outerplanar")
        if g.n < 4:
            self.stats.bump("guard_small_graph")
            return self.base_call(inst, depth, reason="guard", parent=parent)
        tri = triangulate(g)
        w = proper_uniform(g.vertices, g.vertices)
        sep = fundamental_cycle_separator(tri.graph, w)
        int_verts, ext_verts = sep.interior, sep.exterior
        if max(len(int_verts), len(ext_verts)) >= g.n:
            self.stats.bump("guard_no_progress")
            return self.base_call(inst, depth, reason="guard", parent=parent)
        cyc = sep.vertex_set
        p_int = bp.merge(light=cyc).restrict(int_verts)
        p_ext = bp.merge(light=cyc).restrict(ext_verts)
        cap_child = pebble_cap(d, self.alpha, x + 1)
        est = max(pebble_count(p_int, cap_child), pebble_count(p_ext, cap_child))
        own = pebble_count(bp, pebble_cap(d, self.alpha, x))
        fresh = len(cyc - bp.vertices)
        if est > cfg.pebble_budget or (own << fresh) > 16 * cfg.pebble_budget:
            self.stats.bump("guard_pebble_budget")
            return self.base_call(inst, depth, reason="guard", parent=parent)
        self.stats.bump("separator_splits")
        space = self.request_space(d, g, bp, x, inst.state)
        res = self._fresh_table(space)

        g_int = induced_subgraph(g, int_verts)
        g_ext = induced_subgraph(g, ext_verts)
        t_int = self.solve(
            Instance(d, g_int, p_int, x + 1, self.plugin.restrict_state(inst.state, g_int)),
            depth + 1,
            parent=(d, x),
        )
        t_ext = self.solve(
            Instance(d, g_ext, p_ext, x + 1, self.plugin.restrict_state(inst.state, g_ext)),
            depth + 1,
            parent=(d, x),
        )
        self.apply_combine(
            res,
            space,
            PortalSet(light=cyc),
            apply_d=d,
            child_d=d,
            t_int=t_int,
            t_ext=t_ext,
            g_int=g_int,
            g_ext=g_ext,
            request_d=d,
            portals=bp,
            x=x,
            state=inst.state,
            graph=g,
        )

        shrunk = math.floor(d - 3 * math.sqrt(d))
        if shrunk >= 1:
            family = family_provider_generate(
                tri.graph, sep, d, provider=cfg.family_provider
            )
            for ann in family:
                self._branch_shrunk(res, space, inst, ann, shrunk, depth)
        self.stats.observe_table(len(res))
        return res

    def _branch_shrunk(self, res, space, inst, ann, shrunk, depth) -> None:
        """Shrunk-parameter branch: remove one layer residue per side and
        combine at the virtual parent (shrunk, 2x+1)."""
        g, d, x = inst.graph, inst.d, inst.x
        classes = self.alpha * shrunk + 1
        tri_int = induced_subgraph(inst.graph, ann.interior)
        tri_ext = induced_subgraph(inst.graph, ann.exterior)
        cls_int = baker_partition(tri_int, classes)
        cls_ext = baker_partition(tri_ext, classes)
        pairs: dict = {}
        for a_i in cls_int:
            for a_e in cls_ext:
                pairs[(ann.interior - a_i, ann.exterior - a_e)] = None
        sep_p = PortalSet(ann.heavy, ann.light, ann.discarded)
        merged = inst.portals.merge(
            heavy=ann.heavy, light=ann.light, discarded=ann.discarded
        )
        tables: dict = {}
        for vi, ve in pairs:
            sides = []
            for verts in (vi, ve):
                got = tables.get(verts)
                if got is None:
                    gs = induced_subgraph(g, verts)
                    child = Instance(
                        shrunk,
                        gs,
                        merged.restrict(verts),
                        2 * x + 2,
                        self.plugin.restrict_state(inst.state, gs),
                    )
                    got = (gs, self.solve(child, depth + 1, parent=(shrunk, 2 * x + 1)))
                    tables[verts] = got
                sides.append(got)
            (gi, ti), (ge, te) = sides
            self.stats.bump("shrunk_pairs")
            self.apply_combine(
                res,
                space,
                sep_p,
                apply_d=shrunk,
                child_d=shrunk,
                t_int=ti,
                t_ext=te,
                g_int=gi,
                g_ext=ge,
                request_d=d,
                portals=inst.portals,
                x=x,
                state=inst.state,
                graph=g,
            )

    # ---- portal cleaning ---------------------------------------------------

    def clean_call(
        self, d, g, x, y, xp: PortalSet, yp: PortalSet, state, depth, parent=None
    ) -> LookupTable:
        cfg = self.config
        self.stats.bump("clean_calls")
        self.stats.observe_depth(depth)
        merged = merge_portals(xp, yp)
        x_set = xp.pebbled
        rec = CallRecord(
            "clean",
            d,
            x,
            g.n,
            self.alpha,
            len(merged.heavy),
            len(merged.light),
            len(merged.discarded),
            y=y,
            x_portal=len(x_set),
            y_heavy=len(yp.heavy),
            y_light=len(yp.light),
            parent=parent,
            d_threshold=cfg.d_threshold,
            analysis_faithful=self.faithful,
        )
        inst = Instance(d, g, merged, x + 2 * y, state)
        self.monitor(rec, inst)
        space = self.request_space(d, g, merged, x + 2 * y, state)
        res = self._fresh_table(space)
        if len(x_set) <= 20 * math.sqrt(d):
            # small enough to hand back; the slack resets to 2y+1, so some
            # high-light requests may stay at the worst value (the lookup
            # tally surfaces how many)
            self.stats.bump("clean_delegations")
            res.absorb(self.solve(Instance(d, g, merged, 2 * y + 1, state), depth + 1))
            self.stats.observe_table(len(res))
            return res
        tri = triangulate(g)
        w = proper_uniform(x_set, g.vertex_set())
        sep = fundamental_cycle_separator(tri.graph, w)
        keep_int = len(x_set & sep.interior)
        keep_ext = len(x_set & sep.exterior)
        if max(keep_int, keep_ext) >= len(x_set):
            # the cut did not shrink the oversized portal set; delegation is
            # always correct, only the efficiency argument is lost
            self.stats.bump("guard_clean_no_progress")
            res.absorb(self.solve(Instance(d, g, merged, 2 * y + 1, state), depth + 1))
            self.stats.observe_table(len(res))
            return res
        family = family_provider_generate(tri.graph, sep, d, provider=cfg.family_provider)
        for ann in family:
            sides = []
            for verts in (ann.interior, ann.exterior):
                gs = induced_subgraph(g, verts)
                xs = xp.restrict(verts)
                ys = yp.merge(
                    heavy=ann.heavy, light=ann.light, discarded=ann.discarded
                ).restrict(verts)
                ts = self.clean_call(
                    d,
                    gs,
                    x,
                    y + 1,
                    xs,
                    ys,
                    self.plugin.restrict_state(state, gs),
                    depth + 1,
                    parent=(d, x + 2 * y),
                )
                sides.append((gs, ts))
            (gi, ti), (ge, te) = sides
            self.apply_combine(
                res,
                space,
                PortalSet(ann.heavy, ann.light, ann.discarded),
                apply_d=d,
                child_d=d,
                t_int=ti,
                t_ext=te,
                g_int=gi,
                g_ext=ge,
                request_d=d,
                portals=merged,
                x=x + 2 * y,
                state=state,
                graph=g,
            )
        self.stats.observe_table(len(res))
        return res

    # ---- low-parameter base case -------------------------------------------

    def base_call(
        self, inst: Instance, depth: int, reason: str = "threshold", parent=None
    ) -> LookupTable:
        cfg, plugin = self.config, self.plugin
        g, d, bp = inst.graph, inst.d, inst.portals
        self.stats.bump("base_calls")
        self.stats.observe_depth(depth)
        rec = CallRecord(
            "base",
            d,
            inst.x,
            g.n,
            self.alpha,
            len(bp.heavy),
            len(bp.light),
            len(bp.discarded),
            parent=parent,
            d_threshold=cfg.d_threshold,
            analysis_faithful=self.faithful,
            reason=reason,
        )
        self.monitor(rec, inst)
        if g.n < 2:
            return self.brute(inst)
        if cfg.check_invariants and outerplanarity_over_faces(g) > self.alpha * d:
            raise InvariantViolation("graph must be alpha*d-outerplanar at the base")
        big_d = 4 * d * d
        low = bp.light | bp.discarded
        t = outerplanar_tree_decomposition(g, max(1, self.alpha * d), verify_depth=False)

        def node_portals(verts: frozenset[int], bag: frozenset[int]) -> PortalSet:
            heavy = (bp.heavy & verts) | (bag - low)
            return PortalSet(heavy, bp.light & verts, bp.discarded & verts)

        def glue(sep_bag, out_bag, t_in, g_in, t_out, g_out, target_verts):
            # sep_bag separates the two sides; out_bag is the interface the
            # glued table keeps pinned (the bag still open to the rest)
            tg = induced_subgraph(g, target_verts)
            tp = node_portals(target_verts, out_bag)
            st = plugin.restrict_state(inst.state, tg)
            space = self.request_space(big_d, tg, tp, POS_INF, st, limit=None)
            out = self._fresh_table(space)
            self.apply_combine(
                out,
                space,
                PortalSet(
                    sep_bag - low, bp.light & sep_bag, bp.discarded & sep_bag
                ),
                apply_d=big_d,
                child_d=big_d,
                t_int=t_in,
                t_ext=t_out,
                g_int=g_in,
                g_ext=g_out,
                request_d=big_d,
                portals=tp,
                x=POS_INF,
                state=st,
                graph=tg,
                cap=None,
            )
            return out

        def all_heavy_brute(verts: frozenset[int]) -> tuple:
            gs = induced_subgraph(g, verts)
            ps = PortalSet(verts - low, bp.light & verts, bp.discarded & verts)
            return gs, self.brute(
                Instance(big_d, gs, ps, POS_INF, plugin.restrict_state(inst.state, gs))
            )

        subtree: dict[int, frozenset[int]] = {}
        tables: dict[int, tuple] = {}
        for u in self._postorder(t):
            bag = t.bags[u]
            kids = t.children.get(u, ())
            if not kids:
                subtree[u] = bag
                tables[u] = all_heavy_brute(bag)
                continue
            acc_verts = bag
            acc: tuple | None = None
            for v in kids:
                g_child, t_child = tables.pop(v)
                pair_g, pair_t = all_heavy_brute(bag | t.bags[v])
                step_verts = subtree[v] | bag
                step_g = induced_subgraph(g, step_verts)
                step_t = glue(
                    t.bags[v], bag, t_child, g_child, pair_t, pair_g, step_verts
                )
                if acc is None:
                    acc, acc_verts = (step_g, step_t), step_verts
                else:
                    new_verts = acc_verts | step_verts
                    new_t = glue(bag, bag, step_t, step_g, acc[1], acc[0], new_verts)
                    acc, acc_verts = (induced_subgraph(g, new_verts), new_t), new_verts
            subtree[u] = acc_verts
            tables[u] = acc
        root_g, root_t = tables[t.root]
        strip = (t.bags[t.root] - low) - bp.heavy
        if strip:
            strip_g, strip_t = all_heavy_brute(strip)
            space = self.request_space(big_d, g, bp, POS_INF, inst.state, limit=None)
            full = self._fresh_table(space)
            self.apply_combine(
                full,
                space,
                PortalSet(heavy=strip),
                apply_d=big_d,
                child_d=big_d,
                t_int=strip_t,
                t_ext=root_t,
                g_int=strip_g,
                g_ext=root_g,
                request_d=big_d,
                portals=bp,
                x=POS_INF,
                state=inst.state,
                graph=g,
                cap=None,
            )
        else:
            full = root_t
        # answer the original request space out of the uncapped table
        space = self.request_space(inst.d, g, bp, inst.x, inst.state)
        out = self._fresh_table(space)
        for _, reqs in space:
            for r in reqs:
                v = full.get(r)
                if v is None:
                    self.stats.bump("missing_child_lookups")
                else:
                    out.update(r, v, full.witness(r))
        self.stats.observe_table(len(out))
        return out

    @staticmethod
    def _postorder(t) -> list[int]:
        out: list[int] = []
        stack: list[tuple[int, bool]] = [(t.root, False)]
        while stack:
            u, done = stack.pop()
            if done:
                out.append(u)
                continue
            stack.append((u, True))
            for v in t.children.get(u, ()):
                stack.append((v, False))
        return out


# ---------------------------------------------------------------------------
# public entry points


def solve(
    plugin: ProblemPlugin,
    inst: Instance,
    config: SolveConfig | None = None,
    stats: Stats | None = None,
) -> LookupTable:
    """Full request table for one instance (dispatching recursion)."""
    eng = _Engine(plugin, config or SolveConfig(), stats)
    return eng.solve(inst)


def clean(
    plugin: ProblemPlugin,
    d: int,
    g: EmbeddedGraph,
    x,
    y: int,
    x_portals: PortalSet,
    y_portals: PortalSet,
    state=None,
    config: SolveConfig | None = None,
    stats: Stats | None = None,
) -> LookupTable:
    """Portal-cleaning recursion on the merged triple of X and Y parts."""
    eng = _Engine(plugin, config or SolveConfig(), stats)
    return eng.clean_call(d, g, x, y, x_portals, y_portals, state, 0)


def base(
    plugin: ProblemPlugin,
    inst: Instance,
    config: SolveConfig | None = None,
    stats: Stats | None = None,
) -> LookupTable:
    """Tree-decomposition DP for a low-parameter instance."""
    eng = _Engine(plugin, config or SolveConfig(), stats)
    return eng.base_call(inst, 0, reason="direct")


def apply_locality(plugin: ProblemPlugin, g: EmbeddedGraph, k: int | None = None):
    """Layer-residue subgraphs, one per residue class mod alpha*k + 1.

    Every solution of cost at most k survives in some residue subgraph
    with its score intact, and each subgraph is alpha*k-outerplanar, so
    the best answer over the pieces equals the answer on g.
    """
    k = plugin.k if k is None else k
    classes = plugin.locality * k + 1
    lay = bfs_layering(g)
    vs = g.vertex_set()
    out = []
    for j in range(classes):
        keep = frozenset(v for v in vs if lay[v] % classes != j)
        out.append(induced_subgraph(g, keep))
    return out


@dataclass
class RunOutcome:
    """Result of a whole run: best value, an optional witness, which
    residue piece won, per-piece values, and the engine stats."""

    value: float
    witness: frozenset | None
    residue: int | None
    residue_values: tuple
    stats: Stats


def solve_problem(
    plugin: ProblemPlugin,
    g: EmbeddedGraph,
    config: SolveConfig | None = None,
    stats: Stats | None = None,
) -> RunOutcome:
    """Top-level driver: locality residues, then the recursion per piece."""
    cfg = config or SolveConfig()
    eng = _Engine(plugin, cfg, stats)
    state0 = plugin.initial_state(g)
    best = worst_value(plugin.direction)
    wit = None
    winner = None
    vals = []
    for j, raw in enumerate(apply_locality(plugin, g)):
        piece, pp = plugin.prepare_piece(g, raw)
        if pp is plugin:
            peng, st = eng, plugin.restrict_state(state0, piece)
        else:
            peng, st = _Engine(pp, cfg, eng.stats), pp.initial_state(piece)
        inst = Instance(max(pp.k, 1), piece, EMPTY_PORTALS, 1, st)
        table = peng.solve(inst)
        v, w = pp.extract_answer(table)
        vals.append(v)
        if is_better(plugin.direction, v, best):
            best, wit, winner = v, w, j
    return RunOutcome(best, wit, winner, tuple(vals), eng.stats)
