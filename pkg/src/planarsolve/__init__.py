"""Planar-graph optimization toolkit.

Divide and conquer on planar graphs: balanced cycle separators split an
instance into interior/exterior halves, a tree-decomposition dynamic program
handles shallow instances, and partial solutions meet at portal vertices
through pebble-set lookup tables.  Ships concrete problem plug-ins
(subgraph scoring, induced forests, rooted minors) plus naive brute-force
oracles used to cross-check every answer.
"""

from .framework import (
    CombineContext,
    Instance,
    LookupTable,
    PebbleSet,
    PortalSet,
    ProblemPlugin,
    RunOutcome,
    SolveConfig,
    Stats,
    check_invariants,
    enumerate_pebble_sets,
    pebble_cap,
    solve,
    solve_problem,
)
from .graphs import EmbeddedGraph, build_graph, induced_subgraph, parse_graph
from .oracles import (
    OracleCapError,
    OracleResult,
    brute_force_models,
    brute_force_requests,
    brute_force_separations,
    brute_force_solve,
    brute_force_steiner,
    brute_force_subiso,
    oracle_score,
)
from .patterns import PatternGraph, make_pattern, parse_pattern, pattern_is_planar
from .problems import (
    ForestPlugin,
    MinorPlugin,
    MinorRequest,
    ModelWitness,
    ScoringParams,
    ScoringPlugin,
    ScoringReduction,
    fulfills_request,
    kss_score,
    minor_plugin,
    mwif_plugin,
    reduce_cut,
    reduce_dks,
    reduce_mwis,
    reduce_steiner_partition,
    reduce_subgraph_isomorphism,
    reduce_wpvc,
    run_reduction,
    solve_minor,
)
from .separators import fundamental_cycle_separator
from .treewidth import (
    TreeDecomposition,
    balance_binary,
    outerplanar_tree_decomposition,
    validate_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "CombineContext",
    "EmbeddedGraph",
    "ForestPlugin",
    "Instance",
    "LookupTable",
    "MinorPlugin",
    "MinorRequest",
    "ModelWitness",
    "OracleCapError",
    "OracleResult",
    "PatternGraph",
    "PebbleSet",
    "PortalSet",
    "ProblemPlugin",
    "RunOutcome",
    "ScoringParams",
    "ScoringPlugin",
    "ScoringReduction",
    "SolveConfig",
    "Stats",
    "TreeDecomposition",
    "balance_binary",
    "brute_force_models",
    "brute_force_requests",
    "brute_force_separations",
    "brute_force_solve",
    "brute_force_steiner",
    "brute_force_subiso",
    "build_graph",
    "check_invariants",
    "enumerate_pebble_sets",
    "fulfills_request",
    "fundamental_cycle_separator",
    "induced_subgraph",
    "kss_score",
    "make_pattern",
    "minor_plugin",
    "mwif_plugin",
    "oracle_score",
    "outerplanar_tree_decomposition",
    "parse_graph",
    "parse_pattern",
    "pattern_is_planar",
    "reduce_cut",
    "reduce_dks",
    "reduce_mwis",
    "reduce_steiner_partition",
    "reduce_subgraph_isomorphism",
    "reduce_wpvc",
    "run_reduction",
    "solve",
    "solve_minor",
    "solve_problem",
    "validate_decomposition",
]
