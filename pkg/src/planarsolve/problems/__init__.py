"""Concrete problem plug-ins and reductions for the request framework."""

from .forest import ForestPlugin, mwif_plugin
from .kss import (
    ScoringPlugin,
    ScoringReduction,
    reduce_cut,
    reduce_dks,
    reduce_mwis,
    reduce_wpvc,
    run_reduction,
)
from .minor import (
    MinorPlugin,
    MinorRequest,
    ModelWitness,
    fulfills_request,
    minor_plugin,
    reduce_steiner_partition,
    reduce_subgraph_isomorphism,
    separation_catalog,
    solve_minor,
)
from .scoring import ScoringParams, kss_score

__all__ = [
    "ForestPlugin",
    "MinorPlugin",
    "MinorRequest",
    "ModelWitness",
    "ScoringParams",
    "ScoringPlugin",
    "ScoringReduction",
    "fulfills_request",
    "kss_score",
    "minor_plugin",
    "mwif_plugin",
    "reduce_cut",
    "reduce_dks",
    "reduce_mwis",
    "reduce_steiner_partition",
    "reduce_subgraph_isomorphism",
    "reduce_wpvc",
    "run_reduction",
    "separation_catalog",
    "solve_minor",
]
