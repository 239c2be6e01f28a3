"""Bernoulli stochastic block models: fitting, ICL selection, simulation, GOF."""

from .adjacency import AdjacencyMatrix, check_adjacency
from .gof import GOF_STATISTICS, GofReport, GofRow, gof, network_statistics, ppp_value
from .model import (
    BernoulliSBM,
    BlockModel,
    FitConfig,
    FitResult,
    ICLSelector,
    canonicalize,
    complete_loglik,
    fit,
    icl,
    icl_penalty,
    select_k,
)
from .simulate import sample_network, simulate

__all__ = [
    "AdjacencyMatrix",
    "check_adjacency",
    "BernoulliSBM",
    "ICLSelector",
    "BlockModel",
    "FitConfig",
    "FitResult",
    "fit",
    "select_k",
    "canonicalize",
    "complete_loglik",
    "icl",
    "icl_penalty",
    "simulate",
    "sample_network",
    "gof",
    "GofReport",
    "GofRow",
    "GOF_STATISTICS",
    "network_statistics",
    "ppp_value",
]
