"""Expander-graph topologies for decentralized optimization."""

__version__ = "0.1.0"

from .constructors import (
    ConstructionError,
    LpsParams,
    RandomRegularParams,
    SamplingExhausted,
    circulant_regular,
    lps_graph,
    named_graph,
    random_regular,
)
from .graph import Graph, GraphError, build_graph, laplacian, read_graph, write_graph
from .mixing import mixing_matrix, validate_mixing
from .optimizers import ProblemSpec, comm_per_round, extra_run, pg_extra_run, total_comm
from .sparsifier import SparsifierParams, bss_sparsify, loewner_sandwich_check
from .spectral import reduced_condition_number, spectral_report

__all__ = [
    "ConstructionError",
    "Graph",
    "GraphError",
    "LpsParams",
    "ProblemSpec",
    "RandomRegularParams",
    "SamplingExhausted",
    "SparsifierParams",
    "bss_sparsify",
    "build_graph",
    "circulant_regular",
    "comm_per_round",
    "extra_run",
    "laplacian",
    "loewner_sandwich_check",
    "lps_graph",
    "mixing_matrix",
    "named_graph",
    "pg_extra_run",
    "random_regular",
    "read_graph",
    "reduced_condition_number",
    "spectral_report",
    "total_comm",
    "validate_mixing",
    "write_graph",
]
