"""Hybrid maximum-independent-set solver: exact kernelization interleaved with
sampler-informed vertex selection."""
from .graph import Graph, GraphError, UnionJackSpec, generate_union_jack, is_independent
from .kernel import classical_reduce, reconstruct
from .sampling import SampleSet, sample
from .selection import SelectionParams, select
from .driver import SolveReport, qredumis_frugal_solve, qredumis_solve, run_repetitions

__all__ = ["Graph", "GraphError", "UnionJackSpec", "generate_union_jack", "is_independent",
           "classical_reduce", "reconstruct", "SampleSet", "sample", "SelectionParams", "select",
           "SolveReport", "qredumis_solve", "qredumis_frugal_solve", "run_repetitions"]

__version__ = "0.1.0"
