"""Closest-separable-state search, entanglement witnesses and negativities for small multiqubit states."""

from .estimator import EstimatorResult, estimate
from .gilbert import GilbertConfig, GilbertRun, run, seesaw_maximize
from .negativity import aggregate_g3pe, negativity, tripartite_negativity
from .operators import DensityMatrix, NumericalError
from .partitions import Bipartition, Grouping, PartySpec, SeparabilityClass, enumerate_bipartitions
from .states import build_state
from .witness import WitnessReport, build_witness, lambda_max

__all__ = [
    "Bipartition",
    "DensityMatrix",
    "EstimatorResult",
    "GilbertConfig",
    "GilbertRun",
    "Grouping",
    "NumericalError",
    "PartySpec",
    "SeparabilityClass",
    "WitnessReport",
    "aggregate_g3pe",
    "build_state",
    "build_witness",
    "enumerate_bipartitions",
    "estimate",
    "lambda_max",
    "negativity",
    "run",
    "seesaw_maximize",
    "tripartite_negativity",
]
