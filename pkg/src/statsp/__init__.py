"""Discrete state transition algorithm for the traveling salesman problem."""

from statsp.core import DistanceMatrix, RunResult, format_tour, parse_tour, random_tour, tour_length, validate_tour
from statsp.operators import OperatorParams
from statsp.sta import StaConfig, sta_solve
from statsp.tsplib import Metric, TspInstance, build_distance_matrix, load_bundled, load_instance, parse_instance

__version__ = "0.1.0"

__all__ = [
    "DistanceMatrix",
    "Metric",
    "OperatorParams",
    "RunResult",
    "StaConfig",
    "TspInstance",
    "build_distance_matrix",
    "format_tour",
    "load_bundled",
    "load_instance",
    "parse_instance",
    "parse_tour",
    "random_tour",
    "sta_solve",
    "tour_length",
    "validate_tour",
]
