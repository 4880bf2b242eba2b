"""
rof: property testers, a distance estimator and exact distances for read-once formulas.

Includes the multi-valued balancing constructions and the input distributions
used to show that few-query testers cannot tell satisfiable inputs from far ones.
"""

__version__ = "1.0.0"

from rof.distance import exact_cost, farness, nearest_satisfying
from rof.formula.parser import parse_formula, serialize
from rof.models import Assignment, Formula, TestParams
from rof.normalize import normalize, to_k_basic, to_kx_basic
from rof.orchestrator import ExperimentConfig, run_batch

__all__ = [
    "Assignment",
    "Formula",
    "TestParams",
    "parse_formula",
    "serialize",
    "normalize",
    "to_kx_basic",
    "to_k_basic",
    "exact_cost",
    "farness",
    "nearest_satisfying",
    "ExperimentConfig",
    "run_batch",
]
