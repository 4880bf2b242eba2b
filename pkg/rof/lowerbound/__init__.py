"""
Lower-bound constructions: balancing gates, their formulas, the yes/no input
distributions and the experiments run on them.
"""

from rof.lowerbound.distributions import (
    DistributionKind,
    LowerBoundSample,
    build_balancing_formula,
    sample_distribution,
)
from rof.lowerbound.experiments import (
    balancing_exhaustive,
    farness_experiment,
    indistinguishability_experiment,
    tv_scaling,
)
from rof.lowerbound.gates import BalancingKind, BalancingVariant, balancing_gate

__all__ = [
    "BalancingKind",
    "BalancingVariant",
    "balancing_gate",
    "DistributionKind",
    "LowerBoundSample",
    "build_balancing_formula",
    "sample_distribution",
    "balancing_exhaustive",
    "farness_experiment",
    "indistinguishability_experiment",
    "tv_scaling",
]
