"""
Query algorithms for read-once formulas.

Each tester implements a consistent interface (``check`` / ``prepare`` / ``run``)
so the harness can drive any of them by name.
"""

from typing import Dict, Type

from rof.testers.base import RecursionTrace, Tester, TesterStats, TrialOutcome
from rof.testers.estimator import (
    EstimatorTester,
    MedianEstimatorTester,
    alg2_estimate,
    alg2_median,
)
from rof.testers.general import GeneralTester, alg1_test
from rof.testers.quasi import QuasiTester, alg3_once, alg3_test

TESTERS: Dict[str, Type[Tester]] = {
    GeneralTester.name: GeneralTester,
    EstimatorTester.name: EstimatorTester,
    MedianEstimatorTester.name: MedianEstimatorTester,
    QuasiTester.name: QuasiTester,
}


def get_tester(name: str, ledger=None) -> Tester:
    try:
        cls = TESTERS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(TESTERS)}") from None
    return cls(ledger)


__all__ = [
    "RecursionTrace",
    "Tester",
    "TesterStats",
    "TrialOutcome",
    "TESTERS",
    "get_tester",
    "GeneralTester",
    "EstimatorTester",
    "MedianEstimatorTester",
    "QuasiTester",
    "alg1_test",
    "alg2_estimate",
    "alg2_median",
    "alg3_once",
    "alg3_test",
]
