"""
Base tester interface for the property testers and the distance estimator.
"""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from rof.config import ParameterLedger, get_ledger
from rof.formula.oracle import CountingOracle
from rof.formula.stats import annotate_stats
from rof.models import Formula, TestParams


@dataclass
class RecursionTrace:
    """Call count and deepest recursion level of one run (root call = depth 0)."""
    calls: int = 0
    max_depth: int = 0

    def enter(self, depth: int) -> None:
        self.calls += 1
        if depth > self.max_depth:
            self.max_depth = depth


@dataclass
class TesterStats:
    """Statistics accumulated over the runs of one tester instance."""
    runs: int = 0
    rejections: int = 0
    queries: int = 0
    max_depth: int = 0


@dataclass(frozen=True)
class TrialOutcome:
    """Result of one run: a verdict for testers, an estimate for estimators."""
    queries: int
    depth: int
    calls: int
    verdict: Optional[bool] = None
    eta: Optional[Fraction] = None

    @property
    def verdict_text(self) -> Optional[str]:
        if self.verdict is None:
            return None
        return "accept" if self.verdict else "reject"


class Tester(ABC):
    """
    Base class for the query algorithms.

    Each tester is responsible for:
    - Checking that the formula is in the form it needs (``prepare``)
    - Running once against a counting oracle (``run``)
    - Keeping per-instance statistics
    """

    name: str = "base"
    estimates: bool = False

    def __init__(self, ledger: Optional[ParameterLedger] = None):
        self.ledger = ledger or get_ledger()
        self.stats = TesterStats()

    @abstractmethod
    def check(self, f: Formula, k: int) -> None:
        """Raise NotNormalizedError when ``f`` is not a valid input."""
        raise NotImplementedError

    @abstractmethod
    def _run(
        self,
        f: Formula,
        params: TestParams,
        oracle: CountingOracle,
        rng: random.Random,
        trace: RecursionTrace,
    ) -> TrialOutcome:
        raise NotImplementedError

    def prepare(self, f: Formula, k: int) -> Formula:
        """Validate once and attach subtree statistics."""
        self.check(f, k)
        return annotate_stats(f)

    def run(
        self,
        f: Formula,
        params: TestParams,
        oracle: CountingOracle,
        rng: random.Random,
    ) -> TrialOutcome:
        """Run once on a prepared formula."""
        trace = RecursionTrace()
        outcome = self._run(f, params, oracle, rng, trace)
        self.stats.runs += 1
        self.stats.queries += outcome.queries
        self.stats.max_depth = max(self.stats.max_depth, outcome.depth)
        if outcome.verdict is False:
            self.stats.rejections += 1
        return outcome

    def reset_stats(self) -> None:
        """Reset tester statistics."""
        self.stats = TesterStats()
