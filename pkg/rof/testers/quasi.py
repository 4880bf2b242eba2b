"""
Quasi-polynomial tester for basic formulas (And/Or gates over literals).

One run samples a uniform leaf s and looks at the Or gates on the path from s
up to r. The children of those gates that hang off the path are tested
recursively at a slightly larger distance parameter, each ORCONST times.
The run accepts when s is satisfied or some off-path child passes all its
repetitions.
"""

from __future__ import annotations

import logging
import random
from typing import List, Optional

from rof.config import ParameterLedger, get_ledger
from rof.errors import NotNormalizedError
from rof.formula.oracle import CountingOracle
from rof.formula.stats import annotate_stats, uniform_leaf
from rof.models import Formula, GateKind, TestParams
from rof.testers.base import RecursionTrace, Tester, TrialOutcome

logger = logging.getLogger(__name__)


class _QuasiRun:
    def __init__(
        self,
        f: Formula,
        oracle: CountingOracle,
        rng: random.Random,
        ledger: ParameterLedger,
        trace: RecursionTrace,
    ):
        self.f = f
        self.parent = f.require_stats.parent
        self.oracle = oracle
        self.rng = rng
        self.ledger = ledger
        self.trace = trace

    def off_path_relatives(self, r: int, s: int) -> List[int]:
        """Children of the Or ancestors of s (up to r) that are not on the path."""
        relatives: List[int] = []
        below, u = s, self.parent[s]
        while below != r:
            if self.f.gate(u).kind is GateKind.OR:
                relatives.extend(c for c in self.f.children(u) if c != below)
            below, u = u, self.parent[u]
        return relatives

    def once(self, r: int, eps: float, depth: int) -> bool:
        self.trace.enter(depth)
        if eps > 1:
            return True
        gate = self.f.gate(r)
        if gate.is_literal:
            return self.oracle.literal(gate) == 1

        s = uniform_leaf(self.f, r, self.rng)
        relatives = self.off_path_relatives(r, s)
        if len(relatives) > self.ledger.relatives_bound(eps):
            return True

        repeats = self.ledger.or_repeats(eps)
        sub_eps = self.ledger.twicelocaldist(eps)
        passed_any = False
        for u in relatives:
            passed = True
            for _ in range(repeats):
                passed = self.once(u, sub_eps, depth + 1) and passed
            passed_any = passed_any or passed
        return self.oracle.literal(self.f.gate(s)) == 1 or passed_any


def _require_basic(f: Formula) -> None:
    if not f.alphabet.is_boolean or not f.is_basic():
        raise NotNormalizedError("formula is not basic (And/Or gates over literals)")


def alg3_once(
    f: Formula,
    eps: float,
    oracle: CountingOracle,
    rng: random.Random,
    ledger: Optional[ParameterLedger] = None,
    trace: Optional[RecursionTrace] = None,
) -> bool:
    """One run: never rejects a satisfying assignment."""
    _require_basic(f)
    f = annotate_stats(f)
    run = _QuasiRun(f, oracle, rng, ledger or get_ledger(), trace or RecursionTrace())
    return run.once(f.root, eps, 0)


def alg3_test(
    f: Formula,
    eps: float,
    oracle: CountingOracle,
    rng: random.Random,
    ledger: Optional[ParameterLedger] = None,
    trace: Optional[RecursionTrace] = None,
) -> bool:
    """REPS(eps) independent runs; rejects iff any run rejects."""
    _require_basic(f)
    f = annotate_stats(f)
    ledger = ledger or get_ledger()
    run = _QuasiRun(f, oracle, rng, ledger, trace or RecursionTrace())
    return _repeat(run, f.root, eps, ledger.reps(eps))


def _repeat(run: _QuasiRun, root: int, eps: float, reps: int) -> bool:
    verdict = True
    for _ in range(reps):
        verdict = run.once(root, eps, 0) and verdict
    return verdict


class QuasiTester(Tester):
    """Accept/reject tester for basic formulas."""

    name = "alg3"

    def check(self, f: Formula, k: int) -> None:
        _require_basic(f)

    def _run(self, f, params, oracle, rng, trace) -> TrialOutcome:
        run = _QuasiRun(f, oracle, rng, self.ledger, trace)
        verdict = _repeat(run, f.root, params.eps, self.ledger.reps(params.eps))
        logger.debug(
            "alg3 verdict=%s queries=%d depth=%d", verdict, oracle.query_count, trace.max_depth
        )
        return TrialOutcome(
            queries=oracle.query_count,
            depth=trace.max_depth,
            calls=trace.calls,
            verdict=verdict,
        )
