"""
Distance estimator for k-basic formulas (monotone gates, no negations).

The estimate is an exact rational: And gates average their child samples,
Or and mDNF gates take the cheapest term over the heavy children's estimates,
with light children counted as free.
"""

from __future__ import annotations

import logging
import random
import statistics
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence

from rof.config import ParameterLedger, get_ledger
from rof.errors import NotNormalizedError
from rof.formula.oracle import CountingOracle
from rof.formula.stats import annotate_stats, classify_children, weighted_child_sample
from rof.models import EstimateResult, Formula, Gate, GateKind, TestParams
from rof.normalize import compute_mdnf, k_basic_violations
from rof.testers.base import RecursionTrace, Tester, TrialOutcome

logger = logging.getLogger(__name__)

MEDIAN_RUN_DELTA = 1 / 3


def _terms(gate: Gate) -> Sequence[FrozenSet[int]]:
    if gate.kind is GateKind.OR:
        return [frozenset([i]) for i in range(gate.arity)]
    if gate.kind is GateKind.MDNF:
        return gate.terms
    return compute_mdnf(gate).terms


class _EstimateRun:
    def __init__(
        self,
        f: Formula,
        k: int,
        oracle: CountingOracle,
        rng: random.Random,
        ledger: ParameterLedger,
        trace: RecursionTrace,
    ):
        self.f = f
        self.size = f.require_stats.size
        self.k = k
        self.oracle = oracle
        self.rng = rng
        self.ledger = ledger
        self.trace = trace

    def estimate(self, r: int, eps: float, delta: float, depth: int) -> Fraction:
        self.trace.enter(depth)
        gate = self.f.gate(r)
        if gate.is_literal:
            return Fraction(1 - self.oracle.literal(gate))
        if eps > 1:
            return Fraction(0)

        kids = self.f.children(r)
        total = self.size[r]

        if gate.kind is GateKind.OR and any(self.size[c] < eps * total for c in kids):
            return Fraction(0)

        if gate.kind is GateKind.AND:
            samples = self.ledger.estimate_samples(eps, delta, self.k)
            sub_eps = self.ledger.slightlysmall(eps, self.k)
            sub_delta = self.ledger.estimate_and_delta(eps, delta, self.k)
            acc = Fraction(0)
            for _ in range(samples):
                w = weighted_child_sample(self.f, r, self.rng)
                acc += self.estimate(w, sub_eps, sub_delta, depth + 1)
            return acc / samples

        _, heavy, light = classify_children(self.f, r, eps, self.k)
        sub_eps = self.ledger.recurseps(eps, self.k)
        sub_delta = self.ledger.estimate_heavy_delta(eps, delta, self.k)
        alpha: Dict[int, Fraction] = {c: Fraction(0) for c in light}
        for c in heavy:
            alpha[c] = self.estimate(c, sub_eps, sub_delta, depth + 1)
        best = min(
            sum((alpha[kids[i]] * self.size[kids[i]] for i in term), Fraction(0))
            for term in _terms(gate)
        )
        return best / total


def _require_k_basic(f: Formula, k: int) -> None:
    problems = k_basic_violations(f, k)
    if problems:
        raise NotNormalizedError(f"formula is not {k}-basic: {'; '.join(problems[:3])}")


def alg2_estimate(
    f: Formula,
    eps: float,
    delta: float,
    oracle: CountingOracle,
    rng: random.Random,
    k: int = 2,
    ledger: Optional[ParameterLedger] = None,
    trace: Optional[RecursionTrace] = None,
) -> EstimateResult:
    """
    Estimate the farness of the oracle's assignment from satisfying ``f``.

    The estimate lies in [0, 1] and is 0 on satisfying assignments.
    """
    _require_k_basic(f, k)
    f = annotate_stats(f)
    trace = trace or RecursionTrace()
    run = _EstimateRun(f, k, oracle, rng, ledger or get_ledger(), trace)
    eta = run.estimate(f.root, eps, delta, 0)
    return EstimateResult(eta=eta, queries=oracle.query_count, depth=trace.max_depth)


def median_of(estimates: List[Fraction]) -> Fraction:
    return statistics.median_low(estimates)


def alg2_median(
    f: Formula,
    eps: float,
    delta: float,
    oracle: CountingOracle,
    rng: random.Random,
    k: int = 2,
    ledger: Optional[ParameterLedger] = None,
    trace: Optional[RecursionTrace] = None,
) -> EstimateResult:
    """Median of repeated constant-confidence estimates; queries accumulate."""
    _require_k_basic(f, k)
    f = annotate_stats(f)
    ledger = ledger or get_ledger()
    trace = trace or RecursionTrace()
    run = _EstimateRun(f, k, oracle, rng, ledger, trace)
    runs = ledger.median_runs(delta)
    estimates = [run.estimate(f.root, eps, MEDIAN_RUN_DELTA, 0) for _ in range(runs)]
    return EstimateResult(eta=median_of(estimates), queries=oracle.query_count, depth=trace.max_depth)


class EstimatorTester(Tester):
    """Single-run distance estimator."""

    name = "alg2"
    estimates = True

    def check(self, f: Formula, k: int) -> None:
        _require_k_basic(f, k)

    def _estimate(self, run: _EstimateRun, f: Formula, params: TestParams) -> Fraction:
        return run.estimate(f.root, params.eps, params.delta, 0)

    def _run(self, f, params, oracle, rng, trace) -> TrialOutcome:
        run = _EstimateRun(f, params.k, oracle, rng, self.ledger, trace)
        eta = self._estimate(run, f, params)
        logger.debug("%s eta=%s queries=%d", self.name, eta, oracle.query_count)
        return TrialOutcome(
            queries=oracle.query_count,
            depth=trace.max_depth,
            calls=trace.calls,
            eta=eta,
        )


class MedianEstimatorTester(EstimatorTester):
    """Median-amplified estimator."""

    name = "alg2-median"

    def _estimate(self, run: _EstimateRun, f: Formula, params: TestParams) -> Fraction:
        runs = self.ledger.median_runs(params.delta)
        return median_of([run.estimate(f.root, params.eps, MEDIAN_RUN_DELTA, 0) for _ in range(runs)])
