"""
Tester for k-x-basic formulas with arbitrary gates of bounded arity.

The recursion decides whether the subformula at r, under the target value b,
is satisfied or eps-far from being satisfied. Gates are handled by how they
relate to b:
- And with b=1 / Or with b=0: size-weighted child samples, all must pass
- And with b=0 / Or with b=1: any child passing is enough
- unforceable tables: both targets per child, then a search over the table
"""

from __future__ import annotations

import logging
import random
from typing import List, Optional, Tuple

from rof.config import ParameterLedger, get_ledger
from rof.errors import NotNormalizedError
from rof.formula.oracle import CountingOracle
from rof.formula.stats import annotate_stats, weighted_child_sample
from rof.models import Formula, GateKind, TestParams
from rof.normalize import boolean_table, kx_basic_violations
from rof.testers.base import RecursionTrace, Tester, TrialOutcome

logger = logging.getLogger(__name__)


class _GeneralRun:
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

    def test(self, r: int, eps: float, delta: float, b: int, depth: int) -> bool:
        self.trace.enter(depth)
        if eps > 1:
            return True
        gate = self.f.gate(r)
        if gate.is_literal:
            return self.oracle.literal(gate) == b

        kids = self.f.children(r)
        total = self.size[r]
        kind = gate.kind

        if (kind is GateKind.AND and b == 1) or (kind is GateKind.OR and b == 0):
            samples = self.ledger.and_samples(eps, delta, self.k)
            sub_eps = self.ledger.slightlysmall(eps, self.k)
            passed = True
            for _ in range(samples):
                w = weighted_child_sample(self.f, r, self.rng)
                passed = self.test(w, sub_eps, delta / 2, b, depth + 1) and passed
            return passed

        if kind in (GateKind.AND, GateKind.OR):
            if any(self.size[c] < eps * total for c in kids):
                return True
            sub_eps = self.ledger.slightlybig(eps)
            found = False
            for c in kids:
                found = self.test(c, sub_eps, eps * delta / 2, b, depth + 1) or found
            return found

        # unforceable gate
        if any(self.size[c] >= (1 - eps) * total for c in kids):
            return True
        sub_eps = self.ledger.recurseps(eps, self.k)
        sub_delta = delta / (2 * gate.arity)
        flags: List[Tuple[bool, bool]] = []
        for c in kids:
            y0 = self.test(c, sub_eps, sub_delta, 0, depth + 1)
            y1 = self.test(c, sub_eps, sub_delta, 1, depth + 1)
            flags.append((y0, y1))
        table = boolean_table(gate)
        for row, out in enumerate(table):
            if out == b and all(flags[i][(row >> i) & 1] for i in range(gate.arity)):
                return True
        return False


def _require_kx_basic(f: Formula, k: int) -> None:
    problems = kx_basic_violations(f, k)
    if problems:
        raise NotNormalizedError(f"formula is not {k}-x-basic: {'; '.join(problems[:3])}")


def alg1_test(
    f: Formula,
    params: TestParams,
    oracle: CountingOracle,
    rng: random.Random,
    ledger: Optional[ParameterLedger] = None,
    trace: Optional[RecursionTrace] = None,
) -> bool:
    """
    Test whether ``f`` evaluates to ``params.b`` on the oracle's assignment.

    Returns True (accept) or False (reject). Satisfying assignments are always
    accepted; eps-far ones are rejected with probability at least 1-delta when
    the sample counts are uncapped.
    """
    _require_kx_basic(f, params.k)
    f = annotate_stats(f)
    run = _GeneralRun(f, params.k, oracle, rng, ledger or get_ledger(), trace or RecursionTrace())
    return run.test(f.root, params.eps, params.delta, params.b, 0)


class GeneralTester(Tester):
    """Accept/reject tester for k-x-basic formulas."""

    name = "alg1"

    def check(self, f: Formula, k: int) -> None:
        _require_kx_basic(f, k)

    def _run(self, f, params, oracle, rng, trace) -> TrialOutcome:
        run = _GeneralRun(f, params.k, oracle, rng, self.ledger, trace)
        verdict = run.test(f.root, params.eps, params.delta, params.b, 0)
        logger.debug(
            "alg1 verdict=%s queries=%d depth=%d", verdict, oracle.query_count, trace.max_depth
        )
        return TrialOutcome(
            queries=oracle.query_count,
            depth=trace.max_depth,
            calls=trace.calls,
            verdict=verdict,
        )
