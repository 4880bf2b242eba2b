import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rof.errors import NotNormalizedError
from rof.formula.oracle import CountingOracle
from rof.formula.parser import parse_formula
from rof.generators import (
    balanced_and_or,
    random_formula,
    random_k_basic,
    random_kx_basic,
    satisfying_assignment,
)
from rof.models import Assignment, TestParams
from rof.testers import (
    TESTERS,
    RecursionTrace,
    alg1_test,
    alg2_estimate,
    alg2_median,
    alg3_once,
    alg3_test,
    get_tester,
)

EPS = 0.25
SMALL_CAP = 4  # caps of the small_ledger fixture


def zeros(n):
    return Assignment.from_bits([0] * n)


class TestGeneralTester:
    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 16), k=st.integers(2, 3))
    def test_never_rejects_satisfying_input(self, small_ledger, seed, n, k):
        rng = random.Random(seed)
        f = random_kx_basic(rng, n, k)
        a = satisfying_assignment(f, rng)
        oracle = CountingOracle(a)
        assert alg1_test(f, TestParams(EPS, 1 / 3, k), oracle, rng, small_ledger)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 24), k=st.integers(2, 3))
    def test_recursion_depth_within_bound(self, small_ledger, seed, n, k):
        rng = random.Random(seed)
        f = random_kx_basic(rng, n, k)
        trace = RecursionTrace()
        a = Assignment.from_bits([rng.randint(0, 1) for _ in range(n)])
        alg1_test(f, TestParams(EPS, 1 / 3, k), CountingOracle(a), rng, small_ledger, trace)
        assert 1 <= trace.calls
        assert trace.max_depth <= small_ledger.alg1_depth_bound(EPS, k)

    def test_target_zero(self, small_ledger, rng):
        f = parse_formula("(and x0 x1)")
        oracle = CountingOracle(Assignment.from_string("01"))
        assert alg1_test(f, TestParams(EPS, 1 / 3, 2, b=0), oracle, rng, small_ledger)

    @pytest.mark.parametrize("n", [8, 16, 64])
    def test_rejects_far_balanced_input(self, small_ledger, rng, n):
        f = balanced_and_or(n)
        oracle = CountingOracle(zeros(n))
        trace = RecursionTrace()
        assert not alg1_test(f, TestParams(EPS, 1 / 3), oracle, rng, small_ledger, trace)
        # SMALL_CAP Or samples, each testing both And children with SMALL_CAP leaf samples
        assert oracle.query_count == 2 * SMALL_CAP**2
        assert trace.max_depth == 3

    def test_unforceable_gate(self, small_ledger, rng):
        f = parse_formula("(tbl2 0110 x0 x1)")
        params = TestParams(EPS, 1 / 3)
        assert alg1_test(f, params, CountingOracle(Assignment.from_string("10")), rng, small_ledger)
        oracle = CountingOracle(Assignment.from_string("00"))
        assert not alg1_test(f, params, oracle, rng, small_ledger)
        assert oracle.query_count == 4

    def test_requires_kx_basic(self, rng):
        f = parse_formula("(not (and x0 x1))")
        with pytest.raises(NotNormalizedError):
            alg1_test(f, TestParams(EPS, 1 / 3), CountingOracle(zeros(2)), rng)


class TestEstimator:
    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 16), k=st.integers(2, 3))
    def test_zero_on_satisfying_input(self, small_ledger, seed, n, k):
        rng = random.Random(seed)
        f = random_k_basic(rng, n, k)
        a = satisfying_assignment(f, rng)
        result = alg2_estimate(f, EPS, 1 / 3, CountingOracle(a), rng, k, small_ledger)
        assert result.eta == 0

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 16))
    def test_estimate_is_a_fraction_in_unit_interval(self, small_ledger, seed, n):
        rng = random.Random(seed)
        f = random_k_basic(rng, n, 2)
        a = Assignment.from_bits([rng.randint(0, 1) for _ in range(n)])
        eta = alg2_estimate(f, EPS, 1 / 3, CountingOracle(a), rng, 2, small_ledger).eta
        assert isinstance(eta, Fraction)
        assert 0 <= eta <= 1

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 24))
    def test_recursion_depth_within_bound(self, small_ledger, seed, n):
        rng = random.Random(seed)
        f = random_k_basic(rng, n, 2)
        trace = RecursionTrace()
        a = Assignment.from_bits([rng.randint(0, 1) for _ in range(n)])
        result = alg2_estimate(f, EPS, 1 / 3, CountingOracle(a), rng, 2, small_ledger, trace)
        assert result.depth == trace.max_depth
        assert trace.max_depth <= small_ledger.alg2_depth_bound(EPS, 2)

    def test_exact_on_balanced_input(self, small_ledger, rng):
        f = balanced_and_or(16)
        oracle = CountingOracle(zeros(16))
        result = alg2_estimate(f, EPS, 1 / 3, oracle, rng, 2, small_ledger)
        assert result.eta == Fraction(1, 2)
        assert result.queries == oracle.query_count == 2 * SMALL_CAP**2

    def test_median_accumulates_queries(self, small_ledger, rng):
        f = balanced_and_or(16)
        oracle = CountingOracle(zeros(16))
        result = alg2_median(f, EPS, 1 / 3, oracle, rng, 2, small_ledger)
        assert result.eta == Fraction(1, 2)
        assert result.queries == small_ledger.median_runs(1 / 3) * 2 * SMALL_CAP**2

    def test_requires_monotone_input(self, rng):
        f = parse_formula("(and x0 (not x1))")
        with pytest.raises(NotNormalizedError):
            alg2_estimate(f, EPS, 1 / 3, CountingOracle(zeros(2)), rng)


class TestQuasiTester:
    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 16))
    def test_single_run_never_rejects_satisfying_input(self, small_ledger, seed, n):
        rng = random.Random(seed)
        f = random_formula(rng, n, "basic", max_arity=3, negation_rate=0.2)
        a = satisfying_assignment(f, rng)
        assert alg3_once(f, EPS, CountingOracle(a), rng, small_ledger)

    def test_single_run_cost(self, small_ledger, rng):
        f = balanced_and_or(16)
        oracle = CountingOracle(zeros(16))
        assert not alg3_once(f, EPS, oracle, rng, small_ledger)
        assert oracle.query_count == 1 + small_ledger.or_repeats(EPS)

    def test_repeated_runs(self, small_ledger, rng):
        f = balanced_and_or(16)
        oracle = CountingOracle(zeros(16))
        assert not alg3_test(f, EPS, oracle, rng, small_ledger)
        assert oracle.query_count == small_ledger.reps(EPS) * (1 + SMALL_CAP)

    def test_requires_basic_formula(self, rng):
        with pytest.raises(NotNormalizedError):
            alg3_once(parse_formula("(tbl2 0110 x0 x1)"), EPS, CountingOracle(zeros(2)), rng)


class TestRegistry:
    def test_names(self):
        assert sorted(TESTERS) == ["alg1", "alg2", "alg2-median", "alg3"]

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            get_tester("alg9")

    def test_prepare_validates(self):
        with pytest.raises(NotNormalizedError):
            get_tester("alg2").prepare(parse_formula("(or x0 (not x1))"), 2)

    def test_run_tracks_stats(self, small_ledger, rng):
        tester = get_tester("alg1", small_ledger)
        f = tester.prepare(balanced_and_or(8), 2)
        for _ in range(3):
            outcome = tester.run(f, TestParams(EPS, 1 / 3), CountingOracle(zeros(8)), rng)
            assert outcome.verdict_text == "reject"
        assert tester.stats.runs == 3
        assert tester.stats.rejections == 3
        assert tester.stats.queries == 3 * 2 * SMALL_CAP**2
        assert tester.stats.max_depth == 3
        assert set(vars(tester.stats)) == {"runs", "rejections", "queries", "max_depth"}
        tester.reset_stats()
        assert tester.stats.runs == 0
        assert tester.stats.max_depth == 0

    def test_estimator_outcome(self, small_ledger, rng):
        tester = get_tester("alg2-median", small_ledger)
        f = tester.prepare(balanced_and_or(8), 2)
        outcome = tester.run(f, TestParams(EPS, 1 / 3), CountingOracle(zeros(8)), rng)
        assert outcome.verdict is None
        assert outcome.eta == Fraction(1, 2)
