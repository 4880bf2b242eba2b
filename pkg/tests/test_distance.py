import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rof.config import build_ledger, get_ledger
from rof.distance import (
    brute_force_distance,
    cost_table,
    distance_report,
    exact_cost,
    farness,
    list_critical_vertices,
    nearest_satisfying,
    or_far_observation,
    special_relatives,
    target_set,
    witness_holds,
)
from rof.errors import AlphabetMismatch, InstanceTooLarge, NotNormalizedError
from rof.formula.evaluate import evaluate
from rof.formula.parser import parse_formula
from rof.formula.stats import annotate_stats
from rof.generators import all_assignments, balanced_and_or, random_assignment, random_formula
from rof.lowerbound.distributions import build_balancing_formula
from rof.lowerbound.gates import BalancingKind, BalancingVariant
from rof.models import Assignment, GateKind


def zeros(n):
    return Assignment.from_bits([0] * n)


def _two_level(outer, inner, groups):
    """Text of an ``outer`` gate over ``inner`` gates (single leaves for groups of one)."""
    parts, var = [], 0
    for size in groups:
        names = [f"x{var + i}" for i in range(size)]
        parts.append(names[0] if size == 1 else f"({inner} {' '.join(names)})")
        var += size
    return f"({outer} {' '.join(parts)})"


class TestExactCost:
    def test_and_of_zeros(self):
        f = parse_formula("(and x0 x1 x2)")
        assert exact_cost(f, zeros(3), "1") == 3
        assert exact_cost(f, zeros(3), "0") == 0

    def test_or_of_ands(self):
        f = parse_formula("(or (and x0 x1) (and x2 x3))")
        assert exact_cost(f, Assignment.from_string("0001"), "1") == 1
        assert farness(f, zeros(4)) == Fraction(1, 2)

    def test_negated_leaves(self):
        f = parse_formula("(and (not x0) x1)")
        assert exact_cost(f, Assignment.from_string("10"), "1") == 2

    def test_constant_makes_target_unreachable(self):
        f = parse_formula("(and x0 0)")
        report = distance_report(f, zeros(1), "1")
        assert not report.reachable
        assert report.farness is None
        assert nearest_satisfying(f, zeros(1), "1") is None
        assert brute_force_distance(f, zeros(1), "1") is None

    def test_accept_set_target(self):
        variant = BalancingVariant(BalancingKind.FOUR_VALUED, 2)
        f = build_balancing_formula(variant)
        a = Assignment.from_string("1000", variant.alphabet)
        assert exact_cost(f, a, variant.accept_set) == 1
        assert exact_cost(f, a, ["0", "1", "P"]) == 1
        assert exact_cost(f, a, "F") == 0

    def test_target_set_validation(self):
        f = parse_formula("(and x0 x1)")
        assert target_set(f, "1") == frozenset({1})
        with pytest.raises(AlphabetMismatch):
            target_set(f, "P")
        with pytest.raises(AlphabetMismatch):
            target_set(f, 7)

    def test_cost_table_values_match_evaluation(self):
        f = parse_formula("(or (and x0 x1) (not x2))")
        a = Assignment.from_string("101")
        table = cost_table(f, a)
        assert table.values[f.root] == evaluate(f, a)
        assert table.cost(f.root, table.values[f.root]) == 0

    @settings(max_examples=500, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(1, 14), target=st.sampled_from(["0", "1"]))
    def test_matches_brute_force(self, seed, n, target):
        rng = random.Random(seed)
        f = random_formula(rng, n, "mixed", max_arity=4, negation_rate=0.3, not_rate=0.2)
        a = random_assignment(rng, n)
        cost = exact_cost(f, a, target)
        assert cost == brute_force_distance(f, a, target)
        nearest = nearest_satisfying(f, a, target)
        assert nearest is not None
        assert f.alphabet.symbol(evaluate(f, nearest)) == target
        assert nearest.hamming(a) == cost

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 20))
    def test_costs_follow_gate_kind(self, seed, n):
        rng = random.Random(seed)
        f = random_formula(rng, n, "basic", max_arity=4)
        table = cost_table(f, random_assignment(rng, n))
        one, zero = f.alphabet.index("1"), f.alphabet.index("0")
        for u in f:
            kids = f.children(u)
            if f.gate(u).kind is GateKind.AND:
                assert table.cost(u, one) == sum(table.cost(c, one) for c in kids)
                assert table.cost(u, zero) == min(table.cost(c, zero) for c in kids)
            elif f.gate(u).kind is GateKind.OR:
                assert table.cost(u, one) == min(table.cost(c, one) for c in kids)
                assert table.cost(u, zero) == sum(table.cost(c, zero) for c in kids)

    @pytest.mark.parametrize("kind", list(BalancingKind))
    def test_balancing_formula_matches_brute_force(self, kind):
        variant = BalancingVariant(kind, 3)
        f = build_balancing_formula(variant)
        rng = random.Random(3)
        for _ in range(30):
            a = Assignment.from_bits([rng.randint(0, 1) for _ in range(8)], variant.alphabet)
            assert exact_cost(f, a, variant.accept_set) == brute_force_distance(
                f, a, variant.accept_set
            )

    def test_brute_force_limit(self):
        f = balanced_and_or(24)
        with pytest.raises(InstanceTooLarge):
            brute_force_distance(f, zeros(24), "1")


class TestCriticalVertices:
    @pytest.mark.parametrize("n", [8, 32, 128])
    def test_half_of_the_leaves_are_critical(self, n):
        # all-zero input is 1/2-far; the heavier (first) And under every Or stays on the path
        f = balanced_and_or(n)
        report = list_critical_vertices(f, zeros(n), Fraction(1, 4))
        assert len(report.critical) == n // 2
        assert all(f.is_leaf(v) for v in report.critical)
        assert f.root in report.important

    def test_local_ratio_comes_from_the_ledger(self):
        f = balanced_and_or(8)
        strict = build_ledger({"localdist_ratio": 3})
        assert list_critical_vertices(f, zeros(8), Fraction(1, 4), strict).important == ()
        assert len(list_critical_vertices(f, zeros(8), Fraction(1, 4), get_ledger()).critical) == 4

    @settings(max_examples=100, deadline=None)
    @given(
        seed=st.integers(0, 2**32),
        n=st.integers(2, 40),
        eps=st.sampled_from([0.05, 0.1, 0.25, 0.5, 1.0]),
    )
    def test_important_vertices_stay_shallow(self, small_ledger, seed, n, eps):
        rng = random.Random(seed)
        f = annotate_stats(random_formula(rng, n, "basic", max_arity=2))
        report = list_critical_vertices(f, random_assignment(rng, n), eps, small_ledger)
        depth = f.require_stats.depth
        assert all(depth[v] <= 4 * small_ledger.mdepth(eps) for v in report.important)

    @settings(max_examples=100, deadline=None)
    @given(
        seed=st.integers(0, 2**32),
        gates=st.sampled_from([("and", "or"), ("or", "and")]),
        groups=st.lists(st.integers(1, 4), min_size=2, max_size=8),
    )
    def test_far_inputs_hit_enough_critical_leaves(self, small_ledger, seed, gates, groups):
        outer, inner = gates
        f = parse_formula(_two_level(outer, inner, groups))
        n = f.n_vars
        a = random_assignment(random.Random(seed), n)
        eps = farness(f, a)
        if not eps:
            return
        report = list_critical_vertices(f, a, eps, small_ledger)
        assert len(report.critical) >= small_ledger.hitprob(float(eps)) * n

    def test_satisfying_input_has_no_critical_vertices(self):
        f = balanced_and_or(8)
        a = Assignment.from_string("11001100")
        assert list_critical_vertices(f, a, 0.25).critical == ()

    def test_requires_basic_formula(self):
        with pytest.raises(NotNormalizedError):
            list_critical_vertices(parse_formula("(tbl2 0110 x0 x1)"), zeros(2), 0.25)

    def test_special_relatives(self):
        f = parse_formula("(and (or x0 x1) (or (and x2 x3) x4))")
        x2 = next(v for v in f.variable_leaves() if f.gate(v).var == 2)
        x4 = next(v for v in f.variable_leaves() if f.gate(v).var == 4)
        assert special_relatives(f, x2) == [x4]

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 14))
    def test_witness_holds_everywhere(self, seed, n):
        rng = random.Random(seed)
        f = random_formula(rng, n, "basic", max_arity=3, negation_rate=0.3)
        a = random_assignment(rng, n)
        assert all(witness_holds(f, a, v) for v in f)

    def test_or_far_observation(self):
        f = balanced_and_or(4)
        assert or_far_observation(f, zeros(4), f.root, 0.25)
        with pytest.raises(NotNormalizedError):
            or_far_observation(f, zeros(4), f.children(f.root)[0], 0.25)

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(0, 2**32),
        n=st.integers(2, 14),
        eps=st.sampled_from([Fraction(1, 10), Fraction(1, 4), Fraction(1, 3)]),
    )
    def test_or_far_observation_always_holds(self, seed, n, eps):
        rng = random.Random(seed)
        f = random_formula(rng, n, "basic", max_arity=3, negation_rate=0.3)
        a = random_assignment(rng, n)
        for u in f:
            if f.gate(u).kind is GateKind.OR:
                assert or_far_observation(f, a, u, eps)


def test_all_assignments_cover_the_cube():
    seen = {a.to_string() for a in all_assignments(4)}
    assert len(seen) == 16
