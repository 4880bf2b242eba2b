import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from rof.errors import AlphabetMismatch, ArityError, FormulaSyntaxError, ReadOnceViolation
from rof.formula import (
    CountingOracle,
    annotate_stats,
    evaluate,
    evaluate_symbol,
    heavy_light_split,
    make_counting_oracle,
    naive_evaluate,
    parse_formula,
    serialize,
    uniform_leaf,
    weighted_child_sample,
)
from rof.generators import balanced_and_or, random_assignment, random_formula
from rof.models import FOUR_VALUED, Assignment, GateKind


class TestParser:
    @pytest.mark.parametrize(
        "text",
        [
            "(and x0 (not x1) (or x2 x3))",
            "(tbl2 0110 x0 x1)",
            "(dnf3 2|0,1 x0 x1 x2)",
            "(mv2 bal4 (mv2 bal4 x0 x1) (mv2 bal4 x2 x3))",
        ],
    )
    def test_serialize_reproduces_source(self, text):
        assert serialize(parse_formula(text)) == text

    @settings(max_examples=100, deadline=None)
    @given(
        seed=st.integers(0, 2**32),
        n=st.integers(1, 16),
        kind=st.sampled_from(["basic", "monotone", "mixed"]),
    )
    def test_random_formulas_survive_serialization(self, seed, n, kind):
        rng = random.Random(seed)
        f = random_formula(rng, n, kind, max_arity=4, negation_rate=0.3, not_rate=0.2)
        text = serialize(f)
        g = parse_formula(text)
        assert serialize(g) == text
        assert len(g) == len(f)
        assert g.n_vars == f.n_vars
        a = random_assignment(rng, n)
        assert evaluate(g, a) == evaluate(f, a)

    def test_not_on_variable_becomes_negated_leaf(self):
        f = parse_formula("(not x3)")
        assert f.gate(f.root).kind is GateKind.NEGATED
        assert f.n_vars == 4

    def test_not_on_gate_is_kept(self):
        f = parse_formula("(not (and x0 x1))")
        assert f.gate(f.root).kind is GateKind.NOT

    def test_comments_and_whitespace(self):
        f = parse_formula("; majority-ish\n(or\n  x0 ; first\n  x1)\n")
        assert serialize(f) == "(or x0 x1)"

    def test_preorder_numbering(self):
        f = parse_formula("(and (or x0 x1) x2)")
        assert f.root == 0
        assert f.children(0) == (1, 4)
        assert f.children(1) == (2, 3)

    def test_multi_valued_alphabet_detected(self):
        f = parse_formula("(mv2 bal4 x0 x1)")
        assert f.alphabet == FOUR_VALUED
        assert evaluate_symbol(f, Assignment.from_string("01", FOUR_VALUED)) == "P"

    @pytest.mark.parametrize(
        "text, error",
        [
            ("", FormulaSyntaxError),
            ("(and x0", FormulaSyntaxError),
            ("(and x0 x1))", FormulaSyntaxError),
            ("(xor x0 x1)", FormulaSyntaxError),
            ("(and)", FormulaSyntaxError),
            ("(not x0 x1)", FormulaSyntaxError),
            ("(and x0 x0)", ReadOnceViolation),
            ("(tbl2 011 x0 x1)", ArityError),
            ("(tbl2 0110 x0)", ArityError),
            ("(mv2 bal9 x0 x1)", FormulaSyntaxError),
            ("(dnf2 0|0,1 x0 x1)", ArityError),
        ],
    )
    def test_rejects_bad_input(self, text, error):
        with pytest.raises(error):
            parse_formula(text)

    def test_syntax_error_reports_offset(self):
        with pytest.raises(FormulaSyntaxError) as info:
            parse_formula("(and x0 y1)")
        assert info.value.position == 8

    def test_n_vars_must_cover_variables(self):
        with pytest.raises(ArityError):
            parse_formula("(and x0 x5)", n_vars=3)


class TestEvaluate:
    def test_table_row_order(self):
        # row = x0 + 2*x1: 0100 is x0 and not x1
        f = parse_formula("(tbl2 0100 x0 x1)")
        assert evaluate_symbol(f, Assignment.from_string("10")) == "1"
        assert evaluate_symbol(f, Assignment.from_string("01")) == "0"

    def test_mdnf_gate(self):
        f = parse_formula("(dnf3 0,1|2 x0 x1 x2)")
        assert evaluate_symbol(f, Assignment.from_string("110")) == "1"
        assert evaluate_symbol(f, Assignment.from_string("001")) == "1"
        assert evaluate_symbol(f, Assignment.from_string("100")) == "0"

    def test_assignment_length_checked(self):
        f = parse_formula("(and x0 x1)")
        with pytest.raises(ArityError):
            evaluate(f, Assignment.from_string("1"))

    def test_assignment_alphabet_checked(self):
        f = parse_formula("(and x0 x1)")
        with pytest.raises(AlphabetMismatch):
            evaluate(f, Assignment.from_string("01", FOUR_VALUED))

    def test_assignment_rejects_non_input_symbol(self):
        with pytest.raises(AlphabetMismatch):
            Assignment.from_string("0P", FOUR_VALUED)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(1, 12))
    def test_iterative_matches_recursive(self, seed, n):
        rng = random.Random(seed)
        f = random_formula(rng, n, "mixed", max_arity=3, negation_rate=0.3, not_rate=0.2)
        a = random_assignment(rng, n)
        assert evaluate(f, a) == naive_evaluate(f, a)


class TestStats:
    def test_balanced_and_or_stats(self):
        f = annotate_stats(balanced_and_or(8))
        stats = f.require_stats
        assert stats.size[f.root] == 8
        assert stats.formula_depth == 3
        assert len(stats.leaf_order) == 8
        assert stats.leaf_hi[f.root] - stats.leaf_lo[f.root] == 8

    def test_heaviest_child_ties_go_to_smaller_id(self):
        f = annotate_stats(parse_formula("(or (and x0 x1) (and x2 x3))"))
        assert f.require_stats.heaviest_child[f.root] == f.children(f.root)[0]

    def test_unannotated_formula_has_no_stats(self):
        with pytest.raises(ValueError):
            parse_formula("(and x0 x1)").require_stats

    def test_heavy_light_split(self):
        assert heavy_light_split([(1, 1), (1, 2)], 2, 0.25, 2) == (3, [1, 2], [])
        assert heavy_light_split([(5000, 1), (1, 2)], 5001, 0.25, 2) == (2, [1], [2])
        ell, heavy, light = heavy_light_split([(3, 5), (3, 2)], 6, 0.25, 2)
        assert heavy == [2, 5]

    def test_heavy_light_split_with_fewer_children_than_k(self):
        # nothing falls below the threshold, so every child is heavy
        assert heavy_light_split([(10, 4)], 10, 0.25, 3) == (2, [4], [])
        assert heavy_light_split([(6, 1), (5, 2)], 11, 0.5, 4) == (3, [1, 2], [])

    def test_weighted_child_sample_is_size_proportional(self):
        f = annotate_stats(parse_formula("(and x0 (or x1 x2 x3))"))
        rng = random.Random(7)
        light = f.children(f.root)[0]
        draws = 4000
        hits = sum(1 for _ in range(draws) if weighted_child_sample(f, f.root, rng) == light)
        assert stats.binomtest(hits, draws, 0.25).pvalue > 1e-4

    def test_uniform_leaf_frequencies(self):
        f = annotate_stats(balanced_and_or(8))
        rng = random.Random(3)
        counts = {v: 0 for v in f.variable_leaves()}
        for _ in range(8000):
            counts[uniform_leaf(f, f.root, rng)] += 1
        assert stats.chisquare(list(counts.values())).pvalue > 1e-4


class TestOracle:
    def test_counts_every_query(self):
        oracle = CountingOracle(Assignment.from_string("0110"))
        assert [oracle.query(i) for i in (1, 1, 3)] == [1, 1, 0]
        assert oracle.query_count == 3
        oracle.reset()
        assert oracle.query_count == 0

    def test_literal_applies_negation(self):
        f = parse_formula("(and x0 (not x1))")
        oracle = CountingOracle(Assignment.from_string("11"))
        leaves = [f.gate(v) for v in f.variable_leaves()]
        assert [oracle.literal(g) for g in leaves] == [1, 0]

    def test_factory_starts_at_zero(self):
        oracle = make_counting_oracle(Assignment.from_string("10"))
        assert oracle.query_count == 0
        assert oracle.query(0) == 1

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            CountingOracle(Assignment.from_string("01")).query(2)
