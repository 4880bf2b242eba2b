import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rof.errors import ArityError, NonMonotoneError, NotNormalizedError
from rof.formula.evaluate import evaluate
from rof.formula.parser import parse_formula, serialize
from rof.generators import all_assignments, random_formula, random_table
from rof.models import Gate, GateKind
from rof.normalize import (
    ForcefulFinding,
    compute_mdnf,
    find_forceful,
    is_k_basic,
    is_kx_basic,
    is_monotone_table,
    k_basic_violations,
    kx_basic_violations,
    normalize,
    restrict_table,
    to_k_basic,
    to_kx_basic,
)

MAJORITY = Gate.tbl(3, [1 if bin(row).count("1") >= 2 else 0 for row in range(8)])
XOR = Gate.tbl(2, [0, 1, 1, 0])


def _equivalent(f, g):
    return all(evaluate(f, a) == evaluate(g, a) for a in all_assignments(f.n_vars))


class TestTableAnalysis:
    def test_and_is_forceful_on_zero(self):
        assert find_forceful(Gate.and_(2)) == [ForcefulFinding(0, 0, 0), ForcefulFinding(1, 0, 0)]

    def test_xor_and_majority_are_unforceable(self):
        assert find_forceful(XOR) == []
        assert find_forceful(MAJORITY) == []

    def test_monotone_detection(self):
        assert is_monotone_table(MAJORITY)
        assert not is_monotone_table(XOR)

    def test_mdnf_of_majority(self):
        terms = compute_mdnf(MAJORITY).terms
        assert set(terms) == {frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2})}
        assert compute_mdnf(MAJORITY).to_table(3) == MAJORITY.table

    def test_mdnf_of_non_monotone_table(self):
        with pytest.raises(NonMonotoneError):
            compute_mdnf(XOR)

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(0, 2**32), arity=st.integers(2, 5))
    def test_mdnf_reconstructs_monotone_tables(self, seed, arity):
        table = tuple(random_table(random.Random(seed), arity, monotone=True))
        gate = Gate.tbl(arity, table)
        terms = compute_mdnf(gate).terms
        assert Gate.mdnf(arity, terms).mdnf_table() == table
        # every term is a minimal 1-input
        for term in terms:
            row = sum(1 << i for i in term)
            assert table[row] == 1
            assert all(table[row & ~(1 << i)] == 0 for i in term)

    def test_restrict_majority_gives_or(self):
        assert restrict_table(MAJORITY.table, 3, 0, 1) == (0, 1, 1, 1)
        assert restrict_table(MAJORITY.table, 3, 0, 0) == (0, 0, 0, 1)


class TestNormalize:
    @pytest.mark.parametrize(
        "source, expected",
        [
            ("(tbl2 0111 x0 (not x1))", "(or x0 (not x1))"),
            ("(and x0 (and x1 x2))", "(and x0 x1 x2)"),
            ("(not (and x0 (or x1 x2)))", "(or (not x0) (and (not x1) (not x2)))"),
            ("(not (not x0))", "x0"),
            ("(or x0 (and x1 1))", "(or x0 x1)"),
            ("(tbl2 0110 x0 x1)", "(tbl2 0110 x0 x1)"),
        ],
    )
    def test_rewrites(self, source, expected):
        assert serialize(to_kx_basic(parse_formula(source), 2)) == expected

    def test_constant_result(self):
        result = normalize(parse_formula("(and x0 0)"), 2)
        assert result.is_constant
        assert result.constant == 0
        assert result.summary()["verdict"] == "trivially-unsatisfiable"
        with pytest.raises(NotNormalizedError):
            to_kx_basic(parse_formula("(and x0 0)"), 2)

    def test_rewrite_counters(self):
        result = normalize(parse_formula("(and x0 (and x1 x2))"), 2)
        assert result.rewrites["merges"] == 1
        assert result.gates_after == {"and": 1, "var": 3}

    def test_table_above_arity_bound(self):
        with pytest.raises(ArityError):
            normalize(parse_formula("(tbl3 00010111 x0 x1 x2)"), 2)

    def test_k_basic_rejects_negation(self):
        with pytest.raises(NonMonotoneError):
            to_k_basic(parse_formula("(and x0 (not x1))"), 2)

    def test_k_basic_turns_tables_into_mdnf(self):
        g = to_k_basic(parse_formula("(tbl3 00010111 x0 x1 x2)"), 3)
        assert g.gate(g.root).kind is GateKind.MDNF
        assert is_k_basic(g, 3)

    def test_multi_valued_formula_rejected(self):
        with pytest.raises(NotNormalizedError):
            normalize(parse_formula("(mv2 bal4 x0 x1)"), 2)

    def test_violations_listed(self):
        problems = kx_basic_violations(parse_formula("(and (not (or x0 x1)) (and x2 x3))"), 2)
        assert any("not gate" in p for p in problems)
        assert any("and child of and" in p for p in problems)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 8), k=st.integers(2, 3))
    def test_kx_basic_form_is_equivalent(self, seed, n, k):
        f = random_formula(
            random.Random(seed), n, "mixed", max_arity=k, negation_rate=0.3, not_rate=0.2
        )
        g = to_kx_basic(f, k)
        assert is_kx_basic(g, k)
        assert _equivalent(f, g)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 8), k=st.integers(2, 3))
    def test_k_basic_form_is_equivalent(self, seed, n, k):
        f = random_formula(random.Random(seed), n, "monotone", max_arity=k)
        g = to_k_basic(f, k)
        assert is_k_basic(g, k)
        assert _equivalent(f, g)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 12), k=st.integers(2, 4))
    def test_normal_forms_are_fixed_points(self, seed, n, k):
        rng = random.Random(seed)
        f = random_formula(rng, n, "mixed", max_arity=k, negation_rate=0.3, not_rate=0.2)
        g = to_kx_basic(f, k)
        assert serialize(to_kx_basic(g, k)) == serialize(g)
        m = to_k_basic(random_formula(rng, n, "monotone", max_arity=k), k)
        assert serialize(to_k_basic(m, k)) == serialize(m)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 12), k=st.integers(2, 4))
    def test_variables_are_preserved(self, seed, n, k):
        f = random_formula(
            random.Random(seed), n, "mixed", max_arity=k, negation_rate=0.3, not_rate=0.2
        )
        g = to_kx_basic(f, k)
        assert g.n_vars == f.n_vars
        assert g.variables() == f.variables() == frozenset(range(n))

    def test_k_basic_rejects_leftover_tables(self):
        f = parse_formula("(and x0 (tbl3 00010111 x1 x2 x3))")
        assert is_kx_basic(f, 3)
        problems = k_basic_violations(f, 3)
        assert any("table gate" in p for p in problems)
        assert not is_k_basic(f, 3)
        assert is_k_basic(to_k_basic(f, 3), 3)

    def test_every_two_input_table_normalizes(self):
        for bits in product("01", repeat=4):
            f = parse_formula(f"(tbl2 {''.join(bits)} x0 x1)")
            result = normalize(f, 2)
            if result.is_constant:
                assert set(bits) in ({"0"}, {"1"})
                continue
            assert is_kx_basic(result.formula, 2)
            assert _equivalent(f, result.formula)


@pytest.mark.slow
class TestNormalizeAtScale:
    @settings(max_examples=500, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 12), k=st.integers(2, 4))
    def test_kx_basic_form_is_equivalent(self, seed, n, k):
        f = random_formula(
            random.Random(seed), n, "mixed", max_arity=k, negation_rate=0.3, not_rate=0.2
        )
        g = to_kx_basic(f, k)
        assert is_kx_basic(g, k)
        assert _equivalent(f, g)

    @settings(max_examples=500, deadline=None)
    @given(seed=st.integers(0, 2**32), n=st.integers(2, 12), k=st.integers(2, 4))
    def test_k_basic_form_is_equivalent(self, seed, n, k):
        f = random_formula(random.Random(seed), n, "monotone", max_arity=k)
        g = to_k_basic(f, k)
        assert is_k_basic(g, k)
        assert _equivalent(f, g)
