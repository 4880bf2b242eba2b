"""
Formula evaluation.

Values are symbol indices of the formula alphabet. Negation and And/Or/mDNF gates
read the "0" and "1" symbols, so they also work inside multi-valued formulas as
long as their inputs are Boolean.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

from rof.errors import AlphabetMismatch, ArityError
from rof.models import Alphabet, Assignment, Formula, Gate, GateKind


def postorder(f: Formula, root: Optional[int] = None) -> List[int]:
    """Vertices of the subtree at ``root`` with every child before its parent."""
    start = f.root if root is None else root
    out: List[int] = []
    stack = [start]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(f.children(v))
    out.reverse()
    return out


def table_row(values: Sequence[int], q: int) -> int:
    row = 0
    for i in reversed(range(len(values))):
        row = row * q + values[i]
    return row


def gate_output(gate: Gate, child_values: Sequence[int], alphabet: Alphabet) -> int:
    """Output of a non-leaf gate on child values."""
    kind = gate.kind
    one = alphabet.index("1")
    zero = alphabet.index("0")
    if kind is GateKind.AND:
        return one if all(x == one for x in child_values) else zero
    if kind is GateKind.OR:
        return one if any(x == one for x in child_values) else zero
    if kind is GateKind.NOT:
        return zero if child_values[0] == one else one
    if kind in (GateKind.TABLE, GateKind.MULTI):
        return gate.table[table_row(child_values, alphabet.size)]
    if kind is GateKind.MDNF:
        ones = {i for i, x in enumerate(child_values) if x == one}
        return one if any(t <= ones for t in gate.terms) else zero
    raise ValueError(f"{kind.value} is not an internal gate")


def leaf_value(gate: Gate, values: Sequence[int], alphabet: Alphabet) -> int:
    if gate.kind is GateKind.CONSTANT:
        return gate.symbol
    v = values[gate.var]
    if gate.kind is GateKind.NEGATED:
        one = alphabet.index("1")
        return alphabet.index("0") if v == one else one
    return v


def _check(f: Formula, a: Assignment) -> None:
    if a.alphabet != f.alphabet:
        raise AlphabetMismatch(
            f"assignment over {a.alphabet.name} given to a {f.alphabet.name} formula"
        )
    if len(a) != f.n_vars:
        raise ArityError(f"assignment has {len(a)} values, formula has {f.n_vars} variables")


def evaluate_all(f: Formula, a: Assignment, root: Optional[int] = None) -> List[Optional[int]]:
    """Value of every vertex in the subtree at ``root`` (None elsewhere)."""
    _check(f, a)
    out: List[Optional[int]] = [None] * len(f)
    for v in postorder(f, root):
        gate = f.gate(v)
        if gate.is_leaf:
            out[v] = leaf_value(gate, a.values, f.alphabet)
        else:
            out[v] = gate_output(gate, [out[c] for c in f.children(v)], f.alphabet)  # type: ignore[misc]
    return out


def evaluate(f: Formula, a: Assignment, root: Optional[int] = None) -> int:
    """σ(root): the symbol index the formula outputs on ``a``."""
    start = f.root if root is None else root
    value = evaluate_all(f, a, start)[start]
    assert value is not None
    return value


def evaluate_symbol(f: Formula, a: Assignment) -> str:
    return f.alphabet.symbol(evaluate(f, a))


def naive_evaluate(f: Formula, a: Assignment, v: Optional[int] = None) -> int:
    """Plain recursive evaluation, kept as an independent reference."""
    u = f.root if v is None else v
    gate = f.gate(u)
    if gate.is_leaf:
        return leaf_value(gate, a.values, f.alphabet)
    return gate_output(gate, [naive_evaluate(f, a, c) for c in f.children(u)], f.alphabet)
