"""
Tree-to-arena construction shared by the parser, the normalizer and the generators.

Arenas are numbered in preorder (root = 0, children left to right), so two
formulas with the same tree compare equal as dataclasses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from rof.errors import ArityError, ReadOnceViolation
from rof.models import BOOLEAN, Alphabet, Formula, Gate, GateKind, Vertex


@dataclass
class Node:
    """Mutable tree node used while a formula is being assembled."""
    gate: Gate
    children: List["Node"] = field(default_factory=list)


def check_gate(gate: Gate, n_children: int, alphabet: Alphabet) -> None:
    """Raise ArityError when a gate and its child count disagree."""
    kind = gate.kind
    if gate.is_leaf:
        if n_children:
            raise ArityError(f"{kind.value} leaf cannot have children")
        if kind is GateKind.CONSTANT and not 0 <= gate.symbol < alphabet.size:
            raise ArityError(f"constant symbol {gate.symbol} outside alphabet")
        if gate.is_literal and gate.var < 0:
            raise ArityError("variable index must be non-negative")
        return
    if n_children != gate.arity:
        raise ArityError(f"{kind.value} gate of arity {gate.arity} has {n_children} children")
    if kind is GateKind.NOT and gate.arity != 1:
        raise ArityError("not takes exactly one argument")
    if kind in (GateKind.AND, GateKind.OR) and gate.arity < 1:
        raise ArityError(f"{kind.value} needs at least one argument")
    if kind in (GateKind.TABLE, GateKind.MULTI):
        expected = alphabet.size ** gate.arity
        if len(gate.table) != expected:
            raise ArityError(
                f"table of arity {gate.arity} over {alphabet.size} symbols needs "
                f"{expected} entries, got {len(gate.table)}"
            )
        if any(not 0 <= s < alphabet.size for s in gate.table):
            raise ArityError("table entry outside alphabet")
    if kind is GateKind.MDNF:
        for t in gate.terms:
            if not t or any(not 0 <= p < gate.arity for p in t):
                raise ArityError(f"mDNF term {sorted(t)} out of range for arity {gate.arity}")
        for s in gate.terms:
            for t in gate.terms:
                if s is not t and s <= t:
                    raise ArityError("mDNF terms must be pairwise incomparable")


def build_formula(
    root: Node,
    alphabet: Alphabet = BOOLEAN,
    n_vars: Optional[int] = None,
) -> Formula:
    """Number ``root`` in preorder and validate arity and the read-once property."""
    order: List[Node] = []
    index: Dict[int, int] = {}
    stack = [root]
    while stack:
        node = stack.pop()
        if id(node) in index:
            raise ReadOnceViolation("a subtree is shared between two parents")
        index[id(node)] = len(order)
        order.append(node)
        stack.extend(reversed(node.children))

    seen: Dict[int, int] = {}
    vertices: List[Vertex] = []
    for vid, node in enumerate(order):
        check_gate(node.gate, len(node.children), alphabet)
        if node.gate.is_literal:
            var = node.gate.var
            if var in seen:
                raise ReadOnceViolation(f"variable x{var} appears more than once")
            seen[var] = vid
        vertices.append(Vertex(node.gate, tuple(index[id(c)] for c in node.children)))

    needed = max(seen) + 1 if seen else 0
    if n_vars is None:
        n_vars = needed
    elif n_vars < needed:
        raise ArityError(f"n_vars={n_vars} but the formula uses x{needed - 1}")
    return Formula(tuple(vertices), 0, n_vars, alphabet)


def to_node(f: Formula, v: Optional[int] = None) -> Node:
    """Copy the subtree at ``v`` (default: the root) into mutable nodes."""
    start = f.root if v is None else v
    nodes: Dict[int, Node] = {}
    stack = [start]
    order = []
    while stack:
        u = stack.pop()
        order.append(u)
        nodes[u] = Node(f.gate(u))
        stack.extend(f.children(u))
    for u in order:
        nodes[u].children = [nodes[c] for c in f.children(u)]
    return nodes[start]


def subformula(f: Formula, v: int) -> Formula:
    """The subformula rooted at v, with the parent's variable indexing."""
    return build_formula(to_node(f, v), f.alphabet, f.n_vars)
