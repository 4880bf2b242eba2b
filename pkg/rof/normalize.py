"""
Normalization of Boolean read-once formulas.

Rewrite strategy (bottom-up, children before parents):
1. Negations are pushed to the leaves (De Morgan; a negated table gets its
   output column complemented)
2. Constants are folded into their parent (And/Or identities, table restriction)
3. And under And and Or under Or are merged, keeping left-to-right order
4. A table gate with a forceful child is split into an And/Or of that child
   (possibly negated) and the residual table; lowest position first, a=0 first

The result is k-x-basic. For monotone gate sets, to_k_basic additionally turns
every remaining table into an mDNF gate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from rof.errors import AlphabetMismatch, ArityError, NonMonotoneError, NotNormalizedError
from rof.formula.builder import Node, build_formula, to_node
from rof.models import Formula, Gate, GateKind

logger = logging.getLogger(__name__)

_ASSOC = (GateKind.AND, GateKind.OR)


# ----------------------------- Table analysis -----------------------------

@dataclass(frozen=True)
class ForcefulFinding:
    """Setting child ``child_position`` to ``a`` forces the output ``b``."""
    child_position: int
    a: int
    b: int


@dataclass(frozen=True)
class MDNF:
    terms: Tuple[FrozenSet[int], ...]

    def evaluate(self, bits: Sequence[int]) -> int:
        ones = {i for i, x in enumerate(bits) if x}
        return 1 if any(t <= ones for t in self.terms) else 0

    def to_table(self, arity: int) -> Tuple[int, ...]:
        return tuple(
            self.evaluate([(row >> i) & 1 for i in range(arity)]) for row in range(2 ** arity)
        )


def boolean_table(gate: Gate) -> Tuple[int, ...]:
    """Truth table of a Boolean gate, row = sum(x_i * 2**i)."""
    n = gate.arity
    if gate.kind is GateKind.TABLE:
        if len(gate.table) != 2 ** n or any(x not in (0, 1) for x in gate.table):
            raise AlphabetMismatch("table gate is not Boolean")
        return gate.table
    if gate.kind is GateKind.MDNF:
        return gate.mdnf_table()
    if gate.kind is GateKind.AND:
        return tuple(1 if row == 2 ** n - 1 else 0 for row in range(2 ** n))
    if gate.kind is GateKind.OR:
        return tuple(0 if row == 0 else 1 for row in range(2 ** n))
    if gate.kind is GateKind.NOT:
        return (1, 0)
    raise AlphabetMismatch(f"{gate.kind.value} gate has no Boolean table")


def find_forceful(gate: Gate) -> List[ForcefulFinding]:
    """Every (position, a, b) forceful triple, by exhaustive scan."""
    table = boolean_table(gate)
    found = []
    for pos in range(gate.arity):
        for a in (0, 1):
            outs = {table[row] for row in range(len(table)) if (row >> pos) & 1 == a}
            if len(outs) == 1:
                found.append(ForcefulFinding(pos, a, outs.pop()))
    return found


def is_monotone_table(gate: Gate) -> bool:
    table = boolean_table(gate)
    for row, out in enumerate(table):
        if out:
            for i in range(gate.arity):
                if not table[row | (1 << i)]:
                    return False
    return True


def compute_mdnf(gate: Gate) -> MDNF:
    """The unique mDNF: supports of the minimal 1-inputs."""
    if not is_monotone_table(gate):
        raise NonMonotoneError("gate is not monotone; it has no mDNF")
    table = boolean_table(gate)
    terms = []
    for row, out in enumerate(table):
        if not out:
            continue
        bits = [i for i in range(gate.arity) if (row >> i) & 1]
        if all(not table[row & ~(1 << i)] for i in bits):
            terms.append(frozenset(bits))
    terms.sort(key=lambda t: (len(t), sorted(t)))
    return MDNF(tuple(terms))


def restrict_table(table: Sequence[int], arity: int, pos: int, value: int) -> Tuple[int, ...]:
    """Table of arity-1 inputs with input ``pos`` fixed to ``value``."""
    low_mask = (1 << pos) - 1
    out = []
    for row in range(2 ** (arity - 1)):
        full = (row & low_mask) | (value << pos) | ((row >> pos) << (pos + 1))
        out.append(table[full])
    return tuple(out)


# ----------------------------- Normalizer -----------------------------

@dataclass
class NormalizeResult:
    """Outcome of a normalization pass."""
    formula: Optional[Formula]
    constant: Optional[int] = None
    rewrites: Dict[str, int] = field(default_factory=dict)
    gates_before: Dict[str, int] = field(default_factory=dict)
    gates_after: Dict[str, int] = field(default_factory=dict)

    @property
    def is_constant(self) -> bool:
        return self.formula is None

    def summary(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "gates_before": self.gates_before,
            "gates_after": self.gates_after,
            "rewrites": dict(sorted(self.rewrites.items())),
        }
        if self.is_constant:
            out["constant"] = self.constant
            out["verdict"] = "trivially-satisfiable" if self.constant == 1 else "trivially-unsatisfiable"
        return out


def _const(b: int) -> Node:
    return Node(Gate.constant(b))


def _const_value(node: Node) -> Optional[int]:
    return node.gate.symbol if node.gate.kind is GateKind.CONSTANT else None


class Normalizer:
    """
    Rewrites one formula to k-x-basic form and counts what it did.
    """

    def __init__(self, k: int):
        if k < 2:
            raise ArityError(f"arity bound k must be at least 2, got {k}")
        self.k = k
        self.rewrites: Dict[str, int] = {
            "merges": 0,
            "de_morgan": 0,
            "constant_folds": 0,
            "forceful_splits": 0,
            "projections": 0,
            "mdnf_conversions": 0,
        }

    def _count(self, key: str, n: int = 1) -> None:
        self.rewrites[key] += n

    # --- construction helpers ---

    def make_assoc(self, kind: GateKind, children: List[Node]) -> Node:
        """And/Or over ``children`` with same-kind merging and constant folding."""
        absorbing = 0 if kind is GateKind.AND else 1
        flat: List[Node] = []
        for c in children:
            value = _const_value(c)
            if value is not None:
                self._count("constant_folds")
                if value == absorbing:
                    return _const(absorbing)
                continue
            if c.gate.kind is kind:
                self._count("merges")
                flat.extend(c.children)
            else:
                flat.append(c)
        if not flat:
            return _const(1 - absorbing)
        if len(flat) == 1:
            return flat[0]
        return Node(Gate(kind, arity=len(flat)), flat)

    def negate(self, node: Node) -> Node:
        gate = node.gate
        kind = gate.kind
        if kind is GateKind.VARIABLE:
            return Node(Gate.negated(gate.var))
        if kind is GateKind.NEGATED:
            return Node(Gate.variable(gate.var))
        if kind is GateKind.CONSTANT:
            return _const(1 - gate.symbol)
        if kind in _ASSOC:
            self._count("de_morgan")
            dual = GateKind.OR if kind is GateKind.AND else GateKind.AND
            return self.make_assoc(dual, [self.negate(c) for c in node.children])
        if kind is GateKind.TABLE:
            return Node(Gate.tbl(gate.arity, [1 - x for x in gate.table]), node.children)
        if kind is GateKind.NOT:
            return node.children[0]
        raise NotNormalizedError(f"cannot negate a {kind.value} gate")

    # --- rewriting ---

    def normalize_node(self, node: Node) -> Node:
        gate = node.gate
        kind = gate.kind
        if gate.is_literal:
            return Node(gate)
        if kind is GateKind.CONSTANT:
            if gate.symbol not in (0, 1):
                raise NotNormalizedError("non-Boolean constant")
            return Node(gate)
        if kind is GateKind.MULTI:
            raise NotNormalizedError("multi-valued gates are not normalized")
        if kind is GateKind.NOT:
            return self.negate(self.normalize_node(node.children[0]))
        children = [self.normalize_node(c) for c in node.children]
        if kind in _ASSOC:
            return self.make_assoc(kind, children)
        if gate.arity > self.k:
            raise ArityError(f"{kind.value} gate of arity {gate.arity} exceeds k={self.k}")
        return self.split_table(boolean_table(gate), children)

    def split_table(self, table: Sequence[int], children: List[Node]) -> Node:
        table = tuple(table)
        children = list(children)
        for pos in reversed(range(len(children))):
            value = _const_value(children[pos])
            if value is not None:
                self._count("constant_folds")
                table = restrict_table(table, len(children), pos, value)
                del children[pos]
        m = len(children)
        if m == 0:
            return _const(table[0])

        gate = Gate.tbl(m, table)
        found = find_forceful(gate)
        if not found:
            return Node(gate, children)

        hit = found[0]
        self._count("forceful_splits")
        child = children[hit.child_position]
        lit = child if hit.a == hit.b else self.negate(child)
        rest = children[: hit.child_position] + children[hit.child_position + 1 :]
        residual = self.split_table(restrict_table(table, m, hit.child_position, 1 - hit.a), rest)
        if _const_value(residual) is not None:
            self._count("projections")
        kind = GateKind.OR if hit.b == 1 else GateKind.AND
        return self.make_assoc(kind, [lit, residual])

    def to_mdnf_gates(self, node: Node) -> Node:
        node.children = [self.to_mdnf_gates(c) for c in node.children]
        if node.gate.kind is GateKind.TABLE:
            self._count("mdnf_conversions")
            node.gate = Gate.mdnf(node.gate.arity, compute_mdnf(node.gate).terms)
        return node


def _check_boolean(f: Formula) -> None:
    if not f.alphabet.is_boolean:
        raise NotNormalizedError("only Boolean formulas can be normalized")


def normalize(f: Formula, k: int, basic: bool = False) -> NormalizeResult:
    """Normalize ``f`` to k-x-basic (or k-basic) form, with rewrite counters."""
    _check_boolean(f)
    if basic:
        for v in f:
            gate = f.gate(v)
            if gate.kind in (GateKind.NEGATED, GateKind.NOT):
                raise NonMonotoneError(f"vertex {v} is a negation")
            if gate.kind is GateKind.TABLE and not is_monotone_table(gate):
                raise NonMonotoneError(f"vertex {v} has a non-monotone table")
    engine = Normalizer(k)
    node = engine.normalize_node(to_node(f))
    result = NormalizeResult(formula=None, rewrites=engine.rewrites, gates_before=f.gate_counts())
    value = _const_value(node)
    if value is not None:
        result.constant = value
        logger.info("formula normalizes to the constant %d", value)
        return result
    if basic:
        node = engine.to_mdnf_gates(node)
    out = build_formula(node, f.alphabet, f.n_vars)
    result.formula = out
    result.gates_after = out.gate_counts()
    logger.debug("normalized %d -> %d vertices: %s", len(f), len(out), engine.rewrites)
    return result


def _unwrap(result: NormalizeResult) -> Formula:
    if result.formula is None:
        raise NotNormalizedError(
            f"formula is constant {result.constant}: {result.summary()['verdict']}"
        )
    return result.formula


def to_kx_basic(f: Formula, k: int) -> Formula:
    return _unwrap(normalize(f, k))


def to_k_basic(f: Formula, k: int) -> Formula:
    return _unwrap(normalize(f, k, basic=True))


# ----------------------------- Predicates -----------------------------

def kx_basic_violations(f: Formula, k: int) -> List[str]:
    """Reasons ``f`` is not k-x-basic; empty when it is."""
    if not f.alphabet.is_boolean:
        return ["alphabet is not Boolean"]
    problems = []
    for v in f:
        gate = f.gate(v)
        kind = gate.kind
        if kind is GateKind.CONSTANT:
            problems.append(f"vertex {v}: constant leaf")
        elif kind in (GateKind.NOT, GateKind.MULTI):
            problems.append(f"vertex {v}: {kind.value} gate")
        elif kind in _ASSOC:
            if gate.arity < 2:
                problems.append(f"vertex {v}: {kind.value} of arity {gate.arity}")
            if any(f.gate(c).kind is kind for c in f.children(v)):
                problems.append(f"vertex {v}: {kind.value} child of {kind.value}")
        elif kind in (GateKind.TABLE, GateKind.MDNF):
            if not 2 <= gate.arity <= k:
                problems.append(f"vertex {v}: arity {gate.arity} outside [2, {k}]")
            if find_forceful(gate):
                problems.append(f"vertex {v}: forceful child")
    return problems


def k_basic_violations(f: Formula, k: int) -> List[str]:
    problems = kx_basic_violations(f, k)
    for v in f:
        gate = f.gate(v)
        if gate.kind is GateKind.NEGATED:
            problems.append(f"vertex {v}: negated leaf")
        elif gate.kind is GateKind.TABLE:
            problems.append(f"vertex {v}: table gate, expected mdnf")
    return problems


def is_kx_basic(f: Formula, k: int) -> bool:
    return not kx_basic_violations(f, k)


def is_k_basic(f: Formula, k: int) -> bool:
    return not k_basic_violations(f, k)
