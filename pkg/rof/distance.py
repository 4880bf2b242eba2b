"""
Exact distance from an assignment to the set of assignments meeting a target.

Provides:
- cost_table / exact_cost / farness: bottom-up dynamic programming over the tree
- nearest_satisfying: traceback giving a closest assignment that meets the target
- brute_force_distance: independent oracle by full enumeration (numpy)
- list_critical_vertices, special_relatives, witness_holds, or_far_observation:
  structure of far assignments on And/Or formulas
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from rof.config import ParameterLedger, get_ledger
from rof.errors import AlphabetMismatch, InstanceTooLarge, NotNormalizedError
from rof.formula.evaluate import evaluate_all, gate_output, leaf_value, postorder
from rof.formula.stats import annotate_stats
from rof.models import Assignment, Formula, GateKind

logger = logging.getLogger(__name__)

Target = Union[int, str, Iterable[Union[int, str]]]

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class CostTable:
    """
    ``costs[v][s]``: fewest variable changes making the subformula at v output symbol s.

    Unreachable entries hold ``unreachable``, which exceeds every subtree size.
    """
    costs: Tuple[Tuple[int, ...], ...]
    values: Tuple[int, ...]
    unreachable: int

    def cost(self, v: int, symbol: int) -> Optional[int]:
        c = self.costs[v][symbol]
        return None if c >= self.unreachable else c


@dataclass(frozen=True)
class DistanceReport:
    cost: Optional[int]
    size: int

    @property
    def reachable(self) -> bool:
        return self.cost is not None

    @property
    def farness(self) -> Optional[Fraction]:
        if self.cost is None:
            return None
        return Fraction(self.cost, self.size) if self.size else Fraction(0)


def target_set(f: Formula, target: Target) -> FrozenSet[int]:
    """Normalize a symbol, symbol name or collection of them to index form."""
    if isinstance(target, (int, str)):
        items: Sequence[Union[int, str]] = [target]
    else:
        items = list(target)
    out = set()
    for t in items:
        if isinstance(t, str):
            out.add(f.alphabet.index(t))
        elif 0 <= t < f.alphabet.size:
            out.add(t)
        else:
            raise AlphabetMismatch(f"target symbol {t} not in alphabet {f.alphabet.name}")
    if not out:
        raise AlphabetMismatch("empty target set")
    return frozenset(out)


# ----------------------------- Dynamic programming -----------------------------

def cost_table(f: Formula, a: Assignment) -> CostTable:
    alphabet = f.alphabet
    q = alphabet.size
    one, zero = alphabet.index("1"), alphabet.index("0")
    inputs = alphabet.input_indices
    inf = f.size + 1
    values = evaluate_all(f, a)
    costs: List[Tuple[int, ...]] = [()] * len(f)

    for v in postorder(f):
        gate = f.gate(v)
        kind = gate.kind
        row = [inf] * q
        kids = f.children(v)
        if kind is GateKind.CONSTANT:
            row[gate.symbol] = 0
        elif gate.is_literal:
            current = a.values[gate.var]
            for s in inputs:
                out = leaf_value(gate, {gate.var: s}, alphabet)  # type: ignore[arg-type]
                row[out] = min(row[out], 0 if s == current else 1)
        elif kind in (GateKind.AND, GateKind.OR):
            full, any_ = (one, zero) if kind is GateKind.AND else (zero, one)
            row[full] = min(inf, sum(costs[c][full] for c in kids))
            row[any_] = min(costs[c][any_] for c in kids)
        elif kind is GateKind.NOT:
            row[zero], row[one] = costs[kids[0]][one], costs[kids[0]][zero]
        else:
            options = [[s for s in range(q) if costs[c][s] < inf] for c in kids]
            for combo in product(*options):
                out = gate_output(gate, combo, alphabet)
                total = min(inf, sum(costs[c][s] for c, s in zip(kids, combo)))
                if total < row[out]:
                    row[out] = total
        costs[v] = tuple(row)

    return CostTable(tuple(costs), tuple(values), inf)  # type: ignore[arg-type]


def exact_cost(f: Formula, a: Assignment, target: Target) -> Optional[int]:
    """Minimum changes to meet ``target`` (a symbol or accept set); None if unreachable."""
    targets = target_set(f, target)
    table = cost_table(f, a)
    best = min(table.costs[f.root][t] for t in targets)
    return None if best >= table.unreachable else best


def distance_report(f: Formula, a: Assignment, target: Target) -> DistanceReport:
    return DistanceReport(exact_cost(f, a, target), f.size)


def farness(f: Formula, a: Assignment, target: Target = "1") -> Optional[Fraction]:
    return distance_report(f, a, target).farness


def nearest_satisfying(f: Formula, a: Assignment, target: Target = "1") -> Optional[Assignment]:
    """A closest assignment meeting ``target``, or None when no assignment does."""
    targets = target_set(f, target)
    table = cost_table(f, a)
    costs, inf = table.costs, table.unreachable
    alphabet = f.alphabet
    one, zero = alphabet.index("1"), alphabet.index("0")
    root_target = min(sorted(targets), key=lambda t: costs[f.root][t])
    if costs[f.root][root_target] >= inf:
        return None

    values = list(a.values)
    stack = [(f.root, root_target)]
    while stack:
        v, want = stack.pop()
        if table.values[v] == want:
            continue
        gate = f.gate(v)
        kids = f.children(v)
        kind = gate.kind
        if gate.is_literal:
            for s in alphabet.input_indices:
                if leaf_value(gate, {gate.var: s}, alphabet) == want:  # type: ignore[arg-type]
                    values[gate.var] = s
                    break
        elif kind in (GateKind.AND, GateKind.OR):
            full = one if kind is GateKind.AND else zero
            if want == full:
                stack.extend((c, full) for c in kids)
            else:
                c = min(kids, key=lambda c: (costs[c][want], c))
                stack.append((c, want))
        elif kind is GateKind.NOT:
            stack.append((kids[0], zero if want == one else one))
        elif kind is not GateKind.CONSTANT:
            options = [[s for s in range(alphabet.size) if costs[c][s] < inf] for c in kids]
            best = None
            for combo in product(*options):
                if gate_output(gate, combo, alphabet) != want:
                    continue
                total = sum(costs[c][s] for c, s in zip(kids, combo))
                if best is None or total < best[0]:
                    best = (total, combo)
            assert best is not None
            stack.extend(zip(kids, best[1]))
    return Assignment(tuple(values), a.alphabet)


# ----------------------------- Brute force -----------------------------

def brute_force_distance(
    f: Formula,
    a: Assignment,
    target: Target,
    limit: int = BRUTE_FORCE_LIMIT,
) -> Optional[int]:
    """Minimum Hamming distance by enumerating every {0,1} assignment."""
    n = f.n_vars
    if n > limit:
        raise InstanceTooLarge(f"{n} variables exceeds the enumeration bound {limit}")
    targets = target_set(f, target)
    alphabet = f.alphabet
    one, zero = alphabet.index("1"), alphabet.index("0")

    codes = np.arange(1 << n, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int8)
    symbols = np.where(bits == 1, one, zero).astype(np.int8)

    vals = {}
    for v in postorder(f):
        gate = f.gate(v)
        kind = gate.kind
        kids = f.children(v)
        if kind is GateKind.VARIABLE:
            out = symbols[:, gate.var]
        elif kind is GateKind.NEGATED:
            out = np.where(symbols[:, gate.var] == one, zero, one).astype(np.int8)
        elif kind is GateKind.CONSTANT:
            out = np.full(len(codes), gate.symbol, dtype=np.int8)
        elif kind is GateKind.NOT:
            out = np.where(vals[kids[0]] == one, zero, one).astype(np.int8)
        elif kind in (GateKind.AND, GateKind.OR):
            hits = [vals[c] == one for c in kids]
            mask = np.logical_and.reduce(hits) if kind is GateKind.AND else np.logical_or.reduce(hits)
            out = np.where(mask, one, zero).astype(np.int8)
        elif kind is GateKind.MDNF:
            mask = np.zeros(len(codes), dtype=bool)
            for term in gate.terms:
                mask |= np.logical_and.reduce([vals[kids[p]] == one for p in sorted(term)])
            out = np.where(mask, one, zero).astype(np.int8)
        else:
            row = np.zeros(len(codes), dtype=np.int64)
            for i in reversed(range(len(kids))):
                row = row * alphabet.size + vals[kids[i]].astype(np.int64)
            out = np.asarray(gate.table, dtype=np.int8)[row]
        for c in kids:
            del vals[c]
        vals[v] = out

    accepted = np.isin(vals[f.root], sorted(targets))
    if not accepted.any():
        return None
    ref = np.asarray(a.bits(), dtype=np.int8)
    dist = (bits != ref).sum(axis=1)
    return int(dist[accepted].min())


# ----------------------------- Critical vertices -----------------------------

@dataclass(frozen=True)
class CriticalReport:
    critical: Tuple[int, ...]
    important: Tuple[int, ...]
    eps: Fraction


def _require_basic(f: Formula) -> None:
    if not f.alphabet.is_boolean or not f.is_basic():
        raise NotNormalizedError("operation requires a Boolean And/Or formula")


def path_to_root(f: Formula, v: int) -> List[int]:
    """v, parent(v), ..., root."""
    parent = annotate_stats(f).require_stats.parent
    path = [v]
    while parent[path[-1]] != -1:
        path.append(parent[path[-1]])
    return path


def special_relatives(f: Formula, v: int) -> List[int]:
    """Children of the Or-ancestors of v that are not on the root-to-v path."""
    f = annotate_stats(f)
    path = path_to_root(f, v)
    on_path = set(path)
    out = []
    for u in path[1:]:
        if f.gate(u).kind is GateKind.OR:
            out.extend(c for c in f.children(u) if c not in on_path)
    return sorted(out)


def witness_holds(f: Formula, a: Assignment, v: int) -> bool:
    """
    If leaf v and all its special relatives evaluate to 0, the root evaluates to 0.

    Returns True when the implication holds (including when its premise fails).
    """
    _require_basic(f)
    values = evaluate_all(f, a)
    one = f.alphabet.index("1")
    if values[v] == one or any(values[u] == one for u in special_relatives(f, v)):
        return True
    return values[f.root] != one


def list_critical_vertices(
    f: Formula,
    a: Assignment,
    eps: Union[float, Fraction],
    ledger: Optional[ParameterLedger] = None,
) -> CriticalReport:
    """
    Important vertices: every u on the root path is far enough for its depth and
    every Or-ancestor keeps its heaviest child on the path. Critical = important leaves.

    "Far enough" at depth d means relative distance at least
    ``L * (1 + L) ** (d // 3)`` with ``L = ledger.localdist(eps)``.
    """
    _require_basic(f)
    f = annotate_stats(f)
    stats = f.require_stats
    eps_q = Fraction(eps).limit_denominator(10**9)
    table = cost_table(f, a)
    one = f.alphabet.index("1")
    if table.values[f.root] == one:
        return CriticalReport((), (), eps_q)

    local = (ledger or get_ledger()).localdist_fraction * eps_q

    def far_enough(u: int) -> bool:
        c = table.costs[u][one]
        return Fraction(c, stats.size[u]) >= local * (1 + local) ** (stats.depth[u] // 3)

    good = [False] * len(f)
    stack = [f.root]
    while stack:
        u = stack.pop()
        p = stats.parent[u]
        ok = far_enough(u)
        if p != -1:
            ok = ok and good[p]
            if f.gate(p).kind is GateKind.OR:
                ok = ok and stats.heaviest_child[p] == u
        good[u] = ok
        if ok:
            stack.extend(f.children(u))

    important = tuple(v for v in range(len(f)) if good[v])
    critical = tuple(v for v in important if f.is_leaf(v))
    return CriticalReport(critical, important, eps_q)


def or_far_observation(f: Formula, a: Assignment, u: int, eps: Union[float, Fraction]) -> bool:
    """
    For an Or vertex whose subformula is eps-far from 1: every child has weight
    >= eps and every non-heaviest child is 2*eps-far on its own.
    """
    f = annotate_stats(f)
    stats = f.require_stats
    if f.gate(u).kind is not GateKind.OR:
        raise NotNormalizedError(f"vertex {u} is not an Or gate")
    eps_q = Fraction(eps).limit_denominator(10**9)
    table = cost_table(f, a)
    one = f.alphabet.index("1")
    if Fraction(table.costs[u][one], stats.size[u]) < eps_q:
        return True
    for c in f.children(u):
        if Fraction(stats.size[c], stats.size[u]) < eps_q:
            return False
        if c != stats.heaviest_child[u]:
            if Fraction(table.costs[c][one], stats.size[c]) < 2 * eps_q:
                return False
    return True
