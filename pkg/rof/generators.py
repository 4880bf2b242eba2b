"""
Instance generation for tests, batches and scaling runs.

Provides:
- trial_seed: per-trial seeds derived from a master seed
- random_formula: random read-once trees (basic, monotone or mixed gates)
- FAMILIES: named formula families keyed by size
- satisfying_assignment / far_assignment: inputs with verified distance
"""

from __future__ import annotations

import hashlib
import logging
import random
from itertools import product
from typing import Callable, Dict, Iterator, List

from rof.distance import farness, nearest_satisfying
from rof.errors import ArityError, ConfigError, GenerationError
from rof.formula.builder import Node, build_formula
from rof.models import BOOLEAN, Assignment, Formula, Gate
from rof.normalize import to_k_basic, to_kx_basic

logger = logging.getLogger(__name__)

FORMULA_KINDS = ("basic", "monotone", "mixed")


def trial_seed(master: int, index: int) -> int:
    """First 8 bytes (big-endian) of sha256("{master}:{index}")."""
    digest = hashlib.sha256(f"{master}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# ----------------------------- Gate tables -----------------------------

def _depends_on_all(table: List[int], arity: int) -> bool:
    for i in range(arity):
        if all(table[row] == table[row ^ (1 << i)] for row in range(2 ** arity)):
            return False
    return True


def random_table(rng: random.Random, arity: int, monotone: bool = False) -> List[int]:
    """A Boolean table that depends on every input (monotone when asked)."""
    while True:
        if monotone:
            seeds = [row for row in range(2 ** arity) if rng.random() < 0.3]
            table = [1 if any(row & s == s for s in seeds) else 0 for row in range(2 ** arity)]
        else:
            table = [rng.randint(0, 1) for _ in range(2 ** arity)]
        if _depends_on_all(table, arity):
            return table


def _choose_gate(rng: random.Random, arity: int, kind: str, max_table_arity: int) -> Gate:
    choices = ["and", "or"]
    if kind != "basic" and arity <= max_table_arity:
        choices.append("tbl")
    pick = rng.choice(choices)
    if pick == "and":
        return Gate.and_(arity)
    if pick == "or":
        return Gate.or_(arity)
    return Gate.tbl(arity, random_table(rng, arity, monotone=(kind == "monotone")))


# ----------------------------- Random formulas -----------------------------

def random_formula(
    rng: random.Random,
    n_vars: int,
    kind: str = "basic",
    max_arity: int = 4,
    negation_rate: float = 0.0,
    not_rate: float = 0.0,
) -> Formula:
    """
    Random read-once formula over x_0..x_{n-1}.

    Every internal node splits its leaves into 2..max_arity non-empty parts;
    variables are placed in a random order.
    """
    if kind not in FORMULA_KINDS:
        raise ConfigError(f"unknown formula kind {kind!r}; choose from {FORMULA_KINDS}")
    if n_vars < 1:
        raise ArityError("a formula needs at least one variable")
    if max_arity < 2:
        raise ArityError("max_arity must be at least 2")

    placeholder = Gate.variable(0)
    root = Node(placeholder)
    leaves: List[Node] = []
    stack = [(root, n_vars)]
    while stack:
        node, count = stack.pop()
        if count == 1:
            leaves.append(node)
            continue
        arity = rng.randint(2, min(max_arity, count))
        cuts = sorted(rng.sample(range(1, count), arity - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [count])]
        node.gate = _choose_gate(rng, arity, kind, max_arity)
        node.children = [Node(placeholder) for _ in parts]
        stack.extend(zip(node.children, parts))
        if kind == "mixed" and rng.random() < not_rate:
            inner = Node(node.gate, node.children)
            node.gate, node.children = Gate.not_(), [inner]

    order = list(range(n_vars))
    rng.shuffle(order)
    for node, var in zip(leaves, order):
        negate = kind != "monotone" and rng.random() < negation_rate
        node.gate = Gate.negated(var) if negate else Gate.variable(var)
    return build_formula(root, BOOLEAN, n_vars)


def random_kx_basic(rng: random.Random, n_vars: int, k: int = 2) -> Formula:
    """A random mixed formula normalized to k-x-basic form."""
    f = random_formula(rng, n_vars, "mixed", max_arity=k, negation_rate=0.25, not_rate=0.1)
    return to_kx_basic(f, k)


def random_k_basic(rng: random.Random, n_vars: int, k: int = 2) -> Formula:
    """A random monotone formula normalized to k-basic form."""
    return to_k_basic(random_formula(rng, n_vars, "monotone", max_arity=k), k)


# ----------------------------- Families -----------------------------

def _leaf(i: int) -> Node:
    return Node(Gate.variable(i))


def balanced_and_or(n: int) -> Formula:
    """And of n/4 Or gates, each over two binary And gates; leaves at depth 3."""
    if n < 4 or n % 4:
        raise ArityError(f"balanced-and-or needs a positive multiple of 4 variables, got {n}")
    ors = []
    for j in range(n // 4):
        base = 4 * j
        left = Node(Gate.and_(2), [_leaf(base), _leaf(base + 1)])
        right = Node(Gate.and_(2), [_leaf(base + 2), _leaf(base + 3)])
        ors.append(Node(Gate.or_(2), [left, right]))
    root = ors[0] if len(ors) == 1 else Node(Gate.and_(len(ors)), ors)
    return build_formula(root, BOOLEAN, n)


def or_of_ands(n: int) -> Formula:
    """Or of two And gates over n/2 variables each."""
    if n < 4 or n % 2:
        raise ArityError(f"or-of-ands needs an even number of at least 4 variables, got {n}")
    half = n // 2
    left = Node(Gate.and_(half), [_leaf(i) for i in range(half)])
    right = Node(Gate.and_(half), [_leaf(i) for i in range(half, n)])
    return build_formula(Node(Gate.or_(2), [left, right]), BOOLEAN, n)


FamilyBuilder = Callable[[random.Random, int, int], Formula]

FAMILIES: Dict[str, FamilyBuilder] = {
    "balanced-and-or": lambda rng, n, k: balanced_and_or(n),
    "or-of-ands": lambda rng, n, k: or_of_ands(n),
    "random-basic": lambda rng, n, k: random_formula(rng, n, "basic", max_arity=max(k, 2)),
    "random-kx-basic": random_kx_basic,
    "random-k-basic": random_k_basic,
}


def make_family(name: str, rng: random.Random, n: int, k: int = 2) -> Formula:
    try:
        builder = FAMILIES[name]
    except KeyError:
        raise ConfigError(f"unknown generator {name!r}; choose from {sorted(FAMILIES)}") from None
    return builder(rng, n, k)


# ----------------------------- Assignments -----------------------------

def random_assignment(rng: random.Random, n: int) -> Assignment:
    return Assignment.from_bits([rng.randint(0, 1) for _ in range(n)])


def satisfying_assignment(f: Formula, rng: random.Random, target: str = "1") -> Assignment:
    """A closest assignment meeting ``target`` to a random starting point."""
    a = nearest_satisfying(f, random_assignment(rng, f.n_vars), target)
    if a is None:
        raise GenerationError(f"formula never outputs {target}")
    return a


def far_assignment(
    f: Formula,
    eps: float,
    rng: random.Random,
    target: str = "1",
    retries: int = 200,
    shortcuts: bool = True,
) -> Assignment:
    """
    An assignment at distance >= eps from meeting ``target``, verified exactly.

    With ``shortcuts`` the constant assignments and a closest assignment for
    the opposite target are tried first. These are extreme points, so batches
    built this way concentrate on a few inputs per formula; pass
    ``shortcuts=False`` to draw only from random flips of a satisfying
    assignment with growing flip rate.
    """
    n = f.n_vars
    candidates: List[Assignment] = []
    if shortcuts:
        candidates += [Assignment.from_bits([0] * n), Assignment.from_bits([1] * n)]
        opposite = "0" if target == "1" else "1"
        flipped = nearest_satisfying(f, random_assignment(rng, n), opposite)
        if flipped is not None:
            candidates.append(flipped)
    for a in candidates:
        dist = farness(f, a, target)
        if dist is None or dist >= eps:
            return a

    base = satisfying_assignment(f, rng, target)
    for attempt in range(1, retries + 1):
        rate = attempt / retries
        bits = [b ^ (1 if rng.random() < rate else 0) for b in base.bits()]
        a = Assignment.from_bits(bits)
        dist = farness(f, a, target)
        if dist is None or dist >= eps:
            logger.debug("far assignment after %d attempts (farness %s)", attempt, dist)
            return a
    raise GenerationError(f"no {eps}-far assignment found in {retries} attempts")


def all_assignments(n: int) -> Iterator[Assignment]:
    """Every Boolean assignment of length n, in counting order."""
    for bits in product((0, 1), repeat=n):
        yield Assignment.from_bits(bits[::-1])
