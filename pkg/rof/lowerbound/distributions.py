"""
Balancing formulas and the two input distributions that fool few-query testers.

Provides:
- build_balancing_formula: full binary tree of a balancing gate over 2^h leaves
- DistributionKind / LowerBoundSample / sample_distribution: the yes-distribution
  (every block split half/half at a hidden level k) and the no-distribution
  (every block split 1:3 at quarter resolution)
- interval_property_check / heavy_block_exists: block-count characterizations
- lca_level_set / conditional_distribution: exact outcome laws on a query set
- sample_outcomes: vectorised draws of the outcomes on a query set only
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from rof.errors import ArityError
from rof.formula.builder import Node, build_formula
from rof.formula.evaluate import evaluate
from rof.lowerbound.gates import BalancingVariant, builtin_gate
from rof.models import Assignment, Formula, Gate

Outcome = Tuple[int, ...]

YES_PATTERNS: Tuple[Tuple[int, ...], ...] = ((0, 1), (1, 0))
NO_PATTERNS: Tuple[Tuple[int, ...], ...] = (
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (0, 1, 1, 1),
    (1, 0, 1, 1),
    (1, 1, 0, 1),
    (1, 1, 1, 0),
)


class DistributionKind(str, Enum):
    YES = "dy"
    NO = "dn"

    @classmethod
    def from_text(cls, text: str) -> "DistributionKind":
        t = (text or "").strip().lower().replace("_", "")
        for kind in cls:
            if kind.value == t:
                return kind
        raise ValueError(f"unknown distribution: {text!r} (expected dy or dn)")

    @property
    def patterns(self) -> Tuple[Tuple[int, ...], ...]:
        return YES_PATTERNS if self is DistributionKind.YES else NO_PATTERNS

    @property
    def parts(self) -> int:
        """Number of constant runs per level-k block."""
        return 2 if self is DistributionKind.YES else 4


# ----------------------------- Formula -----------------------------

def build_balancing_formula(variant: BalancingVariant) -> Formula:
    """Leaves x_0..x_{2^h-1} left to right under a full tree of the variant gate."""
    alphabet, arity, table = builtin_gate(variant.kind.gate_name)
    gate = Gate.multi(variant.kind.gate_name, arity, table)
    level: List[Node] = [Node(Gate.variable(i)) for i in range(2 ** variant.height)]
    while len(level) > 1:
        level = [Node(gate, [level[i], level[i + 1]]) for i in range(0, len(level), 2)]
    return build_formula(level[0], alphabet, 2 ** variant.height)


def accepts(variant: BalancingVariant, f: Formula, bits: Sequence[int]) -> bool:
    a = Assignment.from_bits(bits, variant.alphabet)
    return evaluate(f, a) in variant.accept_set


# ----------------------------- Samples -----------------------------

def expand_blocks(kind: DistributionKind, k: int, blocks: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    """Each block pattern written as constant runs of length 2^k / parts."""
    run = 2 ** k // kind.parts
    bits: List[int] = []
    for pattern in blocks:
        for value in pattern:
            bits.extend([value] * run)
    return tuple(bits)


@dataclass(frozen=True)
class LowerBoundSample:
    which: DistributionKind
    height: int
    k: int
    blocks: Tuple[Tuple[int, ...], ...]

    @property
    def bits(self) -> Tuple[int, ...]:
        return expand_blocks(self.which, self.k, self.blocks)

    def assignment(self, variant: BalancingVariant) -> Assignment:
        return Assignment.from_bits(self.bits, variant.alphabet)

    def heavy_blocks(self) -> int:
        """Blocks whose pattern has three ones."""
        return sum(1 for b in self.blocks if len(b) == 4 and sum(b) == 3)


def _check_height(h: int) -> None:
    if h < 2:
        raise ArityError(f"height must be at least 2, got {h}")


def sample_distribution(which: DistributionKind, h: int, rng: random.Random) -> LowerBoundSample:
    """Pick k uniformly in [2, h], then one independent pattern per level-k block."""
    _check_height(h)
    k = rng.randint(2, h)
    patterns = which.patterns
    blocks = tuple(patterns[rng.randrange(len(patterns))] for _ in range(2 ** (h - k)))
    return LowerBoundSample(which, h, k, blocks)


# ----------------------------- Block characterizations -----------------------------

def _height_of(bits: Sequence[int]) -> int:
    n = len(bits)
    if n < 1 or n & (n - 1):
        raise ArityError(f"assignment length {n} is not a power of two")
    return n.bit_length() - 1


def interval_property_check(bits: Sequence[int]) -> bool:
    """Every dyadic block of length 2^k has 0, 2^k or 2^{k-1} ones."""
    h = _height_of(bits)
    arr = np.asarray(bits, dtype=np.int64)
    for k in range(1, h + 1):
        size = 2 ** k
        counts = arr.reshape(-1, size).sum(axis=1)
        if not np.isin(counts, (0, size, size // 2)).all():
            return False
    return True


def heavy_block_exists(bits: Sequence[int]) -> bool:
    """Some dyadic block has strictly between half and all of its entries set."""
    h = _height_of(bits)
    arr = np.asarray(bits, dtype=np.int64)
    for k in range(1, h + 1):
        size = 2 ** k
        counts = arr.reshape(-1, size).sum(axis=1)
        if ((counts > size // 2) & (counts < size)).any():
            return True
    return False


# ----------------------------- Query sets -----------------------------

def _check_queries(queries: Sequence[int], h: int) -> Tuple[int, ...]:
    q = tuple(sorted(set(queries)))
    if not q:
        raise ArityError("query set is empty")
    for x in q:
        if not 0 <= x < 2 ** h:
            raise ArityError(f"query {x} outside [0, {2 ** h})")
    return q


def lca_level_set(queries: Sequence[int], h: int) -> Tuple[int, ...]:
    """Levels (leaf = 0) of the lowest common ancestors of pairs of queries."""
    q = _check_queries(queries, h)
    return tuple(sorted({(a ^ b).bit_length() for a, b in itertools.combinations(q, 2)}))


def admissible_levels(queries: Sequence[int], h: int) -> Tuple[int, ...]:
    """Hidden levels k with neither k nor k-1 among the LCA levels."""
    levels = set(lca_level_set(queries, h))
    return tuple(k for k in range(2, h + 1) if k not in levels and k - 1 not in levels)


def conditional_distribution(
    which: DistributionKind, queries: Sequence[int], h: int, k: int
) -> Dict[Outcome, Fraction]:
    """
    Exact law of the outcomes on ``queries`` given hidden level k.

    Blocks are independent, so the law factors over the level-k blocks the
    queries touch; full assignments are never enumerated.
    """
    q = _check_queries(queries, h)
    if not 2 <= k <= h:
        raise ArityError(f"level {k} outside [2, {h}]")
    shift = k - (1 if which is DistributionKind.YES else 2)
    mask = which.parts - 1
    by_block: Dict[int, List[int]] = {}
    for pos, x in enumerate(q):
        by_block.setdefault(x >> k, []).append(pos)

    patterns = which.patterns
    weight = Fraction(1, len(patterns))
    factors: List[Dict[Tuple[Tuple[int, int], ...], Fraction]] = []
    for positions in by_block.values():
        local: Dict[Tuple[Tuple[int, int], ...], Fraction] = {}
        for pattern in patterns:
            key = tuple((pos, pattern[(q[pos] >> shift) & mask]) for pos in positions)
            local[key] = local.get(key, Fraction(0)) + weight
        factors.append(local)

    law: Dict[Outcome, Fraction] = {}
    for combo in itertools.product(*(f.items() for f in factors)):
        values = [0] * len(q)
        p = Fraction(1)
        for key, prob in combo:
            p *= prob
            for pos, value in key:
                values[pos] = value
        out = tuple(values)
        law[out] = law.get(out, Fraction(0)) + p
    return law


def outcome_distribution(which: DistributionKind, queries: Sequence[int], h: int) -> Dict[Outcome, Fraction]:
    """Unconditional law: the conditional laws averaged over k uniform in [2, h]."""
    _check_height(h)
    levels = range(2, h + 1)
    law: Dict[Outcome, Fraction] = {}
    for k in levels:
        for out, p in conditional_distribution(which, queries, h, k).items():
            law[out] = law.get(out, Fraction(0)) + p / len(levels)
    return law


def total_variation(p: Dict[Outcome, Fraction], q: Dict[Outcome, Fraction]) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(p.get(x, Fraction(0)) - q.get(x, Fraction(0))) for x in keys), Fraction(0)) / 2


# ----------------------------- Vectorised sampling -----------------------------

def sample_outcomes(
    which: DistributionKind,
    h: int,
    queries: Sequence[int],
    n: int,
    generator: np.random.Generator,
) -> np.ndarray:
    """
    ``n`` outcome codes on ``queries`` (bit j = value of the j-th sorted query).

    Only the patterns of the blocks the queries touch are drawn; two queries in
    the same block share one pattern draw.
    """
    _check_height(h)
    q = np.asarray(_check_queries(queries, h), dtype=np.int64)
    m = len(q)
    ks = generator.integers(2, h + 1, size=n)
    blocks = q[None, :] >> ks[:, None]
    same = blocks[:, :, None] == blocks[:, None, :]
    owner = same.argmax(axis=2)
    patterns = np.asarray(which.patterns, dtype=np.int64)
    draws = generator.integers(0, len(patterns), size=(n, m))
    chosen = np.take_along_axis(draws, owner, axis=1)
    shift = ks - (1 if which is DistributionKind.YES else 2)
    part = (q[None, :] >> shift[:, None]) & (which.parts - 1)
    values = patterns[chosen, part]
    return (values << np.arange(m, dtype=np.int64)).sum(axis=1)


def histogram(codes: np.ndarray, m: int) -> np.ndarray:
    return np.bincount(codes, minlength=2 ** m) / max(len(codes), 1)
