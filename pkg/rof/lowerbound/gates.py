"""
Multi-valued balancing gates and the formula variants built from them.

Provides:
- BalancingKind / BalancingVariant: the 4-valued balancing formula, the 5-valued
  monotone sub-balancing formula and the 5-valued almost-monotone formula
- balancing_gate: the exact two-input gate tables
- builtin_gate: tables for the ``(mv2 bal4 ...)`` / ``(mv2 bal5 ...)`` syntax
- exhaustive table checks: symmetry, monotonicity, F0/F1 unification
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Dict, FrozenSet, List, Tuple

from rof.errors import AlphabetMismatch, ArityError
from rof.models import FIVE_VALUED, FOUR_VALUED, Alphabet


class BalancingKind(str, Enum):
    FOUR_VALUED = "bal4"
    FIVE_MONOTONE = "bal5"
    FIVE_ALMOST = "bal5am"

    @classmethod
    def from_text(cls, text: str) -> "BalancingKind":
        t = (text or "").strip().lower()
        aliases = {
            "fourvalued": cls.FOUR_VALUED,
            "fivevaluedmonotone": cls.FIVE_MONOTONE,
            "almostmonotone": cls.FIVE_ALMOST,
        }
        for kind in cls:
            if kind.value == t:
                return kind
        if t in aliases:
            return aliases[t]
        raise ValueError(f"unknown balancing variant: {text!r}")

    @property
    def gate_name(self) -> str:
        return "bal4" if self is BalancingKind.FOUR_VALUED else "bal5"

    @property
    def alphabet(self) -> Alphabet:
        return FOUR_VALUED if self is BalancingKind.FOUR_VALUED else FIVE_VALUED


_ACCEPT: Dict[BalancingKind, Tuple[str, ...]] = {
    BalancingKind.FOUR_VALUED: ("0", "1", "P"),
    BalancingKind.FIVE_MONOTONE: ("0", "F0", "P"),
    BalancingKind.FIVE_ALMOST: ("0", "P", "1"),
}


@dataclass(frozen=True)
class BalancingVariant:
    kind: BalancingKind
    height: int

    def __post_init__(self) -> None:
        if self.height < 2:
            raise ArityError(f"balancing formulas need height >= 2, got {self.height}")

    @property
    def alphabet(self) -> Alphabet:
        return self.kind.alphabet

    @property
    def accept_names(self) -> Tuple[str, ...]:
        return _ACCEPT[self.kind]

    @property
    def accept_set(self) -> FrozenSet[int]:
        return frozenset(self.alphabet.index(s) for s in _ACCEPT[self.kind])


# ----------------------------- Gate tables -----------------------------

def _bal4(a: str, b: str) -> str:
    if a == b and a in ("0", "1", "P"):
        return a
    if {a, b} == {"0", "1"}:
        return "P"
    return "F"


def _bal5(a: str, b: str) -> str:
    pair = {a, b}
    if "F1" in pair:
        return "F1"
    if a == b and a in ("0", "1", "P"):
        return a
    if pair == {"0", "1"}:
        return "P"
    if pair == {"0", "P"}:
        return "F0"
    if pair == {"1", "P"}:
        return "F1"
    if pair in ({"P", "F0"}, {"0", "F0"}, {"F0"}):
        return "F0"
    # only {F0, 1} is left
    return "F1"


_GATE_FUNCS = {"bal4": (_bal4, FOUR_VALUED), "bal5": (_bal5, FIVE_VALUED)}


def balancing_gate(kind: BalancingKind, a: str, b: str) -> str:
    """Output symbol of the variant's gate on inputs (a, b)."""
    fn, alphabet = _GATE_FUNCS[kind.gate_name]
    for s in (a, b):
        if s not in alphabet.symbols:
            raise AlphabetMismatch(f"symbol {s!r} not in alphabet {alphabet.name}")
    return fn(a, b)


def builtin_gate(name: str) -> Tuple[Alphabet, int, Tuple[int, ...]]:
    """(alphabet, arity, table) for a built-in multi-valued gate name."""
    if name not in _GATE_FUNCS:
        raise ValueError(f"unknown multi-valued gate {name!r}; expected bal4 or bal5")
    fn, alphabet = _GATE_FUNCS[name]
    q = alphabet.size
    table = [0] * (q * q)
    for ia, ib in product(range(q), repeat=2):
        table[ia + q * ib] = alphabet.index(fn(alphabet.symbol(ia), alphabet.symbol(ib)))
    return alphabet, 2, tuple(table)


# ----------------------------- Exhaustive checks -----------------------------

def symmetry_violations(kind: BalancingKind) -> List[Tuple[str, str]]:
    alphabet = kind.alphabet
    return [
        (a, b)
        for a, b in product(alphabet.symbols, repeat=2)
        if balancing_gate(kind, a, b) != balancing_gate(kind, b, a)
    ]


def monotonicity_violations(
    kind: BalancingKind = BalancingKind.FIVE_MONOTONE,
) -> List[Tuple[Tuple[str, str], Tuple[str, str]]]:
    """
    Comparisons (a,b) <= (a',b') whose outputs go down, over the alphabet order.

    The 5-valued table is monotone except where F1 is raised to 1 against a 0:
    g(F1,0) = F1 but g(1,0) = P (and the mirrored pair).
    """
    alphabet = kind.alphabet
    rank = {s: i for i, s in enumerate(alphabet.symbols)}
    pairs = list(product(alphabet.symbols, repeat=2))
    bad = []
    for lo in pairs:
        for hi in pairs:
            if rank[lo[0]] <= rank[hi[0]] and rank[lo[1]] <= rank[hi[1]]:
                if rank[balancing_gate(kind, *lo)] > rank[balancing_gate(kind, *hi)]:
                    bad.append((lo, hi))
    return bad


def unification_mismatches() -> List[Tuple[str, str]]:
    """
    Pairs where the 5-valued gate with F0, F1 merged into F disagrees with bal4.

    Empty means the merged gate is well defined and equal to the 4-valued gate
    under the bijection 0->0, P->P, 1->1, F0/F1->F.
    """
    merge = {"0": "0", "F0": "F", "P": "P", "F1": "F", "1": "1"}
    bad = []
    for a, b in product(FIVE_VALUED.symbols, repeat=2):
        merged = merge[balancing_gate(BalancingKind.FIVE_MONOTONE, a, b)]
        if merged != balancing_gate(BalancingKind.FOUR_VALUED, merge[a], merge[b]):
            bad.append((a, b))
    return bad
