"""
Core data models for read-once formulas and test runs.

Provides:
- Alphabet: ordered gate-value symbols plus the symbols leaves may take
- GateKind / Gate / Vertex: gate descriptions in a vertex arena
- SubtreeStats: cached per-vertex sizes, depths and leaf ranges
- Formula: immutable rooted ordered tree
- Assignment: one symbol per variable index
- TestParams / EstimateResult / TrialReport: algorithm inputs and outputs
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from rof.errors import AlphabetMismatch, ArityError, ConfigError


# ----------------------------- Alphabet -----------------------------

@dataclass(frozen=True)
class Alphabet:
    """Ordered symbol set; ``inputs`` are the values a variable may take."""
    name: str
    symbols: Tuple[str, ...]
    inputs: Tuple[str, ...] = ("0", "1")

    def __post_init__(self) -> None:
        if len(set(self.symbols)) != len(self.symbols):
            raise AlphabetMismatch(f"alphabet {self.name} has repeated symbols")
        for s in self.inputs:
            if s not in self.symbols:
                raise AlphabetMismatch(f"input symbol {s!r} not in alphabet {self.name}")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise AlphabetMismatch(
                f"symbol {symbol!r} not in alphabet {self.name} {list(self.symbols)}"
            ) from None

    def symbol(self, idx: int) -> str:
        if not 0 <= idx < len(self.symbols):
            raise AlphabetMismatch(f"symbol index {idx} out of range for {self.name}")
        return self.symbols[idx]

    @property
    def input_indices(self) -> Tuple[int, ...]:
        return tuple(self.symbols.index(s) for s in self.inputs)

    @property
    def is_boolean(self) -> bool:
        return self.symbols == ("0", "1")

    def parse_set(self, text: str) -> FrozenSet[int]:
        """Parse ``"0,1,P"`` into a set of symbol indices."""
        names = [p.strip() for p in text.split(",") if p.strip()]
        if not names:
            raise AlphabetMismatch("empty symbol set")
        return frozenset(self.index(n) for n in names)


BOOLEAN = Alphabet("boolean", ("0", "1"))
FOUR_VALUED = Alphabet("bal4", ("0", "1", "P", "F"))
FIVE_VALUED = Alphabet("bal5", ("0", "F0", "P", "F1", "1"))

ALPHABETS: Dict[str, Alphabet] = {a.name: a for a in (BOOLEAN, FOUR_VALUED, FIVE_VALUED)}


# ----------------------------- Gates -----------------------------

class GateKind(str, Enum):
    VARIABLE = "var"
    NEGATED = "neg"
    CONSTANT = "const"
    NOT = "not"
    AND = "and"
    OR = "or"
    TABLE = "tbl"
    MDNF = "dnf"
    MULTI = "mv"

    @classmethod
    def from_text(cls, text: str) -> "GateKind":
        t = (text or "").strip().lower()
        for kind in cls:
            if kind.value == t:
                return kind
        raise ValueError(f"unknown gate kind: {text!r}")


LEAF_KINDS = frozenset({GateKind.VARIABLE, GateKind.NEGATED, GateKind.CONSTANT})
LITERAL_KINDS = frozenset({GateKind.VARIABLE, GateKind.NEGATED})


@dataclass(frozen=True)
class Gate:
    """
    A vertex label.

    ``table`` holds symbol indices; the row of input tuple (x_0..x_{a-1}) is
    sum(idx(x_i) * |alphabet|**i), child 0 least significant.
    """
    kind: GateKind
    arity: int = 0
    var: int = -1
    symbol: int = -1
    table: Tuple[int, ...] = ()
    terms: Tuple[FrozenSet[int], ...] = ()
    name: str = ""

    @classmethod
    def variable(cls, var: int) -> "Gate":
        return cls(GateKind.VARIABLE, var=var)

    @classmethod
    def negated(cls, var: int) -> "Gate":
        return cls(GateKind.NEGATED, var=var)

    @classmethod
    def constant(cls, symbol: int) -> "Gate":
        return cls(GateKind.CONSTANT, symbol=symbol)

    @classmethod
    def not_(cls) -> "Gate":
        return cls(GateKind.NOT, arity=1)

    @classmethod
    def and_(cls, arity: int) -> "Gate":
        return cls(GateKind.AND, arity=arity)

    @classmethod
    def or_(cls, arity: int) -> "Gate":
        return cls(GateKind.OR, arity=arity)

    @classmethod
    def tbl(cls, arity: int, table: Sequence[int]) -> "Gate":
        return cls(GateKind.TABLE, arity=arity, table=tuple(table))

    @classmethod
    def mdnf(cls, arity: int, terms: Sequence[FrozenSet[int]]) -> "Gate":
        ordered = sorted((frozenset(t) for t in terms), key=lambda t: (len(t), sorted(t)))
        return cls(GateKind.MDNF, arity=arity, terms=tuple(ordered))

    @classmethod
    def multi(cls, name: str, arity: int, table: Sequence[int]) -> "Gate":
        return cls(GateKind.MULTI, arity=arity, table=tuple(table), name=name)

    @property
    def is_leaf(self) -> bool:
        return self.kind in LEAF_KINDS

    @property
    def is_literal(self) -> bool:
        return self.kind in LITERAL_KINDS

    def mdnf_table(self) -> Tuple[int, ...]:
        """Boolean truth table of an MDNF gate."""
        rows = []
        for row in range(2 ** self.arity):
            ones = {i for i in range(self.arity) if (row >> i) & 1}
            rows.append(1 if any(t <= ones for t in self.terms) else 0)
        return tuple(rows)


@dataclass(frozen=True)
class Vertex:
    gate: Gate
    children: Tuple[int, ...] = ()


# ----------------------------- Formula -----------------------------

@dataclass(frozen=True)
class SubtreeStats:
    """
    Per-vertex statistics from one depth-first pass.

    ``leaf_order`` lists variable leaves in DFS order; the variable leaves of the
    subtree of v are ``leaf_order[leaf_lo[v]:leaf_hi[v]]``.
    """
    size: Tuple[int, ...]
    depth: Tuple[int, ...]
    parent: Tuple[int, ...]
    heaviest_child: Tuple[int, ...]
    by_size: Tuple[Tuple[int, ...], ...]
    leaf_order: Tuple[int, ...]
    leaf_lo: Tuple[int, ...]
    leaf_hi: Tuple[int, ...]
    formula_depth: int


@dataclass(frozen=True)
class Formula:
    """
    Read-once formula stored as a vertex arena.

    Structural equality ignores ``stats``.
    """
    vertices: Tuple[Vertex, ...]
    root: int
    n_vars: int
    alphabet: Alphabet = BOOLEAN
    stats: Optional[SubtreeStats] = field(default=None, compare=False, repr=False)

    def gate(self, v: int) -> Gate:
        return self.vertices[v].gate

    def children(self, v: int) -> Tuple[int, ...]:
        return self.vertices[v].children

    def is_leaf(self, v: int) -> bool:
        return self.vertices[v].gate.is_leaf

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[int]:
        return iter(range(len(self.vertices)))

    def variable_leaves(self) -> List[int]:
        return [v for v, vx in enumerate(self.vertices) if vx.gate.is_literal]

    def variables(self) -> FrozenSet[int]:
        return frozenset(self.vertices[v].gate.var for v in self.variable_leaves())

    @property
    def size(self) -> int:
        """Number of variable leaves."""
        if self.stats is not None:
            return self.stats.size[self.root]
        return len(self.variable_leaves())

    @property
    def require_stats(self) -> SubtreeStats:
        if self.stats is None:
            raise ValueError("formula is not annotated; call annotate_stats first")
        return self.stats

    def gate_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for vx in self.vertices:
            counts[vx.gate.kind.value] = counts.get(vx.gate.kind.value, 0) + 1
        return dict(sorted(counts.items()))

    def is_basic(self) -> bool:
        """And/Or gates over literals only."""
        return all(
            vx.gate.kind in (GateKind.AND, GateKind.OR) or vx.gate.is_literal
            for vx in self.vertices
        )


# ----------------------------- Assignment -----------------------------

@dataclass(frozen=True)
class Assignment:
    """Symbol indices, one per variable index."""
    values: Tuple[int, ...]
    alphabet: Alphabet = BOOLEAN

    def __post_init__(self) -> None:
        allowed = set(self.alphabet.input_indices)
        for i, v in enumerate(self.values):
            if v not in allowed:
                raise AlphabetMismatch(
                    f"value at x{i} is not an input symbol of {self.alphabet.name}"
                )

    @classmethod
    def from_string(cls, text: str, alphabet: Alphabet = BOOLEAN) -> "Assignment":
        text = "".join(text.split())
        values = []
        for pos, ch in enumerate(text):
            if ch not in alphabet.inputs:
                raise AlphabetMismatch(f"character {ch!r} at position {pos} is not an input symbol")
            values.append(alphabet.index(ch))
        return cls(tuple(values), alphabet)

    @classmethod
    def from_bits(cls, bits: Sequence[int], alphabet: Alphabet = BOOLEAN) -> "Assignment":
        zero, one = alphabet.index("0"), alphabet.index("1")
        return cls(tuple(one if b else zero for b in bits), alphabet)

    def bits(self) -> Tuple[int, ...]:
        one = self.alphabet.index("1")
        return tuple(1 if v == one else 0 for v in self.values)

    def to_string(self) -> str:
        return "".join(self.alphabet.symbols[v] for v in self.values)

    def with_value(self, var: int, value: int) -> "Assignment":
        vals = list(self.values)
        vals[var] = value
        return Assignment(tuple(vals), self.alphabet)

    def __len__(self) -> int:
        return len(self.values)

    def hamming(self, other: "Assignment") -> int:
        if len(self) != len(other):
            raise ArityError("assignments differ in length")
        return sum(1 for a, b in zip(self.values, other.values) if a != b)


# ----------------------------- Runs -----------------------------

@dataclass(frozen=True)
class TestParams:
    """Distance parameter, confidence, arity bound and Boolean target."""
    eps: float
    delta: float
    k: int = 2
    b: int = 1

    __test__ = False  # not a pytest class

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0,1), got {self.delta}")
        if self.k < 2:
            raise ConfigError(f"k must be at least 2, got {self.k}")
        if self.b not in (0, 1):
            raise ConfigError(f"target b must be 0 or 1, got {self.b}")


@dataclass(frozen=True)
class EstimateResult:
    eta: Fraction
    queries: int
    depth: int = 0


def format_fraction(value: Optional[Fraction]) -> Optional[str]:
    if value is None:
        return None
    return f"{value.numerator}/{value.denominator}"


@dataclass
class TrialReport:
    """One algorithm run, as emitted by the harness."""
    index: int
    seed: int
    algorithm: str
    eps: float
    delta: float
    queries: int
    depth: int = 0
    verdict: Optional[str] = None
    eta: Optional[Fraction] = None
    true_farness: Optional[Fraction] = None
    wall_time: float = 0.0

    def to_row(self, timings: bool = False) -> Dict[str, Any]:
        row: Dict[str, Any] = {
            "trial": self.index,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "eps": self.eps,
            "delta": self.delta,
            "verdict": self.verdict,
            "eta": float(self.eta) if self.eta is not None else None,
            "queries": self.queries,
            "depth": self.depth,
            "true_farness": format_fraction(self.true_farness),
        }
        if timings:
            row["wall_time"] = round(self.wall_time, 6)
        return row
