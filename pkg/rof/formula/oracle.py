"""
Query-counting access to an assignment.
"""

from __future__ import annotations

from rof.models import Assignment, Gate, GateKind


class CountingOracle:
    """
    Point-query access to an assignment.

    Every call is counted, repeats included. One oracle belongs to one run.
    """

    def __init__(self, assignment: Assignment):
        self.assignment = assignment
        self.query_count = 0
        self._one = assignment.alphabet.index("1")

    def query(self, var: int) -> int:
        if not 0 <= var < len(self.assignment.values):
            raise IndexError(f"variable x{var} outside assignment of length {len(self.assignment)}")
        self.query_count += 1
        return self.assignment.values[var]

    __call__ = query

    def literal(self, gate: Gate) -> int:
        """Boolean value (0/1) of a variable or negated-variable leaf; one query."""
        bit = 1 if self.query(gate.var) == self._one else 0
        return 1 - bit if gate.kind is GateKind.NEGATED else bit

    def reset(self) -> None:
        self.query_count = 0


def make_counting_oracle(a: Assignment) -> CountingOracle:
    return CountingOracle(a)
