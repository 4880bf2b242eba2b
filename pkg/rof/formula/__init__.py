"""
Formula representation: parsing, evaluation, subtree statistics and query oracles.
"""

from rof.formula.builder import Node, build_formula, subformula, to_node
from rof.formula.evaluate import (
    evaluate,
    evaluate_all,
    evaluate_symbol,
    gate_output,
    naive_evaluate,
    postorder,
)
from rof.formula.oracle import CountingOracle, make_counting_oracle
from rof.formula.parser import parse_formula, serialize
from rof.formula.stats import (
    annotate_stats,
    classify_children,
    heavy_light_split,
    uniform_leaf,
    weighted_child_sample,
)

__all__ = [
    "Node",
    "build_formula",
    "subformula",
    "to_node",
    "evaluate",
    "evaluate_all",
    "evaluate_symbol",
    "gate_output",
    "naive_evaluate",
    "postorder",
    "CountingOracle",
    "make_counting_oracle",
    "parse_formula",
    "serialize",
    "annotate_stats",
    "classify_children",
    "heavy_light_split",
    "uniform_leaf",
    "weighted_child_sample",
]
