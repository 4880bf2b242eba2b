"""
Subtree statistics and the child selection rules built on them.

Provides:
- annotate_stats: one depth-first pass computing sizes, depths, parents,
  heaviest children and DFS leaf ranges
- heavy_light_split / classify_children: the ℓ-threshold rule
- weighted_child_sample / uniform_leaf: size-proportional sampling
"""

from __future__ import annotations

import random
from dataclasses import replace
from typing import List, Sequence, Tuple

from rof.models import Formula, SubtreeStats


def annotate_stats(f: Formula) -> Formula:
    """Return ``f`` with SubtreeStats attached; linear in the vertex count."""
    if f.stats is not None:
        return f
    n = len(f)
    depth = [0] * n
    parent = [-1] * n
    leaf_lo = [0] * n
    leaf_hi = [0] * n
    leaf_order: List[int] = []
    preorder: List[int] = []

    stack = [f.root]
    while stack:
        v = stack.pop()
        preorder.append(v)
        if f.gate(v).is_literal:
            leaf_lo[v] = len(leaf_order)
            leaf_order.append(v)
            leaf_hi[v] = len(leaf_order)
        elif not f.children(v):
            leaf_lo[v] = leaf_hi[v] = len(leaf_order)
        for c in reversed(f.children(v)):
            depth[c] = depth[v] + 1
            parent[c] = v
            stack.append(c)

    size = [0] * n
    heaviest = list(range(n))
    by_size: List[Tuple[int, ...]] = [()] * n
    for v in reversed(preorder):
        kids = f.children(v)
        if not kids:
            size[v] = 1 if f.gate(v).is_literal else 0
            continue
        size[v] = sum(size[c] for c in kids)
        ordered = tuple(sorted(kids, key=lambda c: (-size[c], c)))
        by_size[v] = ordered
        heaviest[v] = ordered[0]
        leaf_lo[v] = leaf_lo[kids[0]]
        leaf_hi[v] = leaf_hi[kids[-1]]

    stats = SubtreeStats(
        size=tuple(size),
        depth=tuple(depth),
        parent=tuple(parent),
        heaviest_child=tuple(heaviest),
        by_size=tuple(by_size),
        leaf_order=tuple(leaf_order),
        leaf_lo=tuple(leaf_lo),
        leaf_hi=tuple(leaf_hi),
        formula_depth=max(depth) if n else 0,
    )
    return replace(f, stats=stats)


# ----------------------------- Heavy / light -----------------------------

def heavy_light_split(
    children: Sequence[Tuple[int, int]],
    total: int,
    eps: float,
    k: int,
) -> Tuple[int, List[int], List[int]]:
    """
    Split ``(size, vertex_id)`` pairs at the ℓ-threshold.

    ℓ is the smallest index whose ℓ'th largest child is smaller than
    ``total * (4k/eps) ** -ℓ``, or one more than the number of children considered
    (min(len(children), k) + 1) when no such index exists; the ℓ-1 largest
    children are heavy. Ties go to the smaller vertex id.
    """
    ordered = sorted(children, key=lambda sv: (-sv[0], sv[1]))
    ratio = 4 * k / eps
    considered = min(len(ordered), k)
    ell = considered + 1
    for idx in range(1, considered + 1):
        if ordered[idx - 1][0] < total * ratio ** (-idx):
            ell = idx
            break
    heavy = [vid for _, vid in ordered[: ell - 1]]
    light = [vid for _, vid in ordered[ell - 1 :]]
    return ell, heavy, light


def classify_children(f: Formula, u: int, eps: float, k: int) -> Tuple[int, List[int], List[int]]:
    """Heavy/light classification of u's children against the leaf count under u."""
    stats = f.require_stats
    if f.is_leaf(u):
        raise ValueError(f"vertex {u} is a leaf and has no children to classify")
    pairs = [(stats.size[c], c) for c in stats.by_size[u]]
    return heavy_light_split(pairs, stats.size[u], eps, k)


# ----------------------------- Sampling -----------------------------

def uniform_leaf(f: Formula, u: int, rng: random.Random) -> int:
    """A variable leaf under u chosen uniformly."""
    stats = f.require_stats
    lo, hi = stats.leaf_lo[u], stats.leaf_hi[u]
    if hi <= lo:
        raise ValueError(f"subformula at {u} has no variable leaves")
    return stats.leaf_order[rng.randrange(lo, hi)]


def weighted_child_sample(f: Formula, u: int, rng: random.Random) -> int:
    """
    A child w of u drawn with probability size(w) / size(u).

    Draws a uniform leaf below u and climbs to the child of u above it, so the
    cost is the depth rather than the arity.
    """
    if f.is_leaf(u):
        raise ValueError(f"vertex {u} is a leaf and has no children to sample")
    parent = f.require_stats.parent
    w = uniform_leaf(f, u, rng)
    while parent[w] != u:
        w = parent[w]
    return w
