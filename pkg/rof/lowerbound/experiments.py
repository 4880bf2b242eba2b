"""
Experiments on the balancing constructions.

Provides:
- farness_experiment: exact distance of sampled inputs to the accept set
- expected_far_fraction: exact probability that a no-sample is 1/12-far from the
  monotone sub-balancing formula
- indistinguishability_experiment: exact conditional comparison or empirical
  total variation (with bootstrap interval) on a query set
- tv_scaling: total variation against height for one fixed query set
- balancing_exhaustive: every assignment at small height, vectorised
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from rof.distance import exact_cost
from rof.errors import ArityError, InstanceTooLarge
from rof.lowerbound.distributions import (
    DistributionKind,
    admissible_levels,
    build_balancing_formula,
    conditional_distribution,
    histogram,
    lca_level_set,
    outcome_distribution,
    sample_distribution,
    sample_outcomes,
    total_variation,
)
from rof.lowerbound.gates import BalancingKind, BalancingVariant, builtin_gate

logger = logging.getLogger(__name__)

EXACT_QUERY_LIMIT = 6
EXHAUSTIVE_HEIGHT_LIMIT = 4


# ----------------------------- Farness -----------------------------

def farness_threshold(kind: BalancingKind, which: DistributionKind) -> Fraction:
    if which is DistributionKind.YES:
        return Fraction(0)
    return Fraction(1, 4) if kind is BalancingKind.FOUR_VALUED else Fraction(1, 12)


def expected_far_fraction(h: int) -> float:
    """
    P[a no-sample is 1/12-far from the monotone sub-balancing formula].

    A sample with hidden level k has distance (three-ones blocks) * 2^{k-2}, and the
    number of three-ones blocks is Bin(2^{h-k}, 1/2).
    """
    total = 0.0
    for k in range(2, h + 1):
        m = 2 ** (h - k)
        need = math.ceil(m / 3)
        total += float(stats.binom.sf(need - 1, m, 0.5))
    return total / (h - 1)


@dataclass
class FarnessReport:
    variant: str
    which: str
    height: int
    trials: int
    threshold: Fraction
    min_distance: int
    max_distance: int
    mean_distance: float
    accepted_fraction: float
    far_fraction: float
    expected_far_fraction: Optional[float] = None
    distances: List[int] = field(default_factory=list, repr=False)

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row.pop("distances")
        row["threshold"] = f"{self.threshold.numerator}/{self.threshold.denominator}"
        return row


def farness_experiment(
    kind: BalancingKind,
    which: DistributionKind,
    h: int,
    trials: int,
    seed: int = 0,
) -> FarnessReport:
    """Draw ``trials`` samples and compute each one's exact distance to acceptance."""
    variant = BalancingVariant(kind, h)
    f = build_balancing_formula(variant)
    rng = random.Random(seed)
    threshold = farness_threshold(kind, which)
    needed = math.ceil(threshold * 2 ** h)
    distances: List[int] = []
    for t in range(trials):
        sample = sample_distribution(which, h, rng)
        cost = exact_cost(f, sample.assignment(variant), variant.accept_set)
        distances.append(cost if cost is not None else 2 ** h + 1)
        logger.debug("farness trial %d: k=%d distance=%s", t, sample.k, cost)
    arr = np.asarray(distances)
    report = FarnessReport(
        variant=kind.value,
        which=which.value,
        height=h,
        trials=trials,
        threshold=threshold,
        min_distance=int(arr.min()),
        max_distance=int(arr.max()),
        mean_distance=float(arr.mean()),
        accepted_fraction=float((arr == 0).mean()),
        far_fraction=float((arr >= needed).mean()) if needed else 1.0,
        expected_far_fraction=(
            expected_far_fraction(h)
            if kind is BalancingKind.FIVE_MONOTONE and which is DistributionKind.NO
            else None
        ),
        distances=distances,
    )
    logger.info(
        "farness %s/%s h=%d: min=%d mean=%.2f far=%.3f",
        kind.value, which.value, h, report.min_distance, report.mean_distance, report.far_fraction,
    )
    return report


# ----------------------------- Indistinguishability -----------------------------

@dataclass
class IndistinguishabilityReport:
    queries: Tuple[int, ...]
    height: int
    mode: str
    lca_levels: Tuple[int, ...]
    admissible: Tuple[int, ...]
    exact_tv: Optional[float]
    tv_bound: float
    identical: Optional[bool] = None
    mismatched_levels: Tuple[int, ...] = ()
    tv: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    samples: int = 0

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row["queries"] = ",".join(str(q) for q in self.queries)
        row["lca_levels"] = ",".join(str(k) for k in self.lca_levels)
        row["admissible"] = ",".join(str(k) for k in self.admissible)
        row["mismatched_levels"] = ",".join(str(k) for k in self.mismatched_levels)
        return row


def tv_bound(queries: Sequence[int], h: int) -> float:
    """Share of hidden levels k with k or k-1 among the LCA levels."""
    levels = set(lca_level_set(queries, h))
    bad = [k for k in range(2, h + 1) if k in levels or k - 1 in levels]
    return len(bad) / (h - 1)


def bootstrap_tv(
    yes_hist: np.ndarray,
    no_hist: np.ndarray,
    n: int,
    generator: np.random.Generator,
    rounds: int = 200,
) -> Tuple[float, float]:
    """95% percentile interval of the plug-in TV under multinomial resampling."""
    yes = generator.multinomial(n, yes_hist, size=rounds) / n
    no = generator.multinomial(n, no_hist, size=rounds) / n
    tvs = 0.5 * np.abs(yes - no).sum(axis=1)
    low, high = np.percentile(tvs, [2.5, 97.5])
    return float(low), float(high)


def indistinguishability_experiment(
    queries: Sequence[int],
    h: int,
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
    bootstrap_rounds: int = 200,
) -> IndistinguishabilityReport:
    """
    Compare the yes- and no-distributions on a query set.

    ``exact`` checks that the conditional laws agree on every admissible hidden
    level; ``tv`` estimates the unconditional total variation from samples.
    """
    q = tuple(sorted(set(queries)))
    levels = lca_level_set(q, h)
    allowed = admissible_levels(q, h)
    exact: Optional[float] = None
    if len(q) <= EXACT_QUERY_LIMIT:
        exact = float(
            total_variation(
                outcome_distribution(DistributionKind.YES, q, h),
                outcome_distribution(DistributionKind.NO, q, h),
            )
        )
    report = IndistinguishabilityReport(
        queries=q,
        height=h,
        mode=mode,
        lca_levels=levels,
        admissible=allowed,
        exact_tv=exact,
        tv_bound=tv_bound(q, h),
    )

    if mode == "exact":
        if len(q) > EXACT_QUERY_LIMIT:
            raise InstanceTooLarge(
                f"exact mode supports at most {EXACT_QUERY_LIMIT} queries, got {len(q)}"
            )
        mismatched = tuple(
            k
            for k in allowed
            if conditional_distribution(DistributionKind.YES, q, h, k)
            != conditional_distribution(DistributionKind.NO, q, h, k)
        )
        report.identical = not mismatched
        report.mismatched_levels = mismatched
        return report

    if mode != "tv":
        raise ValueError(f"unknown mode {mode!r}; expected exact or tv")
    generator = np.random.default_rng(seed)
    m = len(q)
    yes_hist = histogram(sample_outcomes(DistributionKind.YES, h, q, samples, generator), m)
    no_hist = histogram(sample_outcomes(DistributionKind.NO, h, q, samples, generator), m)
    report.tv = float(0.5 * np.abs(yes_hist - no_hist).sum())
    report.ci_low, report.ci_high = bootstrap_tv(yes_hist, no_hist, samples, generator, bootstrap_rounds)
    report.samples = samples
    logger.debug("tv h=%d Q=%s: %.4f (exact %s)", h, q, report.tv, exact)
    return report


def fixed_query_set(query_count: int, h: int, seed: int) -> Tuple[int, ...]:
    """A seeded random query set inside the first 2^{h-1} leaves."""
    rng = random.Random(seed)
    return tuple(sorted(rng.sample(range(2 ** (h - 1)), query_count)))


def tv_scaling(
    heights: Sequence[int],
    query_count: int = 3,
    samples: int = 100_000,
    seed: int = 0,
    queries: Optional[Sequence[int]] = None,
) -> List[IndistinguishabilityReport]:
    """
    Total variation against height for one query set.

    The set (drawn unless ``queries`` is given) must lie in the leftmost
    2^{min height - 1} leaves. Then every level k with k or k-1 among its LCA
    levels is at most the smallest height, the same levels disagree at every
    height, and the exact total variation falls as 1/(h-1).
    """
    from rof.generators import trial_seed

    ordered = sorted(heights)
    if queries is None:
        q = fixed_query_set(query_count, ordered[0], seed)
    else:
        q = tuple(sorted(set(queries)))
        if q and q[-1] >= 2 ** (ordered[0] - 1):
            raise ArityError(f"queries must lie below 2^{ordered[0] - 1} for heights {ordered}")
    logger.info("tv scaling over heights %s with queries %s", ordered, q)
    return [
        indistinguishability_experiment(q, h, "tv", samples, trial_seed(seed, i))
        for i, h in enumerate(ordered)
    ]


# ----------------------------- Exhaustive checks -----------------------------

@dataclass
class ExhaustiveReport:
    variant: str
    height: int
    assignments: int
    accepted: int
    interval_mismatches: int
    heavy_block_accepted: int


def _all_bits(n: int) -> np.ndarray:
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int8)


def root_symbols_all(variant: BalancingVariant, bits: np.ndarray) -> np.ndarray:
    """Root symbol of the balancing formula on every row of ``bits``."""
    alphabet, _, table = builtin_gate(variant.kind.gate_name)
    lut = np.asarray(table, dtype=np.int64)
    q = alphabet.size
    vals = np.where(bits == 1, alphabet.index("1"), alphabet.index("0")).astype(np.int64)
    while vals.shape[1] > 1:
        vals = lut[vals[:, 0::2] + q * vals[:, 1::2]]
    return vals[:, 0]


def _block_counts_ok(bits: np.ndarray, strict_heavy: bool) -> np.ndarray:
    n_rows, n = bits.shape
    h = n.bit_length() - 1
    result = np.zeros(n_rows, dtype=bool) if strict_heavy else np.ones(n_rows, dtype=bool)
    for k in range(1, h + 1):
        size = 2 ** k
        counts = bits.reshape(n_rows, -1, size).sum(axis=2)
        if strict_heavy:
            result |= ((counts > size // 2) & (counts < size)).any(axis=1)
        else:
            result &= np.isin(counts, (0, size, size // 2)).all(axis=1)
    return result


def balancing_exhaustive(variant: BalancingVariant) -> ExhaustiveReport:
    """
    Evaluate every {0,1} assignment of height <= 4.

    Counts disagreements between acceptance and the dyadic block rule (4-valued
    variant) and accepted assignments holding a strictly heavy block.
    """
    h = variant.height
    if h > EXHAUSTIVE_HEIGHT_LIMIT:
        raise InstanceTooLarge(f"exhaustive checks run up to height {EXHAUSTIVE_HEIGHT_LIMIT}")
    bits = _all_bits(2 ** h)
    accepted = np.isin(root_symbols_all(variant, bits), sorted(variant.accept_set))
    interval = _block_counts_ok(bits, strict_heavy=False)
    heavy = _block_counts_ok(bits, strict_heavy=True)
    return ExhaustiveReport(
        variant=variant.kind.value,
        height=h,
        assignments=len(bits),
        accepted=int(accepted.sum()),
        interval_mismatches=int((accepted != interval).sum()),
        heavy_block_accepted=int((accepted & heavy).sum()),
    )
