"""Shared fixtures: a ledger with small caps and seeded generators."""

import random

import pytest

from rof.config import ParameterLedger, build_ledger

SMALL_CAP = 4


@pytest.fixture(scope="session")
def small_ledger() -> ParameterLedger:
    """Caps of 4 keep query counts small and easy to predict."""
    return build_ledger(
        {
            "max_and_samples": SMALL_CAP,
            "max_estimate_samples": SMALL_CAP,
            "max_or_repeats": SMALL_CAP,
            "max_median_runs": 5,
        }
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1234)
