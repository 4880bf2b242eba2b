"""
Parameter ledger for the randomized testers.

Every sample count, repetition count and distance schedule the testers use is
derived here. Coefficients default to the derived constants; the ``max_*`` caps
bound the sample counts (None restores the uncapped count).

Environment variables with prefix ROF_ override defaults, e.g. ROF_MAX_AND_SAMPLES=32.
A JSON params file overrides both.
"""

from __future__ import annotations

import json
import math
import os
import sys
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Optional

from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings

from rof.errors import ConfigError


def _ceil_count(x: float) -> int:
    if not math.isfinite(x) or x >= sys.maxsize:
        return sys.maxsize
    return max(1, math.ceil(x))


def _capped(raw: int, cap: Optional[int]) -> int:
    return raw if cap is None else min(raw, cap)


class ParameterLedger(BaseSettings):
    """Constants behind the testers' sample and repetition counts."""

    # alg1 / alg2 schedules
    genand_coeff: float = Field(64.0, gt=0)
    estimate_coeff: float = Field(1000.0, gt=0)

    # alg3 and critical vertices
    localdist_ratio: float = Field(2 / 3, gt=0)
    twicelocaldist_ratio: float = Field(4 / 3, gt=1)
    mdepth_coeff: float = Field(3.0, gt=0)
    hitprob_ratio: float = Field(0.25, gt=0)
    hhitprob_ratio: float = Field(0.125, gt=0)
    relatives_multiplier: float = Field(3.0, gt=0)
    orconst_coeff: float = Field(6.0, gt=0)
    reps_coeff: float = Field(16.0, gt=0)

    # Median amplification of the estimator
    median_coeff: float = Field(48.0, gt=0)

    # Caps on the formula-derived counts (None = uncapped)
    max_and_samples: Optional[int] = Field(16, gt=0)
    max_estimate_samples: Optional[int] = Field(64, gt=0)
    max_or_repeats: Optional[int] = Field(8, gt=0)
    max_median_runs: Optional[int] = Field(None, gt=0)

    @field_validator(
        "genand_coeff",
        "estimate_coeff",
        "localdist_ratio",
        "twicelocaldist_ratio",
        "mdepth_coeff",
        "hitprob_ratio",
        "hhitprob_ratio",
        "relatives_multiplier",
        "orconst_coeff",
        "reps_coeff",
        "median_coeff",
        mode="before",
    )
    @classmethod
    def parse_fraction(cls, v: Any) -> Any:
        """Accept "2/3" style strings next to plain numbers."""
        if isinstance(v, str) and "/" in v:
            try:
                return float(Fraction(v.strip()))
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"not a fraction: {v!r}") from None
        return v

    @field_validator(
        "max_and_samples", "max_estimate_samples", "max_or_repeats", "max_median_runs",
        mode="before",
    )
    @classmethod
    def parse_cap(cls, v: Any) -> Any:
        if isinstance(v, str) and v.strip().lower() in ("", "none", "null"):
            return None
        return v

    class Config:
        env_prefix = "ROF_"
        extra = "ignore"

    # ----------------------------- schedules -----------------------------

    @staticmethod
    def _shrink(eps: float, k: int) -> float:
        return (4 * k / eps) ** (-k)

    def slightlysmall(self, eps: float, k: int) -> float:
        return eps * (1 - self._shrink(eps, k) / 8)

    def recurseps(self, eps: float, k: int) -> float:
        return eps * (1 + self._shrink(eps, k))

    def slightlybig(self, eps: float) -> float:
        return eps / (1 - eps) if eps < 1 else math.inf

    def genand(self, eps: float, delta: float, k: int) -> int:
        return _ceil_count(
            self.genand_coeff / eps * (4 * k / eps) ** (2 * k) * math.log(2 / delta)
        )

    def and_samples(self, eps: float, delta: float, k: int) -> int:
        return _capped(self.genand(eps, delta, k), self.max_and_samples)

    def estimate_samples_raw(self, eps: float, delta: float, k: int) -> int:
        return _ceil_count(
            self.estimate_coeff * eps ** (-2 * k - 2) * (4 * k) ** (2 * k) * math.log(1 / delta)
        )

    def estimate_samples(self, eps: float, delta: float, k: int) -> int:
        return _capped(self.estimate_samples_raw(eps, delta, k), self.max_estimate_samples)

    def estimate_and_delta(self, eps: float, delta: float, k: int) -> float:
        return delta * eps * self._shrink(eps, k) / 16

    def estimate_heavy_delta(self, eps: float, delta: float, k: int) -> float:
        return delta / max(k, 1 / eps)

    def localdist(self, eps: float) -> float:
        return self.localdist_ratio * eps

    def twicelocaldist(self, eps: float) -> float:
        return self.twicelocaldist_ratio * eps

    def mdepth(self, eps: float) -> int:
        return math.ceil(self.mdepth_coeff / eps * math.log(3 / (2 * eps)))

    def numrel(self, eps: float) -> float:
        return eps ** (-2) * math.log2(2 / eps)

    def relatives_bound(self, eps: float) -> float:
        return self.relatives_multiplier * self.numrel(eps)

    def hitprob(self, eps: float) -> float:
        return self.hitprob_ratio * eps

    def hhitprob(self, eps: float) -> float:
        return self.hhitprob_ratio * eps

    def orconst(self, eps: float) -> int:
        return _ceil_count(self.orconst_coeff / eps * math.log(6 * self.numrel(eps)))

    def or_repeats(self, eps: float) -> int:
        return _capped(self.orconst(eps), self.max_or_repeats)

    def reps(self, eps: float) -> int:
        return _ceil_count(self.reps_coeff / eps)

    def median_runs_raw(self, delta: float) -> int:
        return _ceil_count(self.median_coeff * math.log(1 / delta))

    def median_runs(self, delta: float) -> int:
        return _capped(self.median_runs_raw(delta), self.max_median_runs)

    def alg1_depth_bound(self, eps: float, k: int) -> float:
        return 16 * (4 * k / eps) ** k * math.log(1 / eps)

    def alg2_depth_bound(self, eps: float, k: int) -> float:
        return 2 * (4 * k / eps) ** k * math.log(1 / eps)

    # ----------------------------- helpers -----------------------------

    @property
    def localdist_fraction(self) -> Fraction:
        return Fraction(self.localdist_ratio).limit_denominator(10**6)

    def with_overrides(self, **overrides: Any) -> "ParameterLedger":
        return build_ledger({**self.model_dump(), **overrides})

    def uncapped(self) -> "ParameterLedger":
        return self.with_overrides(
            max_and_samples=None,
            max_estimate_samples=None,
            max_or_repeats=None,
            max_median_runs=None,
        )


def build_ledger(values: Dict[str, Any]) -> ParameterLedger:
    """Validate ``values`` into a ledger; unknown keys are rejected."""
    unknown = sorted(set(values) - set(ParameterLedger.model_fields))
    if unknown:
        raise ConfigError(f"unknown ledger parameters: {', '.join(unknown)}")
    try:
        return ParameterLedger(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid ledger parameters: {e}") from None


def load_ledger(params_path: Optional[str] = None) -> ParameterLedger:
    """Environment defaults, overridden by a JSON object file when given."""
    if not params_path:
        return get_ledger()
    if not os.path.exists(params_path):
        raise ConfigError(f"params file not found: {params_path}")
    try:
        with open(params_path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"params file {params_path} is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError("params file must hold a JSON object")
    return build_ledger(data)


@lru_cache
def get_ledger() -> ParameterLedger:
    """Cached ledger built from defaults and the environment."""
    return ParameterLedger()
