"""
Batch runner for seeded trials and scaling sweeps.

Ties together instance loading or generation, the tester registry, the exact
distance oracle and report assembly into run_batch() and query_scaling().
"""

from __future__ import annotations

import logging
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, Field, field_validator, model_validator

from rof.config import ParameterLedger, build_ledger, get_ledger
from rof.distance import farness
from rof.errors import ConfigError, PropertyCheckFailed
from rof.formula.oracle import CountingOracle
from rof.formula.parser import parse_formula
from rof.generators import far_assignment, make_family, satisfying_assignment, trial_seed
from rof.lowerbound.distributions import DistributionKind
from rof.lowerbound.experiments import (
    farness_experiment,
    indistinguishability_experiment,
    tv_scaling,
)
from rof.lowerbound.gates import BalancingKind
from rof.models import Assignment, Formula, TestParams, TrialReport, format_fraction
from rof.normalize import to_k_basic, to_kx_basic
from rof.storage.reports import rows_to_frame
from rof.testers import TESTERS, get_tester

logger = logging.getLogger(__name__)

_ALGORITHM_ALIASES = {"1": "alg1", "2": "alg2", "3": "alg3", "2m": "alg2-median"}

Task = Literal["test", "estimate", "lb-farness", "lb-indist"]


def algorithm_name(text: str) -> str:
    name = _ALGORITHM_ALIASES.get(str(text).strip().lower(), str(text).strip().lower())
    if name not in TESTERS:
        raise ConfigError(f"unknown algorithm {text!r}; choose from {sorted(TESTERS)}")
    return name


def read_text(value: str) -> str:
    """Contents of ``value`` when it names a file, else ``value`` itself."""
    if os.path.isfile(value):
        with open(value, "r", encoding="utf-8") as fh:
            return fh.read()
    return value


# ----------------------------- Config -----------------------------

class ExperimentConfig(BaseModel):
    """One batch: what to run, on which instance, how many seeded trials."""

    task: Task = "test"
    algorithm: str = "alg1"

    # Instance: a formula (inline or path) with an assignment, or a generator.
    formula: Optional[str] = None
    assignment: Optional[str] = None
    generator: Optional[str] = None
    size: Optional[int] = Field(None, ge=1)
    instance: Literal["far", "satisfying"] = "far"
    far_shortcuts: bool = True
    normalize: bool = False

    eps: float = 0.25
    delta: float = 1 / 3
    k: int = Field(2, ge=2)
    b: int = 1

    trials: int = Field(100, ge=1)
    seed: int = 0
    workers: int = Field(1, ge=1)
    compute_farness: bool = True

    # Lower-bound experiments
    variant: str = "bal4"
    distribution: str = "dn"
    height: int = Field(8, ge=2)
    queries: List[int] = Field(default_factory=list)
    mode: Literal["exact", "tv"] = "exact"
    samples: int = Field(100_000, ge=1)

    # Pass/fail thresholds on the aggregate (exit code 2 when missed)
    min_accept_rate: Optional[float] = Field(None, ge=0, le=1)
    min_reject_rate: Optional[float] = Field(None, ge=0, le=1)

    # Ledger overrides for this batch
    params: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("eps")
    @classmethod
    def check_eps(cls, v: float) -> float:
        if not 0 < v <= 1:
            raise ValueError("eps must lie in (0, 1]")
        return v

    @field_validator("delta")
    @classmethod
    def check_delta(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("delta must lie in (0, 1)")
        return v

    @field_validator("b")
    @classmethod
    def check_b(cls, v: int) -> int:
        if v not in (0, 1):
            raise ValueError("b must be 0 or 1")
        return v

    @field_validator("algorithm", mode="before")
    @classmethod
    def check_algorithm(cls, v: Any) -> str:
        return algorithm_name(str(v))

    @model_validator(mode="after")
    def check_instance(self) -> "ExperimentConfig":
        if self.task in ("test", "estimate"):
            if self.formula is None and self.generator is None:
                raise ValueError("a formula or a generator is required")
            if self.generator is not None and self.size is None:
                raise ValueError("a generator needs a size")
        return self

    def ledger(self, base: Optional[ParameterLedger] = None) -> ParameterLedger:
        base = base or get_ledger()
        if not self.params:
            return base
        return build_ledger({**base.model_dump(), **self.params})

    def test_params(self) -> TestParams:
        return TestParams(self.eps, self.delta, self.k, self.b)


# ----------------------------- Trials -----------------------------

@dataclass(frozen=True)
class TrialJob:
    """Everything one trial needs; picklable for the process pool."""
    algorithm: str
    ledger: ParameterLedger
    formula: Formula
    assignment: Assignment
    params: TestParams
    index: int
    seed: int
    true_farness: Optional[Fraction] = None


def run_trial(job: TrialJob) -> TrialReport:
    tester = get_tester(job.algorithm, job.ledger)
    oracle = CountingOracle(job.assignment)
    rng = random.Random(job.seed)
    started = time.perf_counter()
    outcome = tester.run(job.formula, job.params, oracle, rng)
    elapsed = time.perf_counter() - started
    logger.debug(
        "trial %d: %s queries=%d depth=%d",
        job.index, outcome.verdict_text or outcome.eta, outcome.queries, outcome.depth,
    )
    return TrialReport(
        index=job.index,
        seed=job.seed,
        algorithm=job.algorithm,
        eps=job.params.eps,
        delta=job.params.delta,
        queries=outcome.queries,
        depth=outcome.depth,
        verdict=outcome.verdict_text,
        eta=outcome.eta,
        true_farness=job.true_farness,
        wall_time=elapsed,
    )


def prepare_formula(f: Formula, algorithm: str, k: int, normalize: bool) -> Formula:
    """Optionally normalize into the form ``algorithm`` needs, then validate it."""
    if normalize:
        f = to_k_basic(f, k) if algorithm.startswith("alg2") else to_kx_basic(f, k)
    return get_tester(algorithm, get_ledger()).prepare(f, k)


def load_instance(config: ExperimentConfig) -> tuple[Formula, Assignment]:
    """Parse or generate the formula and its assignment."""
    target = str(config.b)
    if config.generator is not None:
        rng = random.Random(trial_seed(config.seed, -1))
        f = make_family(config.generator, rng, config.size, config.k)  # type: ignore[arg-type]
        if config.instance == "far":
            a = far_assignment(f, config.eps, rng, target, shortcuts=config.far_shortcuts)
        else:
            a = satisfying_assignment(f, rng, target)
        return f, a
    f = parse_formula(read_text(config.formula))  # type: ignore[arg-type]
    if config.assignment is None:
        raise ConfigError("an assignment is required with an explicit formula")
    a = Assignment.from_string(read_text(config.assignment).strip(), f.alphabet)
    return f, a


@dataclass
class BatchResult:
    reports: List[TrialReport] = field(default_factory=list)
    aggregate: Dict[str, Any] = field(default_factory=dict)
    extra_rows: List[Dict[str, Any]] = field(default_factory=list)

    def rows(self, timings: bool = False) -> List[Dict[str, Any]]:
        rows = [r.to_row(timings) for r in self.reports] + self.extra_rows
        if self.aggregate:
            rows.append(self.aggregate)
        return rows


def aggregate_rows(rows: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Accept/reject rates, query and depth statistics over per-trial rows."""
    df = rows_to_frame(rows)
    agg: Dict[str, Any] = {"trial": "aggregate", "trials": int(len(df))}
    if df["verdict"].notna().any():
        agg["accept_rate"] = float((df["verdict"] == "accept").mean())
        agg["reject_rate"] = float((df["verdict"] == "reject").mean())
    if df["eta"].notna().any():
        agg["mean_eta"] = float(df["eta"].mean())
    agg["mean_queries"] = float(df["queries"].mean())
    agg["max_queries"] = int(df["queries"].max())
    agg["max_depth"] = int(df["depth"].max())
    farness_values = df["true_farness"].dropna().unique()
    agg["true_farness"] = farness_values[0] if len(farness_values) else None
    return agg


def check_result(config: ExperimentConfig, result: "BatchResult") -> None:
    """Raise PropertyCheckFailed when the batch misses its expected property."""
    agg = result.aggregate
    if config.task in ("test", "estimate"):
        if config.min_accept_rate is not None and agg.get("accept_rate", 0.0) < config.min_accept_rate:
            raise PropertyCheckFailed(
                f"accept rate {agg.get('accept_rate')} below {config.min_accept_rate}"
            )
        if config.min_reject_rate is not None and agg.get("reject_rate", 0.0) < config.min_reject_rate:
            raise PropertyCheckFailed(
                f"reject rate {agg.get('reject_rate')} below {config.min_reject_rate}"
            )
    elif config.task == "lb-farness":
        kind = BalancingKind.from_text(config.variant)
        which = DistributionKind.from_text(config.distribution)
        if which is DistributionKind.YES and agg["accepted_fraction"] < 1.0:
            raise PropertyCheckFailed("a yes-sample was rejected")
        if kind is BalancingKind.FOUR_VALUED and which is DistributionKind.NO:
            if agg["min_distance"] < 2 ** config.height // 4:
                raise PropertyCheckFailed(f"a no-sample is closer than 2^h/4: {agg['min_distance']}")
    elif config.task == "lb-indist" and agg.get("identical") is False:
        raise PropertyCheckFailed(f"conditional laws differ at levels {agg['mismatched_levels']}")


def run_trials(
    config: ExperimentConfig,
    f: Formula,
    a: Assignment,
    ledger: ParameterLedger,
) -> List[TrialReport]:
    params = config.test_params()
    prepared = prepare_formula(f, config.algorithm, config.k, config.normalize)
    true_farness = None
    if config.compute_farness:
        true_farness = farness(prepared, a, str(config.b))
    jobs = [
        TrialJob(
            algorithm=config.algorithm,
            ledger=ledger,
            formula=prepared,
            assignment=a,
            params=params,
            index=i,
            seed=trial_seed(config.seed, i),
            true_farness=true_farness,
        )
        for i in range(config.trials)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(run_trial, jobs))
    return [run_trial(job) for job in jobs]


def run_batch(
    config: ExperimentConfig,
    ledger: Optional[ParameterLedger] = None,
    check: bool = True,
) -> BatchResult:
    """
    Run every trial of ``config``; identical configs give identical reports.

    Raises PropertyCheckFailed when ``check`` is set and the batch misses its
    expected property.
    """
    ledger = config.ledger(ledger)
    logger.info("batch %s/%s: %d trials, seed %d", config.task, config.algorithm, config.trials, config.seed)

    if config.task == "lb-farness":
        result = _run_farness(config)
    elif config.task == "lb-indist":
        result = _run_indist(config)
    else:
        if config.task == "estimate" and not config.algorithm.startswith("alg2"):
            raise ConfigError("the estimate task needs alg2 or alg2-median")
        if config.task == "test" and config.algorithm.startswith("alg2"):
            raise ConfigError("the test task needs alg1 or alg3")
        f, a = load_instance(config)
        reports = run_trials(config, f, a, ledger)
        result = BatchResult(reports=reports)
        result.aggregate = aggregate_rows([r.to_row() for r in reports])
    logger.info("batch done: %s", result.aggregate)
    if check:
        check_result(config, result)
    return result


def _run_farness(config: ExperimentConfig) -> BatchResult:
    kind = BalancingKind.from_text(config.variant)
    which = DistributionKind.from_text(config.distribution)
    report = farness_experiment(kind, which, config.height, config.trials, config.seed)
    result = BatchResult(aggregate={"trial": "aggregate", **report.to_row()})
    result.extra_rows = [
        {"trial": i, "distance": d, "farness": format_fraction(Fraction(d, 2 ** config.height))}
        for i, d in enumerate(report.distances)
    ]
    return result


def _run_indist(config: ExperimentConfig) -> BatchResult:
    if not config.queries:
        raise ConfigError("the lb-indist task needs a query list")
    report = indistinguishability_experiment(
        config.queries, config.height, config.mode, config.samples, config.seed
    )
    return BatchResult(aggregate={"trial": "aggregate", **report.to_row()})


# ----------------------------- Scaling -----------------------------

def query_scaling(
    config: ExperimentConfig,
    sizes: Sequence[int],
    generator: str,
    runs: int,
    ledger: Optional[ParameterLedger] = None,
) -> pd.DataFrame:
    """
    Max/mean queries per size on a generated family with a verified far input.

    Each size gets its own instance seed; trials reuse the batch seeding.
    """
    ledger = config.ledger(ledger)
    rows: List[Dict[str, Any]] = []
    for size in sizes:
        rng = random.Random(trial_seed(config.seed, size))
        f = make_family(generator, rng, size, config.k)
        a = far_assignment(f, config.eps, rng, str(config.b), shortcuts=config.far_shortcuts)
        per_size = config.model_copy(update={"trials": runs, "generator": generator, "size": size})
        reports = run_trials(per_size, f, a, ledger)
        df = pd.DataFrame([r.to_row() for r in reports])
        row: Dict[str, Any] = {
            "size": size,
            "vertices": len(f),
            "depth": max(r.depth for r in reports),
            "true_farness": format_fraction(reports[0].true_farness),
            "max_queries": int(df["queries"].max()),
            "mean_queries": float(df["queries"].mean()),
        }
        if df["verdict"].notna().any():
            row["reject_rate"] = float((df["verdict"] == "reject").mean())
        else:
            row["mean_eta"] = float(df["eta"].mean())
        logger.info("scaling size %d: max queries %d", size, row["max_queries"])
        rows.append(row)
    return pd.DataFrame(rows)


def lower_bound_scaling(
    heights: Sequence[int],
    query_count: int,
    samples: int,
    seed: int = 0,
) -> pd.DataFrame:
    """Empirical and exact total variation per height for one query set."""
    reports = tv_scaling(heights, query_count, samples, seed)
    return pd.DataFrame(
        [
            {
                "height": r.height,
                "queries": ",".join(str(q) for q in r.queries),
                "tv": r.tv,
                "ci_low": r.ci_low,
                "ci_high": r.ci_high,
                "exact_tv": r.exact_tv,
                "tv_bound": r.tv_bound,
            }
            for r in reports
        ]
    )
