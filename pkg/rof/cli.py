"""
Command-line interface for rof.

Usage:
    rof test "(and x0 x1 x2 x3)" 0011 --alg 1 --eps 0.25 --trials 100
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from rof.config import ParameterLedger, load_ledger
from rof.distance import brute_force_distance, distance_report, target_set
from rof.errors import PropertyCheckFailed, RofError
from rof.formula.evaluate import evaluate_symbol
from rof.formula.parser import parse_formula, serialize
from rof.lowerbound.distributions import (
    DistributionKind,
    build_balancing_formula,
    sample_distribution,
)
from rof.lowerbound.experiments import balancing_exhaustive
from rof.lowerbound.gates import (
    BalancingKind,
    BalancingVariant,
    monotonicity_violations,
    symmetry_violations,
    unification_mismatches,
)
from rof.models import Assignment, Formula
from rof.normalize import normalize
from rof.orchestrator import (
    ExperimentConfig,
    check_result,
    lower_bound_scaling,
    query_scaling,
    read_text,
    run_batch,
)
from rof.storage.reports import render, write_report

logger = logging.getLogger("rof")

LOG_FORMAT = "[rof] %(levelname)s %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_trial_options(p: argparse.ArgumentParser, estimate: bool = False) -> None:
    p.add_argument("formula", nargs="?", help="Formula text or path to a formula file")
    p.add_argument("assignment", nargs="?", help="Assignment string or path (e.g. 0110)")
    p.add_argument("--eps", type=float, default=0.25, help="Distance parameter (default: 0.25)")
    p.add_argument("--delta", type=float, default=1 / 3, help="Confidence parameter (default: 1/3)")
    p.add_argument("--k", type=int, default=2, help="Gate arity bound (default: 2)")
    p.add_argument("--trials", type=int, default=1, help="Seeded trials to run (default: 1)")
    p.add_argument("--workers", type=int, default=1, help="Worker processes (default: 1)")
    p.add_argument(
        "--normalize",
        action="store_true",
        help="Normalize the formula into the form the algorithm needs first",
    )
    p.add_argument("--generator", help="Generate the instance from a family instead")
    p.add_argument("--size", type=int, help="Number of variables for --generator")
    p.add_argument(
        "--instance",
        choices=["far", "satisfying"],
        default="far",
        help="Generated assignment kind (default: far)",
    )
    if not estimate:
        p.add_argument("--b", type=int, choices=[0, 1], default=1, help="Target output (default: 1)")


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = _Parser(
        prog="rof",
        description="Property testers and exact distances for read-once formulas",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Normalize to 2-x-basic form
  rof normalize --k 2 "(tbl2 0111 x0 (not x1))"

  # Exact distance to the accept set of a balancing formula
  rof lb build --variant bal4 --height 3 > bal4.rof
  rof distance bal4.rof 10000000 --accept 0,1,P

  # 200 seeded runs of the general tester on a generated far instance
  rof --seed 7 --emit csv test --alg 1 --generator balanced-and-or --size 256 --trials 200

  # Median estimator with constant overrides
  rof --params ledger.json estimate "(and x0 (or x1 x2))" 000 --median --trials 20

  # Query counts against formula size
  rof scaling --alg 3 --generator balanced-and-or --sizes 256,1024,4096 --runs 50

  # Lower-bound experiments
  rof lb indist --queries 0,1,512 --height 10 --mode exact
  rof lb tvscale --heights 6,8,10,12 --query-count 3
""",
    )

    # Global options
    parser.add_argument("--seed", type=int, default=0, help="Master seed (default: 0)")
    parser.add_argument(
        "--emit",
        choices=["json", "csv"],
        default=None,
        help="Report format (default: json for reports, plain text for single values)",
    )
    parser.add_argument("--params", help="JSON file of parameter ledger overrides")
    parser.add_argument("--output", "-o", help="Write the report to this path instead of stdout")
    parser.add_argument(
        "--timings",
        action="store_true",
        help="Include wall time per trial (breaks byte-identical reruns)",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    parser.add_argument("--quiet", "-q", action="store_true", help="Only log errors")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="Normalize a Boolean formula")
    p.add_argument("formula", help="Formula text or path")
    p.add_argument("--k", type=int, default=2, help="Gate arity bound (default: 2)")
    p.add_argument("--basic", action="store_true", help="Produce k-basic (mDNF) form")

    p = sub.add_parser("eval", help="Evaluate a formula on an assignment")
    p.add_argument("formula", help="Formula text or path")
    p.add_argument("assignment", help="Assignment string or path")

    p = sub.add_parser("distance", help="Exact distance to a target output")
    p.add_argument("formula", help="Formula text or path")
    p.add_argument("assignment", help="Assignment string or path")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--target", default=None, help="Target symbol (default: 1)")
    group.add_argument("--accept", default=None, help="Accepted symbols, comma-separated")
    p.add_argument("--brute", action="store_true", help="Cross-check by enumeration")

    p = sub.add_parser("test", help="Run a property tester")
    _add_trial_options(p)
    p.add_argument("--alg", choices=["1", "3"], default="1", help="Tester (default: 1)")

    p = sub.add_parser("estimate", help="Run the distance estimator")
    _add_trial_options(p, estimate=True)
    p.add_argument("--median", action="store_true", help="Median-amplified estimate")

    p = sub.add_parser("batch", help="Run a batch described by a JSON config")
    p.add_argument("config", help="Path to an ExperimentConfig JSON file")

    p = sub.add_parser("scaling", help="Query counts against instance size")
    p.add_argument("--alg", choices=["1", "2", "3", "lb"], default="1")
    p.add_argument("--generator", default="balanced-and-or", help="Formula family")
    p.add_argument("--sizes", type=_int_list, default=[256, 1024], help="Comma-separated sizes")
    p.add_argument("--runs", type=int, default=20, help="Runs per size (default: 20)")
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=1 / 3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--heights", type=_int_list, default=[6, 8, 10, 12], help="Heights for --alg lb")
    p.add_argument("--query-count", type=int, default=3, help="Query set size for --alg lb")
    p.add_argument("--samples", type=int, default=100_000, help="Draws per point for --alg lb")

    lb = sub.add_parser("lb", help="Lower-bound constructions and experiments")
    lb_sub = lb.add_subparsers(dest="lb_command", required=True)

    p = lb_sub.add_parser("build", help="Emit a balancing formula")
    p.add_argument("--variant", default="bal4", help="bal4, bal5 or bal5am")
    p.add_argument("--height", type=int, required=True)

    p = lb_sub.add_parser("sample", help="Draw one assignment from dy or dn")
    p.add_argument("--dist", default="dy", help="dy or dn")
    p.add_argument("--height", type=int, required=True)

    p = lb_sub.add_parser("farness", help="Exact distances of sampled assignments")
    p.add_argument("--variant", default="bal4")
    p.add_argument("--dist", default="dn")
    p.add_argument("--height", type=int, default=8)
    p.add_argument("--trials", type=int, default=100)

    p = lb_sub.add_parser("indist", help="Compare dy and dn on a query set")
    p.add_argument("--queries", type=_int_list, required=True, help="Comma-separated leaf indices")
    p.add_argument("--height", type=int, default=10)
    p.add_argument("--mode", choices=["exact", "tv"], default="exact")
    p.add_argument("--samples", type=int, default=100_000)

    p = lb_sub.add_parser("tvscale", help="Total variation against height")
    p.add_argument("--heights", type=_int_list, default=[6, 8, 10, 12])
    p.add_argument("--query-count", type=int, default=3)
    p.add_argument("--samples", type=int, default=100_000)

    p = lb_sub.add_parser("check", help="Exhaustive gate and formula checks (height <= 4)")
    p.add_argument("--variant", default="bal4")
    p.add_argument("--height", type=int, default=4)

    return parser.parse_args(argv)


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


# ----------------------------- Output -----------------------------

def _emit(
    args: argparse.Namespace,
    rows: List[Dict[str, Any]],
    meta: Optional[Dict[str, Any]] = None,
) -> None:
    if args.output:
        # without --emit the file extension picks the format
        write_report(rows, args.output, args.emit, meta)
    else:
        sys.stdout.write(render(rows, args.emit or "json", meta))


def _emit_value(args: argparse.Namespace, text: str, row: Dict[str, Any]) -> None:
    """Plain text unless a report format was asked for."""
    if args.emit is None and not args.output:
        print(text)
    else:
        _emit(args, [row])


def _load_formula(value: str) -> Formula:
    return parse_formula(read_text(value))


def _load_assignment(value: str, f: Formula) -> Assignment:
    return Assignment.from_string(read_text(value).strip(), f.alphabet)


# ----------------------------- Commands -----------------------------

def cmd_normalize(args: argparse.Namespace, ledger: ParameterLedger) -> int:
    f = _load_formula(args.formula)
    result = normalize(f, args.k, basic=args.basic)
    text = str(result.constant) if result.is_constant else serialize(result.formula)
    _emit_value(args, text, {"formula": text, **result.summary()})
    return 0


def cmd_eval(args: argparse.Namespace, ledger: ParameterLedger) -> int:
    f = _load_formula(args.formula)
    symbol = evaluate_symbol(f, _load_assignment(args.assignment, f))
    _emit_value(args, symbol, {"value": symbol})
    return 0


def cmd_distance(args: argparse.Namespace, ledger: ParameterLedger) -> int:
    f = _load_formula(args.formula)
    a = _load_assignment(args.assignment, f)
    target = f.alphabet.parse_set(args.accept) if args.accept else (args.target or "1")
    report = distance_report(f, a, target)
    names = ",".join(f.alphabet.symbol(s) for s in sorted(target_set(f, target)))
    row: Dict[str, Any] = {
        "target": names,
        "cost": report.cost,
        "size": report.size,
        "farness": None if report.farness is None else f"{report.farness.numerator}/{report.farness.denominator}",
    }
    if args.brute:
        brute = brute_force_distance(f, a, target)
        row["brute_force"] = brute
        if brute != report.cost:
            _emit(args, [row])
            raise PropertyCheckFailed(f"dynamic program gives {report.cost}, enumeration {brute}")
    text = "unreachable" if report.cost is None else f"{report.cost} ({row['farness']})"
    _emit_value(args, text, row)
    return 0


def _trial_config(args: argparse.Namespace, task: str, algorithm: str) -> ExperimentConfig:
    return ExperimentConfig(
        task=task,
        algorithm=algorithm,
        formula=args.formula,
        assignment=args.assignment,
        generator=args.generator,
        size=args.size,
        instance=args.instance,
        normalize=args.normalize,
        eps=args.eps,
        delta=args.delta,
        k=args.k,
        b=getattr(args, "b", 1),
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
    )


def _run_config(args: argparse.Namespace, config: ExperimentConfig, ledger: ParameterLedger) -> int:
    """Run a batch, write its report, then apply its pass/fail checks."""
    result = run_batch(config, ledger, check=False)
    meta = {"config": config.model_dump(), "ledger": config.ledger(ledger).model_dump()}
    _emit(args, result.rows(args.timings), meta)
    check_result(config, result)
    return 0


def cmd_test(args: argparse.Namespace, ledger: ParameterLedger) -> int:
    return _run_config(args, _trial_config(args, "test", f"alg{args.alg}"), ledger)


def cmd_estimate(args: argparse.Namespace, ledger: ParameterLedger) -> int:
    algorithm = "alg2-median" if args.median else "alg2"
    return _run_config(args, _trial_config(args, "estimate", algorithm), ledger)


def cmd_batch(args: argparse.Namespace, ledger: ParameterLedger) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    data.setdefault("seed", args.seed)
    return _run_config(args, ExperimentConfig(**data), ledger)


def cmd_scaling(args: argparse.Namespace, ledger: ParameterLedger) -> int:
    if args.alg == "lb":
        df = lower_bound_scaling(args.heights, args.query_count, args.samples, args.seed)
    else:
        config = ExperimentConfig(
            task="estimate" if args.alg == "2" else "test",
            algorithm=f"alg{args.alg}",
            generator=args.generator,
            size=args.sizes[0] if args.sizes else 4,
            eps=args.eps,
            delta=args.delta,
            k=args.k,
            seed=args.seed,
        )
        df = query_scaling(config, args.sizes, args.generator, args.runs, ledger)
    _emit(args, df.to_dict(orient="records"))
    return 0


def cmd_lb(args: argparse.Namespace, ledger: ParameterLedger) -> int:
    sub = args.lb_command
    if sub == "build":
        variant = BalancingVariant(BalancingKind.from_text(args.variant), args.height)
        text = serialize(build_balancing_formula(variant))
        _emit_value(args, text, {"variant": variant.kind.value, "height": args.height, "formula": text})
        return 0
    if sub == "sample":
        which = DistributionKind.from_text(args.dist)
        sample = sample_distribution(which, args.height, random.Random(args.seed))
        bits = "".join(str(b) for b in sample.bits)
        _emit_value(args, bits, {"distribution": which.value, "k": sample.k, "assignment": bits})
        return 0
    if sub == "check":
        return _lb_check(args)

    if sub == "farness":
        config = ExperimentConfig(
            task="lb-farness",
            variant=args.variant,
            distribution=args.dist,
            height=args.height,
            trials=args.trials,
            seed=args.seed,
        )
    elif sub == "indist":
        config = ExperimentConfig(
            task="lb-indist",
            queries=args.queries,
            height=args.height,
            mode=args.mode,
            samples=args.samples,
            seed=args.seed,
        )
    else:
        df = lower_bound_scaling(args.heights, args.query_count, args.samples, args.seed)
        _emit(args, df.to_dict(orient="records"))
        return 0
    return _run_config(args, config, ledger)


def _lb_check(args: argparse.Namespace) -> int:
    kind = BalancingKind.from_text(args.variant)
    report = balancing_exhaustive(BalancingVariant(kind, args.height))
    row: Dict[str, Any] = {
        **report.__dict__,
        "symmetry_violations": len(symmetry_violations(kind)),
        "monotonicity_violations": len(monotonicity_violations(kind)),
        "unification_mismatches": len(unification_mismatches()),
    }
    _emit(args, [row])
    if kind is BalancingKind.FOUR_VALUED and report.interval_mismatches:
        raise PropertyCheckFailed(f"{report.interval_mismatches} assignments break the block rule")
    if kind is BalancingKind.FIVE_MONOTONE and report.heavy_block_accepted:
        raise PropertyCheckFailed(f"{report.heavy_block_accepted} heavy-block assignments accepted")
    if row["symmetry_violations"] or row["unification_mismatches"]:
        raise PropertyCheckFailed("gate table check failed")
    return 0


COMMANDS = {
    "normalize": cmd_normalize,
    "eval": cmd_eval,
    "distance": cmd_distance,
    "test": cmd_test,
    "estimate": cmd_estimate,
    "batch": cmd_batch,
    "scaling": cmd_scaling,
    "lb": cmd_lb,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    configure_logging(args.verbose, args.quiet)

    try:
        ledger = load_ledger(args.params)
        return COMMANDS[args.command](args, ledger)

    except KeyboardInterrupt:
        if not args.quiet:
            print("\nInterrupted by user", file=sys.stderr)
        return 130

    except PropertyCheckFailed as e:
        print(f"Check failed: {e}", file=sys.stderr)
        return 2

    except (RofError, ValidationError, ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        if args.verbose:
            import traceback
            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
