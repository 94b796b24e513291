"""Command-line front end: solve a scenario, reproduce a reference table, sweep.

Exit codes: 0 success, 2 validation error, 3 numerical error, 4 reproduction
check failure.  All randomized commands accept --seed; when omitted a seed is
generated and printed so the run can be repeated exactly.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import secrets
import sys

from . import level_k, tables
from .errors import (InfeasibleScenarioError, NumericalError, SealedBidError,
                     ValidationError)
from .risk import RiskProfile
from .scenario import CLAMP_MODES, CLAMP_PAPER, CLAMP_STRICT, parse_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_CHECK_FAILED = 4

CONCEPT_CHOICES = ("non-strategic", "level-1", "level-2", "level-3", "average")


def _fresh_seed() -> int:
    return secrets.randbits(32)


def _load_scenario(path: str, clamp: str | None):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ValidationError("cannot read scenario file %s: %s" % (path, exc)) from exc
    scenario = parse_scenario(text)
    if clamp is not None:
        mode = CLAMP_PAPER if clamp == "paper" else CLAMP_STRICT
        scenario = dataclasses.replace(scenario, clamp_mode=mode)
    return scenario


def _parse_weights(text: str) -> dict:
    weights = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise ValidationError("weights must look like concept=value, got %r" % part)
        key, _, raw = part.partition("=")
        try:
            weights[key.strip()] = float(raw)
        except ValueError as exc:
            raise ValidationError("bad weight value %r for %r" % (raw, key)) from exc
    if not weights:
        raise ValidationError("--weights is empty")
    return weights


def _outcome_record(concept, outcome, seed, n, scenario) -> dict:
    record = {
        "concept": concept,
        "seed": seed,
        "n": n,
        "clamp_mode": scenario.clamp_mode,
        "expected_bid": outcome.bid.mean,
        "bid_std_error": outcome.bid.std_error,
        "win_prob": outcome.win_prob,
        "expected_utility": outcome.expected_utility,
        "mean_effective_risk": outcome.effective_risk.mean,
        "domain": [outcome.domain.lower, outcome.domain.upper],
        "diagnostics": outcome.diagnostics,
    }
    return record


def _print_outcome(concept, outcome, seed, n, out):
    print("concept: %s" % concept, file=out)
    print("seed: %d  draws: %d" % (seed, n), file=out)
    print("expected bid: %.2f (std error %.4f)" % (outcome.bid.mean, outcome.bid.std_error),
          file=out)
    print("win probability at expected bid: %.3f" % outcome.win_prob, file=out)
    print("expected utility at expected bid: %.2f" % outcome.expected_utility, file=out)
    print("mean effective risk: %.4f" % outcome.effective_risk.mean, file=out)
    if "q" in outcome.diagnostics:
        print("opponent bid fraction q: %.4f" % outcome.diagnostics["q"], file=out)


def cmd_solve(args) -> int:
    scenario = _load_scenario(args.scenario, args.clamp)
    seed = args.seed if args.seed is not None else scenario.mc.seed
    if seed is None:
        seed = _fresh_seed()
        print("generated seed: %d" % seed, file=sys.stderr)
    n = args.n if args.n is not None else scenario.mc.n

    if args.concept == "average":
        if not args.weights:
            raise ValidationError("--concept average requires --weights")
        weights = _parse_weights(args.weights)
        results, records = {}, {}
        for concept in weights:
            outcome = level_k.solve_concept(scenario, concept, n=n, seed=seed,
                                            threads=args.threads)
            results[concept] = outcome.bid.mean
            records[concept] = _outcome_record(concept, outcome, seed, n, scenario)
        averaged = level_k.model_average(results, weights)
        print("concept: average over %s" % ", ".join(sorted(weights)))
        print("seed: %d  draws: %d" % (seed, n))
        for concept in sorted(results):
            print("  %s: expected bid %.2f (weight %g)"
                  % (concept, results[concept], weights[concept]))
        print("model-averaged expected bid: %.2f" % averaged)
        record = {"concept": "average", "weights": weights, "seed": seed, "n": n,
                  "expected_bid": averaged, "components": records}
    else:
        outcome = level_k.solve_concept(scenario, args.concept, n=n, seed=seed,
                                        threads=args.threads)
        _print_outcome(args.concept, outcome, seed, n, sys.stdout)
        record = _outcome_record(args.concept, outcome, seed, n, scenario)

    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(record, handle, indent=2, sort_keys=True)
            handle.write("\n")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    seed = args.seed
    if seed is None:
        seed = _fresh_seed()
        print("generated seed: %d" % seed, file=sys.stderr)
    table = tables.build_table(args.table, seed=seed, n=args.n, threads=args.threads)
    sys.stdout.write(table.to_csv())
    if not args.check:
        return EXIT_OK
    failures, known = tables.check_table(table)
    for cell in known:
        print("KNOWN DISCREPANCY table %d row %s col %.2f: got %.4f, published %.4f "
              "(%s)" % (table.table_id, cell.row, cell.col, cell.got, cell.expected,
                        cell.reason), file=sys.stderr)
    if failures:
        for cell in failures:
            print("CHECK FAIL table %d row %s col %.2f: got %.4f, expected %.4f "
                  "(tolerance %g)" % (table.table_id, cell.row, cell.col, cell.got,
                                      cell.expected, cell.tolerance), file=sys.stderr)
        return EXIT_CHECK_FAILED
    print("CHECK OK table %d: every cell within tolerance (%d known discrepancies "
          "skipped)" % (table.table_id, len(known)), file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _load_scenario(args.scenario, args.clamp)
    seed = args.seed if args.seed is not None else scenario.mc.seed
    if seed is None:
        seed = _fresh_seed()
        print("generated seed: %d" % seed, file=sys.stderr)
    n = args.n if args.n is not None else scenario.mc.n
    if args.steps < 2:
        raise ValidationError("--steps must be >= 2, got %d" % args.steps)
    if args.param == "q-override" and args.concept != "level-2":
        raise ValidationError("q-override sweeps require --concept level-2")

    values = [args.start + i * (args.stop - args.start) / (args.steps - 1)
              for i in range(args.steps)]
    print("%s,expected_bid,win_prob,expected_utility" % args.param)
    for value in values:
        point = scenario
        q_override = None
        if args.param == "r_B":
            point = dataclasses.replace(
                scenario, bidder=dataclasses.replace(scenario.bidder,
                                                     risk=RiskProfile(value)))
        elif args.param == "w_B":
            point = dataclasses.replace(
                scenario, bidder=dataclasses.replace(scenario.bidder, wealth=value))
        elif args.param == "tau":
            point = dataclasses.replace(scenario, reserve=value)
        else:
            q_override = value
        issues = _revalidate(point)
        if issues:
            raise ValidationError("sweep point %s=%g invalid: %s"
                                  % (args.param, value, issues))
        outcome = level_k.solve_concept(point, args.concept, n=n, seed=seed,
                                        threads=args.threads, q_override=q_override)
        print("%.6g,%.2f,%.3f,%.2f" % (value, outcome.bid.mean, outcome.win_prob,
                                       outcome.expected_utility))
    return EXIT_OK


def _revalidate(scenario):
    from .scenario import validate
    issues = validate(scenario)
    return "; ".join("%s: %s" % pair for pair in issues) if issues else ""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sealedbid",
        description="Optimal bids in first-price sealed-bid auctions via "
                    "adversarial risk analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one scenario under a solution concept")
    solve.add_argument("--scenario", required=True, help="path to a scenario JSON file")
    solve.add_argument("--concept", default="non-strategic", choices=CONCEPT_CHOICES)
    solve.add_argument("--weights", help="concept=weight,... (for --concept average)")
    solve.add_argument("--seed", type=int)
    solve.add_argument("--n", type=int, help="Monte Carlo draw count")
    solve.add_argument("--clamp", choices=("paper", "strict"))
    solve.add_argument("--out", help="write a JSON result record here")
    solve.add_argument("--threads", type=int, default=1)
    solve.set_defaults(func=cmd_solve)

    reproduce = sub.add_parser("reproduce", help="rebuild a reference table as CSV")
    reproduce.add_argument("--table", type=int, required=True, choices=tables.TABLE_IDS)
    reproduce.add_argument("--seed", type=int)
    reproduce.add_argument("--n", type=int, default=tables.DEFAULT_N)
    reproduce.add_argument("--check", action="store_true",
                           help="compare against the published reference values")
    reproduce.add_argument("--threads", type=int, default=1)
    reproduce.set_defaults(func=cmd_reproduce)

    sweep = sub.add_parser("sweep", help="sweep one parameter and emit CSV")
    sweep.add_argument("--scenario", required=True)
    sweep.add_argument("--param", required=True,
                       choices=("r_B", "w_B", "tau", "q-override"))
    sweep.add_argument("--from", dest="start", type=float, required=True)
    sweep.add_argument("--to", dest="stop", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)
    sweep.add_argument("--concept", default="non-strategic", choices=CONCEPT_CHOICES[:4])
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--n", type=int)
    sweep.add_argument("--clamp", choices=("paper", "strict"))
    sweep.add_argument("--threads", type=int, default=1)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, InfeasibleScenarioError) as exc:
        print("validation error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print("numerical error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL
    except SealedBidError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
