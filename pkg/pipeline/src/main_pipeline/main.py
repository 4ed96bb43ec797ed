"""
Harmonic Verification Harness: Command-Line Entry Point
--------------------------------------------------------

This script runs one verification command over a test matrix and writes its
artifacts to <out>/<command>/: rows.csv (one row per checked inequality
instance), report.json (per-id summary, flagged rows, task timings) and
plotdata/<inequality_id>.csv.

Pipeline Steps:
1. Read and validate the test-matrix configuration (exit 2 on any error)
2. Build the shared context: operators, approximation to the identity, weights, inputs
3. Evaluate the command's tasks in parallel and collect the rows in task order
4. Save rows, report, plot data and any sparse families
5. Apply the assertions: exact contracts and frozen golden ratio caps (exit 1 on
   failure, and on a checking run with no golden file for the config)
6. Print a preview of the per-id summary

`report` skips steps 1-3, compiles every rows.csv already under --out and exits
1 when a maximal ratio drifts by more than 25% between consecutive levels.

Usage:
    python -m main_pipeline.main bounds --config configs/smoke.cfg --out out

Created: July 16, 2025
"""

import argparse
import logging
import os
import sys

from tabulate import tabulate

from configuration.test_matrix import TestMatrix, config_hash, parse_test_matrix
from data_utils.data_io import (
    load_config_text,
    load_golden_caps,
    save_golden_caps,
    save_plotdata,
    save_report_json,
    save_rows,
    save_sparse_family,
)
from grid.errors import AssertionFailure, ConfigError, HarmonicToolkitError
from main_pipeline.compile_report import compile_report, preview_frame, summarize
from processing import (
    verify_assumptions,
    verify_bounds,
    verify_domination,
    verify_endpoints,
    verify_fefferman_stein,
    verify_maximal,
    verify_sparse_forms,
    verify_weights,
)
from processing.report_rows import CONTRACT_IDS, CONTRACT_TOLERANCE, rows_frame
from processing.verification_context import VerificationContext, run_tasks

logger = logging.getLogger(__name__)

COMMANDS = {
    "weights": verify_weights.build_tasks,
    "assumptions": verify_assumptions.build_tasks,
    "maximal": verify_maximal.build_tasks,
    "dominate": verify_domination.build_tasks,
    "bounds": verify_bounds.build_tasks,
    "endpoints": verify_endpoints.build_tasks,
    "sparse-forms": verify_sparse_forms.build_tasks,
    "fefferman-stein": verify_fefferman_stein.build_tasks,
}

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2

PREVIEW_ROWS = 20


def build_parser():
    parser = argparse.ArgumentParser(
        prog="harmonic-verify",
        description="Numerical verification of sparse domination and weighted inequalities on dyadic grids.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS) + ["report"], help="Verification command to run")
    parser.add_argument("--config", default=None, help="Test-matrix file (built-in defaults when omitted)")
    parser.add_argument("--out", default="out", help="Output root folder")
    parser.add_argument("--seed", type=int, default=None, help="Override the configured seed")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads for row evaluation")
    parser.add_argument("--level", type=int, default=None, help="Override the grid level L")
    parser.add_argument("--freeze", action="store_true", help="Write golden ratio caps from this run")
    parser.add_argument("--timings", action="store_true", help="Record runtime_ms in rows.csv")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    return parser


def configure_logging(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def load_matrix(args):
    """Configuration from --config (or the defaults) with --seed/--level applied."""
    if args.config is None:
        matrix = TestMatrix()
    else:
        matrix = parse_test_matrix(load_config_text(args.config), source=args.config)
    return matrix.with_overrides(seed=args.seed, level=args.level)


def contract_failures(rows):
    """Rows of exact-contract ids above ratio 1 (or flagged)."""
    failures = {}
    for index, row in enumerate(rows):
        if row.inequality_id not in CONTRACT_IDS:
            continue
        if row.flagged or row.ratio > 1.0 + CONTRACT_TOLERANCE:
            failures[f"{row.inequality_id}#{index}"] = f"ratio {row.ratio:.6g} > 1 ({row.label})"
    return failures


def golden_failures(rows, caps):
    """Rows above their id's golden cap, plus one entry per id that has no cap."""
    failures = {}
    for index, row in enumerate(rows):
        cap = caps.get(row.inequality_id)
        if cap is None:
            failures[row.inequality_id] = "no golden cap for this id; re-run with --freeze"
        elif row.ratio > cap:
            failures[f"{row.inequality_id}#{index}"] = f"ratio {row.ratio:.6g} above golden cap {cap:.6g}"
    return failures


def freeze_caps(rows, headroom):
    """Per-id cap = max ratio · (1 + headroom)."""
    caps = {}
    for row in rows:
        caps[row.inequality_id] = max(caps.get(row.inequality_id, 0.0), row.ratio)
    return {k: v * (1.0 + headroom) for k, v in caps.items()}


def save_families(rows, folder):
    count = 0
    for index, row in enumerate(rows):
        family = row.extra.get("family")
        if family is not None:
            save_sparse_family(family, os.path.join(folder, "families", f"{index:05d}_{row.inequality_id}.json"))
            count += 1
    if count:
        logger.info("%d sparse famil%s saved", count, "y" if count == 1 else "ies")


def run_command(command, matrix, out, threads=1, timings=False, freeze=False):
    """
    Runs one verification command and writes its artifacts.

    Parameters:
        command (str): Key of COMMANDS
        matrix (TestMatrix): Effective configuration
        out (str): Output root
        threads (int): joblib workers
        timings (bool): Record runtime_ms in rows.csv
        freeze (bool): Merge this run's caps into the golden file instead of checking them

    Returns:
        tuple[list[ReportRow], dict]: Rows and the report dictionary

    Raises:
        AssertionFailure: If a contract row or a golden cap fails, or a
            checking run finds no golden file for its config hash
    """
    digest = config_hash(matrix)
    logger.info("%s: config %s, seed %d, L=%d", command, digest, matrix.seed, matrix.grid.level)
    context = VerificationContext(matrix)
    rows, runtimes = run_tasks(COMMANDS[command](context), context, threads, timings)

    folder = os.path.join(out, command)
    save_rows(rows, folder)
    save_plotdata(rows, folder)
    save_families(rows, folder)

    golden_dir = matrix.assertions.golden_dir
    caps = load_golden_caps(golden_dir, digest)
    if freeze:
        caps = {**(caps or {}), **freeze_caps(rows, matrix.assertions.headroom)}
        save_golden_caps(caps, golden_dir, digest, matrix.assertions.headroom)
        failures = contract_failures(rows)
    elif caps is None:
        failures = {
            **contract_failures(rows),
            "golden": f"no golden caps for config {digest} under {golden_dir}; run with --freeze first",
        }
    else:
        failures = {**contract_failures(rows), **golden_failures(rows, caps)}

    report = {
        "command": command,
        "config_hash": digest,
        "seed": matrix.seed,
        "L": matrix.grid.level,
        "rows": len(rows),
        "inequalities": summarize(rows_frame(rows), [row.flagged for row in rows]),
        "flagged_rows": [f"{row.inequality_id}#{i}:{row.label}" for i, row in enumerate(rows) if row.flagged],
        "failures": failures,
        "runtime_ms": {name: round(ms, 3) for name, ms in runtimes.items()},
    }
    save_report_json(report, folder)
    if failures:
        raise AssertionFailure(list(failures), failures)
    return rows, report


def print_preview(summary):
    print("\nInequality Summary Preview:\n")
    print(tabulate(preview_frame(summary).head(PREVIEW_ROWS), headers="keys", tablefmt="fancy_grid", showindex=False))


def main(argv=None):
    """
    Parses arguments, runs the command and maps errors to exit codes.

    Returns:
        int: 0 on success, 1 on assertion failures, 2 on configuration errors
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        if args.command == "report":
            _, report = compile_report(args.out)
        else:
            if args.threads < 1:
                raise ConfigError(f"threads must be >= 1, got {args.threads}", field="--threads")
            matrix = load_matrix(args)
            _, report = run_command(args.command, matrix, args.out, args.threads, args.timings, args.freeze)
    except (ConfigError, FileNotFoundError) as err:
        logger.error("configuration error: %s", err)
        return EXIT_CONFIG
    except AssertionFailure as err:
        for row_id in err.row_ids:
            logger.error("assertion failed: %s: %s", row_id, err.reasons.get(row_id, ""))
        return EXIT_ASSERTION
    except HarmonicToolkitError as err:
        logger.error("invalid input: %s", err)
        return EXIT_CONFIG

    print_preview(report["inequalities"])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
