"""
compile_report.py

Report compiler for the verification harness.

This script consolidates every <out>/<command>/rows.csv written by earlier
runs into a single table under <out>/report/, and summarizes it per
inequality id:

- maximum and mean ratio, row count and largest stopping constant D
- flagged rows (a positive left side against a vanishing or non-finite right side)
- ratio stability under refinement: the change of the maximal ratio from
  level L to L + 1 for every pair of consecutive levels present; a change
  above 25% fails the report (ratios at rounding level on both levels are
  not compared)

Typical use: run the subcommands at L and L + 1 into one --out folder, then
`report` to see whether any ratio drifts with the grid.

Created: August 5, 2025
"""

import logging
import os

import numpy as np
import pandas as pd

from data_utils.data_io import ROWS_FILE, load_rows, save_frame, save_report_json
from grid.errors import AssertionFailure
from processing.report_rows import CSV_COLUMNS

logger = logging.getLogger(__name__)

REPORT_FOLDER = "report"
STABILITY_TOLERANCE = 0.25
# Maximal ratios below this on both levels are rounding noise.
STABILITY_FLOOR = 1e-9


def _finite(value):
    value = float(value)
    return value if np.isfinite(value) else None


def flagged_mask(df):
    """Rows whose left side is positive while the ratio was not taken, or is not finite."""
    lhs = pd.to_numeric(df["lhs"], errors="coerce")
    ratio = pd.to_numeric(df["ratio"], errors="coerce")
    return (~np.isfinite(lhs)) | ((ratio == 0) & (lhs > 0))


def stability_summary(df, tolerance=STABILITY_TOLERANCE):
    """
    Relative change of the per-id maximal ratio between consecutive grid levels.

    Returns:
        dict: {inequality_id: {"by_level", "max_change", "stable"}} for ids seen
        on at least two consecutive levels
    """
    out = {}
    for inequality_id, group in df.groupby("inequality_id", sort=True):
        by_level = group.groupby("L")["ratio"].max().sort_index()
        changes = []
        for level, ratio in by_level.items():
            following = level + 1
            if following not in by_level.index:
                continue
            if max(ratio, by_level[following]) > STABILITY_FLOOR and ratio > 0:
                changes.append(abs(by_level[following] - ratio) / ratio)
        if not changes:
            continue
        worst = float(max(changes))
        out[inequality_id] = {
            "by_level": {str(int(k)): float(v) for k, v in by_level.items()},
            "max_change": worst,
            "stable": worst <= tolerance,
        }
    return out


def summarize(df, flagged=None):
    """
    Per-id summary of a rows table.

    Parameters:
        df (pd.DataFrame): Rows with CSV_COLUMNS
        flagged (pd.Series | None): Flag per row; derived from the table when None

    Returns:
        dict: {inequality_id: {"max_ratio", "mean_ratio", "count", "flagged", "max_D"}}
    """
    if flagged is None:
        flagged = flagged_mask(df)
    df = df.assign(_flagged=np.asarray(flagged, dtype=bool))
    summary = {}
    for inequality_id, group in df.groupby("inequality_id", sort=True):
        d_values = pd.to_numeric(group["D"], errors="coerce").dropna()
        summary[inequality_id] = {
            "max_ratio": _finite(group["ratio"].max()),
            "mean_ratio": _finite(group["ratio"].mean()),
            "count": int(len(group)),
            "flagged": int(group["_flagged"].sum()),
            "max_D": _finite(d_values.max()) if len(d_values) else None,
        }
    return summary


def preview_frame(summary):
    """Summary as a small table for the console preview."""
    records = [{"inequality_id": k, **v} for k, v in summary.items()]
    return pd.DataFrame(records, columns=["inequality_id", "max_ratio", "mean_ratio", "count", "flagged", "max_D"])


def collect_rows(out_dir):
    """Every rows.csv under out_dir except the compiled one, in sorted path order."""
    frames = []
    report_dir = os.path.abspath(os.path.join(out_dir, REPORT_FOLDER))
    for root, dirs, files in os.walk(out_dir):
        dirs.sort()
        if os.path.commonpath([os.path.abspath(root), report_dir]) == report_dir:
            continue
        if ROWS_FILE in files:
            frames.append(load_rows(os.path.join(root, ROWS_FILE)))
    frames = [f for f in frames if len(f)]
    if not frames:
        logger.warning("no report rows found under %s", out_dir)
        return pd.DataFrame(columns=CSV_COLUMNS)
    return pd.concat(frames, ignore_index=True)


def compile_report(out_dir):
    """
    Compiles all rows under out_dir into <out_dir>/report/.

    Parameters:
        out_dir (str): Output root of earlier runs

    Returns:
        tuple[pd.DataFrame, dict]: Compiled rows and the report dictionary; a
        missing or empty folder compiles to a header-only table

    Raises:
        AssertionFailure: If a maximal ratio drifts by more than 25% between
            consecutive levels (raised after the report is written)
    """
    df = collect_rows(out_dir)
    folder = os.path.join(out_dir, REPORT_FOLDER)
    save_frame(df, folder)
    flagged = flagged_mask(df) if len(df) else pd.Series([], dtype=bool)
    report = {
        "rows": int(len(df)),
        "inequalities": summarize(df, flagged),
        "flagged_rows": [int(i) for i in np.flatnonzero(np.asarray(flagged, dtype=bool))],
        "stability": stability_summary(df) if len(df) else {},
    }
    save_report_json(report, folder)
    unstable = [k for k, v in report["stability"].items() if not v["stable"]]
    if unstable:
        reasons = {
            k: f"max ratio changes by {report['stability'][k]['max_change']:.1%} under refinement "
            f"({report['stability'][k]['by_level']})"
            for k in unstable
        }
        raise AssertionFailure(unstable, reasons)
    return df, report
