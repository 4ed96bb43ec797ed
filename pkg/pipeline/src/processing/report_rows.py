"""
report_rows.py

One report row per evaluated inequality instance, and the table they form.

A row carries the left side, the right side without its implicit constant
(rhs_core) and their ratio. Rows whose right side vanishes are never divided:
their ratio is 0 and they are flagged when the left side is positive.
Domination rows carry the algorithm's stopping constant D, and their ratio is
taken against D·rhs_core.

Created: July 31, 2025
"""

import logging
import math
from dataclasses import dataclass, field, replace

import pandas as pd

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "inequality_id",
    "p",
    "q",
    "eps",
    "lambda",
    "Ap",
    "Ainf_w",
    "Ainf_sigma",
    "lhs",
    "rhs_core",
    "ratio",
    "D",
    "family_size",
    "seed",
    "L",
    "runtime_ms",
]

# Right sides at or below this count as zero.
_ZERO = 1e-300

# Ids whose ratio is <= 1 by construction; the CLI asserts them.
CONTRACT_IDS = ("thm3.2", "thm3.2-certified", "thm3.1", "rem3.1", "sparsity", "cz.measure", "cz.good", "cz.residual")
CONTRACT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ReportRow:
    inequality_id: str
    lhs: float
    rhs_core: float
    ratio: float
    flagged: bool = False
    p: float | None = None
    q: float | None = None
    eps: float | None = None
    lam: float | None = None
    Ap: float | None = None
    Ainf_w: float | None = None
    Ainf_sigma: float | None = None
    D: float | None = None
    family_size: int | None = None
    seed: int | None = None
    L: int | None = None
    runtime_ms: float = 0.0
    label: str = ""
    extra: dict = field(default_factory=dict)

    def record(self):
        """CSV record in CSV_COLUMNS order (None becomes an empty cell)."""
        values = {
            "inequality_id": self.inequality_id,
            "p": self.p,
            "q": self.q,
            "eps": self.eps,
            "lambda": self.lam,
            "Ap": self.Ap,
            "Ainf_w": self.Ainf_w,
            "Ainf_sigma": self.Ainf_sigma,
            "lhs": self.lhs,
            "rhs_core": self.rhs_core,
            "ratio": self.ratio,
            "D": self.D,
            "family_size": self.family_size,
            "seed": self.seed,
            "L": self.L,
            "runtime_ms": self.runtime_ms,
        }
        return [values[c] for c in CSV_COLUMNS]

    def stamped(self, seed, level, runtime_ms=0.0):
        return replace(self, seed=seed, L=level, runtime_ms=runtime_ms)


def make_row(inequality_id, lhs, rhs_core, summary=None, D=None, **columns):
    """
    Build a row and its ratio.

    Parameters:
        inequality_id (str): Identifier of the checked inequality
        lhs (float), rhs_core (float): Both sides, rhs without its implicit constant
        summary (WeightSummary | None): Fills p, Ap, Ainf_w and Ainf_sigma
        D (float | None): Stopping constant; the ratio is then lhs/(D·rhs_core)
        **columns: Any other ReportRow field (q, eps, lam, family_size, label, extra)

    Returns:
        ReportRow
    """
    lhs = float(lhs)
    rhs_core = float(rhs_core)
    denominator = rhs_core * (D if D is not None else 1.0)
    flagged = False
    if not math.isfinite(lhs) or not math.isfinite(denominator):
        logger.warning("%s: non-finite side (lhs=%r, rhs=%r)", inequality_id, lhs, denominator)
        ratio, flagged = 0.0, True
    elif denominator <= _ZERO:
        ratio = 0.0
        flagged = lhs > 0
        if flagged:
            logger.warning("%s %s: lhs %.6g with a vanishing right side", inequality_id, columns.get("label", ""), lhs)
    else:
        ratio = lhs / denominator

    if summary is not None:
        columns.setdefault("p", summary.p)
        columns.setdefault("Ap", summary.ap)
        columns.setdefault("Ainf_w", summary.ainf_w)
        columns.setdefault("Ainf_sigma", summary.ainf_sigma)
    return ReportRow(inequality_id, lhs, rhs_core, float(ratio), flagged, D=D, **columns)


def worst_pair(pairs):
    """The (lhs, rhs) pair with the largest ratio among pairs with rhs > 0; (0, 1) if none."""
    best, best_ratio = (0.0, 1.0), -1.0
    for lhs, rhs in pairs:
        if rhs > 0 and lhs / rhs > best_ratio:
            best, best_ratio = (float(lhs), float(rhs)), lhs / rhs
    return best


def rows_frame(rows):
    """DataFrame of rows with exactly CSV_COLUMNS (header only when empty)."""
    return pd.DataFrame([row.record() for row in rows], columns=CSV_COLUMNS)
