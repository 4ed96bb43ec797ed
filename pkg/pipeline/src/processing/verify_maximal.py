"""
verify_maximal.py

Rows for the maximal-operator inequalities, one task per input function.

- 2.1-LlogL, 2.1-LlogL2   spread max/min of M_{L(log L)^β}f / M^{β+1}f
- 2.2                     weak-type constant of M_{L(log L)^β} over the λ sweep
- 3.-1                    𝓜_{T1}f against MT1f + M_{L log L}f
- 3.1                     𝓜*_{M_{L(log L)^k}T1}f against M_{L(log L)^k}T1f + M_{L(log L)^{k+1}}f
- lem3.1, rem3.2          𝓜**_{MT1T2}f and 𝓜**_{T1T2}f against MT1T2f + M_{L log L}T2f + M_{L(log L)²}f
- lem3.2                  𝓜*_{MT1T2}(f, g) against q'(MT2f + M_{L log L}f)M_q g

Pointwise rows report the empirical constant as lhs with rhs_core = 1; cells
where the right side vanishes but the left does not flag the row.

Created: August 1, 2025
"""

from dataclasses import replace

from maximal.pointwise_bounds import (
    bisublinear_bound,
    comparability_band,
    double_star_bound,
    grand_maximal_bound,
    star_k_bound,
    weak_type_constant,
)
from processing.report_rows import make_row
from processing.verification_context import task

STAR_K = (0, 1, 2)


def _pointwise_row(inequality_id, bound, label, **columns):
    row = make_row(inequality_id, bound.constant, 1.0, label=label, **columns)
    if bound.uncovered:
        row = replace(row, flagged=True, label=f"{label}:uncovered={bound.uncovered}")
    return row


def maximal_rows(context, label, f):
    fam, inner = context.family, context.inner_family
    first, second = context.first, context.second
    rows = []
    for beta, inequality_id in ((1, "2.1-LlogL"), (2, "2.1-LlogL2")):
        band = comparability_band(f, beta, fam)
        rows.append(make_row(inequality_id, band.high, band.low, label=label))
    for beta in context.sweeps.beta:
        constant = weak_type_constant(f, beta, context.lambdas(f), fam)
        rows.append(make_row("2.2", constant, 1.0, label=f"{label}:beta={beta:g}"))

    rows.append(_pointwise_row("3.-1", grand_maximal_bound(first, f, fam), label))
    for k in STAR_K:
        rows.append(_pointwise_row("3.1", star_k_bound(first, f, k, fam, inner), f"{label}:k={k}"))
    rows.append(_pointwise_row("lem3.1", double_star_bound(first, second, f, True, fam, inner), label))
    rows.append(_pointwise_row("rem3.2", double_star_bound(first, second, f, False, fam, inner), label))
    for q in context.sweeps.q:
        bound = bisublinear_bound(first, second, f, context.pairing, q, fam, inner)
        rows.append(_pointwise_row("lem3.2", bound, label, q=q))
    return rows


def build_tasks(context):
    return [task(f"maximal:{label}", maximal_rows, context, label, f) for label, f in context.inputs]
