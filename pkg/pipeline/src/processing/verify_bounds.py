"""
verify_bounds.py

Strong-type weighted bounds, one row per (weight, p, input).

- 1.6          ‖T1f‖_{L^p(w)}    against [w]_{A_p}^{1/p}([w]_{A_∞}^{1/p'} + [σ]_{A_∞}^{1/p})[σ]_{A_∞}‖f‖_{L^p(w)}
- 1.6-Tstar    the same with T1*
- 1.10         ‖T1T2f‖_{L^p(w)}  against the 1.6 factor times ([w]_{A_∞} + [σ]_{A_∞})
- 1.10-Tstar   the same with T1*T2

The Tstar rows are produced only when the size condition is enabled.

Created: August 2, 2025
"""

from kernels.operators import apply, apply_truncated_maximal
from processing.report_rows import make_row
from processing.verification_context import task
from weights.muckenhoupt import weighted_norm


def single_factor(summary):
    """[w]_{A_p}^{1/p}([w]_{A_∞}^{1/p'} + [σ]_{A_∞}^{1/p})[σ]_{A_∞}."""
    p, p_prime = summary.p, summary.p_prime
    mixed = summary.ainf_w ** (1.0 / p_prime) + summary.ainf_sigma ** (1.0 / p)
    return summary.ap ** (1.0 / p) * mixed * summary.ainf_sigma


def composition_factor(summary):
    return single_factor(summary) * (summary.ainf_w + summary.ainf_sigma)


def bound_rows(context, weight, p, label, f):
    summary = context.summary(weight, p)
    norm_f = weighted_norm(f, weight, p)
    tag = f"{weight.name}:{label}"
    t1f = apply(context.first, f)
    t2f = apply(context.second, f)
    rows = [
        make_row("1.6", weighted_norm(t1f, weight, p), single_factor(summary) * norm_f, summary, label=tag),
        make_row(
            "1.10",
            weighted_norm(apply(context.first, t2f), weight, p),
            composition_factor(summary) * norm_f,
            summary,
            label=tag,
        ),
    ]
    if context.matrix.operators.size_condition:
        rows.append(
            make_row(
                "1.6-Tstar",
                weighted_norm(apply_truncated_maximal(context.first, f), weight, p),
                single_factor(summary) * norm_f,
                summary,
                label=tag,
            )
        )
        rows.append(
            make_row(
                "1.10-Tstar",
                weighted_norm(apply_truncated_maximal(context.first, t2f), weight, p),
                composition_factor(summary) * norm_f,
                summary,
                label=tag,
            )
        )
    return rows


def build_tasks(context):
    return [
        task(f"bounds:{weight.name}:p={p:g}:{label}", bound_rows, context, weight, p, label, f)
        for weight in context.weights
        for p in context.sweeps.p
        for label, f in context.inputs
    ]
