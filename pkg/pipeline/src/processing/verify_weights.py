"""
verify_weights.py

Rows for the Muckenhoupt constants of every configured weight.

- weights.Ap       1 <= [w]_{A_p}
- weights.A1       [w]_{A_p} <= [w]_{A_1}
- weights.Ainf     [w]_{A_∞} against [w]_{A_p}
- weights.duality  [σ]_{A_{p'}} = [w]_{A_p}^{p'-1}

Created: August 1, 2025
"""

from processing.report_rows import make_row
from processing.verification_context import task
from weights.muckenhoupt import a1_constant, ap_constant, dual_weight


def weight_rows(context, weight, p):
    summary = context.summary(weight, p)
    sigma = dual_weight(weight, p)
    label = weight.name
    a1 = a1_constant(weight, context.family)
    return [
        make_row("weights.Ap", 1.0, summary.ap, summary, label=label),
        make_row("weights.A1", summary.ap, a1, summary, label=label),
        make_row("weights.Ainf", summary.ainf_w, summary.ap, summary, label=label),
        make_row(
            "weights.duality",
            ap_constant(sigma, summary.p_prime, context.family),
            summary.ap ** (summary.p_prime - 1.0),
            summary,
            label=label,
        ),
    ]


def build_tasks(context):
    return [
        task(f"weights:{weight.name}:p={p:g}", weight_rows, context, weight, p)
        for weight in context.weights
        for p in context.sweeps.p
    ]
