"""
verify_assumptions.py

Rows for the kernel assumptions of T1 and T2 over the t sweep.

- a1.0      L¹ tail of K - K_t beyond c1·t^{1/s}
- a1.1      Hölder tail of K - K^t (D_tT)
- a1.2      Hölder tail of K - K_t (TA_t)
- size      t^{n/s}|K^t| near the diagonal
- envelope  |a_t| against t^{-n/s}h(|x-y|/t^{1/s})

Each row compares the measured supremum with 1 (the assumptions only claim
boundedness); the lambda column holds t.

Created: August 1, 2025
"""

from kernels.approximation import check_envelope
from kernels.assumptions import check_assumption_L1, check_assumption_pointwise
from processing.report_rows import make_row
from processing.verification_context import task


def assumption_rows(context, op, t):
    family, periodic = context.ati, context.periodic
    l1 = check_assumption_L1(op, family, t, periodic)
    ta = check_assumption_pointwise(op, family, t, "TA", periodic)
    dt = check_assumption_pointwise(op, family, t, "DT", periodic)
    label = op.label
    return [
        make_row("a1.0", l1, 1.0, lam=t, label=label),
        make_row("a1.1", dt.smoothness_sup, 1.0, lam=t, label=label),
        make_row("a1.2", ta.smoothness_sup, 1.0, lam=t, label=label),
        make_row("size", dt.size_sup, 1.0, lam=t, label=label),
    ]


def envelope_rows(context, t):
    if context.ati.kind != "heat":
        return []
    check = check_envelope(context.ati, t, context.n, context.level)
    return [make_row("envelope", check.worst_ratio, 1.0, lam=t, label=f"decay={check.decay:.3g}")]


def build_tasks(context):
    operators = [context.first]
    if context.second.label != context.first.label:
        operators.append(context.second)
    tasks = []
    for t in context.times:
        tasks.extend(task(f"assumptions:{op.label}:t={t:g}", assumption_rows, context, op, t) for op in operators)
        tasks.append(task(f"envelope:t={t:g}", envelope_rows, context, t))
    return tasks
