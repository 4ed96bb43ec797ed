"""
verify_domination.py

Rows for the constructive sparse domination algorithms.

- thm3.2            |∫g T1T2f| against D(𝓐_{L(log L)²,L¹} + 𝓐_{L log L,L log L})
- thm3.2-certified  |∫g T1T2f| against the bound certified by the stopping rule
- thm3.2-residual   max |T1T2f - Σ pieces| (telescoping identity, rhs_core = 1)
- thm3.1            ∫|g| MT1T2f against D(𝓐_{L(log L)²,L¹} + q'𝓐_{L log L,L^q})
- rem3.1            max_x M_{L(log L)^k}T1f / Σ‖f‖_{L(log L)^{k+1},27Q}χ_{27Q} against D
- sparsity          η of the certified tree family against 1/2, and of the
                    dilated family against 27^{-n}/2 (lhs = target, rhs = η)

thm3.2, thm3.2-certified, thm3.1, rem3.1 and sparsity are contracts and the
harness asserts them; thm3.2-residual is held to a golden cap.
The sparse families travel in row.extra["family"] for serialization.

Created: August 2, 2025
"""

import logging
from dataclasses import replace

from grid.grid_function import GridFunction
from processing.report_rows import make_row
from processing.verification_context import task
from sparse.domination import dominate_composition, dominate_maximal_composition, sparse_dominate_single
from sparse.families import certify

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-8
SINGLE_K = (0, 1, 2)


def _sparsity_rows(report, label, n):
    tree_eta = certify(report.family)
    dilated_eta = certify(report.dilated)
    return [
        make_row("sparsity", 0.5, tree_eta, label=f"{label}:tree"),
        make_row("sparsity", 0.5 * 27.0 ** (-n), dilated_eta, label=f"{label}:dilated"),
    ]


def composition_rows(context, label, f):
    result = dominate_composition(context.first, context.second, f, context.periodic)
    size = len(result.family)
    rows = []
    for g_label, g in (("g=1", GridFunction.constant(f.n, f.level, 1.0, f.periodic)), ("g=pairing", context.pairing)):
        sides = result.evaluate(g)
        tag = f"{label}:{g_label}"
        rows.append(make_row("thm3.2", sides.lhs, sides.rhs_core, D=sides.D, family_size=size, label=tag))
        rows.append(make_row("thm3.2-certified", sides.lhs, sides.certified_bound, family_size=size, label=tag))
    residual = result.residual()
    scale = max(float(abs(result.t1t2f).max()), 1.0)
    rows.append(make_row("thm3.2-residual", residual / scale, 1.0, label=label))
    if residual > RESIDUAL_TOLERANCE * scale:
        logger.warning("%s: telescoping residual %.3g", label, residual)
    rows.extend(_sparsity_rows(result.report, f"{label}:thm3.2", f.n))
    rows[0] = replace(rows[0], extra={"family": result.report.dilated})
    return rows


def maximal_composition_rows(context, label, f, q):
    result = dominate_maximal_composition(
        context.first, context.second, f, context.pairing, q, context.inner_family, context.periodic
    )
    sides = result.sides
    row = make_row(
        "thm3.1", sides.lhs, sides.rhs_core, D=sides.D, q=q, family_size=len(result.family), label=label,
        extra={"family": result.report.dilated},
    )
    return [row] + _sparsity_rows(result.report, f"{label}:thm3.1:q={q:g}", f.n)


def single_rows(context, label, f, k):
    result = sparse_dominate_single(context.first, f, k, context.inner_family, context.periodic)
    row = make_row(
        "rem3.1", result.max_constant, 1.0, D=result.report.D, family_size=len(result.family),
        label=f"{label}:k={k}", extra={"family": result.report.dilated},
    )
    return [row] + _sparsity_rows(result.report, f"{label}:rem3.1:k={k}", f.n)


def build_tasks(context):
    tasks = []
    for label, f in context.inputs:
        tasks.append(task(f"dominate:thm3.2:{label}", composition_rows, context, label, f))
        tasks.extend(
            task(f"dominate:thm3.1:{label}:q={q:g}", maximal_composition_rows, context, label, f, q)
            for q in context.sweeps.q
        )
        tasks.extend(task(f"dominate:rem3.1:{label}:k={k}", single_rows, context, label, f, k) for k in SINGLE_K)
    return tasks
