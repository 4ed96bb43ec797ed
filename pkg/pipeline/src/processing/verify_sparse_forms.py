"""
verify_sparse_forms.py

Sparse-form inequalities on the families produced by dominate_composition,
plus the local Orlicz and Kolmogorov-type estimates they are built from.

Key tasks:
- 3.6           𝓐_{S;L^{1+ε₁},L^{1+ε₂}}(f, g) against [w]_{A_p}^{1/p}([σ]_{A_∞}^{1/p} + [w]_{A_∞}^{1/p'})‖f‖_{L^p(w)}‖g‖_{L^{p'}(σ)}
- 3.7, 3.8      𝓐_{S;L(log L)²,L¹} and ε₂^{-1}𝓐_{S;L log L,L^{1+ε₂}} against the same
                product times [σ]²_{A_∞} and [w]_{A_∞}[σ]_{A_∞}
- orlicz-power  worst dyadic cube of ‖f‖_{L(log L)^β,Q} against ε^{-β}⟨f⟩_{1+ε,Q}
- lem3.4        u({|T1T2f| > λ}) against ε^{-3}∫(|f|/λ)log²(e + |f|/λ)M_{L(log L)^ε}u
                + ε^{-2}∫(|f|/λ)log(e + |f|/λ)M_{L(log L)^{1+ε}}u
- lem2.1        ∫_{Q1}Φ_β(|T(fχ_{Q2})|) against |Q1| + (‖T‖² + 1)∫_{Q2}Φ_{β+1}(|f|)
- lem2.2        worst dyadic cube (levels <= 2) of ⟨|T(fχ_Q)|⟩_{1/2,Q} against ⟨f⟩_Q

Every task also reports the one-cube family S = {root} for 3.6.

Created: August 4, 2025
"""

import logging

import numpy as np

from grid.cube_family import enumerate_cubes
from grid.cubes import children, cube_cells, dyadic_subcubes, root_cube
from kernels.operators import apply
from maximal.maximal_operators import orlicz_maximal
from orlicz.local_norms import LocalFunctional, luxemburg_values, power_values
from processing.report_rows import make_row, worst_pair
from processing.verification_context import task
from processing.verify_endpoints import modular_integral
from sparse.domination import dominate_composition
from sparse.families import sparse_form
from weights.muckenhoupt import dual_weight, superlevel_measure, weighted_norm

logger = logging.getLogger(__name__)

KOLMOGOROV_EXPONENT = 0.5
KOLMOGOROV_DEPTH = 2


def _young_integral(values, cell_measure, beta):
    """∫ |v|log^β(e + |v|) over the given cell values."""
    v = np.abs(values)
    return float((v * np.log(np.e + v) ** beta).sum() * cell_measure)


def form_rows(context, weight, p, family, family_label, label, f):
    summary = context.summary(weight, p)
    sigma = dual_weight(weight, p)
    g = context.pairing
    eps1, eps2 = summary.eps1, summary.eps2
    base = (
        summary.ap ** (1.0 / p)
        * (summary.ainf_sigma ** (1.0 / p) + summary.ainf_w ** (1.0 / summary.p_prime))
        * weighted_norm(f, weight, p)
        * weighted_norm(g, sigma, summary.p_prime)
    )
    columns = {"family_size": len(family), "label": f"{weight.name}:{label}:{family_label}"}
    rows = [
        make_row(
            "3.6",
            sparse_form(family, f, g, LocalFunctional.power(1.0 + eps1), LocalFunctional.power(1.0 + eps2)),
            base,
            summary,
            **columns,
        )
    ]
    if family_label == "root":
        return rows
    rows.append(
        make_row(
            "3.7",
            sparse_form(family, f, g, LocalFunctional.luxemburg(2), LocalFunctional.average()),
            summary.ainf_sigma ** 2 * base,
            summary,
            **columns,
        )
    )
    rows.append(
        make_row(
            "3.8",
            sparse_form(family, f, g, LocalFunctional.luxemburg(1), LocalFunctional.power(1.0 + eps2)) / eps2,
            summary.ainf_w * summary.ainf_sigma * base,
            summary,
            **columns,
        )
    )
    return rows


def orlicz_power_rows(context, label, f):
    cubes = enumerate_cubes(f.n, f.level, "dyadic")
    blocks = [f.values[cube_cells(q)] for q in cubes]
    rows = []
    for beta in context.sweeps.beta:
        for eps in context.sweeps.eps:
            lhs, rhs = worst_pair(
                (luxemburg_values(v, beta), eps ** -beta * power_values(v, 1.0 + eps)) for v in blocks
            )
            rows.append(make_row("orlicz-power", lhs, rhs, eps=eps, label=f"{label}:beta={beta:g}"))
    return rows


def lemma_local_rows(context, label, f):
    """lem2.1 on (root, root) and (first child, last child); lem2.2 on shallow dyadic cubes."""
    op = context.first
    root = root_cube(f.n, f.level)
    halves = children(root)
    pairs = [("root", root, root)]
    if halves:
        pairs.append(("halves", halves[0], halves[-1]))
    factor = op.norm ** 2 + 1.0
    h = f.cell_measure
    rows = []
    for beta in context.sweeps.beta:
        for pair_label, q1, q2 in pairs:
            inner = cube_cells(q2)
            restricted = np.zeros_like(f.values)
            restricted[inner] = f.values[inner]
            tf = apply(op, f.with_values(restricted)).values[cube_cells(q1)]
            lhs = _young_integral(tf, h, beta)
            rhs = q1.measure + factor * _young_integral(f.values[inner], h, beta + 1)
            rows.append(make_row("lem2.1", lhs, rhs, label=f"{label}:{pair_label}:beta={beta:g}"))

    pairs = []
    for cube in dyadic_subcubes(root):
        if cube.side * 2 ** KOLMOGOROV_DEPTH < root.side:
            break
        cells = cube_cells(cube)
        restricted = np.zeros_like(f.values)
        restricted[cells] = f.values[cells]
        tf = apply(op, f.with_values(restricted)).values[cells]
        pairs.append((power_values(tf, KOLMOGOROV_EXPONENT), float(np.abs(f.values[cells]).mean())))
    lhs, rhs = worst_pair(pairs)
    rows.append(make_row("lem2.2", lhs, rhs, label=label))
    return rows


def lemma34_rows(context, weight, label, f):
    fam = context.family
    t12f = apply(context.composition, f)
    columns = {"label": f"{weight.name}:{label}"}
    rows = []
    for eps in context.sweeps.eps:
        low = orlicz_maximal(weight.w, eps, fam)
        high = orlicz_maximal(weight.w, 1.0 + eps, fam)
        for lam in context.lambdas(f):
            rhs = eps ** -3 * modular_integral(f, lam, 2, low) + eps ** -2 * modular_integral(f, lam, 1, high)
            rows.append(
                make_row("lem3.4", superlevel_measure(t12f, weight, lam), rhs, lam=lam, eps=eps, **columns)
            )
    return rows


def sparse_form_rows(context, label, f):
    result = dominate_composition(context.first, context.second, f, context.periodic)
    family = result.report.dilated
    logger.debug("%s: dilated family of %d cubes, D=%.3g", label, len(family), result.D)
    root = [root_cube(f.n, f.level)]
    rows = []
    for weight in context.weights:
        for p in context.sweeps.p:
            rows.extend(form_rows(context, weight, p, family, "dilated", label, f))
            rows.extend(form_rows(context, weight, p, root, "root", label, f))
    return rows


def build_tasks(context):
    tasks = []
    for label, f in context.inputs:
        tasks.append(task(f"sparse-forms:{label}", sparse_form_rows, context, label, f))
        tasks.append(task(f"orlicz-power:{label}", orlicz_power_rows, context, label, f))
        tasks.append(task(f"lemmas:{label}", lemma_local_rows, context, label, f))
        tasks.extend(
            task(f"lem3.4:{weight.name}:{label}", lemma34_rows, context, weight, label, f)
            for weight in context.weights
        )
    return tasks
