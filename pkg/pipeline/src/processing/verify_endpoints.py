"""
verify_endpoints.py

Weak-type and L log L endpoint estimates over the λ sweep.

Unweighted, one task per input:
- 2.2    |{M_{L(log L)^β}f > λ}|        against ∫(|f|/λ)log^β(e + |f|/λ)
- 2.11   |{|T1…Tk f| > λ}|              against ∫(|f|/λ)log^{k-1}(e + |f|/λ)
- 2.12   |{M_{L(log L)^β}T1…Tk f > λ}|  against ∫(|f|/λ)log^{β+k}(e + |f|/λ)

The Calderón-Zygmund decomposition behind these estimates is checked at every λ
(bad parts as configured in [grid] bad_parts):
- cz.measure    Σ|Q_l|            against ‖f‖₁/λ
- cz.good       max|g|            against 2^n·max(λ, ⟨|f|⟩_{[0,1)^n})
- cz.residual   max|f - g - Σb_l| against 1e-9·max(1, max|f|)

Weighted, one task per (weight, input); p = 1 rows carry [w]_{A_1} in the Ap column:
- 1.7          λw({|T1f| > λ})         against [w]_{A_1}[w]_{A_∞}log²(e + [w]_{A_∞})‖f‖_{L¹(w)}
- rem3.3       λw({|T1f| > λ})         against [w]_{A_1}[w]_{A_∞}log(e + [w]_{A_∞})‖f‖_{L¹(w)}
- 1.11-T       w({|T1f| > λ})          against [w]_{A_1}log²(e + [w]_{A_∞})∫(|f|/λ)log(e + |f|/λ)w
- 1.11-Tstar   the same with T1*
- 1.11         w({|T1T2f| > λ})        against [w]_{A_1}[w]²_{A_∞}log²(e + [w]_{A_∞})∫(|f|/λ)log(e + |f|/λ)w
- 1.12         w({|T1T2f| > λ})        against [w]_{A_1}[w]_{A_∞}log²(e + [w]_{A_∞})∫(|f|/λ)log²(e + |f|/λ)w

Arbitrary weight u and ε from the sweep:
- 3.10       λu({|T1f| > λ})     against ε^{-2}∫|f| M_{L(log L)^{1+ε}}u
- 3.12       u({|T1T2f| > λ})    against ε^{-2}∫(|f|/λ)log²(e + |f|/λ) M_{L(log L)^{1+ε}}u
- 3.13       u({|T1T2f| > λ})    against ε^{-2}∫(|f|/λ)log(e + |f|/λ) M_{L(log L)^{2+ε}}u
- rem3.3-u   u({|T1f| > λ})      against ε^{-1}∫(|f|/λ) M_{L(log L)^{1+ε}}u

Chains T1…Tk alternate T1 and T2, starting with T1 on the left.

Created: August 3, 2025
"""

from math import e, log

import numpy as np

from decomp.calderon_zygmund import cz_decompose
from kernels.operators import apply, apply_truncated_maximal
from maximal.maximal_operators import orlicz_maximal
from processing.report_rows import make_row
from processing.verification_context import task
from weights.muckenhoupt import a1_constant, ainf_constant, superlevel_measure, weighted_norm

CZ_RESIDUAL_TOLERANCE = 1e-9


def modular_integral(f, lam, beta, weight=None):
    """∫ (|f|/λ) log^β(e + |f|/λ) w dx (w = 1 when weight is None)."""
    t = np.abs(f.values) / lam
    density = t * np.log(np.e + t) ** beta if beta else t
    w = 1.0 if weight is None else getattr(weight, "values", weight)
    return float((density * w).sum() * f.cell_measure)


def chain_apply(context, f, k):
    """T1T2T1… (k factors) applied to f, rightmost factor first."""
    ops = [context.first if i % 2 == 0 else context.second for i in range(k)]
    out = f
    for op in reversed(ops):
        out = apply(op, out)
    return out


def cz_rows(context, label, f, lam):
    result = cz_decompose(f, lam, context.matrix.grid.bad_parts, context.ati.s)
    scale = max(1.0, float(np.abs(f.values).max()))
    residual = float(np.abs(f.values - result.good.values - result.bad_total().values).max())
    mean = float(np.abs(f.values).mean())
    columns = {"lam": lam, "family_size": len(result.cubes), "label": f"{label}:{result.mode}"}
    return [
        make_row("cz.measure", result.covered_measure(), weighted_norm(f, None, 1.0) / lam, **columns),
        make_row("cz.good", float(np.abs(result.good.values).max()), 2.0 ** f.n * max(lam, mean), **columns),
        make_row("cz.residual", residual, CZ_RESIDUAL_TOLERANCE * scale, **columns),
    ]


def unweighted_rows(context, label, f):
    fam = context.family
    rows = []
    chains = {k: chain_apply(context, f, k) for k in context.sweeps.k}
    for lam in context.lambdas(f):
        rows.extend(cz_rows(context, label, f, lam))
        for beta in context.sweeps.beta:
            mf = orlicz_maximal(f, beta, fam)
            rows.append(
                make_row("2.2", superlevel_measure(mf, None, lam), modular_integral(f, lam, beta),
                         lam=lam, label=f"{label}:beta={beta:g}")
            )
        for k, tf in chains.items():
            rows.append(
                make_row("2.11", superlevel_measure(tf, None, lam), modular_integral(f, lam, k - 1),
                         lam=lam, label=f"{label}:k={k}")
            )
            for beta in context.sweeps.beta:
                mtf = orlicz_maximal(tf, beta, fam)
                rows.append(
                    make_row("2.12", superlevel_measure(mtf, None, lam), modular_integral(f, lam, beta + k),
                             lam=lam, label=f"{label}:k={k}:beta={beta:g}")
                )
    return rows


def weighted_rows(context, weight, label, f):
    fam = context.family
    a1 = a1_constant(weight, fam)
    ainf = ainf_constant(weight, fam)
    log_term = log(e + ainf)
    columns = {"p": 1.0, "Ap": a1, "Ainf_w": ainf, "label": f"{weight.name}:{label}"}

    t1f = apply(context.first, f)
    t12f = apply(context.composition, f)
    t1star = apply_truncated_maximal(context.first, f) if context.matrix.operators.size_condition else None
    l1 = weighted_norm(f, weight, 1.0)
    orlicz_u = {}

    def mu(beta):
        if beta not in orlicz_u:
            orlicz_u[beta] = orlicz_maximal(weight.w, beta, fam)
        return orlicz_u[beta]

    rows = []
    for lam in context.lambdas(f):
        w_t1 = superlevel_measure(t1f, weight, lam)
        w_t12 = superlevel_measure(t12f, weight, lam)
        rows.append(make_row("1.7", lam * w_t1, a1 * ainf * log_term ** 2 * l1, lam=lam, **columns))
        rows.append(make_row("rem3.3", lam * w_t1, a1 * ainf * log_term * l1, lam=lam, **columns))
        rows.append(
            make_row("1.11-T", w_t1, a1 * log_term ** 2 * modular_integral(f, lam, 1, weight), lam=lam, **columns)
        )
        if t1star is not None:
            rows.append(
                make_row("1.11-Tstar", superlevel_measure(t1star, weight, lam),
                         a1 * log_term ** 2 * modular_integral(f, lam, 1, weight), lam=lam, **columns)
            )
        rows.append(
            make_row("1.11", w_t12, a1 * ainf ** 2 * log_term ** 2 * modular_integral(f, lam, 1, weight),
                     lam=lam, **columns)
        )
        rows.append(
            make_row("1.12", w_t12, a1 * ainf * log_term ** 2 * modular_integral(f, lam, 2, weight),
                     lam=lam, **columns)
        )
        for eps in context.sweeps.eps:
            m1 = mu(1.0 + eps)
            m2 = mu(2.0 + eps)
            rows.append(
                make_row("3.10", lam * w_t1, eps ** -2 * weighted_norm(f, m1, 1.0), lam=lam, eps=eps, **columns)
            )
            rows.append(
                make_row("3.12", w_t12, eps ** -2 * modular_integral(f, lam, 2, m1), lam=lam, eps=eps, **columns)
            )
            rows.append(
                make_row("3.13", w_t12, eps ** -2 * modular_integral(f, lam, 1, m2), lam=lam, eps=eps, **columns)
            )
            rows.append(
                make_row("rem3.3-u", w_t1, modular_integral(f, lam, 0, m1) / eps, lam=lam, eps=eps, **columns)
            )
    return rows


def build_tasks(context):
    tasks = [task(f"endpoints:{label}", unweighted_rows, context, label, f) for label, f in context.inputs]
    tasks.extend(
        task(f"endpoints:{weight.name}:{label}", weighted_rows, context, weight, label, f)
        for weight in context.weights
        for label, f in context.inputs
    )
    return tasks
