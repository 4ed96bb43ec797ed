"""
verify_fefferman_stein.py

Mixed Fefferman-Stein inequalities for an arbitrary weight u, one task per
(weight, input) over the p and ε sweeps. M_γ below is M_{L(log L)^γ}u.

- 3.9             ‖T1f‖_{L^p(u)}       against p'²p²ε^{-1/p'}‖f‖_{L^p(M_{p-1+ε})}
- 3.11            ‖T1T2f‖_{L^p(u)}     against p'⁴[p²ε^{-1/p'}]²‖f‖_{L^p(M_{2p-1+ε})}
- 3.20            ‖MT1f‖_{L^{p'}(M_{2p-1+ε}^{1-p'})}   against p'[p²ε^{-1/p'}]²‖f‖_{L^{p'}(u^{1-p'})}
- cor3.1-pprime   ‖MT1T2f‖_{L^{p'}(M_{3p-1+ε}^{1-p'})} against p'²[p²ε^{-1/p'}]³‖f‖_{L^{p'}(u^{1-p'})}
- cor3.1-p        the same left side against p'²[p²ε^{-1/p'}]³‖f‖_{L^p(u^{1-p'})}

The two cor3.1 rows carry both readings of the right-hand norm exponent.

Created: August 4, 2025
"""

from kernels.operators import apply
from maximal.maximal_operators import hardy_littlewood, orlicz_maximal
from processing.report_rows import make_row
from processing.verification_context import task
from weights.muckenhoupt import conjugate, weighted_norm


def fefferman_stein_rows(context, weight, label, f):
    fam = context.family
    u = weight.w
    t1f = apply(context.first, f)
    t12f = apply(context.composition, f)
    m_t1f = hardy_littlewood(t1f, fam)
    m_t12f = hardy_littlewood(t12f, fam)
    orlicz_u = {}

    def mu(gamma):
        if gamma not in orlicz_u:
            orlicz_u[gamma] = orlicz_maximal(u, gamma, fam)
        return orlicz_u[gamma]

    rows = []
    for p in context.sweeps.p:
        pp = conjugate(p)
        dual_u = u.with_values(u.values ** (1.0 - pp))
        f_dual_pp = weighted_norm(f, dual_u, pp)
        f_dual_p = weighted_norm(f, dual_u, p)
        for eps in context.sweeps.eps:
            core = p ** 2 * eps ** (-1.0 / pp)
            columns = {"p": p, "eps": eps, "label": f"{weight.name}:{label}"}

            m1 = mu(p - 1.0 + eps)
            rows.append(
                make_row("3.9", weighted_norm(t1f, u, p), pp ** 2 * core * weighted_norm(f, m1, p), **columns)
            )
            m2 = mu(2.0 * p - 1.0 + eps)
            rows.append(
                make_row("3.11", weighted_norm(t12f, u, p), pp ** 4 * core ** 2 * weighted_norm(f, m2, p), **columns)
            )
            rows.append(
                make_row(
                    "3.20",
                    weighted_norm(m_t1f, m2.with_values(m2.values ** (1.0 - pp)), pp),
                    pp * core ** 2 * f_dual_pp,
                    **columns,
                )
            )
            m3 = mu(3.0 * p - 1.0 + eps)
            lhs = weighted_norm(m_t12f, m3.with_values(m3.values ** (1.0 - pp)), pp)
            rows.append(make_row("cor3.1-pprime", lhs, pp ** 2 * core ** 3 * f_dual_pp, **columns))
            rows.append(make_row("cor3.1-p", lhs, pp ** 2 * core ** 3 * f_dual_p, **columns))
    return rows


def build_tasks(context):
    return [
        task(f"fefferman-stein:{weight.name}:{label}", fefferman_stein_rows, context, weight, label, f)
        for weight in context.weights
        for label, f in context.inputs
    ]
