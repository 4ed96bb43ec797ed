"""
pointwise_bounds.py

Empirical constants of the pointwise and weak-type maximal inequalities.

Each helper evaluates both sides on the grid and returns the smallest C with
LHS <= C·RHS on every cell where RHS > 0, together with the number of cells
where LHS > 0 but RHS = 0 (these can never be certified by any constant).

- grand maximal:      𝓜_T f ≲ MTf + M_{L log L} f
- star-k:             𝓜*_{M_{L(log L)^k}T} f ≲ M_{L(log L)^k}Tf + M_{L(log L)^{k+1}} f
- double-star(-M):    𝓜**f ≲ MT1T2f + M_{L log L}T2f + M_{L(log L)^2} f
- bisublinear:        𝓜*(f, g) ≲ q'·(MT2f + M_{L log L}f)·M_q g
- comparability:      M_{L log L} f ≈ MMf,  M_{L(log L)^2} f ≈ MMMf
- weak type:          |{M_{L(log L)^β} g > λ}| ≲ ∫ (|g|/λ) log^β(e + |g|/λ)

Created: July 27, 2025
"""

import logging
from dataclasses import dataclass

import numpy as np

from kernels.operators import apply
from maximal.grand_maximal import bisublinear_grand_maximal, grand_maximal, grand_maximal_composite
from maximal.maximal_operators import hardy_littlewood, iterated_maximal, orlicz_maximal, power_maximal
from orlicz.local_norms import young_modular

logger = logging.getLogger(__name__)

# Relative size under which a value counts as zero.
_ZERO = 1e-12


@dataclass(frozen=True)
class PointwiseConstant:
    """
    Attributes:
        constant (float): max over cells with RHS > 0 of LHS/RHS (0 if none)
        uncovered (int): Cells with LHS > 0 and RHS = 0
        lhs_max (float), rhs_max (float): Extremes of both sides
    """

    constant: float
    uncovered: int
    lhs_max: float
    rhs_max: float


def pointwise_constant(lhs, rhs):
    """Empirical constant of lhs <= C·rhs from two grid functions (or arrays)."""
    lhs = np.abs(getattr(lhs, "values", lhs))
    rhs = np.abs(getattr(rhs, "values", rhs))
    scale = max(float(lhs.max(initial=0.0)), float(rhs.max(initial=0.0)), 1.0)
    live = rhs > _ZERO * scale
    constant = float((lhs[live] / rhs[live]).max()) if np.any(live) else 0.0
    uncovered = int(np.count_nonzero(~live & (lhs > _ZERO * scale)))
    return PointwiseConstant(constant, uncovered, float(lhs.max(initial=0.0)), float(rhs.max(initial=0.0)))


def grand_maximal_bound(op, f, family=None):
    lhs = grand_maximal(op, f)
    rhs = hardy_littlewood(apply(op, f), family) + orlicz_maximal(f, 1, family)
    return pointwise_constant(lhs, rhs)


def star_k_bound(op, f, k, family=None, inner_family="dyadic"):
    lhs = grand_maximal_composite(op, None, f, "star-k", beta=k, inner_family=inner_family)
    tf = apply(op, f)
    first = hardy_littlewood(tf, family) if k == 0 else orlicz_maximal(tf, k, family)
    rhs = first + orlicz_maximal(f, k + 1, family)
    return pointwise_constant(lhs, rhs)


def double_star_bound(first, second, f, with_maximal=True, family=None, inner_family="dyadic"):
    """double-star-M (with_maximal) or double-star against the common right-hand side."""
    variant = "double-star-M" if with_maximal else "double-star"
    lhs = grand_maximal_composite(first, second, f, variant, inner_family=inner_family)
    t2f = apply(second, f)
    rhs = (
        hardy_littlewood(apply(first, t2f), family)
        + orlicz_maximal(t2f, 1, family)
        + orlicz_maximal(f, 2, family)
    )
    return pointwise_constant(lhs, rhs)


def bisublinear_bound(first, second, f, g, q, family=None, inner_family="dyadic"):
    """Constant in 𝓜*(f, g) <= C q' U f M_q g with U f = M T2 f + M_{L log L} f."""
    lhs = bisublinear_grand_maximal(first, second, f, g, inner_family=inner_family)
    u = hardy_littlewood(apply(second, f), family) + orlicz_maximal(f, 1, family)
    rhs = u * power_maximal(g, q, family) * (q / (q - 1.0))
    return pointwise_constant(lhs, rhs)


@dataclass(frozen=True)
class ComparabilityBand:
    """min and max over cells of orlicz/iterated where both are positive."""

    low: float
    high: float


def comparability_band(f, beta, family=None):
    """M_{L(log L)^β} f versus the (β+1)-fold iterate of M."""
    orlicz = orlicz_maximal(f, beta, family).values
    iterated = iterated_maximal(f, beta + 1, family).values
    live = (iterated > 0) & (orlicz > 0)
    if not np.any(live):
        return ComparabilityBand(1.0, 1.0)
    ratio = orlicz[live] / iterated[live]
    return ComparabilityBand(float(ratio.min()), float(ratio.max()))


def weak_type_constant(g, beta, levels, family=None):
    """
    max over λ of |{M_{L(log L)^β} g > λ}| / ∫ (|g|/λ) log^β(e + |g|/λ).

    Levels where the right side vanishes are skipped.
    """
    mg = orlicz_maximal(g, beta, family).values
    best = 0.0
    for lam in levels:
        lhs = np.count_nonzero(mg > lam) * g.cell_measure
        rhs = float(young_modular(g.values, lam, beta))
        if rhs > 0:
            best = max(best, lhs / rhs)
    return best
