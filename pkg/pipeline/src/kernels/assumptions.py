"""
assumptions.py

Numerical verifiers of the kernel assumptions on TA_t and D_tT.

- L¹ tail:    sup_y Σ_{x : |x-y| >= c1 t^{1/s}} |K - K_t|(x, y) h
- smoothness: sup over |x - y| >= c t^{1/s} of |K - K_t| |x - y|^{n+α} / t^{α/s}
              (K_t for TA_t with c = c1, K^t for D_tT with c = c2)
- size:       sup over 0 < |x - y| <= c2 t^{1/s} of |K_t| t^{n/s}

All checks depend on the kernel only; they never see an input function.

Created: July 24, 2025
"""

import logging
from dataclasses import dataclass

import numpy as np

from grid.errors import InvalidParameterError
from kernels.approximation import composite_DT, composite_TA
from kernels.operators import squared_cell_distances

logger = logging.getLogger(__name__)

COMPOSITES = ("TA", "DT")


@dataclass(frozen=True)
class PointwiseCheck:
    """
    Attributes:
        smoothness_sup (float): Normalized sup of |K - K_t| away from the diagonal
        size_sup (float): Normalized sup of |K_t| near the diagonal (0 if no admissible pair)
    """

    smoothness_sup: float
    size_sup: float


def _distances(op):
    return np.sqrt(squared_cell_distances(op.n, op.level)) * 2.0 ** (-op.level)


def check_assumption_L1(op, family, t, periodic=False):
    """
    L¹ tail of K - K_t in x, worst column y.

    Parameters:
        op (KernelOperator): T
        family (AtIFamily): A_t
        t (float): Time parameter

    Returns:
        float: 0 when no pair lies beyond c1·t^{1/s}
    """
    composite = composite_TA(op, family, t, periodic)
    far = _distances(op) >= family.c1 * family.scale(t)
    column_mass = (np.abs(op.matrix - composite) * far).sum(axis=0)
    return float(column_mass.max())


def check_assumption_pointwise(op, family, t, which="TA", periodic=False):
    """
    Hölder-tail and size sups for K_t (which="TA") or K^t (which="DT").

    Returns:
        PointwiseCheck
    """
    if which not in COMPOSITES:
        raise InvalidParameterError(f"composite must be one of {COMPOSITES}, got {which!r}")
    h = op.cell_measure
    scale = family.scale(t)
    if which == "TA":
        composite, c = composite_TA(op, family, t, periodic), family.c1
    else:
        composite, c = composite_DT(op, family, t, periodic), family.c2

    kernel = op.matrix / h
    composite = composite / h
    dist = _distances(op)

    far = dist >= c * scale
    smooth = 0.0
    if np.any(far):
        weight = dist[far] ** (op.n + family.alpha) / t ** (family.alpha / family.s)
        smooth = float((np.abs(kernel - composite)[far] * weight).max())

    near = (dist > 0) & (dist <= family.c2 * scale)
    size = float((np.abs(composite[near]) * t ** (op.n / family.s)).max()) if np.any(near) else 0.0
    logger.debug("%s %s at t=%g: smoothness %.6g, size %.6g", op.label, which, t, smooth, size)
    return PointwiseCheck(smooth, size)
