"""
approximation.py

Approximations to the identity A_t and the composite kernels of TA_t and D_tT.

The built-in family is the heat semigroup,
    a_t(x, y) = (4πt)^{-n/2} exp(-|x - y|²/(4t)),   s = 2,
with envelope h(r) = (4π)^{-n/2} e^{-r²/4}, so |a_t| = t^{-n/s} h(|x - y|/t^{1/s})
holds with equality. On periodic grids the kernel is the sum over all periodic
images (a product of one-dimensional image sums). The identity family A_t = I
is the degenerate case used to cross-check the assumption verifiers.

Created: July 24, 2025
"""

import logging
from dataclasses import dataclass
from math import ceil, pi, sqrt

import numpy as np

from grid.errors import InvalidParameterError
from grid.grid_function import cell_midpoints

logger = logging.getLogger(__name__)

ATI_KINDS = ("heat", "identity")

# Minimum resolution of t^{1/s}, in cell widths.
_RESOLVED_CELLS = 2.0


@dataclass(frozen=True)
class AtIFamily:
    """
    Attributes:
        kind (str): "heat" or "identity"
        s (float): Scaling exponent
        c1 (float): Tail constant of the TA_t assumptions
        c2 (float): Near-diagonal constant of the D_tT assumption and the size condition
        alpha (float): Hölder exponent in (0, 1]
        eta (float): Decay exponent of the envelope
    """

    kind: str = "heat"
    s: float = 2.0
    c1: float = 2.0
    c2: float = 2.0
    alpha: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        if self.kind not in ATI_KINDS:
            raise InvalidParameterError(f"unknown approximation family {self.kind!r}")
        if self.s <= 0 or self.eta <= 0 or self.c1 <= 0 or self.c2 <= 0:
            raise InvalidParameterError("s, eta, c1 and c2 must be positive")
        if not 0 < self.alpha <= 1:
            raise InvalidParameterError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.kind == "heat" and self.s != 2:
            raise InvalidParameterError("the heat family scales with s = 2")

    def envelope(self, r, n):
        """h(r) = (4π)^{-n/2} e^{-r²/4}."""
        if self.kind != "heat":
            raise InvalidParameterError("the identity family has no envelope")
        return (4.0 * pi) ** (-n / 2.0) * np.exp(-np.asarray(r, dtype=float) ** 2 / 4.0)

    def scale(self, t):
        """t^{1/s}."""
        return t ** (1.0 / self.s)


@dataclass(frozen=True, eq=False)
class AtIKernel:
    """
    One member A_t on a grid.

    Attributes:
        family (AtIFamily): Generating family
        t (float): Time parameter
        matrix (np.ndarray): a_t(x_i, x_j)·h
        under_resolved (bool): t^{1/s} is below two cell widths
        mass_loss (float): δ = 1 - min row sum (mass leaving a non-periodic domain)
    """

    family: AtIFamily
    t: float
    matrix: np.ndarray
    under_resolved: bool
    mass_loss: float


def _gaussian_1d(diff, t, periodic):
    """(4πt)^{-1/2} Σ_m exp(-(d + m)²/(4t)), m = 0 only when not periodic."""
    norm = (4.0 * pi * t) ** -0.5
    if not periodic:
        return norm * np.exp(-diff ** 2 / (4.0 * t))
    images = 2 + ceil(8.0 * sqrt(t))
    total = np.zeros_like(diff)
    for m in range(-images, images + 1):
        total += np.exp(-(diff + m) ** 2 / (4.0 * t))
    return norm * total


def ati_kernel(family, t, n, level, periodic=False):
    """
    Matrix of A_t on the 2^L grid.

    Parameters:
        family (AtIFamily): Heat or identity family
        t (float): Time parameter, > 0
        n (int), level (int): Grid geometry
        periodic (bool): Sum over periodic images

    Returns:
        AtIKernel
    """
    if t <= 0:
        raise InvalidParameterError(f"t must be > 0, got {t}")
    size = 2 ** (n * level)
    if family.kind == "identity":
        return AtIKernel(family, t, np.eye(size), False, 0.0)

    h = 2.0 ** (-n * level)
    mids = cell_midpoints(n, level)
    matrix = np.ones((size, size))
    for a in range(n):
        diff = mids[:, a][:, None] - mids[:, a][None, :]
        matrix *= _gaussian_1d(diff, t, periodic)
    matrix *= h

    under = family.scale(t) < _RESOLVED_CELLS * 2.0 ** (-level)
    if under:
        logger.warning("heat kernel under-resolved at t=%g on L=%d", t, level)
    mass_loss = max(0.0, 1.0 - float(matrix.sum(axis=1).min()))
    return AtIKernel(family, t, matrix, bool(under), mass_loss)


def composite_TA(op, family, t, periodic=False):
    """Matrix of TA_t (kernel K_t times the cell measure)."""
    return op.matrix @ ati_kernel(family, t, op.n, op.level, periodic).matrix


def composite_DT(op, family, t, periodic=False):
    """Matrix of D_tT (kernel K^t times the cell measure)."""
    return ati_kernel(family, t, op.n, op.level, periodic).matrix @ op.matrix


@dataclass(frozen=True)
class EnvelopeCheck:
    """
    Attributes:
        worst_ratio (float): max |a_t(x, y)| / (t^{-n/s} h(|x - y|/t^{1/s}))
        decay (float): r^{n+η} h(r) at the largest tabulated r
        largest_r (float): diam([0,1)^n)/t^{1/s}
    """

    worst_ratio: float
    decay: float
    largest_r: float


def check_envelope(family, t, n, level):
    """Pointwise envelope scan of a non-periodic heat kernel."""
    kernel = ati_kernel(family, t, n, level)
    h = 2.0 ** (-n * level)
    mids = cell_midpoints(n, level)
    dist2 = np.zeros((mids.shape[0],) * 2)
    for a in range(n):
        dist2 += (mids[:, a][:, None] - mids[:, a][None, :]) ** 2
    r = np.sqrt(dist2) / family.scale(t)
    bound = t ** (-n / family.s) * family.envelope(r, n)
    resolved = bound > 0
    worst = float((np.abs(kernel.matrix / h)[resolved] / bound[resolved]).max())
    largest = sqrt(n) / family.scale(t)
    decay = float(largest ** (n + family.eta) * family.envelope(largest, n))
    return EnvelopeCheck(worst, decay, largest)


def t_sweep(level):
    """{4^{-k} : k = 1..L-2}."""
    return [4.0 ** (-k) for k in range(1, level - 1)]
