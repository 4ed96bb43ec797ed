"""
local_norms.py

Localized Orlicz norms ‖g‖_{L(log L)^β,Q} and power averages ⟨|g|⟩_{r,Q}.

The Luxemburg norm is the unique λ with Φ(λ) = 1, where
    Φ(λ) = |Q|^{-1} ∫_Q (|g|/λ) log^β(e + |g|/λ).
Φ(⟨|g|⟩_Q) >= 1 because log(e + t) >= 1, so the plain average is a valid
lower bracket; the upper bracket starts at (β + 2)·max|g| and doubles.

Created: July 22, 2025
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from grid.cubes import cube_cells
from grid.errors import InvalidParameterError

logger = logging.getLogger(__name__)

LUXEMBURG_RTOL = 1e-10
_MAX_ITERATIONS = 200


def young_modular(values, lam, beta):
    """Mean of (|g|/λ)·log^β(e + |g|/λ) over the last axis."""
    t = np.abs(values) / lam
    if beta == 0:
        return t.mean(axis=-1)
    return (t * np.log(np.e + t) ** beta).mean(axis=-1)


def _upper_bracket(values, beta):
    hi = float(np.max(np.abs(values))) * (beta + 2.0)
    while young_modular(values, hi, beta) > 1.0:
        hi *= 2.0
        logger.debug("luxemburg bracket doubled to %g", hi)
    return hi


def luxemburg_values(values, beta, rtol=LUXEMBURG_RTOL):
    """
    Luxemburg norm of a flat array of cell values (scalar root solve).

    Parameters:
        values (np.ndarray): Cell values of g on Q
        beta (float): Exponent of the logarithm, >= 0
        rtol (float): Relative tolerance of the root

    Returns:
        float: ‖g‖_{L(log L)^β,Q}
    """
    if beta < 0:
        raise InvalidParameterError(f"beta must be >= 0, got {beta}")
    values = np.abs(np.asarray(values, dtype=float))
    mean = float(values.mean())
    if mean == 0.0 or beta == 0:
        return mean

    hi = _upper_bracket(values, beta)
    return bisect(
        lambda lam: young_modular(values, lam, beta) - 1.0,
        mean,
        hi,
        xtol=1e-300,
        rtol=rtol,
        maxiter=_MAX_ITERATIONS,
    )


def batched_luxemburg(values, beta, rtol=LUXEMBURG_RTOL):
    """
    Luxemburg norms of many cubes at once; the last axis holds the cell values.

    Vectorized bisection with the same brackets and tolerance as luxemburg_values.
    """
    if beta < 0:
        raise InvalidParameterError(f"beta must be >= 0, got {beta}")
    a = np.abs(np.asarray(values, dtype=float))
    mean = a.mean(axis=-1)
    if beta == 0:
        return mean

    out = np.zeros(mean.shape)
    live = mean > 0
    if not np.any(live):
        return out

    rows = a[live]
    lo = mean[live].copy()
    hi = rows.max(axis=-1) * (beta + 2.0)
    unbounded = young_modular(rows, hi[:, None], beta) > 1.0
    while np.any(unbounded):
        hi[unbounded] *= 2.0
        unbounded = young_modular(rows, hi[:, None], beta) > 1.0

    for _ in range(_MAX_ITERATIONS):
        mid = 0.5 * (lo + hi)
        above = young_modular(rows, mid[:, None], beta) > 1.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= rtol * hi):
            break
    out[live] = 0.5 * (lo + hi)
    return out


def power_values(values, r):
    """(mean |g|^r)^{1/r} over the last axis."""
    if r <= 0:
        raise InvalidParameterError(f"power exponent must be > 0, got {r}")
    a = np.abs(np.asarray(values, dtype=float))
    if r == 1:
        return a.mean(axis=-1)
    return (a ** r).mean(axis=-1) ** (1.0 / r)


def luxemburg_norm(g, cube, beta):
    """
    ‖g‖_{L(log L)^β,Q}.

    Parameters:
        g (GridFunction): Function
        cube (Cube): Cube of the same grid (clipped/wrapped cubes use their covered cells)
        beta (float): Exponent >= 0

    Returns:
        float: 0 when g vanishes on Q, otherwise the root of Φ(λ) = 1
    """
    return luxemburg_values(g.values[cube_cells(cube, g.periodic)], beta)


def power_average(g, cube, r):
    """⟨|g|⟩_{r,Q} = (|Q|^{-1} ∫_Q |g|^r)^{1/r}."""
    return float(power_values(g.values[cube_cells(cube, g.periodic)], r))


@dataclass(frozen=True)
class LocalFunctional:
    """
    A local size functional on cubes.

    Attributes:
        kind (str): "luxemburg" or "power"
        parameter (float): β for luxemburg (>= 0), r for power (> 0)
    """

    kind: str
    parameter: float

    def __post_init__(self):
        if self.kind == "luxemburg":
            if self.parameter < 0:
                raise InvalidParameterError(f"beta must be >= 0, got {self.parameter}")
        elif self.kind == "power":
            if self.parameter <= 0:
                raise InvalidParameterError(f"power exponent must be > 0, got {self.parameter}")
        else:
            raise InvalidParameterError(f"unknown functional kind {self.kind!r}")

    @classmethod
    def luxemburg(cls, beta):
        return cls("luxemburg", float(beta))

    @classmethod
    def power(cls, r):
        return cls("power", float(r))

    @classmethod
    def average(cls):
        return cls("power", 1.0)

    @property
    def label(self):
        if self.kind == "power":
            return "L1" if self.parameter == 1 else f"L^{self.parameter:g}"
        return f"L(logL)^{self.parameter:g}"

    def evaluate_rows(self, rows):
        """Functional of many cubes; the last axis holds each cube's cell values."""
        if self.kind == "power":
            return power_values(rows, self.parameter)
        return batched_luxemburg(rows, self.parameter)

    def evaluate_values(self, values):
        if self.kind == "power":
            return float(power_values(values, self.parameter))
        return float(luxemburg_values(values, self.parameter))

    def evaluate(self, g, cube):
        return self.evaluate_values(g.values[cube_cells(cube, g.periodic)])
