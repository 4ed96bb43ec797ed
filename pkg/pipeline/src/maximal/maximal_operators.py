"""
maximal_operators.py

Hardy-Littlewood, power and Orlicz maximal operators on the grid.

    maximal(f, spec)(x) = max over family cubes Q ∋ x of Φ(f, Q)

with Φ a LocalFunctional: power(1) gives M, power(q) gives M_q and
luxemburg(β) gives M_{L(log L)^β}. Power functionals use prefix sums; Luxemburg
functionals use one batched root solve per cube side. The per-cell maximum is
delegated to CubeFamily.cell_max.

Created: July 23, 2025
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from grid.cube_family import CubeFamily, resolve_family
from grid.errors import InvalidParameterError
from orlicz.local_norms import LocalFunctional

logger = logging.getLogger(__name__)

MASKS = ("none", "erase-3Q", "erase-9Q", "erase-27Q", "keep-9Q")

# Rows per batched call of the maximal engine.
_BATCH_CHUNK = 64


@dataclass(frozen=True)
class MaximalSpec:
    """
    Attributes:
        functional (LocalFunctional): Local size functional
        family (str | None): Cube family; None resolves to the dimension default
        mask (str): Masking rule; plain maximal operators take "none",
            the grand maximal operators own the others
    """

    functional: LocalFunctional = field(default_factory=LocalFunctional.average)
    family: str | None = None
    mask: str = "none"

    def __post_init__(self):
        if self.mask not in MASKS:
            raise InvalidParameterError(f"unknown masking rule {self.mask!r}")
        if self.family not in (None, "auto"):
            resolve_family(self.family, 1)


def family_values(block, family, side, functional):
    """Functional of every family cube of one side; shape batch + (m,)*n."""
    if functional.kind == "power":
        r = functional.parameter
        means = family.window_means(np.abs(block) ** r, side)
        return means if r == 1 else means ** (1.0 / r)
    return functional.evaluate_rows(family.windows(np.abs(block), side))


def family_maximal(block, family, functional):
    """
    Maximal function of a block (or a batch of blocks) over a cube family.

    Parameters:
        block (np.ndarray): batch + (side_cells,)*n values
        family (CubeFamily): Family tiling the block
        functional (LocalFunctional): Local functional

    Returns:
        np.ndarray: Same shape as `block`
    """
    per_side = {side: family_values(block, family, side, functional) for side in family.sides()}
    return family.cell_max(per_side)


def maximal_values(values, n, level, spec):
    """
    Maximal operator applied to a stack of flat cell vectors.

    Parameters:
        values (np.ndarray): shape (B, 2^{nL})
        n (int), level (int): Grid geometry
        spec (MaximalSpec): Functional and family (mask must be "none")

    Returns:
        np.ndarray: shape (B, 2^{nL})
    """
    if spec.mask != "none":
        raise InvalidParameterError(f"plain maximal operators take no mask, got {spec.mask!r}")
    values = np.atleast_2d(np.asarray(values, dtype=float))
    side_cells = 2 ** level
    family = CubeFamily(resolve_family(spec.family, n), n, side_cells)
    out = np.empty_like(values)
    for start in range(0, values.shape[0], _BATCH_CHUNK):
        chunk = values[start:start + _BATCH_CHUNK].reshape((-1,) + (side_cells,) * n)
        out[start:start + _BATCH_CHUNK] = family_maximal(chunk, family, spec.functional).reshape(
            chunk.shape[0], -1
        )
    return out


def maximal(f, spec=None):
    """
    Maximal function of a grid function.

    Parameters:
        f (GridFunction): Input
        spec (MaximalSpec | None): Defaults to Hardy-Littlewood over the default family

    Returns:
        GridFunction
    """
    spec = spec or MaximalSpec()
    return f.with_values(maximal_values(f.values[None, :], f.n, f.level, spec)[0])


def hardy_littlewood(f, family=None):
    return maximal(f, MaximalSpec(LocalFunctional.average(), family))


def power_maximal(f, q, family=None):
    return maximal(f, MaximalSpec(LocalFunctional.power(q), family))


def orlicz_maximal(f, beta, family=None):
    return maximal(f, MaximalSpec(LocalFunctional.luxemburg(beta), family))


def iterated_maximal(f, times, family=None):
    """M applied `times` times (MMf, MMMf)."""
    out = f
    for _ in range(times):
        out = hardy_littlewood(out, family)
    return out
