"""
calderon_zygmund.py

Calderón-Zygmund decomposition of a grid function at a level λ.

Maximal dyadic cubes with ⟨|f|⟩_Q > λ are selected top-down, one dyadic
generation at a time, with a coverage mask so no selected cube contains
another. The same stopping rule, applied to χ_E at 2^{-(n+1)} inside a node
cube, drives the sparse domination recursion.

Created: July 25, 2025
"""

import logging
from dataclasses import dataclass

import numpy as np

from grid.cube_family import CubeFamily
from grid.cubes import Cube, cube_mask, root_cube
from grid.errors import InvalidParameterError

logger = logging.getLogger(__name__)

BAD_PART_MODES = ("restriction", "mean-zero")


def stopping_cubes(values, n, level, lam, root=None, include_root=True):
    """
    Maximal dyadic subcubes of `root` whose average of `values` exceeds λ.

    Parameters:
        values (np.ndarray): Flat nonnegative cell values on the 2^L grid
        n (int), level (int): Grid geometry
        lam (float): Stopping level
        root (Cube | None): Dyadic cube to descend from; defaults to [0,1)^n
        include_root (bool): Whether the root itself may be selected

    Returns:
        list[Cube]: Pairwise disjoint dyadic cubes, largest first
    """
    root = root or root_cube(n, level)
    side = root.side
    grid = np.asarray(values, dtype=float).reshape((2 ** level,) * n)
    block = grid[tuple(slice(o, o + side) for o in root.offsets)]
    family = CubeFamily("dyadic", n, side)

    selected = []
    covered = np.zeros((1,) * n, dtype=bool)
    s = side
    while s >= 1:
        if s < side or include_root:
            hits = (family.window_means(block, s) > lam) & ~covered
            for idx in zip(*np.nonzero(hits)):
                offsets = tuple(o + int(i) * s for o, i in zip(root.offsets, idx))
                selected.append(Cube(offsets, s, level, dyadic=True))
            covered = covered | hits
        if s > 1:
            for axis in range(n):
                covered = np.repeat(covered, 2, axis=axis)
        s //= 2
    return selected


@dataclass(frozen=True, eq=False)
class CZResult:
    """
    Attributes:
        level (float): λ
        cubes (tuple[Cube, ...]): Selected cubes Q_l
        good (GridFunction): g
        bad (tuple[GridFunction, ...]): b_l, supported in Q_l
        t_values (tuple[float, ...]): t_{Q_l} = ℓ(Q_l)^s
        mode (str): "restriction" (b_l = fχ_{Q_l}) or "mean-zero"
    """

    level: float
    cubes: tuple
    good: object
    bad: tuple
    t_values: tuple
    mode: str

    def bad_total(self):
        total = self.good.with_values(np.zeros_like(self.good.values))
        for b in self.bad:
            total = total + b
        return total

    def covered_measure(self):
        return sum(q.measure for q in self.cubes)


def cz_decompose(f, lam, mode="restriction", s=2.0):
    """
    Calderón-Zygmund decomposition of f at level λ (stopping on ⟨|f|⟩_Q).

    Parameters:
        f (GridFunction): Input
        lam (float): Level, > 0
        mode (str): "restriction" or "mean-zero" bad parts
        s (float): Scaling exponent for t_Q = ℓ(Q)^s

    Returns:
        CZResult

    Raises:
        InvalidParameterError: If λ <= 0 or the mode is unknown
    """
    if lam <= 0:
        raise InvalidParameterError(f"CZ level must be > 0, got {lam}")
    if mode not in BAD_PART_MODES:
        raise InvalidParameterError(f"unknown bad-part mode {mode!r}")

    cubes = stopping_cubes(np.abs(f.values), f.n, f.level, lam)
    good = f.values.copy()
    bad = []
    for q in cubes:
        mask = cube_mask(q)
        if mode == "restriction":
            bad.append(f.with_values(np.where(mask, f.values, 0.0)))
            good[mask] = 0.0
        else:
            mean = f.values[mask].mean()
            bad.append(f.with_values(np.where(mask, f.values - mean, 0.0)))
            good[mask] = mean

    logger.debug("CZ at λ=%g selected %d cubes", lam, len(cubes))
    return CZResult(
        level=lam,
        cubes=tuple(cubes),
        good=f.with_values(good),
        bad=tuple(bad),
        t_values=tuple(q.side_length ** s for q in cubes),
        mode=mode,
    )
