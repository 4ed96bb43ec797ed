"""
whitney.py

Whitney decomposition of an open cell set Ω into dyadic cubes.

Distances are measured in cells between midpoints in the sup norm; the
distance of a cube to Ω^c is the minimum of the chessboard distance transform
over its cells. Dyadic cubes are scanned from the largest down and a cube is
accepted when
    dist(Q, Ω^c) >= 5R·diam Q
and no ancestor was accepted. Unit cells of Ω left uncovered (grid too coarse
for the band) are returned separately as forced cells together with their
achieved ratio, and the band is then reported as not met. When no cube at all
is admissible the result is empty and carries a "grid too coarse" diagnostic.

Created: July 25, 2025
"""

import logging
from dataclasses import dataclass
from math import ceil, log2, sqrt

import numpy as np
from scipy.ndimage import distance_transform_cdt

from grid.cube_family import CubeFamily
from grid.cubes import Cube, scaled_cells
from grid.errors import InvalidParameterError

logger = logging.getLogger(__name__)

BAND_LOW = 5.0
BAND_HIGH = 15.0


@dataclass(frozen=True, eq=False)
class WhitneyResult:
    """
    Attributes:
        omega (np.ndarray): Flat boolean mask of Ω
        R (float): Dilation parameter
        cubes (tuple[Cube, ...]): Accepted Whitney cubes
        forced (tuple[Cube, ...]): Unit cells of Ω no admissible cube covers
        ratios (tuple[float, ...]): dist(Q, Ω^c)/diam Q per accepted cube
        forced_ratios (tuple[float, ...]): dist(Q, Ω^c)/diam Q per forced cell
        max_overlap (int): max over Ω of Σ_j χ_{RQ_j} (accepted and forced cubes)
        min_level (int): Smallest L at which the band is realizable for R
        diagnostic (str): Empty, or why no admissible cube exists
    """

    omega: np.ndarray
    R: float
    cubes: tuple
    forced: tuple
    ratios: tuple
    forced_ratios: tuple
    max_overlap: int
    min_level: int
    diagnostic: str = ""

    def _in_band(self, values):
        return all(BAND_LOW * self.R <= r <= BAND_HIGH * self.R for r in values)

    @property
    def band_ok(self):
        """True when every cube of the cover, forced cells included, lies in [5R, 15R]."""
        return bool(self.cubes) and self._in_band(self.ratios + self.forced_ratios)

    @property
    def accepted_band_ok(self):
        return self._in_band(self.ratios)

    @property
    def achieved_band(self):
        """(min, max) of dist/diam over accepted and forced cubes; (nan, nan) when empty."""
        values = self.ratios + self.forced_ratios
        if not values:
            return (float("nan"), float("nan"))
        return (min(values), max(values))

    @property
    def complete(self):
        return bool(self.cubes) and not self.forced


def whitney_min_level(R, n):
    """L_min(R) = ceil(log2(2(5R√n + 1)))."""
    return max(1, ceil(log2(2.0 * (BAND_LOW * R * sqrt(n) + 1.0))))


def complement_distance(omega, n, level):
    """Chessboard distance (in cells) from each cell of Ω to the nearest cell of Ω^c."""
    grid = np.asarray(omega, dtype=bool).reshape((2 ** level,) * n)
    return distance_transform_cdt(grid, metric="chessboard").astype(float)


def whitney_decompose(omega, n, level, R):
    """
    Whitney cubes of Ω.

    Parameters:
        omega (np.ndarray): Flat boolean mask (True on Ω)
        n (int), level (int): Grid geometry
        R (float): Parameter > 1

    Returns:
        WhitneyResult

    Raises:
        InvalidParameterError: If R <= 1 or Ω is empty or the whole domain
    """
    omega = np.asarray(omega, dtype=bool).reshape(-1)
    if R <= 1:
        raise InvalidParameterError(f"Whitney parameter R must be > 1, got {R}")
    if not omega.any():
        raise InvalidParameterError("Whitney decomposition of an empty set")
    if omega.all():
        raise InvalidParameterError("Whitney decomposition needs Ω^c to be nonempty")

    side_cells = 2 ** level
    dist = complement_distance(omega, n, level)
    family = CubeFamily("dyadic", n, side_cells)
    threshold = BAND_LOW * R * sqrt(n)

    cubes, ratios = [], []
    covered = np.zeros((1,) * n, dtype=bool)
    s = side_cells
    while s >= 1:
        blocks = family.windows(dist, s)
        nearest = blocks.min(axis=-1)
        hits = (nearest >= threshold * s) & ~covered
        for idx in zip(*np.nonzero(hits)):
            cubes.append(Cube(tuple(int(i) * s for i in idx), s, level, dyadic=True))
            ratios.append(float(nearest[idx]) / (sqrt(n) * s))
        covered = covered | hits
        if s > 1:
            for axis in range(n):
                covered = np.repeat(covered, 2, axis=axis)
        s //= 2

    if not cubes:
        diagnostic = (
            f"grid too coarse: no cube of Ω meets dist >= 5R·diam at L={level}, R={R:g}"
        )
        logger.warning("Whitney decomposition empty: %s", diagnostic)
        return WhitneyResult(
            omega=omega,
            R=float(R),
            cubes=(),
            forced=(),
            ratios=(),
            forced_ratios=(),
            max_overlap=0,
            min_level=whitney_min_level(R, n),
            diagnostic=diagnostic,
        )

    leftover = omega & ~covered.reshape(-1)
    flat_dist = dist.reshape(-1)
    forced, forced_ratios = [], []
    for flat in np.nonzero(leftover)[0]:
        offsets = np.unravel_index(flat, (side_cells,) * n)
        forced.append(Cube(tuple(int(o) for o in offsets), 1, level, dyadic=True))
        forced_ratios.append(float(flat_dist[flat]) / sqrt(n))
    if forced:
        logger.warning(
            "Whitney band unrealizable for %d cell(s) at L=%d, R=%g (L_min=%d)",
            len(forced), level, R, whitney_min_level(R, n),
        )

    overlap = np.zeros(omega.size, dtype=int)
    for q in cubes + forced:
        overlap[scaled_cells(q, R)] += 1
    max_overlap = int(overlap[omega].max())

    return WhitneyResult(
        omega=omega,
        R=float(R),
        cubes=tuple(cubes),
        forced=tuple(forced),
        ratios=tuple(ratios),
        forced_ratios=tuple(forced_ratios),
        max_overlap=max_overlap,
        min_level=whitney_min_level(R, n),
    )
