"""
cubes.py

Grid-aligned cubes and the cube algebra used throughout the toolkit.

Key tasks:
- Represent a cube by its lower corner (in cells) and its side length
- Dilate cubes about their centre (3Q, 9Q, 27Q) with clipping or wrapping
- Resolve a cube to the flat indices of the cells it covers
- Integrate grid functions over cubes
- Walk the dyadic tree (children, parent, subcubes)

Created: July 21, 2025
"""

from dataclasses import dataclass
from math import sqrt

import numpy as np

from grid.errors import CubeOutOfRangeError, InvalidParameterError

EXACT = "exact"
CLIP = "clip"
WRAP = "wrap"
MODES = (EXACT, CLIP, WRAP)


@dataclass(frozen=True)
class Cube:
    """
    Axis-parallel cube on the 2^L grid.

    Attributes:
        offsets (tuple[int, ...]): Lower corner in cells, one entry per axis.
            May lie outside [0, 2^L) for dilated cubes.
        side (int): Side length in cells.
        level (int): Level L of the ambient grid.
        dyadic (bool): Flag for members of the dyadic tree.
        mode (str): How cells outside the domain are treated ("exact", "clip", "wrap").
    """

    offsets: tuple
    side: int
    level: int
    dyadic: bool = False
    mode: str = EXACT

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(int(o) for o in self.offsets))
        if self.side < 1:
            raise InvalidParameterError(f"cube side must be >= 1, got {self.side}")
        if self.mode not in MODES:
            raise InvalidParameterError(f"unknown cube mode {self.mode!r}")
        if self.dyadic:
            if self.side & (self.side - 1):
                raise InvalidParameterError(f"dyadic side must be a power of two, got {self.side}")
            if any(o % self.side for o in self.offsets):
                raise InvalidParameterError(f"dyadic offsets {self.offsets} not multiples of {self.side}")

    @property
    def n(self):
        return len(self.offsets)

    @property
    def side_length(self):
        """ℓ(Q) in domain units."""
        return self.side * 2.0 ** (-self.level)

    @property
    def measure(self):
        """Geometric measure |Q| (ignores clipping)."""
        return self.side_length ** self.n

    @property
    def diameter(self):
        return sqrt(self.n) * self.side_length

    @property
    def center(self):
        """Centre in cell units."""
        return tuple(o + self.side / 2.0 for o in self.offsets)


def root_cube(n, level):
    return Cube((0,) * n, 2 ** level, level, dyadic=True)


def axis_cells(low, high, side_cells, wrap):
    """Cell indices covered along one axis by [low, high)."""
    if wrap:
        return np.unique(np.arange(low, high) % side_cells)
    return np.arange(max(low, 0), min(high, side_cells))


def cube_cells(cube, periodic=False):
    """
    Flat indices (sorted) of the cells covered by `cube`.

    Parameters:
        cube (Cube): The cube
        periodic (bool): Wrap out-of-range parts instead of failing

    Returns:
        np.ndarray: Sorted int array of flat cell indices

    Raises:
        CubeOutOfRangeError: If an exact cube leaves a non-periodic domain
    """
    side_cells = 2 ** cube.level
    wrap = periodic or cube.mode == WRAP
    if cube.mode == EXACT and not wrap:
        if any(o < 0 or o + cube.side > side_cells for o in cube.offsets):
            raise CubeOutOfRangeError(f"cube {cube.offsets}+{cube.side} leaves [0, {side_cells})")

    axes = [axis_cells(o, o + cube.side, side_cells, wrap) for o in cube.offsets]
    if cube.n == 1:
        return axes[0]
    return (axes[0][:, None] * side_cells + axes[1][None, :]).ravel()


def cube_mask(cube, periodic=False):
    """Boolean mask over all cells of the grid, True on the cells of `cube`."""
    mask = np.zeros(2 ** (cube.n * cube.level), dtype=bool)
    mask[cube_cells(cube, periodic)] = True
    return mask


def covered_measure(cube, periodic=False):
    """Measure of the part of `cube` that lies in the domain."""
    return cube_cells(cube, periodic).size * 2.0 ** (-cube.n * cube.level)


def integrate(f, cube):
    """
    Integral of a grid function over a cube (exact cell sum).

    Parameters:
        f (GridFunction): Integrand
        cube (Cube): Cube on the same grid

    Returns:
        float: Σ_{cells in Q} f · cell measure
    """
    if cube.level != f.level or cube.n != f.n:
        raise InvalidParameterError("cube and function live on different grids")
    cells = cube_cells(cube, f.periodic)
    return float(f.values[cells].sum() * f.cell_measure)


def dilate(cube, factor, periodic=False):
    """
    Concentric dilate λQ for odd integer λ.

    Returns:
        Cube: Side multiplied by λ, same centre; mode "wrap" on periodic grids,
        "clip" otherwise (unless λ = 1).

    Raises:
        InvalidParameterError: If λ is not an odd positive integer
    """
    if factor < 1 or factor % 2 == 0:
        raise InvalidParameterError(f"dilation factor must be an odd positive integer, got {factor}")
    if factor == 1:
        return cube
    shift = (factor - 1) // 2 * cube.side
    mode = WRAP if periodic else CLIP
    return Cube(tuple(o - shift for o in cube.offsets), cube.side * factor, cube.level, False, mode)


def scaled_cells(cube, ratio):
    """
    Cells whose midpoints lie in the open cube R·Q (real R > 0), clipped to the domain.
    """
    side_cells = 2 ** cube.level
    half = ratio * cube.side / 2.0
    mids = np.arange(side_cells) + 0.5
    axes = [np.nonzero(np.abs(mids - c) < half)[0] for c in cube.center]
    if cube.n == 1:
        return axes[0]
    return (axes[0][:, None] * side_cells + axes[1][None, :]).ravel()


# --- dyadic tree ----------------------------------------------------------------


def children(cube):
    """The 2^n dyadic children of a dyadic cube with side >= 2."""
    if not cube.dyadic or cube.side < 2:
        return []
    half = cube.side // 2
    if cube.n == 1:
        steps = [(0,), (half,)]
    else:
        steps = [(0, 0), (0, half), (half, 0), (half, half)]
    return [
        Cube(tuple(o + s for o, s in zip(cube.offsets, step)), half, cube.level, dyadic=True)
        for step in steps
    ]


def parent(cube):
    """Dyadic parent, or None for the root."""
    side_cells = 2 ** cube.level
    if not cube.dyadic or cube.side >= side_cells:
        return None
    double = cube.side * 2
    return Cube(tuple(o - o % double for o in cube.offsets), double, cube.level, dyadic=True)


def contains(outer, inner):
    """True when `inner` lies inside `outer` (both exact cubes)."""
    return all(
        oo <= io and io + inner.side <= oo + outer.side
        for oo, io in zip(outer.offsets, inner.offsets)
    )


def dyadic_subcubes(cube):
    """
    All dyadic cubes contained in a dyadic `cube`, itself included,
    ordered from the largest down and lexicographically within a size.
    """
    found = []
    side = cube.side
    while side >= 1:
        steps = range(0, cube.side, side)
        if cube.n == 1:
            corners = [(cube.offsets[0] + a,) for a in steps]
        else:
            corners = [(cube.offsets[0] + a, cube.offsets[1] + b) for a in steps for b in steps]
        found.extend(Cube(c, side, cube.level, dyadic=True) for c in corners)
        side //= 2
    return found

