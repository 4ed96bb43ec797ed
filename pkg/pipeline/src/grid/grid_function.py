"""
grid_function.py

Piecewise-constant functions on the uniform 2^L grid of [0,1)^n.

Every function, weight and kernel input in the toolkit is a GridFunction:
- values are stored flat in row-major order (axis 0 varies slowest)
- the array is read-only once the object is built
- `periodic` only affects how cubes are dilated, never the values

Created: July 21, 2025
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from grid.errors import GeometryMismatchError, InvalidParameterError

SUPPORTED_DIMENSIONS = (1, 2)


@lru_cache(maxsize=32)
def cell_midpoints(n, level):
    """
    Midpoints of all cells, one row per cell in flat order.

    Parameters:
        n (int): Dimension (1 or 2)
        level (int): Grid level L (2^L cells per axis)

    Returns:
        np.ndarray: Read-only array of shape (2^{nL}, n)
    """
    side = 2 ** level
    axis = (np.arange(side) + 0.5) / side
    if n == 1:
        points = axis[:, None]
    else:
        rows, cols = np.meshgrid(axis, axis, indexing="ij")
        points = np.column_stack([rows.ravel(), cols.ravel()])
    points.setflags(write=False)
    return points


@lru_cache(maxsize=32)
def cell_coordinates(n, level):
    """Integer cell coordinates, one row per cell in flat order (read-only)."""
    side = 2 ** level
    axis = np.arange(side)
    if n == 1:
        coords = axis[:, None]
    else:
        rows, cols = np.meshgrid(axis, axis, indexing="ij")
        coords = np.column_stack([rows.ravel(), cols.ravel()])
    coords.setflags(write=False)
    return coords


@dataclass(frozen=True, eq=False)
class GridFunction:
    """
    Real function that is constant on each cell of the 2^L grid.

    Attributes:
        n (int): Dimension, 1 or 2
        level (int): Grid level L >= 0
        values (np.ndarray): Flat cell values, length 2^{nL}
        periodic (bool): Whether cube dilations wrap around the torus
    """

    n: int
    level: int
    values: np.ndarray
    periodic: bool = False

    def __post_init__(self):
        if self.n not in SUPPORTED_DIMENSIONS:
            raise InvalidParameterError(f"dimension must be 1 or 2, got {self.n}")
        if self.level < 0:
            raise InvalidParameterError(f"level must be >= 0, got {self.level}")

        values = np.array(self.values, dtype=float).reshape(-1)
        expected = 2 ** (self.n * self.level)
        if values.size != expected:
            raise InvalidParameterError(
                f"expected {expected} cell values for n={self.n}, L={self.level}, got {values.size}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    # --- geometry -----------------------------------------------------------

    @property
    def side_cells(self):
        return 2 ** self.level

    @property
    def cell_count(self):
        return self.values.size

    @property
    def cell_measure(self):
        return 2.0 ** (-self.n * self.level)

    @property
    def shape(self):
        return (self.side_cells,) * self.n

    def grid(self):
        """Values reshaped to (2^L,)*n."""
        return self.values.reshape(self.shape)

    def same_geometry(self, other):
        return self.n == other.n and self.level == other.level

    def require_geometry(self, other):
        if not self.same_geometry(other):
            raise GeometryMismatchError(
                f"grid mismatch: (n={self.n}, L={self.level}) vs (n={other.n}, L={other.level})"
            )

    # --- construction -------------------------------------------------------

    def with_values(self, values):
        return GridFunction(self.n, self.level, values, self.periodic)

    @classmethod
    def constant(cls, n, level, c=1.0, periodic=False):
        return cls(n, level, np.full(2 ** (n * level), float(c)), periodic)

    @classmethod
    def zeros(cls, n, level, periodic=False):
        return cls.constant(n, level, 0.0, periodic)

    @classmethod
    def one_cell(cls, n, level, index, height=None, periodic=False):
        """
        Indicator of a single cell scaled to unit integral (unless `height` is given).
        """
        values = np.zeros(2 ** (n * level))
        values[index] = 2.0 ** (n * level) if height is None else height
        return cls(n, level, values, periodic)

    # --- arithmetic ---------------------------------------------------------

    def integral(self):
        return float(self.values.sum() * self.cell_measure)

    def abs(self):
        return self.with_values(np.abs(self.values))

    def _operand(self, other):
        if isinstance(other, GridFunction):
            self.require_geometry(other)
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._operand(other))

    def __mul__(self, other):
        return self.with_values(self.values * self._operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.with_values(self.values / self._operand(other))

    def __neg__(self):
        return self.with_values(-self.values)
