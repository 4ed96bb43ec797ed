"""
cube_family.py

Array-backed cube families and the per-cell maximum engine.

A family is described by its kind and by the side of the block it tiles, so
the same object serves the whole grid and any sub-block (e.g. the inside of a
cube Q when computing M(w·χ_Q)). Cubes of one side length are held as the grid
of their admissible lower corners, which keeps every sweep vectorized:

- window_sums / window_means: cube sums of all cubes of one side via prefix sums
- windows: strided views of the cell values of all cubes of one side
- cell_max: per-cell maximum over the family cubes containing the cell

All arrays may carry leading batch axes; the last n axes are the grid.

Created: July 22, 2025
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from grid.cubes import Cube
from grid.errors import InvalidParameterError

FAMILY_KINDS = ("dyadic", "all", "power2")

# Largest batch·N² block handled at once by the interval engine.
_INTERVAL_CHUNK = 1 << 22


def default_family(n):
    """All intervals on the line, power-of-two squares in the plane."""
    return "all" if n == 1 else "power2"


def resolve_family(family, n):
    kind = default_family(n) if family in (None, "auto") else family
    if kind not in FAMILY_KINDS:
        raise InvalidParameterError(f"unknown cube family {family!r}")
    return kind


@dataclass(frozen=True)
class CubeFamily:
    kind: str
    n: int
    side_cells: int

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise InvalidParameterError(f"unknown cube family {self.kind!r}")
        if self.kind != "all" and self.side_cells & (self.side_cells - 1):
            raise InvalidParameterError(f"{self.kind} family needs a power-of-two block, got {self.side_cells}")

    def sides(self):
        if self.kind == "all":
            return list(range(1, self.side_cells + 1))
        return [1 << k for k in range(self.side_cells.bit_length())]

    def axis_offsets(self, side):
        step = side if self.kind == "dyadic" else 1
        return np.arange(0, self.side_cells - side + 1, step)

    def count(self):
        return sum(len(self.axis_offsets(s)) ** self.n for s in self.sides())

    def cubes(self, level):
        """Materialize the family as Cube objects (small grids only)."""
        dyadic = self.kind == "dyadic"
        found = []
        for side in self.sides():
            offs = self.axis_offsets(side)
            if self.n == 1:
                corners = [(int(a),) for a in offs]
            else:
                corners = [(int(a), int(b)) for a in offs for b in offs]
            found.extend(Cube(c, side, level, dyadic=dyadic) for c in corners)
        return found

    # --- per-side values ----------------------------------------------------

    def _select(self, full, side):
        """Keep the admissible lower corners out of all N-side+1 corners per axis."""
        if self.kind != "dyadic":
            return full
        index = (Ellipsis,) + (slice(None, None, side),) * self.n
        return full[index]

    def window_sums(self, values, side):
        """Sums over every family cube of the given side; shape batch + (m,)*n."""
        out = np.asarray(values, dtype=float)
        for axis in range(out.ndim - self.n, out.ndim):
            moved = np.moveaxis(out, axis, -1)
            prefix = np.concatenate(
                [np.zeros(moved.shape[:-1] + (1,)), np.cumsum(moved, axis=-1)], axis=-1
            )
            moved = prefix[..., side:] - prefix[..., :-side]
            out = np.moveaxis(moved, -1, axis)
        return self._select(out, side)

    def window_means(self, values, side):
        return self.window_sums(values, side) / float(side ** self.n)

    def windows(self, values, side):
        """
        Cell values of every family cube of the given side.

        Returns:
            np.ndarray: shape batch + (m,)*n + (side^n,)
        """
        values = np.asarray(values, dtype=float)
        axes = tuple(range(values.ndim - self.n, values.ndim))
        view = sliding_window_view(values, (side,) * self.n, axis=axes)
        step = side if self.kind == "dyadic" else 1
        lead = (slice(None),) * (values.ndim - self.n)
        view = view[lead + (slice(None, None, step),) * self.n]
        return view.reshape(view.shape[: values.ndim] + (side ** self.n,))

    # --- per-cell maximum ---------------------------------------------------

    def cell_max(self, per_side):
        """
        Per-cell maximum over the family cubes containing each cell.

        Parameters:
            per_side (dict[int, np.ndarray]): side -> values on the admissible
                lower corners, shape batch + (m,)*n

        Returns:
            np.ndarray: batch + (side_cells,)*n
        """
        if self.kind == "dyadic":
            return self._dyadic_cell_max(per_side)
        if self.n == 1:
            return self._interval_cell_max(per_side)
        return self._window_cell_max(per_side)

    def _dyadic_cell_max(self, per_side):
        out = None
        for side, vals in per_side.items():
            expanded = vals
            for axis in range(vals.ndim - self.n, vals.ndim):
                expanded = np.repeat(expanded, side, axis=axis)
            out = expanded if out is None else np.maximum(out, expanded)
        return out

    def _interval_cell_max(self, per_side):
        """
        1-D families: value of [a, b) stored at A[a, b]; the maximum at cell x
        runs over a <= x < b, read off the diagonal of a suffix/prefix max.
        """
        N = self.side_cells
        sample = next(iter(per_side.values()))
        batch_shape = sample.shape[:-1]
        flat = {s: v.reshape(-1, v.shape[-1]) for s, v in per_side.items()}
        batch = int(np.prod(batch_shape, dtype=int))
        chunk = max(1, _INTERVAL_CHUNK // (N * (N + 1)))
        out = np.empty((batch, N))

        for start in range(0, batch, chunk):
            stop = min(batch, start + chunk)
            table = np.full((stop - start, N, N + 1), -np.inf)
            for side, vals in flat.items():
                lows = self.axis_offsets(side)
                table[:, lows, lows + side] = vals[start:stop]
            suffix = np.maximum.accumulate(table[:, :, ::-1], axis=2)[:, :, ::-1]
            prefix = np.maximum.accumulate(suffix[:, :, 1:], axis=1)
            out[start:stop] = np.diagonal(prefix, axis1=1, axis2=2)
        return out.reshape(batch_shape + (N,))

    def _window_cell_max(self, per_side):
        """
        Per side: place the values on the full corner grid, then a trailing
        window max of width `side` along each axis.
        """
        out = None
        for side, vals in per_side.items():
            grid = np.asarray(vals, dtype=float)
            for axis in range(grid.ndim - self.n, grid.ndim):
                pad = [(0, 0)] * grid.ndim
                pad[axis] = (side - 1, side - 1)
                padded = np.pad(grid, pad, constant_values=-np.inf)
                win = sliding_window_view(padded, side, axis=axis)
                grid = win.max(axis=-1)
            out = grid if out is None else np.maximum(out, grid)
        return out


def enumerate_cubes(n, level, family="dyadic"):
    """
    List the cubes of a family on the 2^L grid.

    Parameters:
        n (int): Dimension
        level (int): Grid level
        family (str): "dyadic", "all" (every grid-aligned cube) or "power2"

    Returns:
        list[Cube]
    """
    return CubeFamily(resolve_family(family, n), n, 2 ** level).cubes(level)
