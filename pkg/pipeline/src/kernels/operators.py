"""
operators.py

Discretized singular integral operators on the grid.

An operator is a dense N×N matrix with entries K(x_i, x_j)·(cell measure) and a
zero diagonal (principal value by midpoint sampling). Built-ins:

- hilbert   K(x, y) = 1/(x - y)                           (n = 1)
- riesz2d   K(x, y) = (x_j - y_j)/|x - y|^3               (n = 2, component j)
- rough     K(x, y) = Ω((x - y)/|x - y|)/|x - y|^n        (Ω tabulated)
- matrix    explicit binary64 matrix read from a file

Key tasks:
- apply T to a grid function (or a stack of cell vectors)
- truncations T_ε and the truncated maximal operator T* over all realizable ε
- compositions T1∘T2 and the ℓ² operator norm by power iteration

Created: July 24, 2025
"""

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from data_utils.data_io import load_matrix_file
from grid.errors import GeometryMismatchError, InvalidParameterError
from grid.grid_function import cell_coordinates, cell_midpoints

logger = logging.getLogger(__name__)

OPERATOR_KINDS = ("hilbert", "riesz2d", "rough", "matrix")

_POWER_ITERATIONS = 500
_POWER_RTOL = 1e-10

# Rows per bincount pass of the truncated maximal operator.
_TRUNCATION_ROWS = 256


@dataclass(frozen=True)
class OperatorSpec:
    """
    Attributes:
        kind (str): One of OPERATOR_KINDS
        component (int): Riesz component (1 or 2)
        omega (tuple[float, ...]): Ω table for rough kernels; n=1 reads
            (Ω(-1), Ω(+1)), n=2 reads equal angle bins over [0, 2π)
        matrix_path (str | None): binary64 row-major file for kind "matrix"
    """

    kind: str = "hilbert"
    component: int = 1
    omega: tuple = ()
    matrix_path: str | None = None

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise InvalidParameterError(f"unknown operator kind {self.kind!r}")
        if self.component not in (1, 2):
            raise InvalidParameterError(f"riesz component must be 1 or 2, got {self.component}")
        if self.kind == "matrix" and not self.matrix_path:
            raise InvalidParameterError("matrix operator needs a matrix_path")
        object.__setattr__(self, "omega", tuple(float(v) for v in self.omega))

    @property
    def label(self):
        if self.kind == "riesz2d":
            return f"riesz{self.component}"
        return self.kind


@dataclass(frozen=True, eq=False)
class KernelOperator:
    """
    Dense kernel operator on the 2^L grid.

    Attributes:
        matrix (np.ndarray): N×N, entries K(x_i, x_j)·h (read-only)
        n (int), level (int): Grid geometry
        label (str): Display name, e.g. "hilbert" or "hilbert∘hilbert"
        composite (bool): Product of kernel operators; its diagonal is not forced to zero
    """

    matrix: np.ndarray
    n: int
    level: int
    label: str = "T"
    composite: bool = False

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidParameterError(f"kernel matrix must be square, got shape {matrix.shape}")
        expected = 2 ** (self.n * self.level)
        if matrix.shape[0] != expected:
            raise GeometryMismatchError(
                f"kernel matrix of size {matrix.shape[0]} does not fit n={self.n}, L={self.level}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def cell_measure(self):
        return 2.0 ** (-self.n * self.level)

    def kernel_values(self):
        """K(x_i, x_j) without the cell measure."""
        return self.matrix / self.cell_measure

    @cached_property
    def norm(self):
        """ℓ² operator norm by power iteration on TᵀT."""
        return operator_norm(self.matrix)

    def require_geometry(self, f):
        if f.n != self.n or f.level != self.level:
            raise GeometryMismatchError(
                f"{self.label} lives on (n={self.n}, L={self.level}), input on (n={f.n}, L={f.level})"
            )


# --- construction ---------------------------------------------------------------


def _axis_differences(n, level):
    """x_i - y_j per axis in domain units, one N×N array per axis."""
    mids = cell_midpoints(n, level)
    return [mids[:, a][:, None] - mids[:, a][None, :] for a in range(n)]


@lru_cache(maxsize=4)
def squared_cell_distances(n, level):
    """Integer |c_i - c_j|² between cell coordinates (read-only, N×N)."""
    coords = cell_coordinates(n, level)
    out = np.zeros((coords.shape[0],) * 2, dtype=np.int64)
    for a in range(n):
        d = coords[:, a][:, None] - coords[:, a][None, :]
        out += d * d
    out.setflags(write=False)
    return out


def _hilbert_kernel(n, level):
    if n != 1:
        raise InvalidParameterError("the hilbert kernel lives on n = 1")
    (dx,) = _axis_differences(n, level)
    with np.errstate(divide="ignore"):
        return np.where(dx != 0, 1.0 / dx, 0.0)


def _riesz_kernel(n, level, component):
    if n != 2:
        raise InvalidParameterError("the riesz2d kernel lives on n = 2")
    diffs = _axis_differences(n, level)
    r2 = diffs[0] ** 2 + diffs[1] ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(r2 > 0, diffs[component - 1] / r2 ** 1.5, 0.0)


def default_omega(n):
    """Mean-zero step profiles: sign on the line, alternating quadrants in the plane."""
    return (-1.0, 1.0) if n == 1 else (1.0, -1.0, 1.0, -1.0)


def _rough_kernel(n, level, omega):
    table = np.asarray(omega or default_omega(n), dtype=float)
    diffs = _axis_differences(n, level)
    if n == 1:
        if table.size != 2:
            raise InvalidParameterError(f"n=1 rough kernel needs 2 omega values, got {table.size}")
        dx = diffs[0]
        with np.errstate(divide="ignore"):
            return np.where(dx > 0, table[1] / np.abs(dx), np.where(dx < 0, table[0] / np.abs(dx), 0.0))

    r2 = diffs[0] ** 2 + diffs[1] ** 2
    angle = np.mod(np.arctan2(diffs[1], diffs[0]), 2.0 * np.pi)
    bins = np.minimum((angle / (2.0 * np.pi) * table.size).astype(int), table.size - 1)
    with np.errstate(divide="ignore"):
        return np.where(r2 > 0, table[bins] / r2, 0.0)


def make_operator(spec, n, level, loader=None):
    """
    Build a kernel operator from its spec.

    Parameters:
        spec (OperatorSpec): Operator description
        n (int), level (int): Grid geometry
        loader (callable | None): (path, size) -> N×N array, used for kind "matrix"

    Returns:
        KernelOperator: Zero-diagonal operator
    """
    h = 2.0 ** (-n * level)
    if spec.kind == "hilbert":
        kernel = _hilbert_kernel(n, level)
    elif spec.kind == "riesz2d":
        kernel = _riesz_kernel(n, level, spec.component)
    elif spec.kind == "rough":
        kernel = _rough_kernel(n, level, spec.omega)
    else:
        loader = loader or load_matrix_file
        matrix = np.array(loader(spec.matrix_path, 2 ** (n * level)), dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidParameterError(f"kernel matrix must be square, got shape {matrix.shape}")
        if np.any(np.diag(matrix) != 0):
            logger.warning("matrix %s has a non-zero diagonal; zeroing it", spec.matrix_path)
            np.fill_diagonal(matrix, 0.0)
        return KernelOperator(matrix, n, level, label=spec.label)

    op = KernelOperator(kernel * h, n, level, label=spec.label)
    logger.debug("built %s on n=%d, L=%d", op.label, n, level)
    return op


def compose(first, second):
    """T1∘T2 as the matrix product (T2 is applied first)."""
    if (first.n, first.level) != (second.n, second.level):
        raise GeometryMismatchError(f"cannot compose {first.label} with {second.label}: grids differ")
    return KernelOperator(
        first.matrix @ second.matrix, first.n, first.level, label=f"{first.label}∘{second.label}", composite=True
    )


def operator_norm(matrix):
    """Largest singular value of `matrix` by power iteration from a fixed start vector."""
    size = matrix.shape[0]
    v = np.linspace(1.0, 2.0, size)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(_POWER_ITERATIONS):
        w = matrix.T @ (matrix @ v)
        length = np.linalg.norm(w)
        if length == 0.0:
            return 0.0
        v = w / length
        previous, estimate = estimate, np.sqrt(length)
        if abs(estimate - previous) <= _POWER_RTOL * estimate:
            break
    return float(estimate)


# --- application ----------------------------------------------------------------


def apply(op, f):
    """Tf as a grid function (matrix-vector product)."""
    op.require_geometry(f)
    return f.with_values(op.matrix @ f.values)


def apply_values(op, values):
    """T applied to every row of a (B, N) stack of cell vectors."""
    return np.asarray(values, dtype=float) @ op.matrix.T


def apply_truncated(op, f, eps):
    """T_ε f: only pairs with |x - y| > ε contribute."""
    op.require_geometry(f)
    if eps < 0:
        raise InvalidParameterError(f"truncation radius must be >= 0, got {eps}")
    far = squared_cell_distances(op.n, op.level) > (eps * 2 ** op.level) ** 2
    return f.with_values((op.matrix * far) @ f.values)


def realizable_radii(n, level):
    """Distinct pairwise cell distances in domain units, ascending (0 included)."""
    keys = np.unique(squared_cell_distances(n, level))
    return np.sqrt(keys) * 2.0 ** (-level)


def apply_truncated_maximal(op, f):
    """
    T*f = max over realizable ε of |T_ε f|.

    The contribution of each (row, distance) pair is summed once; tail sums
    over the distances beyond ε then give every truncation at once.
    """
    op.require_geometry(f)
    d2 = squared_cell_distances(op.n, op.level)
    keys, inverse = np.unique(d2, return_inverse=True)
    inverse = inverse.reshape(d2.shape)
    k = keys.size
    full = np.abs(op.matrix @ f.values)
    out = np.empty(op.size)

    for start in range(0, op.size, _TRUNCATION_ROWS):
        stop = min(op.size, start + _TRUNCATION_ROWS)
        contrib = op.matrix[start:stop] * f.values[None, :]
        rows = np.arange(stop - start)[:, None]
        binned = np.bincount(
            (rows * k + inverse[start:stop]).ravel(), weights=contrib.ravel(), minlength=(stop - start) * k
        ).reshape(stop - start, k)
        tails = np.cumsum(binned[:, ::-1], axis=1)[:, ::-1]
        out[start:stop] = np.abs(tails).max(axis=1)

    return f.with_values(np.maximum(out, full))
