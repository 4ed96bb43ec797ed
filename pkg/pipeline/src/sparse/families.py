"""
families.py

Sparse families of cubes with explicit certificates, and sparse forms.

A family is η-sparse when every cube Q owns a set E_Q ⊆ Q with |E_Q| >= η|Q|
and the E_Q are pairwise disjoint. Clipped cubes (dilates at the domain edge)
are measured by the cells they cover.

Created: July 28, 2025
"""

import logging
from dataclasses import dataclass

import numpy as np

from grid.cubes import cube_cells
from grid.errors import InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SparseFamily:
    """
    Attributes:
        cubes (tuple[Cube, ...]): The family
        certificates (tuple[np.ndarray, ...]): Flat cell indices of E_Q, one per cube
        eta (float): Claimed sparsity parameter
    """

    cubes: tuple
    certificates: tuple
    eta: float

    def __post_init__(self):
        if len(self.cubes) != len(self.certificates):
            raise InvalidParameterError("one certificate per cube is required")
        object.__setattr__(self, "cubes", tuple(self.cubes))
        object.__setattr__(
            self, "certificates", tuple(np.asarray(c, dtype=np.int64) for c in self.certificates)
        )

    def __len__(self):
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    @classmethod
    def greedy(cls, cubes):
        """Family whose certificates come from verify_sparsity."""
        eta, certificates = verify_sparsity(cubes)
        return cls(tuple(cubes), tuple(certificates), eta)


def verify_sparsity(cubes):
    """
    Greedy certificates: cubes claim their unclaimed cells, smallest first.

    Parameters:
        cubes (list[Cube]): Cubes of one grid

    Returns:
        tuple[float, list[np.ndarray]]: achieved η = min |E_Q|/|Q| (1 for an empty
        list) and the certificates in the order of `cubes`
    """
    cubes = list(cubes)
    if not cubes:
        return 1.0, []
    levels = {q.level for q in cubes}
    dims = {q.n for q in cubes}
    if len(levels) != 1 or len(dims) != 1:
        raise InvalidParameterError("cubes come from different grids")
    n, level = dims.pop(), levels.pop()

    claimed = np.zeros(2 ** (n * level), dtype=bool)
    certificates = [None] * len(cubes)
    order = sorted(range(len(cubes)), key=lambda i: (cubes[i].side, cubes[i].offsets))
    eta = 1.0
    for i in order:
        cells = cube_cells(cubes[i])
        own = cells[~claimed[cells]]
        claimed[own] = True
        certificates[i] = own
        eta = min(eta, own.size / cells.size)
    return eta, certificates


def certify(family):
    """
    Check explicit certificates and return the achieved η.

    Raises:
        InvalidParameterError: If a certificate leaves its cube or two certificates overlap
    """
    if not len(family):
        return 1.0
    q0 = family.cubes[0]
    seen = np.zeros(2 ** (q0.n * q0.level), dtype=bool)
    eta = 1.0
    for cube, cert in zip(family.cubes, family.certificates):
        cells = cube_cells(cube)
        if not np.all(np.isin(cert, cells)):
            raise InvalidParameterError(f"certificate of {cube.offsets}+{cube.side} leaves the cube")
        if np.any(seen[cert]):
            raise InvalidParameterError(f"certificate of {cube.offsets}+{cube.side} overlaps another")
        seen[cert] = True
        eta = min(eta, np.unique(cert).size / cells.size)
    return eta


def sparse_form(family, f, g, left, right):
    """
    𝓐_{S;X,Y}(f, g) = Σ_{Q∈S} |Q| Φ_X(f, Q) Φ_Y(g, Q).

    Parameters:
        family (SparseFamily | list[Cube]): S
        f, g (GridFunction): Inputs on one grid
        left, right (LocalFunctional): Φ_X and Φ_Y

    Returns:
        float
    """
    f.require_geometry(g)
    total = 0.0
    for cube in family:
        cells = cube_cells(cube, f.periodic)
        right_value = right.evaluate_values(g.values[cells])
        if right_value == 0.0:
            continue
        total += cells.size * f.cell_measure * left.evaluate_values(f.values[cells]) * right_value
    return total
