"""
muckenhoupt.py

Muckenhoupt weight constants, dual weights and weighted norms.

Key tasks:
- [w]_{A_p} = max_Q ⟨w⟩_Q ⟨w^{-1/(p-1)}⟩_Q^{p-1}
- [w]_{A_1} = max_x Mw(x)/w(x)
- [w]_{A_∞} = max_Q w(Q)^{-1} ∫_Q M(w χ_Q)   (Fujii-Wilson)
- σ = w^{-1/(p-1)}, ‖f‖_{L^p(w)}, w({|f| > λ})
- Derived exponents τ_w, τ_σ, ε₁, ε₂ for report rows

All suprema run over one cube family (all intervals on the line, power-of-two
squares in the plane unless told otherwise). Inside the A_∞ supremum M(wχ_Q)
ranges over every family cube of the grid. For dyadic cubes and for intervals
only the family cubes inside Q can reach the maximum; for squares of free
position a cube crossing ∂Q can, so those Q are evaluated in a zero-padded block.

Created: July 23, 2025
"""

import logging
import threading
from dataclasses import dataclass

import numpy as np

from grid.cube_family import CubeFamily, resolve_family
from grid.errors import InvalidParameterError
from grid.grid_function import GridFunction, cell_midpoints
from maximal.maximal_operators import family_maximal
from orlicz.local_norms import LocalFunctional

logger = logging.getLogger(__name__)

WEIGHT_FLOOR = 1e-8

# Largest batch·block size of one padded A_∞ sweep.
_PAD_CHUNK = 1 << 22


class Weight:
    """
    Strictly positive grid function with cached Muckenhoupt constants.

    Constants are cached per (kind, p, family) behind a lock; the values
    array is read-only, so a Weight can be shared across worker threads.
    """

    def __init__(self, values, floor=WEIGHT_FLOOR, name="w"):
        clipped = np.maximum(np.asarray(values.values, dtype=float), floor)
        self.w = values.with_values(clipped)
        self.name = name
        self._cache = {}
        self._lock = threading.Lock()

    @property
    def n(self):
        return self.w.n

    @property
    def level(self):
        return self.w.level

    @property
    def values(self):
        return self.w.values

    def scaled(self, c):
        return Weight(self.w * c, name=f"{c:g}*{self.name}")

    def cached(self, key, compute):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = compute()
        with self._lock:
            self._cache.setdefault(key, value)
            return self._cache[key]

    def __repr__(self):
        return f"Weight({self.name!r}, n={self.n}, L={self.level})"


# --- builders -------------------------------------------------------------------


def constant_weight(n, level, c=1.0, periodic=False):
    if c <= 0:
        raise InvalidParameterError(f"constant weight must be positive, got {c}")
    return Weight(GridFunction.constant(n, level, c, periodic), name=f"constant {c:g}")


def power_weight(n, level, exponent, center=0.5, periodic=False):
    """|x - center|^a sampled at cell midpoints (centre repeated on every axis)."""
    mids = cell_midpoints(n, level)
    dist = np.sqrt(((mids - center) ** 2).sum(axis=1))
    with np.errstate(divide="ignore"):
        values = np.where(dist > 0, dist ** exponent, 0.0 if exponent > 0 else np.inf)
    values = np.minimum(values, 1.0 / WEIGHT_FLOOR)
    return Weight(GridFunction(n, level, values, periodic), name=f"power {exponent:g} @ {center:g}")


def array_weight(n, level, values, periodic=False):
    return Weight(GridFunction(n, level, values, periodic), name="array")


def _family(weight, family):
    return CubeFamily(resolve_family(family, weight.n), weight.n, weight.w.side_cells)


# --- constants ------------------------------------------------------------------


def ap_constant(weight, p, family=None):
    """
    [w]_{A_p} over a cube family.

    Parameters:
        weight (Weight): The weight
        p (float): Exponent; p <= 1 is routed to a1_constant
        family (str | None): Cube family

    Returns:
        float: max_Q ⟨w⟩_Q ⟨σ⟩_Q^{p-1}
    """
    if p <= 1:
        return a1_constant(weight, family)
    fam = _family(weight, family)

    def compute():
        grid = weight.w.grid()
        sigma = grid ** (-1.0 / (p - 1.0))
        best = 0.0
        for side in fam.sides():
            terms = fam.window_means(grid, side) * fam.window_means(sigma, side) ** (p - 1.0)
            best = max(best, float(terms.max()))
        return best

    return weight.cached(("Ap", float(p), fam.kind), compute)


def a1_constant(weight, family=None):
    """[w]_{A_1} = max over cells of Mw/w."""
    fam = _family(weight, family)

    def compute():
        grid = weight.w.grid()
        mw = family_maximal(grid, fam, LocalFunctional.average())
        return float((mw / grid).max())

    return weight.cached(("A1", fam.kind), compute)


def ainf_constant(weight, family=None):
    """
    Fujii-Wilson [w]_{A_∞}.

    All cubes of one side are handled as one batch of sub-blocks. Dyadic
    cubes and intervals only need the family cubes inside Q; other families
    go through `_padded_maximal_sums`.
    """
    fam = _family(weight, family)
    inside_only = fam.kind == "dyadic" or (fam.kind == "all" and weight.n == 1)

    def compute():
        grid = weight.w.grid()
        best = 0.0
        for side in fam.sides():
            blocks = fam.windows(grid, side)
            blocks = blocks.reshape((-1,) + (side,) * weight.n)
            axes = tuple(range(1, blocks.ndim))
            if inside_only:
                inner = CubeFamily(fam.kind, weight.n, side)
                totals = family_maximal(blocks, inner, LocalFunctional.average()).sum(axis=axes)
            else:
                totals = _padded_maximal_sums(blocks, fam.kind, weight.n, side)
            ratios = totals / blocks.sum(axis=axes)
            best = max(best, float(ratios.max()))
            logger.debug("A_inf side %d: running max %.6g", side, best)
        return best

    return weight.cached(("Ainf", fam.kind), compute)


def _padded_maximal_sums(blocks, kind, n, side):
    """
    ∫_Q M(wχ_Q) for a batch of cubes Q of one side.

    Each block sits at offset `side` inside a zero block of side 4·side, which
    holds every family cube of smaller side meeting Q. A family cube leaving
    the grid is matched by a shifted copy inside it that meets Q in a
    superset, and cubes of side >= `side` are dominated by Q itself.
    """
    inner = CubeFamily(kind, n, 4 * side)
    inside = (slice(None),) + (slice(side, 2 * side),) * n
    axes = tuple(range(1, n + 1))
    step = max(1, _PAD_CHUNK // (4 * side) ** n)
    totals = np.empty(blocks.shape[0])
    for start in range(0, blocks.shape[0], step):
        padded = np.pad(blocks[start:start + step], [(0, 0)] + [(side, 2 * side)] * n)
        local_max = family_maximal(padded, inner, LocalFunctional.average())
        totals[start:start + step] = local_max[inside].sum(axis=axes)
    return totals


# --- derived quantities ---------------------------------------------------------


def dual_weight(weight, p):
    """σ = w^{-1/(p-1)} cellwise."""
    if p <= 1:
        raise InvalidParameterError(f"dual weight needs p > 1, got {p}")
    return Weight(weight.w.with_values(weight.values ** (-1.0 / (p - 1.0))), name=f"sigma({weight.name}, p={p:g})")


def weighted_norm(f, weight, p):
    """‖f‖_{L^p(w)} = (∫ |f|^p w)^{1/p}; `weight` may be a Weight, GridFunction or None."""
    if p <= 0:
        raise InvalidParameterError(f"norm exponent must be > 0, got {p}")
    w = 1.0 if weight is None else getattr(weight, "values", weight)
    if hasattr(w, "values"):
        w = w.values
    return float(((np.abs(f.values) ** p) * w).sum() * f.cell_measure) ** (1.0 / p)


def superlevel_measure(f, weight, lam):
    """w({x : |f(x)| > λ}); `weight` None means Lebesgue measure."""
    if lam <= 0:
        raise InvalidParameterError(f"level must be > 0, got {lam}")
    w = np.ones_like(f.values) if weight is None else np.broadcast_to(_raw(weight), f.values.shape)
    return float(w[np.abs(f.values) > lam].sum() * f.cell_measure)


def _raw(weight):
    if isinstance(weight, Weight):
        return weight.values
    if isinstance(weight, GridFunction):
        return weight.values
    return np.asarray(weight, dtype=float)


def conjugate(p):
    return p / (p - 1.0)


@dataclass(frozen=True)
class WeightSummary:
    """Constants attached to every weighted report row."""

    p: float
    p_prime: float
    ap: float
    ainf_w: float
    ainf_sigma: float
    tau_w: float
    tau_sigma: float
    eps1: float
    eps2: float


def perturbation_exponents(p, n, ainf_w, ainf_sigma):
    """
    τ_w = 2^{11+n}[w]_{A_∞}, τ_σ = 2^{11+n}[σ]_{A_∞},
    ε₁ = (p-1)/(2pτ_σ+1), ε₂ = (p'-1)/(2p'τ_w+1).
    """
    p_prime = conjugate(p)
    tau_w = 2.0 ** (11 + n) * ainf_w
    tau_sigma = 2.0 ** (11 + n) * ainf_sigma
    eps1 = (p - 1.0) / (2.0 * p * tau_sigma + 1.0)
    eps2 = (p_prime - 1.0) / (2.0 * p_prime * tau_w + 1.0)
    return tau_w, tau_sigma, eps1, eps2


def weight_summary(weight, p, family=None):
    sigma = dual_weight(weight, p)
    ap = ap_constant(weight, p, family)
    ainf_w = ainf_constant(weight, family)
    ainf_sigma = ainf_constant(sigma, family)
    tau_w, tau_sigma, eps1, eps2 = perturbation_exponents(p, weight.n, ainf_w, ainf_sigma)
    return WeightSummary(p, conjugate(p), ap, ainf_w, ainf_sigma, tau_w, tau_sigma, eps1, eps2)
