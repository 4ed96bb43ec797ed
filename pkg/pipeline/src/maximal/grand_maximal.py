"""
grand_maximal.py

Grand maximal operators over dyadic cubes.

For every dyadic cube Q the masked input (f off 3Q, 9Q or 27Q, or on
27Q₀∖27Q for the local versions under a root Q₀) is pushed through the
operator chain once; the result is reduced to one number per cube (ess sup over
Q, or the |g|-weighted average for the bisublinear operator) and then to a
per-cell maximum over the cubes containing the cell. Cubes are processed in
chunks, each chunk as one matrix product.

The inner maximal operator M defaults to dyadic cubes. The all-cubes M of the
continuum is inner_family="all" (or "power2" in the plane); the verifiers pass
the [grid] inner_family setting of the test matrix through.

Variants:
- plain          sup ess sup |T(f χ_{ℝⁿ∖3Q})|
- star-k         sup ess sup M_{L(log L)^k} T(f χ_{ℝⁿ∖9Q})
- double-star    sup ess sup |T1(χ_{ℝⁿ∖9Q} T2(f χ_{ℝⁿ∖27Q}))|
- double-star-M  sup ess sup M T1(χ_{ℝⁿ∖9Q} T2(f χ_{ℝⁿ∖27Q}))
- bisublinear    sup ⟨M T1(χ_{9Q} T2(f χ_{ℝⁿ∖27Q})) |g|⟩_Q

Created: July 26, 2025
"""

import logging

import numpy as np

from grid.cubes import cube_cells, dilate, dyadic_subcubes, root_cube
from grid.errors import GeometryMismatchError, InvalidParameterError
from kernels.operators import apply_values
from maximal.maximal_operators import MASKS, MaximalSpec, maximal_values
from orlicz.local_norms import LocalFunctional

logger = logging.getLogger(__name__)

GRAND_VARIANTS = ("plain", "star-k", "double-star", "double-star-M", "bisublinear")

_CUBE_CHUNK = 256

# Input mask of each variant on the whole domain.
_OUTER_MASK = {
    "plain": "erase-3Q",
    "star-k": "erase-9Q",
    "double-star": "erase-27Q",
    "double-star-M": "erase-27Q",
    "bisublinear": "erase-27Q",
}

# Mask between T2 and T1 for the composite variants.
_INNER_MASK = {
    "double-star": "erase-9Q",
    "double-star-M": "erase-9Q",
    "bisublinear": "keep-9Q",
}


def dyadic_cubes(n, level):
    return dyadic_subcubes(root_cube(n, level))


def cube_masks(cubes, rule, n, level, periodic=False):
    """
    Boolean (M, N) matrix of the masking rule applied to each cube.

    Parameters:
        cubes (list[Cube]): Cubes Q
        rule (str): One of MASKS; "erase-kQ" is True off kQ, "keep-9Q" True on 9Q
        periodic (bool): Wrap dilates instead of clipping

    Returns:
        np.ndarray: shape (len(cubes), 2^{nL})
    """
    if rule not in MASKS:
        raise InvalidParameterError(f"unknown masking rule {rule!r}")
    size = 2 ** (n * level)
    if rule == "none":
        return np.ones((len(cubes), size), dtype=bool)
    factor = int(rule.split("-")[1][:-1])
    out = np.zeros((len(cubes), size), dtype=bool)
    for i, q in enumerate(cubes):
        out[i, cube_cells(dilate(q, factor, periodic), periodic)] = True
    return out if rule.startswith("keep") else ~out


def local_input_masks(cubes, root, n, level, periodic=False):
    """χ_{27Q₀∖27Q} for every cube Q under the root Q₀."""
    outer = np.zeros(2 ** (n * level), dtype=bool)
    outer[cube_cells(dilate(root, 27, periodic), periodic)] = True
    return outer[None, :] & cube_masks(cubes, "erase-27Q", n, level, periodic)


def _inner_spec(beta, family):
    functional = LocalFunctional.average() if beta == 0 else LocalFunctional.luxemburg(beta)
    return MaximalSpec(functional, family)


def _check(f, *ops):
    for op in ops:
        if op is not None:
            op.require_geometry(f)


def grand_sweep(
    f, variant, first, second=None, g=None, beta=0.0, root=None, inner_family="dyadic", periodic=False
):
    """
    Shared engine of all grand maximal operators.

    Parameters:
        f (GridFunction): Input
        variant (str): One of GRAND_VARIANTS
        first (KernelOperator): T (plain, star-k) or T1 (composites)
        second (KernelOperator | None): T2 for the composite variants
        g (GridFunction | None): Second input of the bisublinear operator
        beta (float): k of star-k (Orlicz exponent of the outer maximal operator)
        root (Cube | None): Q₀ for the local versions; cubes run over D(Q₀)
        inner_family (str): Cube family of the inner maximal operators; "dyadic"
            unless the caller asks for "all" or "power2"
        periodic (bool): Wrap the dilates

    Returns:
        GridFunction: Per-cell maximum, zero off Q₀ for local versions
    """
    if variant not in GRAND_VARIANTS:
        raise InvalidParameterError(f"unknown grand maximal variant {variant!r}")
    composite = variant in _INNER_MASK
    if composite and second is None:
        raise InvalidParameterError(f"variant {variant!r} needs two operators")
    if variant == "bisublinear" and g is None:
        raise InvalidParameterError("the bisublinear operator needs g")
    _check(f, first, second)
    if g is not None and not f.same_geometry(g):
        raise GeometryMismatchError("f and g live on different grids")

    n, level = f.n, f.level
    cubes = dyadic_subcubes(root) if root is not None else dyadic_cubes(n, level)
    out = np.zeros(f.values.size)
    weight = None if g is None else np.abs(g.values)
    outer_spec = _inner_spec(beta, inner_family)
    m_spec = _inner_spec(0.0, inner_family)

    for start in range(0, len(cubes), _CUBE_CHUNK):
        chunk = cubes[start:start + _CUBE_CHUNK]
        if root is not None:
            masks = local_input_masks(chunk, root, n, level, periodic)
        else:
            masks = cube_masks(chunk, _OUTER_MASK[variant], n, level, periodic)
        inside = _inside(chunk, n, level)

        values = apply_values(second if composite else first, masks * f.values[None, :])
        if composite:
            values = apply_values(first, values * cube_masks(chunk, _INNER_MASK[variant], n, level, periodic))
        if variant == "star-k":
            values = maximal_values(values, n, level, outer_spec)
        elif variant in ("double-star-M", "bisublinear"):
            values = maximal_values(values, n, level, m_spec)
        values = np.abs(values)

        if variant == "bisublinear":
            per_cube = (np.where(inside, values * weight[None, :], 0.0)).sum(axis=1) / inside.sum(axis=1)
        else:
            per_cube = np.where(inside, values, 0.0).max(axis=1)
        out = np.maximum(out, np.where(inside, per_cube[:, None], 0.0).max(axis=0))

    logger.debug("%s grand maximal over %d cubes (root=%s)", variant, len(cubes), root)
    return f.with_values(out)


def _inside(cubes, n, level):
    out = np.zeros((len(cubes), 2 ** (n * level)), dtype=bool)
    for i, q in enumerate(cubes):
        out[i, cube_cells(q)] = True
    return out


def grand_maximal(op, f, periodic=False):
    """𝓜_T f(x) = sup_{Q∋x} ess sup_{ξ∈Q} |T(f χ_{ℝⁿ∖3Q})(ξ)|."""
    return grand_sweep(f, "plain", op, periodic=periodic)


def grand_maximal_composite(first, second, f, variant, beta=0.0, inner_family="dyadic", periodic=False):
    """
    Composite grand maximal operators.

    Parameters:
        first (KernelOperator): T1
        second (KernelOperator | None): T2 (ignored by star-k)
        f (GridFunction): Input
        variant (str): "star-k", "double-star" or "double-star-M"
        beta (float): k for star-k

    Returns:
        GridFunction
    """
    if variant not in ("star-k", "double-star", "double-star-M"):
        raise InvalidParameterError(f"unknown composite variant {variant!r}")
    return grand_sweep(
        f, variant, first, None if variant == "star-k" else second, beta=beta,
        inner_family=inner_family, periodic=periodic,
    )


def bisublinear_grand_maximal(first, second, f, g, inner_family="dyadic", periodic=False):
    """𝓜*(f, g)(x) = sup_{Q∋x} ⟨M T1(χ_{9Q} T2(f χ_{ℝⁿ∖27Q})) |g|⟩_Q."""
    return grand_sweep(f, "bisublinear", first, second, g=g, inner_family=inner_family, periodic=periodic)


# --- local versions under a root cube Q₀ ----------------------------------------


def local_grand_maximal(op, f, root, periodic=False):
    """𝓜_{T,Q₀} f: cubes in D(Q₀), input f χ_{27Q₀∖27Q}."""
    return grand_sweep(f, "plain", op, root=root, periodic=periodic)


def local_star_k(op, f, root, beta, inner_family="dyadic", periodic=False):
    return grand_sweep(f, "star-k", op, beta=beta, root=root, inner_family=inner_family, periodic=periodic)


def local_double_star(first, second, f, root, periodic=False):
    return grand_sweep(f, "double-star", first, second, root=root, periodic=periodic)


def local_double_star_M(first, second, f, root, inner_family="dyadic", periodic=False):
    return grand_sweep(f, "double-star-M", first, second, root=root, inner_family=inner_family, periodic=periodic)


def local_bisublinear(first, second, f, g, root, inner_family="dyadic", periodic=False):
    return grand_sweep(
        f, "bisublinear", first, second, g=g, root=root, inner_family=inner_family, periodic=periodic
    )
