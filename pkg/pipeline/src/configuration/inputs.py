"""
inputs.py

Builds the concrete objects a test matrix describes.

Key tasks:
- input-function generators (one-cell, random-sign, haar, bump, random-positive)
- weights from their config specs
- the operator pair and the approximation-to-the-identity family
- λ and t sweeps resolved against the grid

Random draws use one numpy Generator per (seed, generator, draw), so every
input is reproducible on its own, whatever order the rows are evaluated in.

Created: July 30, 2025
"""

import logging
import zlib

import numpy as np

from configuration.test_matrix import GENERATORS
from data_utils.data_io import load_matrix_file
from grid.errors import InvalidParameterError
from grid.grid_function import GridFunction, cell_midpoints
from kernels.approximation import AtIFamily, t_sweep
from kernels.operators import OperatorSpec, compose, default_omega, make_operator
from weights.muckenhoupt import array_weight, constant_weight, power_weight

logger = logging.getLogger(__name__)

# Default λ sweep: max|f|·2^{-j}.
_LAMBDA_STEPS = 8


def generator_rng(seed, name, draw=0):
    """Independent Generator for one (seed, generator, draw) triple."""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode("utf-8")), int(draw)])


def make_input(name, n, level, rng=None, periodic=False):
    """
    One input function on the grid.

    Parameters:
        name (str): One of GENERATORS
        n (int), level (int): Geometry
        rng (np.random.Generator | None): Source of randomness for random generators

    Returns:
        GridFunction
    """
    size = 2 ** (n * level)
    if name == "one-cell":
        # Unit mass in the cell nearest the centre: height N, support one cell.
        mids = cell_midpoints(n, level)
        index = int(np.argmin(((mids - 0.5) ** 2).sum(axis=1) + 1e-12 * np.arange(size)))
        return GridFunction.one_cell(n, level, index, periodic=periodic)
    if name == "haar":
        mids = cell_midpoints(n, level)
        values = np.where(mids[:, 0] < 0.5, 1.0, -1.0)
        return GridFunction(n, level, values, periodic)
    if name == "bump":
        mids = cell_midpoints(n, level)
        r2 = ((mids - 0.5) ** 2).sum(axis=1) / 0.16
        with np.errstate(divide="ignore", over="ignore"):
            values = np.where(r2 < 1.0, np.exp(-1.0 / np.maximum(1.0 - r2, 1e-300)), 0.0)
        return GridFunction(n, level, values, periodic)
    if rng is None:
        raise InvalidParameterError(f"generator {name!r} needs a random generator")
    if name == "random-sign":
        return GridFunction(n, level, rng.choice([-1.0, 1.0], size=size) * rng.random(size), periodic)
    if name == "random-positive":
        return GridFunction(n, level, 0.1 + rng.random(size), periodic)
    raise InvalidParameterError(f"unknown generator {name!r}; expected one of {GENERATORS}")


def input_functions(matrix):
    """
    All (label, f) pairs of a test matrix, in a fixed order.

    Deterministic generators appear once; random ones `random_count` times.
    """
    n, level, periodic = matrix.grid.n, matrix.grid.level, matrix.grid.periodic
    out = []
    for name in matrix.generators:
        draws = matrix.random_count if name.startswith("random") else 1
        for draw in range(draws):
            label = name if draws == 1 else f"{name}#{draw}"
            out.append((label, make_input(name, n, level, generator_rng(matrix.seed, name, draw), periodic)))
    return out


def pairing_function(matrix):
    """The fixed positive g used by the bilinear checks."""
    n, level = matrix.grid.n, matrix.grid.level
    return make_input("random-positive", n, level, generator_rng(matrix.seed, "pairing"), matrix.grid.periodic)


def make_weight(spec, n, level, periodic=False):
    """
    Weight from a WeightConfig.

    constant c | power a [center] | array v1,...,vN
    """
    if spec.kind == "constant":
        weight = constant_weight(n, level, spec.args[0], periodic)
    elif spec.kind == "power":
        center = spec.args[1] if len(spec.args) > 1 else 0.5
        weight = power_weight(n, level, spec.args[0], center, periodic)
    elif spec.kind == "array":
        if len(spec.args) != 2 ** (n * level):
            raise InvalidParameterError(
                f"weight {spec.name!r} lists {len(spec.args)} values for {2 ** (n * level)} cells"
            )
        weight = array_weight(n, level, spec.args, periodic)
    else:
        raise InvalidParameterError(f"unknown weight kind {spec.kind!r}")
    weight.name = spec.name
    return weight


def build_weights(matrix):
    n, level, periodic = matrix.grid.n, matrix.grid.level, matrix.grid.periodic
    return [make_weight(spec, n, level, periodic) for spec in matrix.weights]


def operator_spec(matrix, kind):
    ops = matrix.operators
    omega = ops.rough_omega or (default_omega(matrix.grid.n) if kind == "rough" else ())
    return OperatorSpec(
        kind=kind,
        component=ops.riesz_component,
        omega=tuple(omega) if kind == "rough" else (),
        matrix_path=ops.matrix_path or None,
    )


def build_operators(matrix, loader=load_matrix_file):
    """(T1, T2, T1∘T2) for the configured pair."""
    n, level = matrix.grid.n, matrix.grid.level
    first = make_operator(operator_spec(matrix, matrix.operators.t1), n, level, loader)
    second = make_operator(operator_spec(matrix, matrix.operators.t2), n, level, loader)
    return first, second, compose(first, second)


def build_ati(matrix):
    cfg = matrix.ati
    return AtIFamily(cfg.family, cfg.s, cfg.c1, cfg.c2, cfg.alpha, cfg.eta)


def time_sweep(matrix):
    return list(matrix.ati.t_sweep) or t_sweep(matrix.grid.level)


def lambda_levels(matrix, f):
    """Configured λ values, or max|f|·2^{-j} for j = 0..7 when the sweep is auto."""
    if matrix.sweeps.lambdas:
        return list(matrix.sweeps.lambdas)
    top = float(np.abs(f.values).max())
    if top == 0.0:
        return [1.0]
    return [top * 2.0 ** (-j) for j in range(_LAMBDA_STEPS)]
