import numpy as np
import pytest

from grid.cubes import Cube, cube_cells, root_cube
from grid.errors import InvalidParameterError
from grid.grid_function import GridFunction
from kernels.operators import OperatorSpec, make_operator
from orlicz.local_norms import LocalFunctional
from sparse.domination import (
    dominate_composition,
    dominate_maximal_composition,
    select_stopping_constant,
    sparse_dominate_single,
    threshold_ratio,
)
from sparse.families import SparseFamily, certify, sparse_form, verify_sparsity

from conftest import random_function

TOLERANCE = 1e-9


def _chain():
    return [
        root_cube(1, 2),
        Cube((0,), 2, 2, dyadic=True),
        Cube((0,), 1, 2, dyadic=True),
    ]


def test_nested_chain_is_half_sparse():
    eta, certificates = verify_sparsity(_chain())
    assert eta == pytest.approx(0.5)
    assert [c.tolist() for c in certificates] == [[2, 3], [1], [0]]


def test_empty_family():
    assert verify_sparsity([]) == (1.0, [])
    assert certify(SparseFamily((), (), 1.0)) == 1.0


def test_certify_rejects_overlaps_and_strays():
    root = root_cube(1, 2)
    half = Cube((0,), 2, 2, dyadic=True)
    with pytest.raises(InvalidParameterError):
        certify(SparseFamily((root, half), ([0, 1], [1]), 0.5))
    with pytest.raises(InvalidParameterError):
        certify(SparseFamily((half,), ([3],), 0.5))
    with pytest.raises(InvalidParameterError):
        SparseFamily((half,), (), 0.5)


def test_greedy_family_certifies():
    family = SparseFamily.greedy(_chain())
    assert certify(family) == pytest.approx(family.eta)


def test_sparse_form_of_the_root():
    ones = GridFunction.constant(1, 2, 1.0)
    average = LocalFunctional.average()
    assert sparse_form([root_cube(1, 2)], ones, ones, average, average) == pytest.approx(1.0)
    value = sparse_form(_chain(), ones, ones, average, LocalFunctional.luxemburg(1))
    norm = LocalFunctional.luxemburg(1).evaluate_values(np.ones(4))
    assert value == pytest.approx((1.0 + 0.5 + 0.25) * norm)


def test_threshold_ratio_conventions():
    np.testing.assert_allclose(threshold_ratio([0.0, 2.0], 4.0), [0.0, 0.5])
    assert threshold_ratio([0.0, 2.0], 0.0).tolist() == [0.0, np.inf]


def test_stopping_constant_doubles():
    ratios = np.array([0.5] * 14 + [3.0, 5.0])
    # 16 cells on the line allow two exceptional cells
    assert select_stopping_constant(ratios, 1) == 1.0
    ratios[:3] = 3.0
    assert select_stopping_constant(ratios, 1) == 4.0


@pytest.mark.parametrize("seed", range(20))
def test_composition_domination_contracts(hilbert4, seed):
    f = random_function(4, seed)
    g = random_function(4, seed + 10, positive=True)
    result = dominate_composition(hilbert4, hilbert4, f)
    scale = max(1.0, np.abs(result.t1t2f).max())
    assert result.residual() <= TOLERANCE * scale

    sides = result.evaluate(g)
    assert sides.certified_ratio <= 1.0 + TOLERANCE
    assert sides.ratio <= 1.0 + TOLERANCE
    assert sides.rhs == pytest.approx(sides.D * sides.rhs_core)

    family = result.family
    assert certify(family) >= 0.5
    assert certify(result.report.dilated) >= result.report.dilated.eta
    assert family.cubes[0] == root_cube(1, 4)
    fractions = result.report.level_fractions()
    assert all(v <= 0.125 for v in fractions.values())


def test_vanishing_input_has_an_empty_family(hilbert4):
    zero = GridFunction.zeros(1, 4)
    result = dominate_composition(hilbert4, hilbert4, zero)
    assert len(result.family) == 0
    assert result.report.nodes[0].vanishing
    sides = result.evaluate(GridFunction.constant(1, 4, 1.0))
    assert sides.lhs == 0.0 and sides.ratio == 0.0


def test_maximal_composition_domination(hilbert4):
    f = random_function(4, seed=2)
    g = random_function(4, seed=3, positive=True)
    result = dominate_maximal_composition(hilbert4, hilbert4, f, g, 2.0)
    assert result.sides.ratio <= 1.0 + TOLERANCE
    assert result.D >= 1.0
    assert certify(result.family) >= 0.5
    with pytest.raises(InvalidParameterError):
        dominate_maximal_composition(hilbert4, hilbert4, f, g, 3.0)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_single_operator_pointwise_bound(hilbert4, k):
    f = random_function(4, seed=20 + k)
    result = sparse_dominate_single(hilbert4, f, k)
    assert result.max_constant <= result.report.D * (1.0 + TOLERANCE)
    assert np.all(np.isfinite(result.constants))
    live = [node for node in result.report.nodes if not node.vanishing]
    for cube, node in zip(result.report.dilated.cubes, live):
        assert np.all(result.sparse_sum[cube_cells(cube)] >= node.norms[0] - TOLERANCE)


def test_single_operator_rejects_large_k(hilbert4):
    with pytest.raises(InvalidParameterError):
        sparse_dominate_single(hilbert4, random_function(4, seed=0), 3)


@pytest.fixture(scope="module")
def hilbert6():
    return make_operator(OperatorSpec("hilbert"), 1, 6)


def test_composition_plain_ratio_with_unit_g(hilbert6):
    f = random_function(6, seed=5)
    result = dominate_composition(hilbert6, hilbert6, f)
    sides = result.evaluate(GridFunction.constant(1, 6, 1.0))
    assert sides.lhs > 0
    assert sides.ratio <= 1.0 + TOLERANCE
    assert sides.certified_ratio <= 1.0 + TOLERANCE


def test_composition_stopping_constant_is_stable_across_inputs(hilbert6):
    constants = []
    for seed in range(20):
        result = dominate_composition(hilbert6, hilbert6, random_function(6, seed))
        assert not result.report.flagged
        assert np.log2(result.D) == int(np.log2(result.D))
        constants.append(result.D)
    median = float(np.median(constants))
    assert max(constants) <= 4.0 * median
    assert min(constants) >= median / 4.0


@pytest.mark.parametrize("seed", range(5))
def test_maximal_composition_contracts_on_more_inputs(hilbert6, seed):
    f = random_function(6, seed)
    g = random_function(6, seed + 50, positive=True)
    for q in (1.5, 2.0):
        result = dominate_maximal_composition(hilbert6, hilbert6, f, g, q)
        assert result.sides.ratio <= 1.0 + TOLERANCE
        assert certify(result.family) >= 0.5


@pytest.mark.parametrize("seed", range(5))
def test_single_operator_contracts_on_more_inputs(hilbert6, seed):
    result = sparse_dominate_single(hilbert6, random_function(6, seed + 100), 1)
    assert result.max_constant <= result.report.D * (1.0 + TOLERANCE)
    assert certify(result.family) >= 0.5
