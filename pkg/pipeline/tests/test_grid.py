import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from grid.cube_family import CubeFamily, enumerate_cubes
from grid.cubes import Cube, children, cube_cells, dilate, dyadic_subcubes, integrate, parent, root_cube
from grid.errors import CubeOutOfRangeError, GeometryMismatchError, InvalidParameterError
from grid.grid_function import GridFunction


def test_integrate_over_root_and_half():
    f = GridFunction(1, 2, [4.0, 0.0, 0.0, 0.0])
    assert integrate(f, root_cube(1, 2)) == pytest.approx(1.0)
    assert integrate(f, Cube((0,), 2, 2, dyadic=True)) == pytest.approx(1.0)


def test_integrate_constant_is_one():
    f = GridFunction.constant(2, 3, 1.0)
    assert integrate(f, root_cube(2, 3)) == pytest.approx(1.0)


def test_dilate_periodic_wraps():
    middle = Cube((1,), 1, 2, dyadic=True)
    assert cube_cells(dilate(middle, 3, periodic=True), periodic=True).tolist() == [0, 1, 2]
    first = Cube((0,), 1, 2, dyadic=True)
    assert sorted(cube_cells(dilate(first, 3, periodic=True), periodic=True).tolist()) == [0, 1, 3]


def test_dilate_clips_at_the_boundary():
    big = dilate(root_cube(1, 2), 3)
    assert cube_cells(big).tolist() == [0, 1, 2, 3]
    assert big.mode == "clip"


def test_dilate_rejects_even_factors():
    with pytest.raises(InvalidParameterError):
        dilate(root_cube(1, 2), 2)


def test_exact_cube_outside_domain_raises():
    with pytest.raises(CubeOutOfRangeError):
        cube_cells(Cube((3,), 2, 2))


@pytest.mark.parametrize(
    "n, level, family, expected",
    [(1, 2, "dyadic", 7), (1, 2, "all", 10), (2, 3, "dyadic", 85)],
)
def test_enumerate_cube_counts(n, level, family, expected):
    cubes = enumerate_cubes(n, level, family)
    assert len(cubes) == expected
    assert CubeFamily(family, n, 2 ** level).count() == expected


def test_dyadic_tree_navigation():
    root = root_cube(1, 3)
    kids = children(root)
    assert [k.offsets for k in kids] == [(0,), (4,)]
    assert parent(kids[1]) == root
    assert parent(root) is None
    assert len(dyadic_subcubes(root)) == 15


def test_window_means_match_brute_force():
    rng = np.random.default_rng(3)
    values = rng.random(8)
    family = CubeFamily("all", 1, 8)
    for side in family.sides():
        means = family.window_means(values, side)
        expected = [values[a:a + side].mean() for a in range(8 - side + 1)]
        np.testing.assert_allclose(means, expected)


def test_grid_function_geometry_checks():
    f = GridFunction.zeros(1, 2)
    g = GridFunction.zeros(1, 3)
    with pytest.raises(GeometryMismatchError):
        f + g
    with pytest.raises(InvalidParameterError):
        GridFunction(1, 2, [1.0, 2.0])


def test_one_cell_has_unit_mass():
    f = GridFunction.one_cell(2, 2, 5)
    assert f.integral() == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 16, elements=st.floats(-10, 10)))
def test_integrate_is_additive_over_children(values):
    f = GridFunction(1, 4, values)
    for cube in dyadic_subcubes(root_cube(1, 4)):
        kids = children(cube)
        if kids:
            total = sum(integrate(f, k) for k in kids)
            assert integrate(f, cube) == pytest.approx(total, rel=1e-12, abs=1e-12)
