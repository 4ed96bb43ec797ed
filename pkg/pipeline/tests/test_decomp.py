import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from decomp.calderon_zygmund import cz_decompose, stopping_cubes
from decomp.whitney import BAND_HIGH, BAND_LOW, whitney_decompose, whitney_min_level
from grid.cubes import Cube, cube_cells, root_cube
from grid.errors import InvalidParameterError
from grid.grid_function import GridFunction


def test_cz_selects_the_heavy_cell():
    f = GridFunction(1, 2, [1.0, 0.0, 0.0, 0.0])
    result = cz_decompose(f, 0.5)
    assert list(result.cubes) == [Cube((0,), 1, 2, dyadic=True)]
    assert result.covered_measure() == pytest.approx(0.25)
    np.testing.assert_allclose(result.good.values, 0.0)
    assert result.t_values == (pytest.approx(1.0 / 16.0),)


def test_cz_mean_zero_bad_parts():
    f = GridFunction(1, 3, [4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    result = cz_decompose(f, 1.0, mode="mean-zero")
    for cube, b in zip(result.cubes, result.bad):
        assert b.integral() == pytest.approx(0.0, abs=1e-14)
        outside = np.ones(8, dtype=bool)
        outside[cube_cells(cube)] = False
        assert np.all(b.values[outside] == 0)


def test_cz_rejects_bad_arguments():
    f = GridFunction.zeros(1, 2)
    with pytest.raises(InvalidParameterError):
        cz_decompose(f, 0.0)
    with pytest.raises(InvalidParameterError):
        cz_decompose(f, 1.0, mode="smooth")


def test_stopping_cubes_may_exclude_the_root():
    values = np.ones(4)
    assert stopping_cubes(values, 1, 2, 0.5) == [root_cube(1, 2)]
    below = stopping_cubes(values, 1, 2, 0.5, include_root=False)
    assert [q.side for q in below] == [2, 2]


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, 16, elements=st.floats(-8, 8)),
    st.floats(0.05, 4.0),
    st.sampled_from(["restriction", "mean-zero"]),
)
def test_cz_properties(values, lam, mode):
    f = GridFunction(1, 4, values)
    result = cz_decompose(f, lam, mode)
    reconstructed = result.good + result.bad_total()
    np.testing.assert_allclose(reconstructed.values, f.values, atol=1e-12)
    l1 = np.abs(f.values).sum() * f.cell_measure
    assert result.covered_measure() <= l1 / lam + 1e-12
    bound = 2.0 * max(lam, np.abs(f.values).mean())
    assert np.abs(result.good.values).max() <= bound + 1e-12
    cells = np.concatenate([cube_cells(q) for q in result.cubes]) if result.cubes else np.array([], int)
    assert np.unique(cells).size == cells.size


def _half_line(level, cut):
    omega = np.zeros(2 ** level, dtype=bool)
    omega[:cut] = True
    return omega


def test_whitney_covers_omega():
    omega = _half_line(6, 48)
    result = whitney_decompose(omega, 1, 6, 1.01)
    assert result.cubes
    assert result.accepted_band_ok
    assert result.forced and not result.band_ok
    assert all(r < BAND_LOW * 1.01 for r in result.forced_ratios)
    assert len(result.forced_ratios) == len(result.forced)
    for r in result.ratios:
        assert BAND_LOW * 1.01 <= r <= BAND_HIGH * 1.01
    cells = np.concatenate([cube_cells(q) for q in result.cubes + result.forced])
    assert np.unique(cells).size == cells.size
    assert set(cells.tolist()) == set(np.flatnonzero(omega).tolist())
    assert result.max_overlap >= 1


def test_whitney_in_the_plane_stays_inside():
    grid = np.zeros((16, 16), dtype=bool)
    grid[:12, :12] = True
    omega = grid.reshape(-1)
    result = whitney_decompose(omega, 2, 4, 1.5)
    for q in result.cubes:
        assert omega[cube_cells(q)].all()
    assert result.accepted_band_ok


def test_whitney_min_level():
    assert whitney_min_level(2.0, 1) == 5
    assert whitney_min_level(1.01, 2) >= whitney_min_level(1.01, 1)


def test_whitney_rejects_degenerate_sets():
    with pytest.raises(InvalidParameterError):
        whitney_decompose(np.zeros(8, dtype=bool), 1, 3, 2.0)
    with pytest.raises(InvalidParameterError):
        whitney_decompose(np.ones(8, dtype=bool), 1, 3, 2.0)
    with pytest.raises(InvalidParameterError):
        whitney_decompose(_half_line(3, 4), 1, 3, 1.0)


@pytest.mark.parametrize("level", [3, 10])
def test_whitney_single_cell_is_too_coarse(level):
    omega = np.zeros(2 ** level, dtype=bool)
    omega[2 ** (level - 1)] = True
    result = whitney_decompose(omega, 1, level, 1.5)
    assert result.cubes == () and result.forced == ()
    assert "grid too coarse" in result.diagnostic
    assert not result.band_ok and not result.complete
    assert result.max_overlap == 0


def _whitney_scan_oracle(omega, R):
    """Exhaustive dyadic scan in 1-D with the midpoint distance to Ω^c."""
    size = omega.size
    outside = np.flatnonzero(~omega)
    dist = np.array([np.abs(outside - i).min() if omega[i] else 0 for i in range(size)])
    accepted = []
    s = size
    while s >= 1:
        for a in range(0, size, s):
            inside_accepted = any(b <= a and a + s <= b + t for b, t in accepted)
            if not inside_accepted and dist[a:a + s].min() >= BAND_LOW * R * s:
                accepted.append((a, s))
        s //= 2
    return sorted(accepted)


def test_whitney_middle_half_matches_dyadic_scan():
    omega = np.zeros(256, dtype=bool)
    omega[64:192] = True
    result = whitney_decompose(omega, 1, 8, 1.2)
    found = sorted((q.offsets[0], q.side) for q in result.cubes)
    assert found == _whitney_scan_oracle(omega, 1.2)
    sides = [s for _, s in found]
    assert {s: sides.count(s) for s in set(sides)} == {8: 4, 4: 12, 2: 12, 1: 14}
    assert [a for a, s in found if s == 8] == [112, 120, 128, 136]
    assert sorted(q.offsets[0] for q in result.forced) == [64, 65, 66, 67, 68, 187, 188, 189, 190, 191]
    assert result.accepted_band_ok
