import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from grid.errors import InvalidParameterError
from grid.grid_function import GridFunction
from weights.muckenhoupt import (
    WEIGHT_FLOOR,
    a1_constant,
    ainf_constant,
    ap_constant,
    array_weight,
    constant_weight,
    dual_weight,
    perturbation_exponents,
    power_weight,
    superlevel_measure,
    weight_summary,
    weighted_norm,
)


def test_two_cell_weight_constants():
    w = array_weight(1, 1, [1.0, 4.0])
    assert ap_constant(w, 2, "all") == pytest.approx(1.5625)
    assert a1_constant(w, "all") == pytest.approx(2.5)


def test_constant_weight_is_in_every_class():
    w = constant_weight(1, 4, 3.0)
    assert ap_constant(w, 1.5) == pytest.approx(1.0)
    assert a1_constant(w) == pytest.approx(1.0)
    assert ainf_constant(w) == pytest.approx(1.0)


def test_p_at_most_one_routes_to_a1():
    w = array_weight(1, 1, [1.0, 4.0])
    assert ap_constant(w, 1.0, "all") == a1_constant(w, "all")


def test_constants_are_cached_per_family():
    w = array_weight(1, 2, [1.0, 2.0, 3.0, 4.0])
    ap_constant(w, 2, "dyadic")
    ap_constant(w, 2, "all")
    assert ("Ap", 2.0, "dyadic") in w._cache
    assert ("Ap", 2.0, "all") in w._cache


def test_floor_keeps_weights_positive():
    w = array_weight(1, 1, [0.0, 1.0])
    assert w.values.min() == WEIGHT_FLOOR


def test_power_weight_singularity_is_capped():
    w = power_weight(1, 4, -0.5, center=0.5)
    assert np.all(np.isfinite(w.values))
    assert w.values.max() == pytest.approx(1.0 / np.sqrt(1.0 / 32.0))


def test_perturbation_exponents():
    _, tau_sigma, eps1, _ = perturbation_exponents(2, 1, 1.0, 1.0)
    assert tau_sigma == 2.0 ** 12
    assert eps1 == pytest.approx(1.0 / 16385.0)


def test_dual_weight_needs_p_above_one():
    with pytest.raises(InvalidParameterError):
        dual_weight(constant_weight(1, 2), 1.0)


def test_weight_summary_fields():
    w = power_weight(1, 4, 0.5)
    summary = weight_summary(w, 3.0)
    assert summary.p_prime == pytest.approx(1.5)
    assert summary.ap >= 1.0
    assert summary.ainf_w >= 1.0 and summary.ainf_sigma >= 1.0
    assert 0 < summary.eps1 < 1 and 0 < summary.eps2 < 1


def test_weighted_norm_and_superlevel():
    f = GridFunction(1, 2, [4.0, 0.0, 0.0, 0.0])
    assert superlevel_measure(f, None, 1.0) == pytest.approx(0.25)
    w = array_weight(1, 2, [2.0, 1.0, 1.0, 1.0])
    assert superlevel_measure(f, w, 1.0) == pytest.approx(0.5)
    assert weighted_norm(f, None, 1) == pytest.approx(1.0)
    assert weighted_norm(f, w, 2) == pytest.approx(np.sqrt(16.0 * 2.0 * 0.25))
    with pytest.raises(InvalidParameterError):
        superlevel_measure(f, None, 0.0)


positive_cells = arrays(np.float64, 8, elements=st.floats(0.05, 20.0))


@settings(max_examples=25, deadline=None)
@given(positive_cells, st.sampled_from([1.5, 2.0, 3.0]))
def test_class_inclusions(values, p):
    w = array_weight(1, 3, values)
    ap = ap_constant(w, p, "all")
    a1 = a1_constant(w, "all")
    ainf = ainf_constant(w, "all")
    assert ap >= 1.0 - 1e-12
    assert ap <= a1 * (1 + 1e-9)
    assert 1.0 - 1e-12 <= ainf <= a1 * (1 + 1e-9)


@settings(max_examples=25, deadline=None)
@given(positive_cells, st.floats(0.1, 10.0))
def test_constants_are_scale_invariant(values, c):
    w = array_weight(1, 3, values)
    scaled = array_weight(1, 3, values * c)
    assert ap_constant(scaled, 2.0, "dyadic") == pytest.approx(ap_constant(w, 2.0, "dyadic"), rel=1e-9)
    assert ainf_constant(scaled, "dyadic") == pytest.approx(ainf_constant(w, "dyadic"), rel=1e-9)


def _interval_ainf_oracle(values):
    """Fujii-Wilson constant on the line by enumerating every interval pair."""
    size = values.size
    prefix = np.concatenate([[0.0], np.cumsum(values)])
    means = np.full((size, size), -np.inf)
    for i in range(size):
        for j in range(i, size):
            means[i, j] = (prefix[j + 1] - prefix[i]) / (j - i + 1)
    best = 0.0
    for a in range(size):
        for b in range(a, size):
            sub = means[a:b + 1, a:b + 1]
            suffix = np.maximum.accumulate(sub[:, ::-1], axis=1)[:, ::-1]
            local = np.diagonal(np.maximum.accumulate(suffix, axis=0))
            best = max(best, local.sum() / (prefix[b + 1] - prefix[a]))
    return best


def test_power_weight_ainf_matches_interval_enumeration():
    w = power_weight(1, 6, 0.5, center=0.0)
    np.testing.assert_allclose(w.values, ((np.arange(64) + 0.5) / 64.0) ** 0.5)
    assert ainf_constant(w, "all") == pytest.approx(_interval_ainf_oracle(w.values), rel=1e-10)


def _square_ainf_oracle(grid):
    """Fujii-Wilson constant over power-of-two squares with M(wχ_Q) over all squares of the grid."""
    size = grid.shape[0]
    squares = [
        (a, b, s)
        for s in (1 << k for k in range(size.bit_length()))
        for a in range(size - s + 1)
        for b in range(size - s + 1)
    ]
    best = 0.0
    for a, b, s in squares:
        restricted = np.zeros_like(grid)
        restricted[a:a + s, b:b + s] = grid[a:a + s, b:b + s]
        local = np.zeros_like(grid)
        for c, d, t in squares:
            mean = restricted[c:c + t, d:d + t].mean()
            local[c:c + t, d:d + t] = np.maximum(local[c:c + t, d:d + t], mean)
        inside = local[a:a + s, b:b + s].sum()
        best = max(best, inside / grid[a:a + s, b:b + s].sum())
    return best


def test_plane_ainf_sees_squares_crossing_the_cube():
    rng = np.random.default_rng(11)
    values = np.exp(rng.normal(size=64))
    w = array_weight(2, 3, values)
    expected = _square_ainf_oracle(values.reshape(8, 8))
    assert ainf_constant(w, "power2") == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("exponent", [-0.4, 0.0, 0.5])
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_ainf_is_at_most_four_times_ap(exponent, p):
    w = power_weight(1, 6, exponent)
    assert ainf_constant(w, "all") <= 4.0 * ap_constant(w, p, "all")


@pytest.mark.parametrize("seed", range(50))
def test_dual_weight_constant_is_a_power_of_ap(seed):
    rng = np.random.default_rng(seed)
    w = array_weight(1, 8, np.exp(rng.normal(size=256)))
    for p in (1.5, 2.0, 3.0):
        p_prime = p / (p - 1.0)
        sigma = dual_weight(w, p)
        expected = ap_constant(w, p, "all") ** (p_prime - 1.0)
        assert ap_constant(sigma, p_prime, "all") == pytest.approx(expected, rel=1e-8)
