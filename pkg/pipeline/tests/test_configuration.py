import numpy as np
import pytest

from configuration.inputs import (
    build_weights,
    generator_rng,
    input_functions,
    lambda_levels,
    make_input,
    pairing_function,
    time_sweep,
)
from configuration.test_matrix import TestMatrix, config_hash, parse_test_matrix
from grid.errors import ConfigError, InvalidParameterError
from grid.grid_function import GridFunction


def test_empty_text_gives_defaults():
    assert parse_test_matrix("") == TestMatrix()


def test_smoke_config(smoke_path):
    with open(smoke_path, encoding="utf-8") as handle:
        matrix = parse_test_matrix(handle.read(), source=smoke_path)
    assert matrix.grid.level == 2
    assert matrix.ati.t_sweep == (0.25, 0.0625)
    assert [w.name for w in matrix.weights] == ["unweighted", "tilted"]
    assert matrix.weights[1].args == (1.0, 4.0, 1.0, 4.0)
    assert matrix.sweeps.k == (1, 2)
    assert matrix.seed == 7
    assert matrix.family == "all"


def test_unknown_key_reports_line_and_field():
    text = "[grid]\nn = 1\nlevle = 4\n"
    with pytest.raises(ConfigError) as info:
        parse_test_matrix(text)
    assert info.value.line == 3
    assert info.value.field == "[grid] levle"
    assert str(info.value).startswith("line 3: [grid] levle")


def test_unknown_section():
    with pytest.raises(ConfigError) as info:
        parse_test_matrix("[grid]\nn = 1\n\n[extras]\nx = 1\n")
    assert info.value.line == 4


def test_missing_section_header():
    with pytest.raises(ConfigError) as info:
        parse_test_matrix("n = 1\n")
    assert info.value.line == 1


@pytest.mark.parametrize(
    "text, field",
    [
        ("[grid]\nn = 3\n", "[grid] n"),
        ("[grid]\nn = 2\nlevel = 7\n", "[grid] level"),
        ("[grid]\nlevel = many\n", "[grid] level"),
        ("[grid]\nfamily = hexagons\n", "[grid] family"),
        ("[operators]\nt1 = riesz2d\n", "[operators] t1"),
        ("[operators]\nt1 = matrix\n", "[operators] t1"),
        ("[ati]\nalpha = 1.5\n", "[ati] alpha"),
        ("[ati]\ns = 3\n", "[ati] s"),
        ("[sweeps]\nq = 2.5\n", "[sweeps] q"),
        ("[sweeps]\np = 1\n", "[sweeps] p"),
        ("[sweeps]\nk = 0, 1\n", "[sweeps] k"),
        ("[weights]\nw = triangle 1\n", "[weights] w"),
        ("[weights]\nw = constant -1\n", "[weights] w"),
        ("[functions]\ngenerators = haar, noise\n", "[functions] generators"),
        ("[assertions]\nheadroom = -0.1\n", "[assertions] headroom"),
    ],
)
def test_invalid_values(text, field):
    with pytest.raises(ConfigError) as info:
        parse_test_matrix(text)
    assert info.value.field == field
    assert info.value.line is not None


def test_lists_and_auto_values():
    text = "[sweeps]\np = 1.5, 2 3\nlambda = auto\neps = 1 0.5\n\n[ati]\nt_sweep = auto\n"
    matrix = parse_test_matrix(text)
    assert matrix.sweeps.p == (1.5, 2.0, 3.0)
    assert matrix.sweeps.lambdas == ()
    assert matrix.ati.t_sweep == ()


def test_overrides():
    matrix = TestMatrix().with_overrides(seed=11, level=5)
    assert matrix.seed == 11 and matrix.grid.level == 5
    assert TestMatrix().with_overrides() == TestMatrix()
    with pytest.raises(ConfigError):
        TestMatrix().with_overrides(level=0)


def test_config_hash_tracks_the_effective_configuration():
    base = TestMatrix()
    assert config_hash(base) == config_hash(TestMatrix())
    assert len(config_hash(base)) == 12
    assert config_hash(base.with_overrides(seed=1)) != config_hash(base)


def test_inputs_are_deterministic(smoke_matrix):
    first = input_functions(smoke_matrix)
    second = input_functions(smoke_matrix)
    assert [label for label, _ in first] == ["one-cell", "haar", "random-sign"]
    for (_, f), (_, g) in zip(first, second):
        np.testing.assert_array_equal(f.values, g.values)
    np.testing.assert_array_equal(pairing_function(smoke_matrix).values, pairing_function(smoke_matrix).values)
    assert np.all(pairing_function(smoke_matrix).values > 0)


def test_random_streams_are_independent():
    a = generator_rng(0, "random-sign").random(4)
    b = generator_rng(0, "random-positive").random(4)
    c = generator_rng(0, "random-sign", draw=1).random(4)
    assert not np.allclose(a, b) and not np.allclose(a, c)


def test_generators():
    one = make_input("one-cell", 1, 3)
    assert one.integral() == pytest.approx(1.0)
    haar = make_input("haar", 1, 3)
    assert haar.integral() == pytest.approx(0.0)
    bump = make_input("bump", 2, 3)
    assert bump.values.max() > 0 and bump.values.min() == 0
    with pytest.raises(InvalidParameterError):
        make_input("random-sign", 1, 3)


def test_weights_and_sweeps(smoke_matrix):
    weights = build_weights(smoke_matrix)
    assert [w.name for w in weights] == ["unweighted", "tilted"]
    assert weights[1].values.tolist() == [1.0, 4.0, 1.0, 4.0]
    assert time_sweep(smoke_matrix) == [0.25, 0.0625]


def test_lambda_levels():
    matrix = TestMatrix()
    f = GridFunction(1, 2, [4.0, 0.0, 0.0, 0.0])
    levels = lambda_levels(matrix, f)
    assert levels[0] == 4.0 and len(levels) == 8
    assert lambda_levels(matrix, GridFunction.zeros(1, 2)) == [1.0]
