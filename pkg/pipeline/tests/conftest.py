import os
from dataclasses import replace

import numpy as np
import pytest

from configuration.test_matrix import parse_test_matrix
from grid.grid_function import GridFunction
from kernels.operators import OperatorSpec, make_operator

REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))
SMOKE_CONFIG = os.path.join(REPO_ROOT, "configs", "smoke.cfg")


@pytest.fixture
def smoke_path():
    return SMOKE_CONFIG


@pytest.fixture
def smoke_matrix(tmp_path):
    with open(SMOKE_CONFIG, encoding="utf-8") as handle:
        matrix = parse_test_matrix(handle.read(), source=SMOKE_CONFIG)
    # keep golden files out of the repository
    return replace(matrix, assertions=replace(matrix.assertions, golden_dir=str(tmp_path / "golden")))


@pytest.fixture
def hilbert4():
    """Hilbert operator on 16 cells."""
    return make_operator(OperatorSpec("hilbert"), 1, 4)


def random_function(level, seed, positive=False, n=1):
    rng = np.random.default_rng(seed)
    size = 2 ** (n * level)
    values = rng.random(size) + 0.1 if positive else rng.standard_normal(size)
    return GridFunction(n, level, values)
