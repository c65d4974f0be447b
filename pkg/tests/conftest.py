import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gridmoea import GridArchiveConfig, ProblemSpec, Solution, get_problem


@pytest.fixture(scope="session")
def vnt():
    return get_problem("vnt")


@pytest.fixture(scope="session")
def ctp1():
    return get_problem("ctp1")


@pytest.fixture(scope="session")
def schaffer():
    return get_problem("schaffer")


@pytest.fixture(scope="session")
def vnt_grid_config():
    """Benchmark hypergrid settings for the three-objective problem."""
    return GridArchiveConfig(
        reference=(0.0, 0.0, 0.0),
        spacing=(0.1, 0.01, 0.1),
        max_cells=1000,
        cell_capacity=10,
    )


def make_solution(f, x=None, cv=()):
    f = np.asarray(f, dtype=float)
    if x is None:
        x = f.copy()
    return Solution(x=np.asarray(x, dtype=float), f=f, cv=np.asarray(cv, dtype=float))


@pytest.fixture
def sol():
    return make_solution


@pytest.fixture(scope="session")
def toy_biobjective():
    """f = (x, 1 - x) on [0, 1]: every point of the curve is non-dominated."""

    def evaluate(x):
        return np.array([x[0], 1.0 - x[0]]), np.empty(0)

    return ProblemSpec(
        name="toy-tradeoff",
        n_var=1,
        n_obj=2,
        n_con=0,
        lower=np.array([0.0]),
        upper=np.array([1.0]),
        evaluate=evaluate,
    )


@pytest.fixture(scope="session")
def toy_degenerate():
    """f = (x, x) on [0, 1]: a fully dominated chain, front collapses to 0."""

    def evaluate(x):
        return np.array([x[0], x[0]]), np.empty(0)

    return ProblemSpec(
        name="toy-chain",
        n_var=1,
        n_obj=2,
        n_con=0,
        lower=np.array([0.0]),
        upper=np.array([1.0]),
        evaluate=evaluate,
    )
