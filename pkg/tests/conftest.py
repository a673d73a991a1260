"""Shared fixtures: example problems and small grids."""
import numpy as np
import pytest

from bvflux import Grid1D, example_problem, sample_initial_data

SEED = 20250815


@pytest.fixture(scope="session")
def ex1():
    return example_problem("paper-ex1")


@pytest.fixture(scope="session")
def ex2():
    return example_problem("paper-ex2")


@pytest.fixture(scope="session")
def ex1_grid50(ex1):
    return Grid1D(ex1.domain[0], ex1.domain[1], 50)


@pytest.fixture(scope="session")
def ex2_grid50(ex2):
    return Grid1D(ex2.domain[0], ex2.domain[1], 50)


@pytest.fixture(scope="session")
def ex2_state50(ex2, ex2_grid50):
    return sample_initial_data(ex2.u0, ex2_grid50)


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
