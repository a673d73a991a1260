"""Randomized structural properties of the scheme on both benchmarks."""
import numpy as np
import pytest

from bvflux.properties import (check_beta_tvd, check_entropy,
                               check_fixed_points, check_flux_equality,
                               check_l1_contraction, check_monotonicity,
                               check_oracle_agreement, random_bv_state)
from bvflux.solver import plateau_representatives

from conftest import SEED


@pytest.fixture(params=["ex1", "ex2"])
def problem(request, ex1, ex2):
    return {"ex1": ex1, "ex2": ex2}[request.param]


@pytest.fixture
def grid(problem, ex1_grid50):
    return ex1_grid50  # both benchmarks live on [0, 6]


def test_random_state_varies_only_in_middle_third(problem, grid, rng):
    model = problem.model
    x_ext = grid.extended_centers
    um = plateau_representatives(model, x_ext)
    state = random_bv_state(model, grid, rng)
    u_ext = state.extended()
    m = grid.m_cells
    lo, hi = m // 3 + 1, 2 * m // 3 + 1
    assert np.array_equal(u_ext[:lo], um[:lo])
    assert np.array_equal(u_ext[hi:], um[hi:])
    assert np.any(u_ext[lo:hi] != um[lo:hi])


def test_beta_tvd_property(problem, grid, rng):
    res = check_beta_tvd(problem.model, grid, rng, n_states=10, n_steps=10)
    assert res.passed, res.line()
    assert res.worst <= 1e-10


def test_monotonicity_property(problem, grid, rng):
    res = check_monotonicity(problem.model, grid, rng, n_pairs=15,
                             n_steps=10)
    assert res.passed, res.line()
    # ordering is preserved exactly, not merely within tolerance
    assert res.worst <= 0.0


def test_l1_contraction_property(problem, grid, rng):
    res = check_l1_contraction(problem.model, grid, rng, n_pairs=15)
    assert res.passed, res.line()


def test_entropy_property(problem, grid, rng):
    res = check_entropy(problem.model, grid, rng, n_states=2, n_steps=15)
    assert res.passed, res.line()


def test_flux_equality_property(problem, rng):
    res = check_flux_equality(problem.model, rng, n_trials=500)
    assert res.passed, res.line()
    assert res.worst == 0.0


def test_oracle_agreement_property(problem, rng):
    res = check_oracle_agreement(problem.model, rng, n_trials=20,
                                 n_samples=2000)
    assert res.passed, res.line()


def test_fixed_points_property(problem, grid):
    res = check_fixed_points(problem.model, grid)
    assert res.passed, res.line()
    assert res.worst <= 1e-14


def test_checks_are_deterministic_for_a_seed(ex1, ex1_grid50):
    a = check_beta_tvd(ex1.model, ex1_grid50,
                       np.random.default_rng(SEED), n_states=5, n_steps=5)
    b = check_beta_tvd(ex1.model, ex1_grid50,
                       np.random.default_rng(SEED), n_states=5, n_steps=5)
    assert a.worst == b.worst and a.n_trials == b.n_trials
