"""Piecewise-constant spatial coefficients."""
import numpy as np
import pytest

from bvflux import InvalidInputError, SpatialCoefficient


def make_step():
    # 2 on (-inf,0), 5 on [0,1), -1 on [1,inf)
    return SpatialCoefficient(np.array([0.0, 1.0]), np.array([2.0, 5.0, -1.0]))


def test_scalar_evaluation_between_breakpoints():
    c = make_step()
    assert c(-3.0) == 2.0
    assert c(0.5) == 5.0
    assert c(7.0) == -1.0


def test_breakpoint_takes_right_interval_value():
    c = make_step()
    assert c(0.0) == 5.0
    assert c(1.0) == -1.0


def test_vectorized_evaluation():
    c = make_step()
    out = c(np.array([-1.0, 0.0, 0.5, 2.0]))
    assert np.array_equal(out, np.array([2.0, 5.0, 5.0, -1.0]))


def test_tails():
    c = make_step()
    assert c.left_tail == 2.0
    assert c.right_tail == -1.0


def test_total_variation():
    c = SpatialCoefficient(np.array([0.0, 1.0]), np.array([1.0, 3.0, 0.0]))
    assert c.total_variation() == 5.0


def test_constant_coefficient():
    c = SpatialCoefficient.constant(2.5)
    assert c(-10.0) == 2.5 and c(10.0) == 2.5
    assert c.total_variation() == 0.0


def test_unsorted_breakpoints_rejected():
    with pytest.raises(InvalidInputError):
        SpatialCoefficient(np.array([1.0, 0.0]), np.array([1.0, 2.0, 3.0]))


def test_value_count_mismatch_rejected():
    with pytest.raises(InvalidInputError):
        SpatialCoefficient(np.array([0.0]), np.array([1.0, 2.0, 3.0]))


def test_non_finite_rejected():
    with pytest.raises(InvalidInputError):
        SpatialCoefficient(np.array([0.0]), np.array([1.0, np.inf]))


def test_representative_points_cover_every_interval():
    c = make_step()
    reps = c.representative_points()
    assert reps.size == 3
    assert c.unsampled_interval_count(reps) == 0


def test_unsampled_interval_count_detects_gap():
    c = SpatialCoefficient(np.array([0.0, 0.001, 1.0]),
                           np.array([1.0, 2.0, 3.0, 4.0]))
    # points miss the narrow [0, 0.001) interval
    assert c.unsampled_interval_count(np.array([-1.0, 0.5, 2.0])) == 1


def test_arrays_read_only():
    c = make_step()
    with pytest.raises(ValueError):
        c.values[0] = 9.0
