import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skygs import hungarian
from skygs.hungarian import (_solve_loops, _solve_numpy, assignment_cost,
                             min_cost_assignment)

scipy_opt = pytest.importorskip("scipy.optimize")


def enumerate_min(cost):
    """Exhaustive minimum over all row-perfect assignments."""
    n, m = cost.shape
    best = np.inf
    for cols in itertools.permutations(range(m), n):
        total = sum(cost[i, c] for i, c in enumerate(cols))
        best = min(best, total)
    return best


class TestSmall:
    def test_contention_two_sats_one_antenna(self):
        # columns: shared antenna, sat-1 virtual, sat-2 virtual
        big = 1e6
        cost = np.array([[-5.0, 0.0, big],
                         [-3.0, big, 0.0]])
        cols = min_cost_assignment(cost)
        # hand enumeration: -5 + 0 beats 0 + -3
        assert assignment_cost(cost, cols) == pytest.approx(-5.0)
        assert cols[0] == 0 and cols[1] == 2

    def test_all_positive_prefers_virtuals(self):
        big = 1e6
        cost = np.array([[7.0, 0.0, big],
                         [2.0, big, 0.0]])
        cols = min_cost_assignment(cost)
        assert assignment_cost(cost, cols) == 0.0

    def test_single_negative_edge(self):
        cost = np.array([[-7.0, 0.0]])
        cols = min_cost_assignment(cost)
        assert assignment_cost(cost, cols) == -7.0

    def test_empty(self):
        assert min_cost_assignment(np.zeros((0, 3))).size == 0

    def test_rejects_more_rows_than_cols(self):
        with pytest.raises(ValueError):
            min_cost_assignment(np.zeros((3, 2)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            min_cost_assignment(np.array([[np.inf, 0.0]]))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5), st.integers(0, 3), st.integers(0, 2 ** 32 - 1))
def test_matches_enumeration(n_rows, extra_cols, seed):
    rng = np.random.default_rng(seed)
    cost = rng.uniform(-100, 100, size=(n_rows, n_rows + extra_cols))
    cols = min_cost_assignment(cost)
    assert len(set(cols.tolist())) == n_rows  # a matching
    assert assignment_cost(cost, cols) == pytest.approx(enumerate_min(cost), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(0, 10), st.integers(0, 2 ** 32 - 1))
def test_matches_scipy(n_rows, extra_cols, seed):
    rng = np.random.default_rng(seed)
    cost = rng.uniform(-1000, 1000, size=(n_rows, n_rows + extra_cols))
    cols = min_cost_assignment(cost)
    rows_s, cols_s = scipy_opt.linear_sum_assignment(cost)
    assert assignment_cost(cost, cols) == pytest.approx(cost[rows_s, cols_s].sum(), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.integers(0, 8), st.integers(0, 2 ** 32 - 1))
def test_loop_and_numpy_paths_identical(n_rows, extra_cols, seed):
    rng = np.random.default_rng(seed)
    cost = np.ascontiguousarray(rng.uniform(-50, 50, size=(n_rows, n_rows + extra_cols)))
    assert np.array_equal(_solve_loops(cost), _solve_numpy(cost))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_paths_identical_on_slot_shaped_matrices(n_sats, antennas_per_station, seed):
    """Slot graphs are tie-heavy: duplicated antenna columns, a large
    forbidden value everywhere else, zeros on the private virtual diagonal."""
    rng = np.random.default_rng(seed)
    n_stations = int(rng.integers(1, 4))
    n_real = n_stations * antennas_per_station
    big = 1e9
    cost = np.full((n_sats, n_real + n_sats), big)
    for i in range(n_sats):
        cost[i, n_real + i] = 0.0
        for s in range(n_stations):
            if rng.random() < 0.6:
                w = rng.uniform(-1e6, 1e3)
                c0 = s * antennas_per_station
                cost[i, c0:c0 + antennas_per_station] = w
    a = _solve_loops(np.ascontiguousarray(cost))
    b = _solve_numpy(cost)
    assert np.array_equal(a, b)
    # no forbidden pair may ever be used
    used = cost[np.arange(n_sats), a]
    assert (used < big).all()


def test_env_flag_reported():
    # whichever path is active, the module must say so coherently
    assert isinstance(hungarian.NUMBA_ENABLED, bool)
