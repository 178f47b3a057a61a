import itertools

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from w2assim.lap import USING_COMPILED, _dense_py, lap_dense

from helpers import rng


def brute_force_cost(cost):
    n = cost.shape[0]
    return min(
        sum(cost[i, p[i]] for i in range(n))
        for p in itertools.permutations(range(n))
    )


def random_cost(seed, n, kind):
    r = rng(seed, 9)
    if kind == 0:
        return r.standard_normal((n, n)) ** 2
    if kind == 1:
        # heavily tied integer costs
        return r.integers(0, 4, size=(n, n)).astype(float)
    a = r.standard_normal((n, 2))
    b = r.standard_normal((n, 2))
    return ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=-1)


def test_one_by_one():
    cols, u, v = lap_dense([[3.5]])
    assert cols.tolist() == [0]
    assert u[0] + v[0] == pytest.approx(3.5)


def test_matches_brute_force_small():
    for seed in range(60):
        n = seed % 7 + 1
        cost = random_cost(seed, n, seed % 3)
        cols, _, _ = lap_dense(cost)
        assert sorted(cols.tolist()) == list(range(n))
        got = cost[np.arange(n), cols].sum()
        assert abs(got - brute_force_cost(cost)) <= 1e-9


def test_dual_certificate_medium():
    cost = random_cost(4, 200, 2)
    cols, u, v = lap_dense(cost)
    reduced = cost - u[:, None] - v[None, :]
    assert reduced.min() >= -1e-9
    assert np.abs(reduced[np.arange(200), cols]).max() <= 1e-9


def test_matches_scipy_cost():
    for seed in (1, 2, 3):
        cost = random_cost(seed, 300, seed % 3)
        cols, _, _ = lap_dense(cost)
        rows_s, cols_s = linear_sum_assignment(cost)
        ours = cost[np.arange(300), cols].sum()
        theirs = cost[rows_s, cols_s].sum()
        assert ours == pytest.approx(theirs, rel=1e-12, abs=1e-9)


def test_all_equal_costs():
    cost = np.full((5, 5), 2.0)
    cols, _, _ = lap_dense(cost)
    assert sorted(cols.tolist()) == list(range(5))
    assert cost[np.arange(5), cols].sum() == pytest.approx(10.0)


def test_rejects_non_square_and_non_finite():
    with pytest.raises(ValueError):
        lap_dense(np.ones((2, 3)))
    with pytest.raises(ValueError):
        lap_dense([[np.inf, 1.0], [1.0, 0.0]])


def test_pure_python_matches_brute_force():
    for seed in range(30):
        n = seed % 6 + 1
        cost = random_cost(1000 + seed, n, seed % 3)
        cols, u, v = _dense_py.lap_dense(cost)
        got = cost[np.arange(n), cols].sum()
        assert abs(got - brute_force_cost(cost)) <= 1e-9
        reduced = cost - u[:, None] - v[None, :]
        assert reduced.min() >= -1e-9


@pytest.mark.skipif(not USING_COMPILED, reason="compiled kernel unavailable")
def test_backends_identical():
    from w2assim.lap import _dense

    for seed in range(60):
        n = int(rng(seed, 3).integers(1, 80))
        cost = np.ascontiguousarray(random_cost(2000 + seed, n, seed % 3))
        c_cols, c_u, c_v = _dense.lap_dense(cost)
        p_cols, p_u, p_v = _dense_py.lap_dense(cost)
        assert np.array_equal(c_cols, p_cols)
        assert np.array_equal(c_u, p_u)
        assert np.array_equal(c_v, p_v)
