#!/usr/bin/env python3
"""Benchmark the assignment kernel: numba-compiled loops vs vectorized numpy.

Matrix shapes mirror real slot graphs (satellites x real antennas + one
private virtual column per satellite). scipy's solver is included as an
external reference when available.

Run:  python3 benchmarks/bench_hungarian.py
"""

import time

import numpy as np

from skygs.hungarian import _solve_numpy, assignment_cost

try:
    from numba import njit

    _solve_jit = njit(cache=True)(
        __import__("skygs.hungarian", fromlist=["_solve_loops"])._solve_loops)
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

try:
    from scipy.optimize import linear_sum_assignment

    HAS_SCIPY = True
except ImportError:
    HAS_SCIPY = False

SHAPES = [
    ("desk slot", 10, 15),
    ("mid constellation", 50, 70),
    ("full-scale slot", 153, 96),
]


def slot_matrix(rng, n_sats, n_real):
    big = 1e9
    w = np.full((n_sats, n_real + n_sats), big)
    for i in range(n_sats):
        w[i, n_real + i] = 0.0
        visible = rng.random(n_real) < 0.4
        w[i, :n_real][visible] = rng.uniform(-1e6, 1e3, visible.sum())
    return w


def bench(fn, matrices, repeats=5):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        for m in matrices:
            fn(m)
        best = min(best, (time.perf_counter() - start) / len(matrices))
    return best


def main():
    rng = np.random.default_rng(7)
    print(f"{'case':<20} {'numpy':>12} {'numba':>12} {'scipy':>12}   speedup")
    for name, n_sats, n_real in SHAPES:
        matrices = [slot_matrix(rng, n_sats, n_real) for _ in range(20)]
        if HAS_NUMBA:
            _solve_jit(matrices[0])  # compile outside the timed region
        t_numpy = bench(_solve_numpy, matrices)
        t_numba = bench(_solve_jit, matrices) if HAS_NUMBA else float("nan")
        t_scipy = (bench(lambda m: linear_sum_assignment(m), matrices)
                   if HAS_SCIPY else float("nan"))
        cols_a = _solve_numpy(matrices[0])
        if HAS_NUMBA:
            cols_b = _solve_jit(matrices[0])
            assert assignment_cost(matrices[0], cols_a) == assignment_cost(
                matrices[0], cols_b), "paths disagree"
        speedup = t_numpy / t_numba if HAS_NUMBA else float("nan")
        print(f"{name:<20} {t_numpy * 1e3:>10.3f}ms {t_numba * 1e3:>10.3f}ms "
              f"{t_scipy * 1e3:>10.3f}ms   {speedup:>5.1f}x")


if __name__ == "__main__":
    main()
