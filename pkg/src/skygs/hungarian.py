"""Min-cost rectangular assignment (shortest augmenting path with potentials).

This is the per-slot hot kernel: it runs once per slot on a dense
satellites-by-antennas weight matrix. Two interchangeable implementations are
provided: a scalar-loop version compiled with numba, and a vectorized numpy
version used when numba is unavailable or disabled via SKYGS_DISABLE_NUMBA=1.
Both produce identical assignments (same deterministic lowest-index
tie-breaking); benchmarks/bench_hungarian.py compares their speed.

Costs may be negative. Rows must not outnumber columns, and every row must be
matchable (callers guarantee this by giving each row a private fallback
column). Forbidden pairs are encoded as a large finite cost.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_DISABLE = os.environ.get("SKYGS_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    from numba import njit

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    _HAS_NUMBA = False

NUMBA_ENABLED = _HAS_NUMBA and not _ENV_DISABLE


def _solve_loops(cost):
    """Scalar-loop augmenting-path solver (numba-friendly)."""
    n_rows, n_cols = cost.shape
    u = np.zeros(n_rows, dtype=np.float64)
    v = np.zeros(n_cols, dtype=np.float64)
    col4row = np.full(n_rows, -1, dtype=np.int64)
    row4col = np.full(n_cols, -1, dtype=np.int64)
    shortest = np.empty(n_cols, dtype=np.float64)
    path = np.empty(n_cols, dtype=np.int64)
    on_tree_col = np.zeros(n_cols, dtype=np.bool_)
    on_tree_row = np.zeros(n_rows, dtype=np.bool_)

    for cur_row in range(n_rows):
        for j in range(n_cols):
            shortest[j] = np.inf
            path[j] = -1
            on_tree_col[j] = False
        for i in range(n_rows):
            on_tree_row[i] = False
        min_val = 0.0
        i = cur_row
        sink = -1
        while sink == -1:
            on_tree_row[i] = True
            lowest = np.inf
            j_low = -1
            for j in range(n_cols):
                if on_tree_col[j]:
                    continue
                reduced = min_val + cost[i, j] - u[i] - v[j]
                if reduced < shortest[j]:
                    shortest[j] = reduced
                    path[j] = i
                if shortest[j] < lowest:
                    lowest = shortest[j]
                    j_low = j
            j = j_low
            min_val = lowest
            on_tree_col[j] = True
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]
        u[cur_row] += min_val
        for k in range(n_rows):
            if on_tree_row[k] and k != cur_row:
                u[k] += min_val - shortest[col4row[k]]
        for j in range(n_cols):
            if on_tree_col[j]:
                v[j] -= min_val - shortest[j]
        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            swap = col4row[i]
            col4row[i] = j
            if i == cur_row:
                break
            j = swap
    return col4row


def _solve_numpy(cost):
    """Vectorized variant of _solve_loops; identical output."""
    n_rows, n_cols = cost.shape
    u = np.zeros(n_rows)
    v = np.zeros(n_cols)
    col4row = np.full(n_rows, -1, dtype=np.int64)
    row4col = np.full(n_cols, -1, dtype=np.int64)

    for cur_row in range(n_rows):
        shortest = np.full(n_cols, np.inf)
        path = np.full(n_cols, -1, dtype=np.int64)
        on_tree_col = np.zeros(n_cols, dtype=bool)
        on_tree_row = np.zeros(n_rows, dtype=bool)
        min_val = 0.0
        i = cur_row
        sink = -1
        while sink == -1:
            on_tree_row[i] = True
            reduced = min_val + cost[i] - u[i] - v
            improve = ~on_tree_col & (reduced < shortest)
            shortest[improve] = reduced[improve]
            path[improve] = i
            masked = np.where(on_tree_col, np.inf, shortest)
            j = int(np.argmin(masked))
            min_val = float(masked[j])
            on_tree_col[j] = True
            if row4col[j] == -1:
                sink = j
            else:
                i = int(row4col[j])
        u[cur_row] += min_val
        grow = on_tree_row.copy()
        grow[cur_row] = False
        rows = np.nonzero(grow)[0]
        u[rows] += min_val - shortest[col4row[rows]]
        cols = np.nonzero(on_tree_col)[0]
        v[cols] -= min_val - shortest[cols]
        j = sink
        while True:
            i = int(path[j])
            row4col[j] = i
            swap = col4row[i]
            col4row[i] = j
            if i == cur_row:
                break
            j = int(swap)
    return col4row


if NUMBA_ENABLED:
    _solve_loops_jit = njit(cache=True)(_solve_loops)

    def _solve_active(cost):
        return _solve_loops_jit(cost)
else:
    _solve_active = _solve_numpy


def min_cost_assignment(cost: np.ndarray) -> np.ndarray:
    """Row-to-column assignment minimizing total cost.

    cost: (n_rows, n_cols) with n_rows <= n_cols, finite entries.
    Returns col4row, the assigned column index for each row.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError("cost matrix must be 2-D")
    n_rows, n_cols = cost.shape
    if n_rows == 0:
        return np.empty(0, dtype=np.int64)
    if n_rows > n_cols:
        raise ValueError(f"more rows than columns ({n_rows} > {n_cols})")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix must be finite")
    return _solve_active(cost)


def assignment_cost(cost: np.ndarray, col4row: np.ndarray) -> float:
    return float(cost[np.arange(len(col4row)), col4row].sum())
