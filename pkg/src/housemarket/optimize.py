"""Exact average-rank and minimum-rank optimizers, with or without IR."""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .market import Allocation, Instance


def hungarian(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Minimum-cost perfect assignment on a square integer matrix.

    Returns ``(col_of_row, u, v)`` where ``u[i] + v[j] <= cost[i, j]`` for all
    pairs with equality on the assignment (optimal dual potentials).
    """
    cost = np.asarray(cost, dtype=np.int64)
    n = cost.shape[0]
    if cost.shape != (n, n):
        raise ValueError("cost matrix must be square")
    inf = np.iinfo(np.int64).max // 4
    u = np.zeros(n + 1, dtype=np.int64)
    v = np.zeros(n + 1, dtype=np.int64)
    row_of = np.zeros(n + 1, dtype=np.int64)  # row_of[j]: 1-based row on column j, 0 = free
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        row_of[0] = i
        j0 = 0
        minv = np.full(n + 1, inf, dtype=np.int64)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = row_of[j0]
            reduced = cost[i0 - 1] - u[i0] - v[1:]
            better = ~used[1:] & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            masked = np.where(used[1:], inf, minv[1:])
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[row_of[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if row_of[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            row_of[j0] = row_of[j1]
            j0 = j1
    col_of = np.empty(n, dtype=np.int64)
    col_of[row_of[1:] - 1] = np.arange(n)
    return col_of, u[1:], v[1:]


def _perfect_matching(allowed: np.ndarray) -> Optional[np.ndarray]:
    match = maximum_bipartite_matching(csr_matrix(allowed.astype(np.int8)), perm_type="column")
    return None if (match < 0).any() else match


def _lexmin_perfect_matching(allowed: np.ndarray, start: np.ndarray) -> np.ndarray:
    """Lexicographically smallest column vector among perfect matchings of ``allowed``."""
    n = len(allowed)
    match = start.copy()
    free_cols = np.ones(n, dtype=bool)
    for i in range(n):
        for j in np.flatnonzero(allowed[i] & free_cols):
            if j >= match[i]:
                break
            keep = np.flatnonzero(free_cols)
            keep = keep[keep != j]
            sub = _perfect_matching(allowed[i + 1:][:, keep]) if i + 1 < n else keep
            if sub is not None:
                match[i] = j
                match[i + 1:] = keep[sub]
                break
        free_cols[match[i]] = False
    return match


def _allowed(instance: Instance, require_ir: bool, min_rank: int = 1) -> np.ndarray:
    table = instance.rank_table
    allowed = table >= min_rank
    if require_ir:
        endow = table[np.arange(instance.n), np.asarray(instance.endowment) - 1]
        allowed &= table >= endow[:, None]
    return allowed


def _max_ark_within(instance: Instance, allowed: np.ndarray) -> tuple[Allocation, int]:
    n = instance.n
    table = instance.rank_table
    big = 10 * n * n + 1
    cost = np.where(allowed, -table, big)
    col_of, u, v = hungarian(cost)
    tight = allowed & (cost - u[:, None] - v[None, :] == 0)
    best = _lexmin_perfect_matching(tight, col_of)
    value = int(table[np.arange(n), best].sum())
    return tuple(int(c) + 1 for c in best), value


def max_ark(instance: Instance, require_ir: bool = False) -> tuple[Allocation, int]:
    """Allocation maximizing the rank sum; ties go to the lexicographically smallest."""
    return _max_ark_within(instance, _allowed(instance, require_ir))


def mrk_feasible(instance: Instance, threshold: int, require_ir: bool = False) -> bool:
    """Whether some allocation gives everyone rank >= ``threshold``."""
    return _perfect_matching(_allowed(instance, require_ir, threshold)) is not None


def max_mrk(instance: Instance, require_ir: bool = False) -> tuple[Allocation, int]:
    """Allocation maximizing the minimum rank.

    Binary search on the threshold; among threshold-optimal allocations the
    rank sum is maximized, then the lexicographically smallest is returned.
    """
    lo = max_mrk_value(instance, require_ir)
    alloc, _ = _max_ark_within(instance, _allowed(instance, require_ir, lo))
    return alloc, lo


def max_ark_value(instance: Instance, require_ir: bool = False) -> int:
    """Optimal rank sum only, skipping the tie-break."""
    allowed = _allowed(instance, require_ir)
    cost = np.where(allowed, -instance.rank_table, 10 * instance.n ** 2 + 1)
    col_of, _, _ = hungarian(cost)
    return int(instance.rank_table[np.arange(instance.n), col_of].sum())


def max_mrk_value(instance: Instance, require_ir: bool = False) -> int:
    lo, hi = 1, instance.n  # a threshold of 1 is always feasible
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mrk_feasible(instance, mid, require_ir):
            lo = mid
        else:
            hi = mid - 1
    return lo
