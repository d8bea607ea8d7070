"""Brute-force verification oracles and worst-case instance constructions.

Everything that enumerates allocations is guarded by ``bound`` (default 7,
i.e. 5040 allocations).
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .market import Allocation, Deal, DomainError, Instance, apply_deal
from .single_peaked import is_single_peaked

BOUND = 7


def _guard(instance: Instance, bound: int):
    if instance.n > bound:
        raise ValueError(f"enumeration refused for n={instance.n} > {bound}")


@lru_cache(maxsize=None)
def all_allocations(n: int) -> np.ndarray:
    """Every allocation of ``n`` resources as rows of a read-only 0-based array."""
    out = np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)
    out.setflags(write=False)
    return out


def _wants_batch(instance: Instance, allocs: np.ndarray) -> np.ndarray:
    # W[m, a, b]: in allocation m, agent a strictly prefers b's resource
    table = instance.rank_table
    held = table[np.arange(instance.n)[None, :], allocs]
    other = table[np.arange(instance.n)[None, :, None], allocs[:, None, :]]
    return other > held[:, :, None]


def stable_mask(instance: Instance, allocs: np.ndarray, k: int) -> np.ndarray:
    """C_k-stability of each row of ``allocs`` (0-based).

    A closed walk of length m contains a simple cycle of length <= m, so an
    improving deal of size <= k exists iff trace(W^m) > 0 for some 2 <= m <= k.
    """
    wants = _wants_batch(instance, allocs).astype(np.int64)
    power = wants
    stable = np.ones(len(allocs), dtype=bool)
    for _ in range(2, min(k, instance.n) + 1):
        power = np.minimum(power @ wants, 1)
        stable &= np.trace(power, axis1=1, axis2=2) == 0
    return stable


def stable_set(instance: Instance, k: int, bound: int = BOUND) -> set[Allocation]:
    """All C_k-stable allocations of the instance, by enumeration."""
    _guard(instance, bound)
    allocs = all_allocations(instance.n)
    mask = stable_mask(instance, allocs, k)
    return {tuple(int(r) + 1 for r in row) for row in allocs[mask]}


def pareto_optimal_set(instance: Instance, bound: int = BOUND) -> set[Allocation]:
    """Pareto-optimal allocations by pairwise dominance over all n! allocations.

    For each agent and rank threshold a bitset marks the allocations giving
    that agent at least the threshold; the allocations weakly better than ``p``
    for everyone are the AND of these sets, and ``p`` is optimal iff it is alone.
    """
    _guard(instance, bound)
    n = instance.n
    allocs = all_allocations(n)
    held = instance.rank_table[np.arange(n)[None, :], allocs]

    def bits(mask):
        return int.from_bytes(np.packbits(mask).tobytes(), "big")

    at_least = [[0] + [bits(held[:, i] >= t) for t in range(1, n + 1)] for i in range(n)]
    out = set()
    for m, row in enumerate(held.tolist()):
        dominating = at_least[0][row[0]]
        for i in range(1, n):
            dominating &= at_least[i][row[i]]
        if dominating & (dominating - 1) == 0:
            out.add(tuple(int(r) + 1 for r in allocs[m]))
    return out


def brute_force_optimum(instance: Instance, objective: str, require_ir: bool = False,
                        bound: int = BOUND) -> int:
    """Best ``ark`` or ``mrk`` over all (optionally IR) allocations."""
    _guard(instance, bound)
    n = instance.n
    held = instance.rank_table[np.arange(n)[None, :], all_allocations(n)]
    if require_ir:
        endow = instance.rank_table[np.arange(n), np.asarray(instance.endowment) - 1]
        held = held[(held >= endow).all(axis=1)]
    values = held.sum(axis=1) if objective == "ark" else held.min(axis=1)
    return int(values.max())


def _swap_bfs(instance: Instance, targets: set[Allocation], bound: int) -> dict:
    _guard(instance, bound)
    n = instance.n
    table = instance.rank_table.tolist()
    start = instance.endowment
    parent = {start: None}
    remaining = set(targets) - {start}
    queue = deque([start])
    while queue and remaining:
        alloc = queue.popleft()
        held = [table[a][alloc[a] - 1] for a in range(n)]
        for a in range(n):
            ra = table[a]
            for b in range(a + 1, n):
                if ra[alloc[b] - 1] > held[a] and table[b][alloc[a] - 1] > held[b]:
                    nxt = list(alloc)
                    nxt[a], nxt[b] = alloc[b], alloc[a]
                    nxt = tuple(nxt)
                    if nxt not in parent:
                        parent[nxt] = (alloc, Deal((a + 1, b + 1)))
                        remaining.discard(nxt)
                        queue.append(nxt)
    return parent


def _path(parent: dict, target: Allocation) -> Optional[list[Deal]]:
    if target not in parent:
        return None
    path = []
    while parent[target] is not None:
        target, deal = parent[target]
        path.append(deal)
    return path[::-1]


def reachable_by_swaps(instance: Instance, target: Sequence[int], bound: int = BOUND) -> Optional[list[Deal]]:
    """Improving swaps leading from the endowment to ``target``, or None if unreachable."""
    target = tuple(target)
    return _path(_swap_bfs(instance, {target}, bound), target)


def reachable_by_swaps_many(instance: Instance, targets: Sequence[Sequence[int]],
                            bound: int = BOUND) -> list[Optional[list[Deal]]]:
    """Like :func:`reachable_by_swaps` for several targets sharing one search."""
    targets = [tuple(t) for t in targets]
    parent = _swap_bfs(instance, set(targets), bound)
    return [_path(parent, t) for t in targets]


def replay(instance: Instance, deals: Sequence[Deal], start: Optional[Sequence[int]] = None) -> tuple[Allocation, bool]:
    """Apply ``deals`` in turn; also report whether every one was improving."""
    from .market import is_improving

    alloc = tuple(instance.endowment if start is None else start)
    ok = True
    for deal in deals:
        ok &= is_improving(instance, alloc, deal)
        alloc = apply_deal(alloc, deal)
    return alloc, ok


class PoAConstruction(NamedTuple):
    instance: Instance
    worst: Allocation
    best: Allocation


def poa_ark_instance(n: int) -> PoAConstruction:
    """Single-peaked family where the worst stable rank sum is about half the best."""
    if n < 4:
        raise ValueError(f"the construction needs n >= 4, got {n}")
    prefs = [tuple([n - 1, n] + list(range(n - 2, 0, -1)))]
    for i in range(2, n + 1):
        prefs.append(tuple(list(range(i - 1, 0, -1)) + list(range(i, n + 1))))
    endow = tuple(range(2, n + 1)) + (1,)
    worst = (n - 1,) + tuple(range(2, n - 1)) + (n, 1)
    best = (n,) + tuple(range(1, n))
    return PoAConstruction(Instance(tuple(prefs), endow, tuple(range(1, n + 1))), worst, best)


def poa_ark_sequences(n: int) -> tuple[list[Deal], list[Deal]]:
    """Swap sequences from the endowment to the worst and to the best allocation."""
    to_worst = [Deal((1, i)) for i in range(2, n - 1)]
    to_best = []
    couples = n // 2 - 1 if n % 2 == 0 else (n - 3) // 2
    for i in range(1, couples + 1):
        to_best += [Deal((2 * i, n)), Deal((2 * i + 1, 1))]
    if n % 2:
        to_best[-1:] = [Deal((n - 2, n)), Deal((n - 1, 1)), Deal((n - 1, n - 2))]
    return to_worst, to_best


def poa_mrk_instance(n: int) -> PoAConstruction:
    """Single-peaked family where the worst stable minimum rank is 1 and the best n-1."""
    if n < 4:
        raise ValueError(f"the construction needs n >= 4, got {n}")
    prefs = [tuple(range(1, n + 1))]
    for i in range(2, n):
        prefs.append(tuple([i, i + 1] + list(range(i - 1, 0, -1)) + list(range(i + 2, n + 1))))
    prefs.append(tuple([2, 1] + list(range(3, n + 1))))
    endow = (n - 1,) + tuple(range(1, n - 1)) + (n,)
    worst = tuple(range(1, n + 1))
    best = (1,) + tuple(range(3, n + 1)) + (2,)
    return PoAConstruction(Instance(tuple(prefs), endow, tuple(range(1, n + 1))), worst, best)


def poa_mrk_sequences(n: int) -> tuple[list[Deal], list[Deal]]:
    """Swap sequences from the endowment to the worst and to the best allocation."""
    to_worst = [Deal((1, i)) for i in range(n - 1, 1, -1)]
    to_best = []
    last = 4 if n % 2 == 0 else 5
    for i in range(n, last - 1, -2):
        to_best += [Deal((i - 1, n)), Deal((i - 2, 1))]
    if n % 2:
        to_best += [Deal((2, n)), Deal((1, n))]
    return to_worst, to_best


def _greedy_sp_order(axis: Sequence[int], peak: int, second: Optional[int] = None) -> tuple[int, ...]:
    """Single-peaked order on ``axis`` with the given top (and second), then
    extending towards whichever extreme is nearer, left on ties."""
    n = len(axis)
    lo = hi = peak
    order = [axis[peak]]
    if second is not None:
        if abs(second - peak) != 1:
            raise ValueError("the second resource must be adjacent to the peak")
        lo, hi = min(lo, second), max(hi, second)
        order.append(axis[second])
    while len(order) < n:
        left_room, right_room = lo, n - 1 - hi
        if right_room == 0 or (left_room and left_room <= right_room):
            lo -= 1
            order.append(axis[lo])
        else:
            hi += 1
            order.append(axis[hi])
    return tuple(order)


def _right_violation(order: Sequence[int], axis: Sequence[int]) -> Optional[int]:
    """Smallest axis position s (0-based) right of the peak with order[s] > order[s-1]."""
    rank = {r: -i for i, r in enumerate(order)}
    t = list(axis).index(order[0])
    for s in range(t + 2, len(axis)):
        if rank[axis[s]] > rank[axis[s - 1]]:
            return s
    return None


def maximality_instance(axis: Sequence[int], non_sp_order: Sequence[int]) -> Instance:
    """C2-stable but Pareto-dominated instance built around a non-single-peaked order.

    Agent 1 has ``non_sp_order``; all other agents have single-peaked orders
    and pairwise distinct tops, so giving everyone her top dominates the
    endowment.  A violation left of the peak is handled on the reversed axis.
    """
    axis = tuple(axis)
    order = tuple(non_sp_order)
    if is_single_peaked(order, axis):
        raise ValueError("the order is single-peaked w.r.t. the axis")
    s = _right_violation(order, axis)
    if s is None:
        axis = axis[::-1]
        s = _right_violation(order, axis)
        if s is None:  # pragma: no cover - a non-single-peaked order violates one side
            raise DomainError("no violation located")
    n = len(axis)
    t = axis.index(order[0])
    s, t = s + 1, t + 1  # 1-based axis positions from here on
    prefs: list[tuple[int, ...]] = [order]
    endow: list[int] = [axis[s - 1]]
    for i in range(2, n + 1):
        if i <= t:
            top, second, held = i - 1, None, i - 1
        elif i <= s:
            top, second, held = i, i - 1, i - 1
        else:
            top, second, held = i, None, i
        prefs.append(_greedy_sp_order(axis, top - 1, None if second is None else second - 1))
        endow.append(axis[held - 1])
    return Instance(tuple(prefs), tuple(endow))


def ir_stable_values(instance: Instance, k: int, objective: str, bound: int = BOUND) -> np.ndarray:
    """Objective values of the C_k-stable allocations that are IR w.r.t. the endowment."""
    _guard(instance, bound)
    n = instance.n
    allocs = all_allocations(n)
    held = instance.rank_table[np.arange(n)[None, :], allocs]
    endow = instance.rank_table[np.arange(n), np.asarray(instance.endowment) - 1]
    keep = (held >= endow).all(axis=1)
    keep[keep] = stable_mask(instance, allocs[keep], k)
    held = held[keep]
    return held.sum(axis=1) if objective == "ark" else held.min(axis=1)


def empirical_poa(instance: Instance, objective: str, bound: int = BOUND) -> Fraction:
    """Best IR C_n-stable value over worst IR C_2-stable value for ``ark`` or ``mrk``."""
    if objective not in ("ark", "mrk"):
        raise ValueError(f"objective must be 'ark' or 'mrk', got {objective!r}")
    best = ir_stable_values(instance, instance.n, objective, bound).max()
    worst = ir_stable_values(instance, 2, objective, bound).min()
    return Fraction(int(best), int(worst))
