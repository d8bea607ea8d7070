"""Decentralized C2 / C3 improving-deal dynamics and their selection heuristics."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .market import Allocation, DealTrace, Instance, TraceBuilder, enumerate_improving, apply_deal

HEURISTICS = ("U", "RRA", "RRP", "PN", "PW")
STOCHASTIC = ("U", "PN")


@dataclass(frozen=True)
class Heuristic:
    kind: str
    seed: int = 0

    def __post_init__(self):
        if self.kind not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.kind!r}; expected one of {HEURISTICS}")


@dataclass(frozen=True)
class DynamicsConfig:
    k_max: int = 2
    heuristic: Heuristic = Heuristic("U")
    max_steps: Optional[int] = None

    def __post_init__(self):
        if self.k_max not in (2, 3):
            raise ValueError(f"k_max must be 2 or 3, got {self.k_max}")
        if self.k_max == 3 and self.heuristic.kind != "U":
            raise ValueError("deals of size 3 are only supported with uniform selection")


def round_robin_pairs(n: int) -> list[tuple[int, int]]:
    """Pair order scanned by RRP (1-based agents).

    Pairs are grouped by index distance d = 1, ..., n-1.  Within a distance,
    pairs (i, i+d) come in two matchings: first those with ``(i-1) // d``
    even, then those with it odd.  This yields (1,2),(3,4),... for d = 1 and
    (1,3),(2,4),(5,7),(6,8),... for d = 2, ending with (1,n).
    """
    pairs = []
    for d in range(1, n):
        starts = range(1, n - d + 1)
        pairs.extend((i, i + d) for i in starts if ((i - 1) // d) % 2 == 0)
        pairs.extend((i, i + d) for i in starts if ((i - 1) // d) % 2 == 1)
    return pairs


def _three_cycles(gives: np.ndarray) -> np.ndarray:
    n = len(gives)
    tri = gives[:, :, None] & gives[None, :, :] & gives.T[:, None, :]
    idx = np.arange(n)
    tri &= (idx[:, None, None] < idx[None, :, None]) & (idx[:, None, None] < idx[None, None, :])
    return np.argwhere(tri)


def run_dynamics(instance: Instance, config: DynamicsConfig = DynamicsConfig()) -> tuple[Allocation, DealTrace]:
    """Apply improving deals chosen by the heuristic until none is left.

    Deterministic heuristics rescan their sequence from the start after every
    deal.  Only applied deals enter the trace.
    """
    n = instance.n
    table = instance.rank_table
    kind = config.heuristic.kind
    rng = np.random.default_rng(config.heuristic.seed)
    max_steps = n * n if config.max_steps is None else config.max_steps
    held = np.asarray(instance.endowment) - 1
    builder = TraceBuilder(instance.endowment)
    agents = np.arange(n)
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    traded = np.zeros((n, n), dtype=bool)
    if kind == "RRP":
        rr = np.asarray(round_robin_pairs(n), dtype=np.int64).reshape(-1, 2) - 1

    for _ in range(max_steps + 1):
        cur = table[agents, held]
        wants = table[:, held] > cur[:, None]
        swaps = wants & wants.T & upper
        deal = None
        if kind == "U":
            options = [tuple(p) for p in np.argwhere(swaps)]
            if config.k_max == 3:
                options += [tuple(c) for c in _three_cycles(wants.T)]
            if options:
                deal = options[int(rng.integers(len(options)))]
        elif kind == "RRA":
            flat = np.flatnonzero(swaps)
            if len(flat):
                deal = divmod(int(flat[0]), n)
        elif kind == "RRP":
            hit = np.flatnonzero(swaps[rr[:, 0], rr[:, 1]])
            if len(hit):
                deal = tuple(rr[hit[0]])
        elif kind == "PN":
            fresh = swaps & ~traded
            pool = np.argwhere(fresh if fresh.any() else swaps)
            if len(pool):
                deal = tuple(pool[int(rng.integers(len(pool)))])
        elif kind == "PW":
            order = np.lexsort((agents, cur))
            sym = swaps | swaps.T
            flat = np.flatnonzero(sym[np.ix_(order, order)])
            if len(flat):
                x, y = divmod(int(flat[0]), n)
                deal = (order[x], order[y])
        if deal is None:
            return builder.current, builder.build()
        deal = tuple(int(a) for a in deal)
        if len(deal) == 2:
            a, b = sorted(deal)
            traded[a, b] = True
        builder.apply([a + 1 for a in deal])
        # cycle[j] receives cycle[j-1]'s resource
        held[list(deal)] = held[[deal[j - 1] for j in range(len(deal))]]
    raise RuntimeError(f"dynamics exceeded {max_steps} steps; a non-improving deal must have been applied")


def parse_procedure(name: str, seed: int = 0) -> DynamicsConfig:
    """``"c2-pw"`` -> DynamicsConfig(k_max=2, heuristic=Heuristic("PW"))."""
    try:
        k, h = name.lower().split("-")
        k_max = {"c2": 2, "c3": 3}[k]
    except (ValueError, KeyError):
        raise ValueError(f"not a dynamics procedure name: {name!r}") from None
    return DynamicsConfig(k_max, Heuristic(h.upper(), seed))


def reachable_outcomes(instance: Instance, k_max: int = 2, bound: int = 7) -> set[Allocation]:
    """Every stable allocation reachable from the endowment by improving deals of size <= k_max."""
    if instance.n > bound:
        raise ValueError(f"state-space search refused for n={instance.n} > {bound}")
    if instance.n < 2:
        return {instance.endowment}
    seen = {instance.endowment}
    queue = deque([instance.endowment])
    leaves = set()
    while queue:
        alloc = queue.popleft()
        deals = enumerate_improving(instance, alloc, min(k_max, instance.n))
        if not deals:
            leaves.add(alloc)
        for deal in deals:
            nxt = apply_deal(alloc, deal)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return leaves
