"""Centralized mechanisms: Gale's Top Trading Cycle and the Crawler."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .market import Allocation, DealTrace, DomainError, Instance, TraceBuilder


def _top_cycles(instance: Instance, remaining: set[int], owner: dict[int, int]) -> list[list[int]]:
    """Cycles of the graph agent -> owner of her top remaining resource."""
    table = instance.rank_table
    res = sorted(owner)
    points = {}
    for a in remaining:
        top = res[int(np.argmax(table[a - 1, np.asarray(res) - 1]))]
        points[a] = owner[top]
    cycles, state = [], {}
    for a in sorted(remaining):
        path = []
        while a not in state:
            state[a] = "open"
            path.append(a)
            a = points[a]
        if state[a] == "open":
            cycles.append(path[path.index(a):])
        for b in path:
            state[b] = "done"
    return cycles


def ttc(instance: Instance, rng: Optional[np.random.Generator] = None) -> tuple[Allocation, DealTrace]:
    """Top Trading Cycle from the instance's endowment.

    Every cycle of the current pointing graph is implemented in one round
    (they are vertex-disjoint).  Passing ``rng`` instead implements a single,
    randomly chosen cycle per round; the outcome is the same either way.
    """
    builder = TraceBuilder(instance.endowment)
    owner = {r: a for a, r in enumerate(instance.endowment, start=1)}
    remaining = set(range(1, instance.n + 1))
    while remaining:
        cycles = _top_cycles(instance, remaining, owner)
        if rng is not None:
            cycles = [cycles[int(rng.integers(len(cycles)))]]
        for pointing in cycles:
            # a points to b means a receives b's resource, so the deal runs backwards
            cycle = pointing[::-1]
            j = cycle.index(min(cycle))
            builder.apply(cycle[j:] + cycle[:j])
            for a in pointing:
                remaining.discard(a)
                del owner[instance.endowment[a - 1]]
    return builder.current, builder.build()


def crawler(instance: Instance) -> tuple[Allocation, DealTrace]:
    """The Crawler, scanning the axis from left to right.

    Each assignment is recorded as one deal ``<a_i, a_{i-1}, ..., a_k>``: the
    agent at position ``i`` takes the resource at position ``k`` and every
    agent in between shifts onto her right neighbour's resource.
    """
    if instance.axis is None:
        raise DomainError("the Crawler needs an instance with a single-peaked axis")
    table = instance.rank_table
    builder = TraceBuilder(instance.endowment)
    holder = {r: a for a, r in enumerate(instance.endowment, start=1)}
    resources = list(instance.axis)
    agents = [holder[r] for r in resources]
    while agents:
        res_idx = np.asarray(resources) - 1
        for i, a in enumerate(agents):
            peak = int(np.argmax(table[a - 1, res_idx]))
            if peak <= i:
                break
        else:  # pragma: no cover - the rightmost agent's peak is never to her right
            raise AssertionError("Crawler scan found no agent to serve")
        builder.apply(agents[peak:i + 1][::-1])
        del agents[i]
        del resources[peak]
    return builder.current, builder.build()
