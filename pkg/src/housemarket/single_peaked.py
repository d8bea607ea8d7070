"""Single-peaked orders: checks, restriction and the IC-SP / UP-SP cultures."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .market import Instance, Order, check_permutation

CULTURES = ("ic-sp", "up-sp")


def _positions(axis: Sequence[int]) -> dict[int, int]:
    return {r: p for p, r in enumerate(axis)}


def is_single_peaked(order: Sequence[int], axis: Sequence[int]) -> bool:
    """Whether ``order`` decreases on both sides of its top along ``axis``."""
    if sorted(order) != sorted(axis) or len(set(order)) != len(order):
        raise ValueError("order and axis must range over the same resources")
    pos = _positions(axis)
    rank = {r: len(order) - i for i, r in enumerate(order)}
    peak = pos[order[0]]
    left = [rank[axis[p]] for p in range(peak, -1, -1)]
    right = [rank[axis[p]] for p in range(peak, len(axis))]
    return all(a > b for a, b in zip(left, left[1:])) and all(a > b for a, b in zip(right, right[1:]))


def worst_restriction_witness(profile: Sequence[Sequence[int]]) -> Optional[tuple[int, int, int]]:
    """First triple (sorted) whose three resources are each ranked last by someone, if any."""
    orders = np.asarray(profile, dtype=np.int64)
    if orders.ndim != 2 or len(orders) == 0:
        raise ValueError("profile must be a non-empty list of orders")
    n = orders.shape[1]
    if n < 3:
        return None
    resources = np.sort(orders[0])
    position = np.empty((len(orders), resources.max() + 1), dtype=np.int64)
    for i, order in enumerate(orders):
        position[i, order] = np.arange(n)
    triples = np.array(list(combinations(resources.tolist(), 3)), dtype=np.int64)
    # last[agent, t] in {0, 1, 2}: which member of triple t the agent ranks lowest
    last = np.argmax(position[:, triples], axis=2)
    seen = np.stack([(last == j).any(axis=0) for j in range(3)])
    bad = np.flatnonzero(seen.all(axis=0))
    if len(bad) == 0:
        return None
    return tuple(int(r) for r in triples[bad[0]])


def is_worst_restricted(profile: Sequence[Sequence[int]]) -> bool:
    return worst_restriction_witness(profile) is None


def restrict(obj, subset: Sequence[int]):
    """Restrict an order, an axis or a whole profile to ``subset``, keeping relative order."""
    keep = set(subset)
    if not keep:
        raise ValueError("cannot restrict to an empty resource set")
    if obj and isinstance(obj[0], (list, tuple, np.ndarray)):
        return tuple(tuple(r for r in o if r in keep) for o in obj)
    return tuple(r for r in obj if r in keep)


def single_peaked_orders(axis: Sequence[int]) -> list[Order]:
    """Every order single-peaked w.r.t. ``axis``, built by peeling extremes from the bottom."""
    axis = tuple(axis)
    if len(axis) <= 1:
        return [axis]
    out = []
    for rest in single_peaked_orders(axis[1:]):
        out.append(rest + (axis[0],))
    for rest in single_peaked_orders(axis[:-1]):
        out.append(rest + (axis[-1],))
    return out


def generate_ic_sp(n: int, axis: Optional[Sequence[int]], rng: np.random.Generator) -> Order:
    """Uniform draw from the 2**(n-1) single-peaked orders.

    The order is filled from the bottom: each step removes one of the two
    current axis extremes with equal probability.
    """
    axis = tuple(range(1, n + 1)) if axis is None else tuple(axis)
    if n < 1 or len(axis) != n:
        raise ValueError(f"need n >= 1 and an axis of length n, got n={n}")
    lo, hi = 0, n - 1
    bottom_up = []
    while lo < hi:
        if rng.integers(2):
            bottom_up.append(axis[hi])
            hi -= 1
        else:
            bottom_up.append(axis[lo])
            lo += 1
    bottom_up.append(axis[lo])
    return tuple(reversed(bottom_up))


def generate_up_sp(n: int, axis: Optional[Sequence[int]], rng: np.random.Generator) -> Order:
    """Uniform peak, then grow outwards picking either free neighbour with equal chance."""
    axis = tuple(range(1, n + 1)) if axis is None else tuple(axis)
    if n < 1 or len(axis) != n:
        raise ValueError(f"need n >= 1 and an axis of length n, got n={n}")
    peak = int(rng.integers(n))
    lo = hi = peak
    order = [axis[peak]]
    while len(order) < n:
        if lo == 0:
            go_right = True
        elif hi == n - 1:
            go_right = False
        else:
            go_right = bool(rng.integers(2))
        if go_right:
            hi += 1
            order.append(axis[hi])
        else:
            lo -= 1
            order.append(axis[lo])
    return tuple(order)


_GENERATORS = {"ic-sp": generate_ic_sp, "up-sp": generate_up_sp}


@dataclass(frozen=True)
class CultureSpec:
    kind: str
    axis: Optional[tuple[int, ...]] = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _GENERATORS:
            raise ValueError(f"unknown culture {self.kind!r}; expected one of {CULTURES}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def generate_instance(n: int, culture: CultureSpec | str, rng: Optional[np.random.Generator] = None,
                      endowment: str = "identity") -> Instance:
    """Draw ``n`` i.i.d. orders from ``culture``.

    The endowment is the identity (agent ``i`` holds resource ``i``) unless
    ``endowment="random"``, which draws a uniform permutation after the orders.
    """
    if isinstance(culture, str):
        culture = CultureSpec(culture)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    axis = tuple(range(1, n + 1)) if culture.axis is None else check_permutation(culture.axis, n, "axis")
    rng = culture.rng() if rng is None else rng
    gen = _GENERATORS[culture.kind]
    prefs = tuple(gen(n, axis, rng) for _ in range(n))
    if endowment == "identity":
        endow = tuple(range(1, n + 1))
    elif endowment == "random":
        endow = tuple(int(r) + 1 for r in rng.permutation(n))
    else:
        raise ValueError(f"unknown endowment mode {endowment!r}")
    return Instance(prefs, endow, axis)
