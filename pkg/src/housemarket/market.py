"""House-market primitives: instances, allocations, deals and stability.

Agents and resources are 1-based integers throughout the public API, so
``allocation[i - 1]`` is the resource held by agent ``i``.  An allocation is a
plain tuple; a preference order is a tuple of resources, most preferred first.
Ranks are Borda-style: an agent's top resource has rank ``n``, her worst ``1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

Allocation = tuple[int, ...]
Order = tuple[int, ...]


class DomainError(ValueError):
    """Raised when a procedure is applied outside its preference domain."""


def check_permutation(values: Sequence[int], n: int, what: str = "sequence") -> tuple[int, ...]:
    values = tuple(int(v) for v in values)
    if len(values) != n or sorted(values) != list(range(1, n + 1)):
        raise ValueError(f"{what} must be a permutation of 1..{n}, got {list(values)}")
    return values


@dataclass(frozen=True)
class Instance:
    """A house market: one strict order per agent, an endowment, optionally an axis.

    When ``axis`` is given every order must be single-peaked with respect to it.
    """

    prefs: tuple[Order, ...]
    endowment: Allocation
    axis: Optional[Order] = None
    _ranks: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.prefs)
        if n < 1:
            raise ValueError("an instance needs at least one agent")
        prefs = tuple(check_permutation(o, n, f"preference of agent {i + 1}")
                      for i, o in enumerate(self.prefs))
        object.__setattr__(self, "prefs", prefs)
        object.__setattr__(self, "endowment", check_permutation(self.endowment, n, "endowment"))
        if self.axis is not None:
            axis = check_permutation(self.axis, n, "axis")
            object.__setattr__(self, "axis", axis)
            from .single_peaked import is_single_peaked

            for i, order in enumerate(prefs):
                if not is_single_peaked(order, axis):
                    raise DomainError(f"preference of agent {i + 1} is not single-peaked w.r.t. the axis")
        ranks = np.empty((n, n), dtype=np.int64)
        for i, order in enumerate(prefs):
            ranks[i, np.asarray(order) - 1] = np.arange(n, 0, -1)
        ranks.setflags(write=False)
        object.__setattr__(self, "_ranks", ranks)

    @property
    def n(self) -> int:
        return len(self.prefs)

    @property
    def rank_table(self) -> np.ndarray:
        """Read-only ``(n, n)`` array; ``rank_table[i, r]`` is agent ``i+1``'s rank of resource ``r+1``."""
        return self._ranks

    def with_endowment(self, endowment: Sequence[int]) -> "Instance":
        return Instance(self.prefs, tuple(endowment), self.axis)


@dataclass(frozen=True, eq=False)
class Deal:
    """An exchange cycle: ``cycle[j]`` receives the resource of ``cycle[j - 1]``.

    Deals compare equal when they are rotations of one another.  A deal of
    size one is a pick and leaves the allocation unchanged.
    """

    cycle: tuple[int, ...]

    def __post_init__(self):
        cycle = tuple(int(a) for a in self.cycle)
        if not cycle:
            raise ValueError("a deal needs at least one agent")
        if len(set(cycle)) != len(cycle):
            raise ValueError(f"deal agents must be distinct, got {list(cycle)}")
        object.__setattr__(self, "cycle", cycle)

    def __len__(self) -> int:
        return len(self.cycle)

    def canonical(self) -> "Deal":
        j = self.cycle.index(min(self.cycle))
        return Deal(self.cycle[j:] + self.cycle[:j])

    def __eq__(self, other):
        if not isinstance(other, Deal):
            return NotImplemented
        return self.canonical().cycle == other.canonical().cycle

    def __hash__(self):
        return hash(self.canonical().cycle)

    def __repr__(self):
        return "Deal(<" + ",".join(f"a{a}" for a in self.cycle) + ">)"


def apply_deal(allocation: Sequence[int], deal: Deal | Sequence[int]) -> Allocation:
    cycle = deal.cycle if isinstance(deal, Deal) else Deal(tuple(deal)).cycle
    n = len(allocation)
    if any(a < 1 or a > n for a in cycle):
        raise ValueError(f"deal {list(cycle)} refers to agents outside 1..{n}")
    new = list(allocation)
    for j, agent in enumerate(cycle):
        new[agent - 1] = allocation[cycle[j - 1] - 1]
    return tuple(new)


@dataclass(frozen=True)
class DealTrace:
    """The deals a procedure performed, each with the allocation it produced."""

    initial: Allocation
    steps: tuple[tuple[Deal, Allocation], ...] = ()

    @property
    def deals(self) -> list[Deal]:
        return [d for d, _ in self.steps]

    @property
    def final(self) -> Allocation:
        return self.steps[-1][1] if self.steps else self.initial

    @property
    def num_deals(self) -> int:
        return len(self.steps)

    @property
    def sizes(self) -> list[int]:
        return [len(d) for d, _ in self.steps]

    @property
    def max_size(self) -> int:
        return max(self.sizes, default=0)

    @property
    def mean_size(self) -> float:
        sizes = self.sizes
        return sum(sizes) / len(sizes) if sizes else 0.0

    def replays(self) -> bool:
        current = self.initial
        for deal, after in self.steps:
            current = apply_deal(current, deal)
            if current != after:
                return False
        return True


class TraceBuilder:
    def __init__(self, initial: Sequence[int]):
        self.initial = tuple(initial)
        self.current = self.initial
        self.steps: list[tuple[Deal, Allocation]] = []

    def apply(self, cycle: Sequence[int]) -> Allocation:
        deal = Deal(tuple(cycle))
        self.current = apply_deal(self.current, deal)
        self.steps.append((deal, self.current))
        return self.current

    def build(self) -> DealTrace:
        return DealTrace(self.initial, tuple(self.steps))


def _check_agent(instance: Instance, agent: int):
    if not 1 <= agent <= instance.n:
        raise ValueError(f"agent {agent} out of range 1..{instance.n}")


def _check_allocation(instance: Instance, allocation: Sequence[int]) -> np.ndarray:
    return np.asarray(check_permutation(allocation, instance.n, "allocation")) - 1


def rank(instance: Instance, agent: int, resource: int) -> int:
    _check_agent(instance, agent)
    if not 1 <= resource <= instance.n:
        raise ValueError(f"resource {resource} out of range 1..{instance.n}")
    return int(instance.rank_table[agent - 1, resource - 1])


def ranks(instance: Instance, allocation: Sequence[int]) -> np.ndarray:
    """Rank each agent gives to the resource she holds."""
    held = _check_allocation(instance, allocation)
    return instance.rank_table[np.arange(instance.n), held]


def ark(instance: Instance, allocation: Sequence[int]) -> int:
    return int(ranks(instance, allocation).sum())


def mrk(instance: Instance, allocation: Sequence[int]) -> int:
    return int(ranks(instance, allocation).min())


def wants_matrix(instance: Instance, allocation: Sequence[int]) -> np.ndarray:
    """``W[a, b]`` is true when agent ``a+1`` strictly prefers what ``b+1`` holds."""
    held = _check_allocation(instance, allocation)
    held_rank = instance.rank_table[np.arange(instance.n), held]
    return instance.rank_table[:, held] > held_rank[:, None]


def is_improving(instance: Instance, allocation: Sequence[int], deal: Deal | Sequence[int]) -> bool:
    deal = deal if isinstance(deal, Deal) else Deal(tuple(deal))
    if len(deal) < 2:
        return False
    for a in deal.cycle:
        _check_agent(instance, a)
    after = apply_deal(allocation, deal)
    table = instance.rank_table
    return all(table[a - 1, after[a - 1] - 1] > table[a - 1, allocation[a - 1] - 1] for a in deal.cycle)


def _improving_cycles(wants: np.ndarray, k_max: int) -> Iterator[tuple[int, ...]]:
    # gives[x, y]: y wants x's resource, so x can hand it on to y.  Every
    # cycle is produced once, starting from its smallest (0-based) agent.
    gives = wants.T
    n = len(gives)
    succ = [np.flatnonzero(row) for row in gives]
    for start in range(n):
        path = [start]
        on_path = {start}
        stack = [iter(int(v) for v in succ[start] if v > start)]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if nxt in on_path:
                continue
            path.append(nxt)
            on_path.add(nxt)
            if gives[nxt, start]:
                yield tuple(path)
            if len(path) < k_max:
                stack.append(iter(int(v) for v in succ[nxt] if v > start))
            else:
                on_path.discard(path.pop())


def enumerate_improving(instance: Instance, allocation: Sequence[int], k_max: int) -> set[Deal]:
    """All improving deals with 2 to ``k_max`` agents, in canonical form."""
    if not 2 <= k_max <= instance.n:
        raise ValueError(f"k_max must lie in 2..{instance.n}, got {k_max}")
    wants = wants_matrix(instance, allocation)
    return {Deal(tuple(a + 1 for a in c)) for c in _improving_cycles(wants, k_max)}


def _is_acyclic(adj: np.ndarray) -> bool:
    alive = np.ones(len(adj), dtype=bool)
    while alive.any():
        sub = adj[np.ix_(alive, alive)]
        sinks = ~sub.any(axis=1)
        if not sinks.any():
            return False
        idx = np.flatnonzero(alive)
        alive[idx[sinks]] = False
    return True


def is_stable(instance: Instance, allocation: Sequence[int], k: int) -> bool:
    """True when no improving deal of at most ``k`` agents exists."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k == 1 or instance.n < 2:
        return True
    wants = wants_matrix(instance, allocation)
    if k == 2:
        return not (wants & wants.T).any()
    if k >= instance.n:
        return _is_acyclic(wants)
    return next(_improving_cycles(wants, k), None) is None


def pareto_dominates(instance: Instance, better: Sequence[int], worse: Sequence[int]) -> bool:
    rb = ranks(instance, better)
    rw = ranks(instance, worse)
    return bool((rb >= rw).all() and (rb > rw).any())


def is_pareto_optimal(instance: Instance, allocation: Sequence[int]) -> bool:
    # With strict preferences any Pareto improvement decomposes into improving
    # cycles, so optimality is exactly acyclicity of the wants graph.
    return _is_acyclic(wants_matrix(instance, allocation))


def is_individually_rational(instance: Instance, allocation: Sequence[int]) -> bool:
    return bool((ranks(instance, allocation) >= ranks(instance, instance.endowment)).all())


def all_tops_allocation(instance: Instance) -> Optional[Allocation]:
    """The allocation giving everyone her top, when tops are pairwise distinct."""
    tops = tuple(order[0] for order in instance.prefs)
    return tops if len(set(tops)) == len(tops) else None
