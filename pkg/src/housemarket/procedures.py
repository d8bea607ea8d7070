"""Name-based registry of every allocation procedure, for the CLI and experiments."""

from __future__ import annotations

from typing import Sequence

from .central import crawler, ttc
from .dynamics import parse_procedure, run_dynamics
from .market import Allocation, DealTrace, Instance, TraceBuilder
from .optimize import max_ark, max_mrk

PROCEDURES = (
    "ttc", "crawler",
    "c2-u", "c2-rra", "c2-rrp", "c2-pn", "c2-pw", "c3-u",
    "max-ark-ir", "max-mrk-ir",
)
DYNAMICS = tuple(p for p in PROCEDURES if p[:2] in ("c2", "c3"))


def reallocation_trace(initial: Sequence[int], final: Sequence[int]) -> DealTrace:
    """Decompose the move from ``initial`` to ``final`` into its non-trivial cycles."""
    owner = {r: a for a, r in enumerate(initial, start=1)}
    builder = TraceBuilder(initial)
    seen = set()
    for start in range(1, len(initial) + 1):
        if start in seen or final[start - 1] == initial[start - 1]:
            continue
        # walk backwards along "receives from" links, then reverse
        walk, a = [], start
        while a not in seen:
            seen.add(a)
            walk.append(a)
            a = owner[final[a - 1]]
        builder.apply(walk[::-1])
    return builder.build()


def solve(instance: Instance, procedure: str, seed: int = 0) -> tuple[Allocation, DealTrace]:
    """Run a registered procedure; ``seed`` only matters for c2-u, c2-pn and c3-u."""
    if procedure == "ttc":
        return ttc(instance)
    if procedure == "crawler":
        return crawler(instance)
    if procedure in ("max-ark-ir", "max-mrk-ir"):
        optimizer = max_ark if procedure == "max-ark-ir" else max_mrk
        alloc, _ = optimizer(instance, require_ir=True)
        return alloc, reallocation_trace(instance.endowment, alloc)
    if procedure in DYNAMICS:
        return run_dynamics(instance, parse_procedure(procedure, seed))
    raise ValueError(f"unknown procedure {procedure!r}; expected one of {PROCEDURES}")
