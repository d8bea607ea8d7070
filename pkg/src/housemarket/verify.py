"""Randomized verification suites behind ``housemarket verify``.

Each suite returns a :class:`Report`; failures carry a witness instance that
can be written out in the instance file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .central import crawler, ttc
from .experiment import derive_seed
from .market import Instance, ark, is_pareto_optimal, is_stable, mrk, pareto_dominates, all_tops_allocation
from .oracles import (BOUND, maximality_instance, pareto_optimal_set, poa_ark_instance, poa_ark_sequences,
                      poa_mrk_instance, poa_mrk_sequences, reachable_by_swaps_many, replay, stable_set)
from .single_peaked import CULTURES, generate_instance, is_single_peaked

# CLI tokens: theorem1 = stability equivalence, theorem2 = domain maximality
SUITES = ("theorem1", "theorem2", "reachability", "poa")


@dataclass
class Failure:
    message: str
    instance: Optional[Instance] = None


@dataclass
class Report:
    suite: str
    checks: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, condition: bool, message: str, instance: Optional[Instance] = None) -> bool:
        self.checks += 1
        if not condition:
            self.failures.append(Failure(message, instance))
        return bool(condition)


def _rng(seed: int, suite: str, *cell: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, SUITES.index(suite), *cell))


def verify_stability_equivalence(sizes: Sequence[int] = (3, 4, 5, 6, 7), reps: int = 1000, seed: int = 0,
                                 cultures: Sequence[str] = CULTURES) -> Report:
    """C2-stable set == Cn-stable set == Pareto-optimal set on random single-peaked instances."""
    report = Report("theorem1")
    for ci, culture in enumerate(cultures):
        for n in sizes:
            if n > BOUND:
                raise ValueError(f"theorem1 enumerates all allocations; n must be <= {BOUND}")
            for rep in range(reps):
                inst = generate_instance(n, culture, _rng(seed, "theorem1", ci, n, rep))
                c2, cn, po = stable_set(inst, 2), stable_set(inst, n), pareto_optimal_set(inst)
                report.check(c2 == cn == po,
                             f"{culture} n={n} rep={rep}: |C2|={len(c2)} |Cn|={len(cn)} |PO|={len(po)}", inst)
    return report


def random_non_sp_pair(n: int, rng: np.random.Generator) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """A random axis and a uniformly random order that is not single-peaked on it."""
    axis = tuple(int(r) for r in rng.permutation(n) + 1)
    while True:
        order = tuple(int(r) for r in rng.permutation(n) + 1)
        if not is_single_peaked(order, axis):
            return axis, order


def verify_domain_maximality(sizes: Sequence[int] = (4, 5, 6, 7, 8), reps: int = 200, seed: int = 0) -> Report:
    """Outside the single-peaked domain, swap-stability no longer implies Pareto optimality."""
    report = Report("theorem2")
    for n in sizes:
        for rep in range(reps):
            axis, order = random_non_sp_pair(n, _rng(seed, "theorem2", n, rep))
            inst = maximality_instance(axis, order)
            tops = all_tops_allocation(inst)
            where = f"n={n} rep={rep} axis={axis} order={order}"
            report.check(is_stable(inst, inst.endowment, 2), f"{where}: endowment admits an improving swap", inst)
            report.check(not is_pareto_optimal(inst, inst.endowment), f"{where}: endowment is Pareto-optimal", inst)
            report.check(tops is not None and pareto_dominates(inst, tops, inst.endowment),
                         f"{where}: all-tops allocation does not dominate the endowment", inst)
    return report


def verify_reachability(sizes: Sequence[int] = (4, 5, 6, 7), reps: int = 500, seed: int = 0,
                        cultures: Sequence[str] = CULTURES) -> Report:
    """TTC and Crawler outcomes are reachable from the endowment by improving swaps.

    Instances cycle through the cultures rep by rep.
    """
    report = Report("reachability")
    for n in sizes:
        for rep in range(reps):
            culture = cultures[rep % len(cultures)]
            inst = generate_instance(n, culture, _rng(seed, "reachability", n, rep))
            targets = [ttc(inst)[0], crawler(inst)[0]]
            paths = reachable_by_swaps_many(inst, targets)
            for name, target, path in zip(("TTC", "Crawler"), targets, paths):
                report.check(path is not None, f"{culture} n={n} rep={rep}: {name} outcome {target} unreachable", inst)
    return report


def verify_poa(sizes: Sequence[int] = tuple(range(4, 13)), reps: int = 1, seed: int = 0) -> Report:
    """Worst-case constructions: objective formulas, improving replays, stability of the bad outcome.

    ``reps`` and ``seed`` are accepted for a uniform interface; the constructions are deterministic.
    """
    report = Report("poa")
    for n in sizes:
        inst, worst, best = poa_ark_instance(n)
        to_worst, to_best = poa_ark_sequences(n)
        report.check(ark(inst, best) == (n - 1) * (n + 1), f"ark family n={n}: ark(best) != (n-1)(n+1)", inst)
        report.check(ark(inst, worst) == n * (n + 1) // 2, f"ark family n={n}: ark(worst) != n(n+1)/2", inst)
        _check_replays(report, f"ark family n={n}", inst, worst, best, to_worst, to_best)

        inst, worst, best = poa_mrk_instance(n)
        to_worst, to_best = poa_mrk_sequences(n)
        report.check(mrk(inst, best) == n - 1, f"mrk family n={n}: mrk(best) != n-1", inst)
        report.check(mrk(inst, worst) == 1, f"mrk family n={n}: mrk(worst) != 1", inst)
        _check_replays(report, f"mrk family n={n}", inst, worst, best, to_worst, to_best)
    return report


def _swap_stable(inst: Instance, alloc) -> bool:
    if inst.n <= BOUND:
        return tuple(alloc) in stable_set(inst, 2)
    return is_stable(inst, alloc, 2)


def _check_replays(report: Report, label: str, inst: Instance, worst, best, to_worst, to_best):
    for name, target, seq in (("worst", worst, to_worst), ("best", best, to_best)):
        final, improving = replay(inst, seq)
        report.check(final == tuple(target), f"{label}: sequence to {name} ends at {final}", inst)
        report.check(improving, f"{label}: sequence to {name} has a non-improving deal", inst)
    report.check(_swap_stable(inst, worst), f"{label}: worst allocation {tuple(worst)} is not C2-stable", inst)


RUNNERS: dict[str, Callable[..., Report]] = {
    "theorem1": verify_stability_equivalence,
    "theorem2": verify_domain_maximality,
    "reachability": verify_reachability,
    "poa": verify_poa,
}


def run_suite(suite: str, sizes: Optional[Sequence[int]] = None, reps: Optional[int] = None,
              seed: int = 0) -> Report:
    if suite not in RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")
    kwargs: dict = {"seed": seed}
    if sizes is not None:
        kwargs["sizes"] = tuple(sizes)
    if reps is not None:
        kwargs["reps"] = reps
    return RUNNERS[suite](**kwargs)
