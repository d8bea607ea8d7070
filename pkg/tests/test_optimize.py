from itertools import permutations

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from housemarket import Instance, max_ark, max_mrk, poa_ark_instance, poa_mrk_instance
from housemarket.market import ranks
from housemarket.optimize import hungarian, max_ark_value, max_mrk_value, mrk_feasible

from conftest import random_instance, random_unrestricted


def brute(inst, require_ir):
    base = ranks(inst, inst.endowment)
    best_ark = best_mrk = None
    for p in permutations(range(1, inst.n + 1)):
        r = ranks(inst, p)
        if require_ir and (r < base).any():
            continue
        key_ark = (int(r.sum()), tuple(-x for x in p))
        key_mrk = (int(r.min()), int(r.sum()), tuple(-x for x in p))
        if best_ark is None or key_ark > best_ark[0]:
            best_ark = (key_ark, p)
        if best_mrk is None or key_mrk > best_mrk[0]:
            best_mrk = (key_mrk, p)
    return best_ark[1], best_ark[0][0], best_mrk[1], best_mrk[0][0]


def test_hungarian_against_scipy(rng):
    for n in (1, 2, 5, 9, 20):
        for _ in range(10):
            cost = rng.integers(-50, 50, size=(n, n))
            col, u, v = hungarian(cost)
            rows, cols = linear_sum_assignment(cost)
            assert cost[np.arange(n), col].sum() == cost[rows, cols].sum()
            assert sorted(col) == list(range(n))
            # dual feasibility, tight on the assignment
            assert (u[:, None] + v[None, :] <= cost).all()
            assert (u + v[col] == cost[np.arange(n), col]).all()


def test_hungarian_rejects_non_square():
    with pytest.raises(ValueError):
        hungarian(np.zeros((2, 3)))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_optimizers_match_brute_force_with_tie_break(n, rng):
    for _ in range(15):
        inst = random_unrestricted(n, rng) if n % 2 else random_instance(n, rng)
        for ir in (False, True):
            alloc_a, val_a, alloc_m, val_m = brute(inst, ir)
            assert max_ark(inst, ir) == (alloc_a, val_a)
            assert max_mrk(inst, ir) == (alloc_m, val_m)
            assert max_ark_value(inst, ir) == val_a
            assert max_mrk_value(inst, ir) == val_m


def test_values_at_seven(rng):
    for _ in range(3):
        inst = random_instance(7, rng)
        for ir in (False, True):
            _, val_a, _, val_m = brute(inst, ir)
            assert max_ark(inst, ir)[1] == val_a
            assert max_mrk(inst, ir)[1] == val_m


def test_all_tops_endowment():
    n = 5
    prefs = tuple(tuple([i] + [r for r in range(1, n + 1) if r != i]) for i in range(1, n + 1))
    inst = Instance(prefs, tuple(range(1, n + 1)))
    for ir in (False, True):
        assert max_ark(inst, ir) == (inst.endowment, n * n)
        assert max_mrk(inst, ir) == (inst.endowment, n)


def test_construction_optima():
    for n in range(4, 12):
        assert max_ark_value(poa_ark_instance(n).instance) == (n - 1) * n + (n - 1)
        assert max_mrk_value(poa_mrk_instance(n).instance) == n - 1


def test_mrk_feasibility_threshold(rng):
    inst = random_instance(6, rng)
    best = max_mrk_value(inst)
    assert mrk_feasible(inst, 1)
    assert mrk_feasible(inst, best)
    assert not mrk_feasible(inst, best + 1)


def test_ir_optimum_respects_endowment(rng):
    for _ in range(20):
        inst = random_instance(8, rng, "up-sp")
        alloc, val = max_ark(inst, True)
        assert (ranks(inst, alloc) >= ranks(inst, inst.endowment)).all()
        assert val <= max_ark_value(inst)
        _, m = max_mrk(inst, True)
        assert m >= int(ranks(inst, inst.endowment).min())
