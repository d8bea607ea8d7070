from collections import Counter
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from housemarket import CultureSpec, generate_instance, is_single_peaked, is_worst_restricted, restrict
from housemarket.single_peaked import (generate_ic_sp, generate_up_sp, single_peaked_orders,
                                       worst_restriction_witness)

from conftest import five_agent_instance


def test_all_four_orders_on_three_resources():
    for order in [(1, 2, 3), (3, 2, 1), (2, 1, 3), (2, 3, 1)]:
        assert is_single_peaked(order, (1, 2, 3))
    assert not is_single_peaked((3, 1, 2), (1, 2, 3))
    assert not is_single_peaked((1, 3, 2), (1, 2, 3))


def test_tiny_orders_always_single_peaked():
    assert is_single_peaked((1,), (1,))
    for order in permutations((1, 2)):
        for axis in permutations((1, 2)):
            assert is_single_peaked(order, axis)


def test_is_single_peaked_mismatch():
    with pytest.raises(ValueError):
        is_single_peaked((1, 2, 3), (1, 2, 4))


def test_single_peaked_matches_definition():
    # peak-distance definition: strictly worse when moving away from the peak on either side
    axis = (2, 4, 1, 5, 3)
    pos = {r: i for i, r in enumerate(axis)}
    count = 0
    for order in permutations(axis):
        rank = {r: -i for i, r in enumerate(order)}
        p = pos[order[0]]
        ok = all(
            rank[axis[i]] > rank[axis[i - 1]] if i <= p else rank[axis[i]] < rank[axis[i - 1]]
            for i in range(1, 5)
        )
        count += ok
        assert is_single_peaked(order, axis) == ok
    assert count == 16


def test_enumeration_of_single_peaked_orders():
    for n in range(1, 8):
        axis = tuple(range(1, n + 1))
        orders = single_peaked_orders(axis)
        assert len(orders) == len(set(orders)) == 2 ** (n - 1)
        assert all(is_single_peaked(o, axis) for o in orders)


def test_worst_restriction_witness():
    profile = [(1, 2, 3), (3, 1, 2), (2, 3, 1)]
    assert worst_restriction_witness(profile) == (1, 2, 3)
    assert not is_worst_restricted(profile)
    assert is_worst_restricted([(4, 1, 3, 2)])
    assert is_worst_restricted([(1, 2), (2, 1)])


def test_worst_restriction_matches_triple_scan(rng):
    for _ in range(50):
        n = 5
        profile = [tuple(int(r) for r in rng.permutation(n) + 1) for _ in range(3)]
        expected = None
        for trip in combinations(range(1, n + 1), 3):
            lasts = {restrict(o, trip)[-1] for o in profile}
            if len(lasts) == 3:
                expected = trip
                break
        assert worst_restriction_witness(profile) == expected


def test_generated_profiles_are_worst_restricted(rng):
    for k in range(200):
        inst = generate_instance(7, ("ic-sp", "up-sp")[k % 2], rng)
        assert is_worst_restricted(inst.prefs)


def test_restrict_worked_value():
    assert restrict(five_agent_instance().prefs[0], {3, 2, 1}) == (3, 2, 1)
    assert restrict((4, 2, 1, 3), [2]) == (2,)
    assert restrict([(1, 2, 3), (3, 1, 2)], [1, 3]) == ((1, 3), (3, 1))
    with pytest.raises(ValueError):
        restrict((1, 2), [])


@given(st.integers(1, 7), st.integers(0, 2**31), st.data())
def test_restriction_keeps_single_peakedness(n, seed, data):
    rng = np.random.default_rng(seed)
    axis = tuple(int(r) for r in rng.permutation(n) + 1)
    order = generate_ic_sp(n, axis, rng)
    subset = data.draw(st.sets(st.sampled_from(axis), min_size=1))
    assert is_single_peaked(restrict(order, subset), restrict(axis, subset))


def test_single_resource_generators():
    rng = np.random.default_rng(0)
    assert generate_ic_sp(1, None, rng) == (1,)
    assert generate_up_sp(1, None, rng) == (1,)


def test_generators_respect_custom_axis(rng):
    axis = (3, 1, 4, 5, 2)
    for _ in range(100):
        assert is_single_peaked(generate_ic_sp(5, axis, rng), axis)
        assert is_single_peaked(generate_up_sp(5, axis, rng), axis)


def test_ic_sp_frequencies_n4():
    rng = np.random.default_rng(7)
    counts = Counter(generate_ic_sp(4, None, rng) for _ in range(80_000))
    assert set(counts) == set(single_peaked_orders((1, 2, 3, 4)))
    for c in counts.values():
        assert abs(c / 80_000 - 0.125) <= 0.01


def test_ic_sp_order_probability_n5():
    rng = np.random.default_rng(8)
    draws = 40_000
    hits = sum(generate_ic_sp(5, None, rng) == (3, 4, 2, 5, 1) for _ in range(draws))
    assert abs(hits / draws - 1 / 16) <= 0.01


def test_up_sp_peak_frequencies_and_left_extreme():
    rng = np.random.default_rng(9)
    draws = 100_000
    orders = [generate_up_sp(5, None, rng) for _ in range(draws)]
    peaks = Counter(o[0] for o in orders)
    for r in range(1, 6):
        assert abs(peaks[r] / draws - 0.2) <= 0.01
    left = sum(o == (1, 2, 3, 4, 5) for o in orders)
    assert abs(left / draws - 0.2) <= 0.01


def test_generate_instance_deterministic_and_valid():
    a = generate_instance(9, "up-sp", np.random.default_rng(3), "random")
    b = generate_instance(9, "up-sp", np.random.default_rng(3), "random")
    assert a == b
    assert a.axis == tuple(range(1, 10))
    assert all(is_single_peaked(o, a.axis) for o in a.prefs)
    assert generate_instance(4, "ic-sp").endowment == (1, 2, 3, 4)


def test_culture_spec():
    spec = CultureSpec("ic-sp", axis=(2, 1, 3), seed=5)
    inst = generate_instance(3, spec)
    assert inst.axis == (2, 1, 3)
    assert inst == generate_instance(3, spec)
    with pytest.raises(ValueError):
        CultureSpec("impartial")
    with pytest.raises(ValueError):
        generate_instance(3, "ic-sp", endowment="sorted")
