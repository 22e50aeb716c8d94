import math
import random

import pytest

from icm.core import ChipStacks
from icm.simulate import (
    EmpiricalFinishMatrix,
    SimulationConfig,
    compare_empirical_vs_icm,
    play_one,
    simulate_random_walk,
)


def sums_ok(emp: EmpiricalFinishMatrix):
    n = emp.n
    rows = [sum(r) for r in emp.counts]
    cols = [sum(emp.counts[i][r] for i in range(n)) for r in range(n)]
    return rows == [emp.trials] * n and cols == [emp.trials] * n


def test_one_chip_each():
    emp = simulate_random_walk(SimulationConfig(ChipStacks((1, 1)), trials=1, seed=3))
    assert emp.trials == 1
    assert emp.counts[0][0] + emp.counts[1][0] == 1
    assert sums_ok(emp)


def test_places_are_a_permutation():
    rng = random.Random(0)
    for _ in range(50):
        place = play_one((3, 1, 2, 4), rng, 10**6)
        assert sorted(place) == [0, 1, 2, 3]


def test_truncation_is_counted():
    emp = simulate_random_walk(SimulationConfig(ChipStacks((50, 50)), trials=20, seed=1, max_hands=5))
    assert emp.truncated == 20 and emp.trials == 0
    rep = compare_empirical_vs_icm(emp, ChipStacks((50, 50)))
    assert any("hand cap" in w for w in rep.warnings)


def test_seed_reproducible_across_workers():
    cfg = dict(stacks=ChipStacks((3, 2, 2)), trials=400, seed=21)
    one = simulate_random_walk(SimulationConfig(**cfg, workers=1))
    many = simulate_random_walk(SimulationConfig(**cfg, workers=3))
    assert one.counts == many.counts and one.trials == many.trials
    assert sums_ok(one)


def test_symmetric_pair():
    emp = simulate_random_walk(SimulationConfig(ChipStacks((3, 3)), trials=4000, seed=5))
    se = math.sqrt(0.25 / 4000)
    assert abs(emp.counts[0][0] / 4000 - 0.5) < 3 * se
    rep = compare_empirical_vs_icm(emp, ChipStacks((3, 3)))
    assert rep.model == [[0.5, 0.5], [0.5, 0.5]]


def test_gamblers_ruin_two_players():
    stacks = ChipStacks((3, 1))
    trials = 20_000
    emp = simulate_random_walk(SimulationConfig(stacks, trials=trials, seed=8))
    p = 3 / 4
    assert abs(emp.counts[0][0] / trials - p) < 3 * math.sqrt(p * (1 - p) / trials)


def test_first_column_agrees_small():
    stacks = ChipStacks((2, 1, 1))
    emp = simulate_random_walk(SimulationConfig(stacks, trials=5000, seed=2))
    rep = compare_empirical_vs_icm(emp, stacks)
    assert rep.first_place_agrees
    assert not rep.warnings
    assert rep.model[0] == pytest.approx([0.5, 1 / 3, 1 / 6])


def test_few_trials_warns():
    stacks = ChipStacks((2, 1, 1))
    emp = simulate_random_walk(SimulationConfig(stacks, trials=10, seed=2))
    assert compare_empirical_vs_icm(emp, stacks).warnings


def test_config_validation():
    with pytest.raises(ValueError):
        SimulationConfig(ChipStacks((1, 1)), trials=0)
