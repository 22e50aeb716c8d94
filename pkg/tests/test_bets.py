from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from icm.bets import (
    BetSpec,
    BetValidationError,
    apply_outcome,
    bet_deltas,
    causes_elimination,
    expected_equity_under_bet,
    pooled_bet_build,
    pooled_bet_pairwise_decompose,
    validate_bet,
)
from icm.core import EXACT, FLOAT, DomainError, PayoutStructure
from icm.search import random_fair_bet, random_stacks
from strategies import stacks

F = Fraction
HALF = F(1, 2)
SATELLITE = (140, 10, 10, 50)
SATELLITE_BET = BetSpec.from_pairs({0, 1, 2}, [(HALF, (16, -8, -8, 0)), (HALF, (-16, 8, 8, 0))])


def coin_flip(n, a, b, amount):
    win = [0] * n
    win[a], win[b] = amount, -amount
    lose = [-d for d in win]
    return BetSpec.from_pairs({a, b}, [(HALF, win), (HALF, lose)])


class TestValidate:
    def test_symmetric_flip_is_valid(self):
        assert validate_bet(coin_flip(2, 0, 1, 10), (100, 100)).ok

    def test_certain_outcome_is_unfair(self):
        bet = BetSpec.from_pairs({0, 1}, [(F(1), (5, -5))])
        assert "fairness" in validate_bet(bet, (100, 100)).rules()

    def test_infeasible(self):
        res = validate_bet(coin_flip(2, 0, 1, 10), (100, 8))
        assert res.rules() == {"feasibility"}

    def test_collects_every_violation(self):
        bet = BetSpec.from_pairs({0}, [(F(1, 3), (5, -4, 0)), (F(1, 3), (0, 0, 0))])
        rules = validate_bet(bet, (10, 10, 10)).rules()
        assert {"conservation", "non-participant", "probability-sum", "fairness"} <= rules

    def test_degenerate(self):
        bet = BetSpec.from_pairs({0, 1}, [(F(1), (0, 0))])
        assert validate_bet(bet, (3, 3)).rules() == {"degenerate"}

    def test_arity(self):
        assert validate_bet(coin_flip(3, 0, 1, 1), (5, 5)).rules() == {"arity"}

    def test_non_positive_probability(self):
        bet = BetSpec.from_pairs({0, 1}, [(F(0), (1, -1)), (F(1, 2), (1, -1)), (F(1, 2), (-1, 1))])
        assert "probability" in validate_bet(bet, (5, 5)).rules()

    def test_float_probabilities_within_tolerance(self):
        bet = BetSpec.from_pairs({0, 1}, [(0.1 + 0.2, (7, -7)), (0.7, (-3, 3))])
        assert validate_bet(bet, (50, 50), FLOAT).ok

    def test_satellite_bet_is_valid(self):
        assert validate_bet(SATELLITE_BET, SATELLITE).ok


class TestApplyOutcome:
    def test_satellite_outcomes(self):
        assert apply_outcome(SATELLITE, (16, -8, -8, 0)) == (156, 2, 2, 50)
        assert apply_outcome(SATELLITE, (-16, 8, 8, 0)) == (124, 18, 18, 50)

    @given(stacks())
    def test_zero_vector(self, counts):
        assert apply_outcome(counts, [0] * len(counts)) == counts

    def test_negative_result(self):
        with pytest.raises(DomainError):
            apply_outcome((5, 5), (-6, 6))

    def test_bust_is_marked_by_zero(self):
        assert apply_outcome((5, 5), (-5, 5)) == (0, 10)


class TestExpectedEquity:
    def test_satellite_table_final(self):
        rep = expected_equity_under_bet(SATELLITE, PayoutStructure((1, 1, 1, 0)), SATELLITE_BET)
        assert [round(float(v), 4) for v in rep.after] == [0.9914, 0.5316, 0.5316, 0.9455]
        assert sum(rep.delta) == 0

    def test_winner_take_all_neutral(self):
        rep = expected_equity_under_bet(SATELLITE, PayoutStructure((1,)), SATELLITE_BET)
        assert all(d == 0 for d in rep.delta)

    def test_two_player_equal_stacks_winner_take_all(self):
        rep = expected_equity_under_bet((100, 100), PayoutStructure((1, 0)), coin_flip(2, 0, 1, 50))
        assert rep.delta == (0, 0)

    def test_rejects_invalid_bet(self):
        with pytest.raises(BetValidationError):
            expected_equity_under_bet((100, 8), PayoutStructure((1,)), coin_flip(2, 0, 1, 10))

    @given(st.integers(0, 10**6), stacks(3, 6, 300), st.integers(1, 5))
    def test_conservation_and_neutrality(self, seed, counts, prize):
        import random

        rng = random.Random(seed)
        who = rng.sample(range(len(counts)), rng.randint(2, len(counts)))
        bet = random_fair_bet(rng, counts, who, rng.randint(2, 4), allow_busts=True)
        if bet is None:
            return
        rep = expected_equity_under_bet(counts, PayoutStructure.top_k(rng.randint(1, len(counts))), bet)
        assert sum(rep.delta) == 0
        wta = expected_equity_under_bet(counts, PayoutStructure((prize,)), bet)
        assert all(d == 0 for d in wta.delta)


class TestBetDeltas:
    def test_two_player_flip(self):
        res = bet_deltas((100, 100, 100), PayoutStructure((1, 1, 0)), coin_flip(3, 0, 1, 50))
        assert res.theorem_applies and res.ok
        assert res.participant == {0: F(-1, 30), 1: F(-1, 30)}
        assert res.bystander == {2: F(1, 15)}

    def test_satellite_three_way_bystander_loses(self):
        res = bet_deltas(SATELLITE, PayoutStructure((1, 1, 1, 0)), SATELLITE_BET)
        assert not res.theorem_applies
        assert res.bystander[3] < 0
        assert round(float(res.bystander[3]), 4) == -0.0081

    def test_three_way_bettors_gain(self):
        bet = BetSpec.from_pairs({0, 1, 2}, [(HALF, (60, -30, -30)), (HALF, (-60, 30, 30))])
        res = bet_deltas((100, 100, 100), PayoutStructure((1, 1, 0)), bet)
        assert res.participant == {0: F(-27, 391), 1: F(27, 782), 2: F(27, 782)}
        assert not res.violations

    def test_bust_bets_are_reported_not_asserted(self):
        bet = coin_flip(3, 0, 1, 40)
        res = bet_deltas((40, 100, 60), PayoutStructure((1, 1, 0)), bet)
        assert causes_elimination(bet, (40, 100, 60))
        assert not res.theorem_applies and res.violations == []

    def test_float_mode(self):
        res = bet_deltas((100, 100, 100), PayoutStructure((1, 1, 0)), coin_flip(3, 0, 1, 50), FLOAT)
        assert res.ok
        assert res.bystander[2] == pytest.approx(1 / 15)


class TestPooled:
    def test_equal_stakes_is_coin_flip(self):
        bet = pooled_bet_build({0: 10, 1: 10}, 2)
        assert set(bet.outcomes) == set(coin_flip(2, 0, 1, 10).outcomes)

    def test_proportional_probabilities_and_fairness(self):
        bet = pooled_bet_build({0: 10, 1: 20, 2: 30}, 4)
        assert [o.prob for o in bet.outcomes] == [F(1, 6), F(1, 3), F(1, 2)]
        assert all(bet.expected_gain(i) == 0 for i in range(4))
        assert validate_bet(bet, (30, 30, 30, 30)).ok

    def test_rejects_bad_stakes(self):
        with pytest.raises(DomainError):
            pooled_bet_build({0: 10, 1: 0}, 2)
        with pytest.raises(DomainError):
            pooled_bet_build({0: 10}, 2)

    def test_chain_reproduces_distribution(self):
        dec = pooled_bet_pairwise_decompose({0: 10, 1: 20, 2: 30}, (100, 100, 100, 100),
                                            PayoutStructure((3, 2, 0, 0)))
        assert dec.ok
        assert sorted(dec.chained_distribution.values()) == [F(1, 6), F(1, 3), F(1, 2)]

    def test_full_merge(self):
        dec = pooled_bet_pairwise_decompose({0: 50, 1: 50}, (50, 50, 100), PayoutStructure((1, 1, 0)))
        assert dec.ok
        assert dec.bystander_before == {2: F(5, 6)}
        assert dec.bystander_by_stage[-1] == {2: F(1)}

    def test_full_merge_of_satellite_short_stacks(self):
        dec = pooled_bet_pairwise_decompose({1: 10, 2: 10}, SATELLITE, PayoutStructure((1, 1, 1, 0)))
        assert dec.ok

    @given(st.integers(0, 10**6))
    def test_random_pools(self, seed):
        import random

        rng = random.Random(seed)
        n = rng.randint(3, 5)
        counts = random_stacks(rng, n, max_total=200)
        who = rng.sample(range(n), rng.randint(2, n - 1))
        stakes = {i: rng.randint(1, counts[i]) for i in who}
        dec = pooled_bet_pairwise_decompose(stakes, counts, PayoutStructure.top_k(rng.randint(2, n - 1)))
        assert dec.ok, dec.problems
