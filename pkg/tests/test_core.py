import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from icm.core import (
    EXACT,
    FLOAT,
    CapacityError,
    ChipStacks,
    DomainError,
    ICMError,
    PayoutStructure,
    decompose_payouts,
    equity,
    equity_from_decomposition,
    equity_with_eliminations,
    finish_matrix,
    joint_order_prob,
)
from oracles import brute_equity, brute_matrix
from strategies import stacks, stacks_and_payouts

F = Fraction


class TestJointOrderProb:
    def test_single_player(self):
        assert joint_order_prob([F(2, 5)]) == F(2, 5)
        assert joint_order_prob([0.4]) == pytest.approx(0.4)

    def test_three_equal_thirds(self):
        assert joint_order_prob([F(1, 3)] * 3) == F(1, 6)

    def test_two_terms(self):
        assert joint_order_prob([F(1, 2), F(3, 10)]) == F(3, 10)
        assert joint_order_prob([0.5, 0.3]) == pytest.approx(0.3)

    @pytest.mark.parametrize("bad", [[F(0)], [F(1, 2), F(-1, 4)], [F(1), F(1, 2)], [F(3, 4), F(1, 2)]])
    def test_domain_errors(self, bad):
        with pytest.raises(DomainError):
            joint_order_prob(bad)


class TestChipStacks:
    def test_rejects_zero_and_negative(self):
        with pytest.raises(DomainError):
            ChipStacks((10, 0, 5))
        with pytest.raises(DomainError):
            ChipStacks((10, -1))

    def test_needs_two_players(self):
        with pytest.raises(DomainError):
            ChipStacks((10,))

    @given(stacks())
    def test_fractions_sum_to_one(self, counts):
        s = ChipStacks(counts)
        assert s.total == sum(counts)
        assert sum(s.fractions()) == 1
        assert all(0 < x < 1 for x in s.fractions())


class TestPayouts:
    def test_nonincreasing(self):
        with pytest.raises(ICMError, match="nonincreasing"):
            PayoutStructure((1, 2))

    def test_padding_and_overflow(self):
        assert PayoutStructure((3, 1)).padded(4) == (3, 1, 0, 0)
        with pytest.raises(ICMError):
            PayoutStructure((3, 2, 1)).padded(2)

    def test_nontrivial(self):
        assert PayoutStructure((1, 1, 1, 0)).nontrivial(4)
        assert not PayoutStructure((1, 1, 1)).nontrivial(3)
        assert not PayoutStructure((1,)).nontrivial(3)
        assert PayoutStructure((5, 3, 2)).nontrivial(3)


class TestFinishMatrix:
    def test_symmetric_three(self):
        for method in ("enumerate", "subset-dp"):
            fm = finish_matrix(ChipStacks((1, 1, 1)), method)
            assert all(v == F(1, 3) for row in fm.entries for v in row)

    def test_first_place_is_chip_fraction(self):
        fm = finish_matrix(ChipStacks((140, 10, 10, 50)))
        assert fm[0, 0] == F(2, 3)

    def test_small_example_against_brute_force(self):
        fm = finish_matrix(ChipStacks((2, 1, 1)), "enumerate")
        assert fm[0, 1] == F(1, 3)
        assert fm.row(0) == (F(1, 2), F(1, 3), F(1, 6))

    @given(stacks(2, 6))
    def test_methods_agree_exactly(self, counts):
        s = ChipStacks(counts)
        dp = finish_matrix(s, "subset-dp")
        assert dp == finish_matrix(s, "enumerate")
        assert [list(r) for r in dp.entries] == brute_matrix(counts)

    @given(stacks(2, 7, 1000))
    def test_float_methods_agree(self, counts):
        s = ChipStacks(counts)
        a = finish_matrix(s, "subset-dp", FLOAT).to_array()
        b = finish_matrix(s, "enumerate", FLOAT).to_array()
        exact = finish_matrix(s, "subset-dp", EXACT).to_array()
        assert abs(a - b).max() < 1e-12
        assert abs(a - exact).max() < 1e-12

    @given(stacks(2, 7))
    def test_doubly_stochastic(self, counts):
        fm = finish_matrix(ChipStacks(counts))
        n = len(counts)
        assert all(sum(fm.row(i)) == 1 for i in range(n))
        assert all(sum(fm.column(r)) == 1 for r in range(n))
        assert list(fm.column(0)) == ChipStacks(counts).fractions()

    def test_enumeration_cap(self, monkeypatch):
        s = ChipStacks(tuple(range(1, 10)))
        with pytest.raises(CapacityError):
            finish_matrix(s, "enumerate")
        monkeypatch.setenv("ICM_ENUM_CAP", "9")
        assert finish_matrix(s, "enumerate", FLOAT).n == 9

    def test_dp_cap(self):
        with pytest.raises(CapacityError):
            finish_matrix(ChipStacks((1,) * 21), "subset-dp", FLOAT)
        with pytest.raises(ICMError):
            finish_matrix(ChipStacks((1, 2)), "magic")


class TestEquity:
    def test_satellite_table_initial(self):
        eq = equity(ChipStacks((140, 10, 10, 50)), PayoutStructure((1, 1, 1, 0)))
        assert eq == [F(2269, 2280), F(883, 1680), F(883, 1680), F(761, 798)]
        assert [round(float(e), 4) for e in eq] == [0.9952, 0.5256, 0.5256, 0.9536]

    def test_small_ladder(self):
        eq = equity(ChipStacks((2, 1, 1)), PayoutStructure((F("0.5"), F("0.3"), F("0.2"))))
        assert eq[0] == F(23, 60)

    @given(stacks(2, 6))
    def test_winner_take_all_is_chip_fraction(self, counts):
        s = ChipStacks(counts)
        assert equity(s, PayoutStructure((7,))) == [7 * x for x in s.fractions()]

    @given(stacks_and_payouts(2, 6))
    def test_matches_brute_force_and_conserves_prizes(self, case):
        counts, payouts = case
        eq = equity(ChipStacks(counts), payouts)
        assert eq == brute_equity(counts, payouts.prizes)
        assert sum(eq) == sum(payouts.prizes)

    @given(stacks(2, 6), st.integers(0, 9))
    def test_equal_prizes_everywhere(self, counts, prize):
        eq = equity(ChipStacks(counts), PayoutStructure((prize,) * len(counts)))
        assert eq == [prize] * len(counts)

    @given(stacks_and_payouts(2, 6), st.randoms(use_true_random=False))
    def test_permutation_equivariant(self, case, rnd):
        counts, payouts = case
        order = list(range(len(counts)))
        rnd.shuffle(order)
        eq = equity(ChipStacks(counts), payouts)
        permuted = equity(ChipStacks(counts).permuted(order), payouts)
        assert permuted == [eq[i] for i in order]

    @pytest.mark.parametrize("prizes", [(1, 1, 0), (3, 2, 1), (5, 1), (2, 1, 1), (1, 1, 1, 0), (6, 3, 1, 0)])
    def test_monotone_in_own_stack(self, prizes):
        payouts = PayoutStructure(prizes)
        n_values = [n for n in (3, 4) if len(prizes) <= n and payouts.nontrivial(n)]
        for n in n_values:
            grid = {c: equity(ChipStacks(c), payouts) for c in itertools.product(range(1, 7), repeat=n)}
            for counts, base in grid.items():
                for i, j in itertools.permutations(range(n), 2):
                    moved = list(counts)
                    moved[i] += 1
                    moved[j] -= 1
                    if tuple(moved) in grid:
                        assert grid[tuple(moved)][i] >= base[i]


class TestDecompose:
    def test_examples(self):
        assert decompose_payouts(PayoutStructure((5, 3, 1))) == [(2, 1), (2, 2), (1, 3)]
        assert decompose_payouts(PayoutStructure((1, 1, 1, 0))) == [(1, 3)]

    def test_recomposition_small(self):
        payouts = PayoutStructure((F("0.5"), F("0.3"), F("0.2")))
        fm = finish_matrix(ChipStacks((2, 1, 1)))
        assert equity_from_decomposition(fm, payouts)[0] == F(23, 60)

    @given(stacks_and_payouts(2, 6))
    def test_recomposition(self, case):
        counts, payouts = case
        s = ChipStacks(counts)
        assert equity_from_decomposition(finish_matrix(s), payouts) == equity(s, payouts)


class TestEliminations:
    def test_dead_players_take_bottom_places(self):
        eq = equity_with_eliminations((30, 0, 10), PayoutStructure((5, 3, 1)))
        assert eq[1] == 1
        assert eq[0] + eq[2] == 8
        assert eq[0] == equity(ChipStacks((30, 10)), PayoutStructure((5, 3)))[0]

    def test_simultaneous_busts_share_bottom_prizes(self):
        eq = equity_with_eliminations((30, 0, 0, 10), PayoutStructure((5, 3, 2, 1)))
        assert eq[1] == eq[2] == F(3, 2)

    def test_sole_survivor(self):
        assert equity_with_eliminations((0, 12), PayoutStructure((4, 1))) == [1, 4]

    def test_limit_of_vanishing_stack(self):
        # a tiny stack finishes last almost surely, matching the dead-stack rule
        payouts = PayoutStructure((5, 3, 1))
        tiny = equity(ChipStacks((30 * 10**6, 1, 10 * 10**6)), payouts, FLOAT)
        dead = equity_with_eliminations((30, 0, 10), payouts, FLOAT)
        assert tiny == pytest.approx(dead, abs=1e-6)
