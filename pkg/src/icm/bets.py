"""Fair bets and their effect on ICM equity."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from icm.core import (
    EXACT,
    ChipStacks,
    DomainError,
    ICMError,
    NumericMode,
    PayoutStructure,
    equity_with_eliminations,
)


class BetValidationError(ICMError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Outcome:
    prob: Fraction
    deltas: tuple[int, ...]


@dataclass(frozen=True)
class BetSpec:
    """A finite-outcome wager.

    ``deltas`` are chip changes for every player in the tournament (positive
    is a gain); players outside ``participants`` must always have zero.
    """

    participants: frozenset[int]
    outcomes: tuple[Outcome, ...]

    def __post_init__(self):
        object.__setattr__(self, "participants", frozenset(self.participants))
        outcomes = tuple(
            o if isinstance(o, Outcome) else Outcome(o[0], tuple(o[1])) for o in self.outcomes
        )
        object.__setattr__(self, "outcomes", outcomes)

    @classmethod
    def from_pairs(cls, participants: Iterable[int], pairs) -> BetSpec:
        return cls(frozenset(participants), tuple(Outcome(p, tuple(d)) for p, d in pairs))

    @property
    def n(self) -> int:
        return len(self.outcomes[0].deltas) if self.outcomes else 0

    def expected_gain(self, player: int):
        return sum(o.prob * o.deltas[player] for o in self.outcomes)


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str

    def __str__(self):
        return f"{self.rule}: {self.detail}"


@dataclass
class BetValidation:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}


def _counts(stacks) -> tuple[int, ...]:
    if isinstance(stacks, ChipStacks):
        return stacks.counts
    return tuple(int(c) for c in stacks)


def _is_zero(value, mode: NumericMode) -> bool:
    if mode.exact or isinstance(value, (int, Fraction)):
        return value == 0
    return abs(value) <= mode.tolerance


def validate_bet(bet: BetSpec, stacks, mode: NumericMode = EXACT) -> BetValidation:
    """Check every bet invariant plus feasibility against ``stacks``.

    Collects all violations instead of stopping at the first.
    """
    counts = _counts(stacks)
    n = len(counts)
    result = BetValidation()
    add = lambda rule, detail: result.violations.append(Violation(rule, detail))  # noqa: E731

    if not bet.outcomes:
        add("outcomes", "bet has no outcomes")
        return result
    for p in sorted(bet.participants):
        if not 0 <= p < n:
            add("participants", f"participant index {p} out of range")
    for k, o in enumerate(bet.outcomes):
        if len(o.deltas) != n:
            add("arity", f"outcome {k} has {len(o.deltas)} deltas for {n} players")
    if result.violations:
        return result

    total_prob = 0
    for k, o in enumerate(bet.outcomes):
        if o.prob <= 0:
            add("probability", f"outcome {k} has non-positive probability {o.prob}")
        total_prob += o.prob
        if sum(o.deltas) != 0:
            add("conservation", f"outcome {k} deltas sum to {sum(o.deltas)}")
        for i, d in enumerate(o.deltas):
            if d != 0 and i not in bet.participants:
                add("non-participant", f"outcome {k} moves {d} chips for non-participant {i}")
        after = [c + d for c, d in zip(counts, o.deltas)]
        for i, c in enumerate(after):
            if c < 0:
                add("feasibility", f"outcome {k} leaves player {i} with {c} chips")
    if not _is_zero(total_prob - 1, mode):
        add("probability-sum", f"probabilities sum to {total_prob}")
    for i in range(n):
        gain = bet.expected_gain(i)
        if not _is_zero(gain, mode):
            add("fairness", f"player {i} has expected gain {gain}")
    if all(d == 0 for o in bet.outcomes for d in o.deltas):
        add("degenerate", "bet is identically zero")
    return result


def apply_outcome(stacks, delta: Sequence[int]) -> tuple[int, ...]:
    """Stacks after one outcome.  Zeros mark players eliminated by the outcome."""
    counts = _counts(stacks)
    if len(delta) != len(counts):
        raise DomainError(f"{len(delta)} deltas for {len(counts)} players")
    out = tuple(c + d for c, d in zip(counts, delta))
    for i, c in enumerate(out):
        if c < 0:
            raise DomainError(f"player {i} would hold {c} chips")
    return out


def eliminated(counts: Sequence[int]) -> list[int]:
    return [i for i, c in enumerate(counts) if c == 0]


@dataclass(frozen=True)
class EquityReport:
    before: tuple
    after: tuple
    participants: tuple[bool, ...]

    @property
    def delta(self) -> tuple:
        return tuple(a - b for a, b in zip(self.after, self.before))

    def participant_deltas(self) -> dict[int, object]:
        return {i: d for i, (d, p) in enumerate(zip(self.delta, self.participants)) if p}

    def bystander_deltas(self) -> dict[int, object]:
        return {i: d for i, (d, p) in enumerate(zip(self.delta, self.participants)) if not p}


def expected_equity_under_bet(stacks, payouts: PayoutStructure, bet: BetSpec,
                              mode: NumericMode = EXACT) -> EquityReport:
    counts = _counts(stacks)
    check = validate_bet(bet, counts, mode)
    if not check.ok:
        raise BetValidationError(check.violations)
    before = equity_with_eliminations(counts, payouts, mode)
    after = [mode.convert(0)] * len(counts)
    for o in bet.outcomes:
        prob = mode.convert(o.prob)
        eq = equity_with_eliminations(apply_outcome(counts, o.deltas), payouts, mode)
        after = [a + prob * e for a, e in zip(after, eq)]
    flags = tuple(i in bet.participants for i in range(len(counts)))
    return EquityReport(tuple(before), tuple(after), flags)


def causes_elimination(bet: BetSpec, stacks) -> bool:
    counts = _counts(stacks)
    return any(c > 0 and c + d == 0 for o in bet.outcomes for c, d in zip(counts, o.deltas))


@dataclass
class BetDeltas:
    """Deltas split by role, with the sign checks of the two-player theorems.

    ``theorem_applies`` holds for two-participant bets under nontrivial
    payouts that never bust a player; only then are ``violations`` reported.
    """

    participant: dict[int, object]
    bystander: dict[int, object]
    theorem_applies: bool
    violations: list[str]
    report: EquityReport

    @property
    def ok(self) -> bool:
        return not self.violations


def bet_deltas(stacks, payouts: PayoutStructure, bet: BetSpec,
               mode: NumericMode = EXACT) -> BetDeltas:
    counts = _counts(stacks)
    report = expected_equity_under_bet(counts, payouts, bet, mode)
    part = report.participant_deltas()
    by = report.bystander_deltas()
    applies = (len(bet.participants) == 2 and payouts.nontrivial(len(counts))
               and min(counts) > 0 and not causes_elimination(bet, counts))
    # Float mode only flags deltas beyond the tolerance on the wrong side.
    tol = 0 if mode.exact else mode.tolerance
    violations = []
    if applies:
        for i, d in part.items():
            if (d >= 0) if mode.exact else (d > tol):
                violations.append(f"participant {i} delta {d} is not negative")
        for i, d in by.items():
            if (d <= 0) if mode.exact else (d < -tol):
                violations.append(f"bystander {i} delta {d} is not positive")
    return BetDeltas(part, by, applies, violations, report)


def pooled_bet_build(stakes: Mapping[int, int], n: int) -> BetSpec:
    """Everyone stakes a fixed amount; one staker takes the pool with
    probability proportional to their stake."""
    if len(stakes) < 2:
        raise DomainError("a pooled bet needs at least 2 participants")
    for i, b in stakes.items():
        if not 0 <= i < n:
            raise DomainError(f"participant index {i} out of range")
        if b <= 0:
            raise DomainError(f"stake for player {i} must be positive, got {b}")
    pool = sum(stakes.values())
    outcomes = []
    for winner, b in stakes.items():
        deltas = [0] * n
        for j, bj in stakes.items():
            deltas[j] = pool - b if j == winner else -bj
        outcomes.append(Outcome(Fraction(b, pool), tuple(deltas)))
    return BetSpec(frozenset(stakes), tuple(outcomes))


@dataclass
class PooledDecomposition:
    stage_bets_valid: bool
    distribution_matches: bool
    bystanders_increase: bool
    pooled_distribution: dict[tuple[int, ...], Fraction]
    chained_distribution: dict[tuple[int, ...], Fraction]
    bystander_before: dict[int, object]
    bystander_by_stage: list[dict[int, object]]
    problems: list[str]

    @property
    def ok(self) -> bool:
        return self.stage_bets_valid and self.distribution_matches and self.bystanders_increase


def pooled_bet_pairwise_decompose(stakes: Mapping[int, int], stacks, payouts: PayoutStructure,
                                  mode: NumericMode = EXACT) -> PooledDecomposition:
    """Replay a pooled bet as a chain of two-player fair bets.

    The first two stakers bet against each other at odds proportional to
    their stakes; the survivor then risks the accumulated pool against the
    next staker, and so on.  Checks that every stage is a valid fair bet, that
    the chain lands on the pooled bet's outcome distribution, and that every
    non-staker gains equity.
    """
    counts = _counts(stacks)
    n = len(counts)
    pooled = pooled_bet_build(stakes, n)
    problems = []
    pooled_dist: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for o in pooled.outcomes:
        pooled_dist[apply_outcome(counts, o.deltas)] += o.prob

    order = list(stakes)
    first = order[0]
    # state: (holder of the pool, counts) -> probability
    states: dict[tuple[int, tuple[int, ...]], Fraction] = {(first, counts): Fraction(1)}
    pool = stakes[first]
    bystanders = [i for i in range(n) if i not in stakes]
    cache: dict[tuple[int, ...], list] = {}

    def eq(c):
        if c not in cache:
            cache[c] = equity_with_eliminations(c, payouts, mode)
        return cache[c]

    def expected_bystander(dist):
        out = {i: mode.convert(0) for i in bystanders}
        for (_, c), p in dist.items():
            e = eq(c)
            for i in bystanders:
                out[i] += mode.convert(p) * e[i]
        return out

    before = expected_bystander(states)
    by_stage = []
    valid = True
    for j in order[1:]:
        b = stakes[j]
        nxt: dict[tuple[int, tuple[int, ...]], Fraction] = defaultdict(Fraction)
        for (holder, c), p in states.items():
            win = [0] * n
            win[holder], win[j] = b, -b
            lose = [0] * n
            lose[holder], lose[j] = -pool, pool
            stage = BetSpec.from_pairs(
                (holder, j), [(Fraction(pool, pool + b), win), (Fraction(b, pool + b), lose)]
            )
            check = validate_bet(stage, c)
            if not check.ok:
                valid = False
                problems.append(f"stage {holder} vs {j} at {c}: {check.violations}")
                continue
            nxt[(holder, apply_outcome(c, win))] += p * stage.outcomes[0].prob
            nxt[(j, apply_outcome(c, lose))] += p * stage.outcomes[1].prob
        states = dict(nxt)
        pool += b
        by_stage.append(expected_bystander(states))

    chained: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for (_, c), p in states.items():
        chained[c] += p
    matches = dict(chained) == dict(pooled_dist)
    if not matches:
        problems.append("chained stages do not reproduce the pooled distribution")

    increase = True
    tol = 0 if mode.exact else mode.tolerance
    if not payouts.nontrivial(n):
        increase = False
        problems.append("payouts are not nontrivial; no strict increase is implied")
    final = by_stage[-1] if by_stage else before
    for i in bystanders:
        if not final[i] - before[i] > tol:
            increase = False
            problems.append(f"bystander {i} delta {final[i] - before[i]} is not positive")
    return PooledDecomposition(valid, matches, increase, dict(pooled_dist), dict(chained),
                               before, by_stage, problems)
