"""Single-chip random-walk tournaments, used to check the ICM's first-place rule.

Each hand picks an unordered pair of surviving players uniformly at random and
moves one chip between them in a fair-coin direction.  A player at zero chips
is out; the last one eliminated takes second place, and so on.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from icm.core import EXACT, ChipStacks, NumericMode, finish_matrix
from icm.rng import chunk_ranges, trial_rng

DEFAULT_MAX_HANDS = 10**7


@dataclass(frozen=True)
class SimulationConfig:
    stacks: ChipStacks
    trials: int
    seed: int = 0
    max_hands: int = DEFAULT_MAX_HANDS
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.max_hands < 1:
            raise ValueError("max_hands must be at least 1")


@dataclass
class EmpiricalFinishMatrix:
    counts: list[list[int]]
    trials: int = 0
    truncated: int = 0

    @property
    def n(self) -> int:
        return len(self.counts)

    def frequencies(self) -> list[list[float]]:
        if not self.trials:
            return [[0.0] * self.n for _ in range(self.n)]
        return [[c / self.trials for c in row] for row in self.counts]

    def merge(self, other: EmpiricalFinishMatrix) -> None:
        for row, extra in zip(self.counts, other.counts):
            for r, c in enumerate(extra):
                row[r] += c
        self.trials += other.trials
        self.truncated += other.truncated


def play_one(counts, rng, max_hands: int) -> list[int] | None:
    """Finishing place (0-based) of every player, or ``None`` if truncated."""
    chips = list(counts)
    active = list(range(len(chips)))
    place = [0] * len(chips)
    hands = 0
    while len(active) > 1:
        if hands >= max_hands:
            return None
        hands += 1
        m = len(active)
        a = int(rng.random() * m)
        b = int(rng.random() * (m - 1))
        if b >= a:
            b += 1
        winner, loser = active[a], active[b]
        chips[winner] += 1
        chips[loser] -= 1
        if chips[loser] == 0:
            place[loser] = m - 1
            active.pop(b)
    return place


def _run_range(args) -> EmpiricalFinishMatrix:
    counts, seed, max_hands, trials = args
    n = len(counts)
    out = EmpiricalFinishMatrix([[0] * n for _ in range(n)])
    for t in trials:
        place = play_one(counts, trial_rng(seed, t, "walk"), max_hands)
        if place is None:
            out.truncated += 1
            continue
        out.trials += 1
        for i, r in enumerate(place):
            out.counts[i][r] += 1
    return out


def simulate_random_walk(config: SimulationConfig) -> EmpiricalFinishMatrix:
    counts = config.stacks.counts
    n = len(counts)
    jobs = [(counts, config.seed, config.max_hands, r)
            for r in chunk_ranges(config.trials, config.workers)]
    if config.workers <= 1:
        parts = [_run_range(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_run_range, jobs))
    total = EmpiricalFinishMatrix([[0] * n for _ in range(n)])
    for part in parts:
        total.merge(part)
    return total


@dataclass
class DivergenceReport:
    model: list[list[float]]
    empirical: list[list[float]]
    difference: list[list[float]]
    standard_error: list[list[float]]
    column_agrees: list[bool]
    max_abs_deviation: list[float]
    z: float
    trials: int
    truncated: int
    warnings: list[str] = field(default_factory=list)

    @property
    def first_place_agrees(self) -> bool:
        return self.column_agrees[0]


def compare_empirical_vs_icm(empirical: EmpiricalFinishMatrix, stacks: ChipStacks,
                             mode: NumericMode = EXACT, z: float = 3.0,
                             min_trials: int = 1000) -> DivergenceReport:
    """Entry-by-entry comparison with the ICM finish matrix.

    Only the first-place column is expected to agree; other columns are
    reported as observed.  Standard errors use the ICM probability as the
    binomial parameter.
    """
    if empirical.n != stacks.n:
        raise ValueError("empirical matrix and stacks disagree on the player count")
    n = stacks.n
    model = finish_matrix(stacks, mode=mode).to_array().tolist()
    emp = empirical.frequencies()
    trials = max(empirical.trials, 1)
    diff = [[emp[i][r] - model[i][r] for r in range(n)] for i in range(n)]
    se = [[math.sqrt(model[i][r] * (1 - model[i][r]) / trials) for r in range(n)] for i in range(n)]
    agrees = [all(abs(diff[i][r]) <= z * se[i][r] + 1e-15 for i in range(n)) for r in range(n)]
    max_dev = [max(abs(diff[i][r]) for i in range(n)) for r in range(n)]
    warnings = []
    if empirical.trials < min_trials:
        warnings.append(f"only {empirical.trials} completed trials; {min_trials} recommended "
                        f"for {z}-sigma comparisons")
    if empirical.truncated:
        warnings.append(f"{empirical.truncated} trials hit the hand cap and were excluded")
    return DivergenceReport(model, emp, diff, se, agrees, max_dev, z, empirical.trials,
                            empirical.truncated, warnings)
