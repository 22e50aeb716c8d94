"""Randomised verification of the fair-bet results and counterexample search.

Every trial draws from its own seeded stream (see :mod:`icm.rng`), so a run is
reproducible from ``(seed, trials)`` whatever the worker count.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from icm.bets import (
    BetSpec,
    EquityReport,
    Outcome,
    bet_deltas,
    expected_equity_under_bet,
    pooled_bet_pairwise_decompose,
)
from icm.core import EXACT, FLOAT, PayoutStructure
from icm.rng import chunk_ranges, trial_rng

IntRange = tuple[int, int]


def random_stacks(rng: random.Random, n: int, min_total: int = 0, max_total: int = 400) -> tuple[int, ...]:
    """Uniform random composition of a random total into ``n`` positive parts."""
    total = rng.randint(max(n, min_total), max(n, max_total))
    cuts = sorted(rng.sample(range(1, total), n - 1))
    bounds = [0, *cuts, total]
    return tuple(b - a for a, b in zip(bounds, bounds[1:]))


def random_payouts(rng: random.Random, n: int, paid: int, style: str = "flat") -> PayoutStructure:
    """``flat`` pays 1 to each of the top ``paid``; ``ladder`` draws a random
    nonincreasing list of positive integer prizes."""
    if style == "flat":
        return PayoutStructure.top_k(paid)
    if style == "ladder":
        return PayoutStructure(tuple(sorted((rng.randint(1, 10) for _ in range(paid)), reverse=True)))
    raise ValueError(f"unknown payout style {style!r}")


def random_fair_bet(rng: random.Random, counts: Sequence[int], participants: Sequence[int],
                    n_outcomes: int, allow_busts: bool = False, attempts: int = 200) -> BetSpec | None:
    """A random fair, zero-sum bet among ``participants`` with integer deltas.

    All but the last outcome get random zero-sum deltas and small integer
    weights; the last outcome gets weight 1 and whatever deltas restore
    fairness.  Returns ``None`` when no feasible bet turns up.
    """
    n = len(counts)
    parts = list(participants)
    floor = 0 if allow_busts else 1
    smallest = min(counts[i] for i in parts)
    cap = max(1, smallest // (2 * n_outcomes))
    for _ in range(attempts):
        weights = [rng.randint(1, 4) for _ in range(n_outcomes - 1)] + [1]
        deltas = []
        for _ in range(n_outcomes - 1):
            d = [0] * n
            for i in parts[:-1]:
                d[i] = rng.randint(-cap, cap)
            d[parts[-1]] = -sum(d[i] for i in parts[:-1])
            deltas.append(d)
        last = [0] * n
        for w, d in zip(weights, deltas):
            for i in parts:
                last[i] -= w * d[i]
        deltas.append(last)
        if all(v == 0 for d in deltas for v in d):
            continue
        if any(counts[i] + d[i] < floor for d in deltas for i in parts):
            continue
        order = list(range(n_outcomes))
        rng.shuffle(order)
        total = sum(weights)
        outcomes = tuple(Outcome(Fraction(weights[k], total), tuple(deltas[k])) for k in order)
        return BetSpec(frozenset(parts), outcomes)
    return None


@dataclass(frozen=True)
class Instance:
    stacks: tuple[int, ...]
    payouts: PayoutStructure
    bet: BetSpec


def random_instance(rng: random.Random, players: IntRange, paid: IntRange, participants: IntRange,
                    outcomes: IntRange = (2, 4), payout_style: str = "flat",
                    allow_busts: bool = False, require_nontrivial: bool = False,
                    max_total: int = 400, min_bystanders: int = 0) -> Instance:
    while True:
        n = rng.randint(*players)
        lo, hi = paid
        if require_nontrivial:
            lo, hi = max(lo, 2), min(hi, n - 1)
        else:
            lo, hi = max(lo, 1), min(hi, n)
        p_lo, p_hi = max(2, participants[0]), min(participants[1], n - min_bystanders)
        if lo > hi or p_lo > p_hi:
            continue
        k = rng.randint(lo, hi)
        stacks = random_stacks(rng, n, max_total=max_total)
        payouts = random_payouts(rng, n, k, payout_style)
        who = sorted(rng.sample(range(n), rng.randint(p_lo, p_hi)))
        bet = random_fair_bet(rng, stacks, who, rng.randint(*outcomes), allow_busts)
        if bet is not None:
            return Instance(stacks, payouts, bet)


# -- theorem suites ---------------------------------------------------------

@dataclass
class TheoremCheck:
    theorem: int
    trials: int
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _theorem_trial(args):
    theorem, players, paid, outcomes, payout_style, seed, trial = args
    rng = trial_rng(seed, trial, "theorem")
    inst = random_instance(rng, players, paid, (2, 2), outcomes, payout_style, require_nontrivial=True)
    result = bet_deltas(inst.stacks, inst.payouts, inst.bet, EXACT)
    bad = []
    if result.theorem_applies:
        if theorem == 1:
            bad = [i for i, d in result.participant.items() if not d < 0]
        else:
            bad = [i for i, d in result.bystander.items() if not d > 0]
    return trial, inst, result, bad


def check_theorem(theorem: int, trials: int, seed: int, players: IntRange = (3, 6),
                  paid: IntRange = (2, 5), outcomes: IntRange = (2, 4),
                  payout_style: str = "flat", workers: int = 1) -> TheoremCheck:
    """Random two-player fair bets under nontrivial payouts, evaluated exactly.

    theorem=1: both bettors lose equity.  theorem=2: every bystander gains.
    """
    if theorem not in (1, 2):
        raise ValueError("theorem must be 1 or 2")
    jobs = [(theorem, players, paid, outcomes, payout_style, seed, t) for t in range(trials)]
    out = TheoremCheck(theorem, trials)
    for trial, inst, result, bad in _map(_theorem_trial, jobs, workers):
        if result.theorem_applies:
            out.checked += 1
        if bad:
            out.violations.append((trial, inst, result.report, bad))
    return out


# -- counterexample search --------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    participants: IntRange = (3, 3)
    players: IntRange = (3, 6)
    paid: IntRange = (2, 3)
    outcomes: IntRange = (2, 3)
    payout_style: str = "flat"
    max_total: int = 400
    allow_busts: bool = False
    min_bystanders: int = 0
    trials: int = 1000
    seed: int = 0
    workers: int = 1
    screen_margin: float = 1e-9


@dataclass
class Counterexample:
    trial: int
    stacks: tuple[int, ...]
    payouts: PayoutStructure
    bet: BetSpec
    report: EquityReport
    participant_gainers: list[int]
    bystander_losers: list[int]

    @property
    def kinds(self) -> list[str]:
        out = []
        if self.participant_gainers:
            out.append("theorem-1")
        if self.bystander_losers:
            out.append("theorem-2")
        return out


def classify(report: EquityReport, margin=0) -> tuple[list[int], list[int]]:
    gainers = [i for i, d in report.participant_deltas().items() if d > -margin]
    losers = [i for i, d in report.bystander_deltas().items() if d < margin]
    return gainers, losers


def examine(trial: int, stacks, payouts: PayoutStructure, bet: BetSpec,
            screen_margin: float | None = 1e-9) -> Counterexample | None:
    """Screen in floating point, then confirm in exact arithmetic.

    The float screen errs towards candidates, so only the exact pass decides.
    """
    if screen_margin is not None:
        rough = expected_equity_under_bet(stacks, payouts, bet, FLOAT)
        gainers, losers = classify(rough, screen_margin)
        if not gainers and not losers:
            return None
    report = expected_equity_under_bet(stacks, payouts, bet, EXACT)
    gainers, losers = classify(report)
    if not gainers and not losers:
        return None
    return Counterexample(trial, tuple(stacks), payouts, bet, report, gainers, losers)


def _search_trial(args):
    config, trial = args
    rng = trial_rng(config.seed, trial, "search")
    inst = random_instance(rng, config.players, config.paid, config.participants, config.outcomes,
                           config.payout_style, config.allow_busts, max_total=config.max_total,
                           min_bystanders=config.min_bystanders)
    return examine(trial, inst.stacks, inst.payouts, inst.bet, config.screen_margin)


def counterexample_search(config: SearchConfig) -> list[Counterexample]:
    """Every sampled multi-way bet where a bettor gains or a bystander loses."""
    if config.participants[0] < 3:
        raise ValueError("counterexample search needs at least 3 participants")
    found = _map(_search_trial, [(config, t) for t in range(config.trials)], config.workers)
    return [c for c in found if c is not None]


# -- pooled bets ------------------------------------------------------------

def _pooled_trial(args):
    seed, trial, stakers, players = args
    rng = trial_rng(seed, trial, "pooled")
    while True:
        m = rng.randint(*stakers)
        n = rng.randint(max(players[0], m + 1), max(players[1], m + 1))
        counts = random_stacks(rng, n)
        k = rng.randint(2, n - 1)
        payouts = random_payouts(rng, n, k, rng.choice(["flat", "ladder"]))
        if not payouts.nontrivial(n):
            continue
        who = sorted(rng.sample(range(n), m))
        stakes = {i: rng.randint(1, counts[i]) for i in who}
        return trial, counts, payouts, stakes, pooled_bet_pairwise_decompose(stakes, counts, payouts)


def check_pooled(trials: int, seed: int, stakers: IntRange = (2, 4), players: IntRange = (3, 6),
                 workers: int = 1) -> list:
    """Random pooled bets, each checked through its pairwise chain."""
    return _map(_pooled_trial, [(seed, t, stakers, players) for t in range(trials)], workers)


def _map(fn, jobs: list, workers: int) -> list:
    """Ordered map; results come back in job order regardless of ``workers``."""
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    chunks = [jobs[r.start:r.stop] for r in chunk_ranges(len(jobs), workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [fn] * len(chunks), chunks)
        return [r for part in parts for r in part]


def _run_chunk(fn, chunk):
    return [fn(j) for j in chunk]


# -- identity and convexity sampling ----------------------------------------

def random_admissible(rng: random.Random, k: int, allow_full: bool = True):
    """Random ``(x, y, zs)`` with positive parts and ``x + y + sum(zs) <= 1``."""
    parts = [rng.randint(1, 50) for _ in range(k + 2)]
    rest = rng.randint(0 if allow_full else 1, 50)
    total = sum(parts) + rest
    fr = [Fraction(p, total) for p in parts]
    return fr[0], fr[1], fr[2:]


def random_gk_case(rng: random.Random, k: int, points: int = 101):
    """Random ``(y, zs)`` with an evenly spaced grid strictly inside the
    admissible wager interval."""
    parts = [rng.randint(1, 50) for _ in range(k + 2)]
    total = sum(parts)
    y = Fraction(parts[0], total)
    zs = [Fraction(p, total) for p in parts[1:-1]]
    lo, hi = -y, 1 - y - sum(zs)
    step = (hi - lo) / (points + 1)
    return y, zs, [lo + step * (i + 1) for i in range(points)]


@dataclass
class LemmaCheck:
    samples: int = 0
    exact_nonzero: list = field(default_factory=list)
    float_max_abs: float = 0.0
    float_over: list = field(default_factory=list)
    convexity_cases: int = 0
    convexity_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.exact_nonzero or self.float_over or self.convexity_failures)


def check_lemma(ks: Sequence[int], samples: int, seed: int, float_tolerance: float = 1e-12,
                convexity_samples: int | None = None, points: int = 101) -> LemmaCheck:
    """Partial-fraction residuals (exact and float) and ``g_k`` positivity."""
    from icm.identities import gk_convexity_check, lemma1_residual

    out = LemmaCheck()
    for t in range(samples):
        rng = trial_rng(seed, t, "lemma")
        k = rng.choice(list(ks))
        x, y, zs = random_admissible(rng, k)
        out.samples += 1
        exact = lemma1_residual(x, y, zs, EXACT)
        if exact != 0:
            out.exact_nonzero.append((k, x, y, zs, exact))
        approx = abs(lemma1_residual(x, y, zs, FLOAT))
        out.float_max_abs = max(out.float_max_abs, approx)
        if not approx < float_tolerance:
            out.float_over.append((k, x, y, zs, approx))
    per_k = samples if convexity_samples is None else convexity_samples
    for k in ks:
        for t in range(per_k):
            rng = trial_rng(seed, t, f"convexity-{k}")
            y, zs, grid = random_gk_case(rng, k, points)
            out.convexity_cases += 1
            res = gk_convexity_check(y, zs, grid, EXACT)
            if not res.ok:
                out.convexity_failures.append((k, y, zs, res))
    return out
