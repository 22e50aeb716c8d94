"""Finish-position distributions and prize equity under the Independent Chip Model.

Two independent routes compute the finish matrix: brute-force enumeration of
every finishing order (``n!`` terms, used as the oracle) and a dynamic program
over subsets of players occupying the top places (``O(2^n n)``).  Both run in
exact rational arithmetic or in floating point.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence

import numpy as np

DEFAULT_ENUM_CAP = 8
DEFAULT_DP_CAP = 20
# Rounding allowance when float fractions should sum to exactly 1.
FLOAT_SLACK = 1e-12


class ICMError(ValueError):
    """Base class for model errors."""


class DomainError(ICMError):
    """An argument lies outside the domain of an ICM formula."""


class CapacityError(ICMError):
    """The requested method would exceed its configured size cap."""


@dataclass(frozen=True)
class NumericMode:
    exact: bool = True
    tolerance: float = 1e-9

    def convert(self, value):
        if self.exact:
            return value if isinstance(value, Fraction) else Fraction(value)
        return float(value)


EXACT = NumericMode(exact=True)
FLOAT = NumericMode(exact=False)


def enum_cap() -> int:
    """Enumeration cap, raised through the ``ICM_ENUM_CAP`` environment variable."""
    raw = os.environ.get("ICM_ENUM_CAP")
    if raw is None:
        return DEFAULT_ENUM_CAP
    return max(DEFAULT_ENUM_CAP, int(raw))


@dataclass(frozen=True)
class ChipStacks:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) < 2:
            raise DomainError("at least 2 players are required")
        for i, c in enumerate(counts):
            if isinstance(c, bool) or not isinstance(c, (int, np.integer)):
                raise DomainError(f"chip count for player {i} must be an integer, got {c!r}")
            if c <= 0:
                raise DomainError(f"chip count for player {i} must be positive, got {c}")
        object.__setattr__(self, "counts", tuple(int(c) for c in counts))

    @property
    def n(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def fraction(self, i: int) -> Fraction:
        return Fraction(self.counts[i], self.total)

    def fractions(self, mode: NumericMode = EXACT) -> list:
        if mode.exact:
            return [self.fraction(i) for i in range(self.n)]
        total = float(self.total)
        return [c / total for c in self.counts]

    def permuted(self, order: Sequence[int]) -> ChipStacks:
        return ChipStacks(tuple(self.counts[i] for i in order))


def _as_prize(value):
    if isinstance(value, bool):
        raise ICMError("prize must be a number")
    if isinstance(value, (Rational, float)):
        return value
    if isinstance(value, Real):
        return float(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ICMError(f"prize must be a number, got {value!r}")


@dataclass(frozen=True)
class PayoutStructure:
    """Nonincreasing prize ladder ``m_1 >= m_2 >= ... >= m_n``."""

    prizes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        prizes = tuple(_as_prize(p) for p in self.prizes)
        object.__setattr__(self, "prizes", prizes)
        for r, p in enumerate(prizes):
            if p < 0:
                raise ICMError(f"prize for place {r + 1} must be non-negative, got {p}")
        for r in range(len(prizes) - 1):
            if prizes[r] < prizes[r + 1]:
                raise ICMError("payouts must be nonincreasing")

    def padded(self, n: int) -> tuple:
        if len(self.prizes) > n:
            raise ICMError(f"{len(self.prizes)} payouts for only {n} players")
        return self.prizes + (0,) * (n - len(self.prizes))

    def nontrivial(self, n: int) -> bool:
        """True when ``m_2 > m_n``: someone still in will miss second-place money."""
        m = self.padded(n)
        return n >= 2 and m[1] > m[n - 1]

    @classmethod
    def top_k(cls, k: int, prize=1) -> PayoutStructure:
        return cls((prize,) * k)


@dataclass(frozen=True)
class FinishMatrix:
    """``entries[i][r]`` is the probability player ``i`` finishes in place ``r + 1``."""

    entries: tuple[tuple, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, index):
        i, r = index
        return self.entries[i][r]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, r: int) -> tuple:
        return tuple(row[r] for row in self.entries)

    def top_r(self, i: int, r: int):
        """Probability player ``i`` finishes in one of the top ``r`` places."""
        return sum(self.entries[i][:r])

    def to_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])


def joint_order_prob(fractions: Sequence) -> Real:
    """Probability that the given players finish 1st, 2nd, ... in this order.

    ``x_1 x_2 ... x_k / ((1 - x_1)(1 - x_1 - x_2) ... (1 - x_1 - ... - x_{k-1}))``
    """
    if len(fractions) == 0:
        raise DomainError("at least one fraction is required")
    num = 1
    den = 1
    prefix = 0
    for j, x in enumerate(fractions):
        if x <= 0:
            raise DomainError(f"fraction {j} must be positive, got {x}")
        if j > 0:
            remaining = 1 - prefix
            if remaining <= 0:
                raise DomainError("prefix of fractions reaches 1 before the last argument")
            den *= remaining
        num *= x
        prefix += x
    if prefix > 1 and not (isinstance(prefix, float) and prefix - 1 <= FLOAT_SLACK):
        raise DomainError(f"fractions sum to {prefix} > 1")
    return num / den


def _check_method_cap(n: int, method: str, cap: int | None):
    if method == "enumerate":
        limit = enum_cap() if cap is None else cap
    elif method in ("subset-dp", "dp"):
        limit = DEFAULT_DP_CAP if cap is None else cap
    else:
        raise ICMError(f"unknown method {method!r}")
    if n > limit:
        raise CapacityError(f"{method} is capped at {limit} players, got {n}")


def _enumerate_matrix(stacks: ChipStacks, mode: NumericMode) -> list[list]:
    n = stacks.n
    xs = stacks.fractions(mode)
    zero = Fraction(0) if mode.exact else 0.0
    out = [[zero] * n for _ in range(n)]
    for order in itertools.permutations(range(n)):
        # The last finisher is forced, so the full ordering's probability
        # equals that of its first n - 1 places.
        p = joint_order_prob([xs[i] for i in order[:-1]])
        for r, i in enumerate(order):
            out[i][r] += p
    return out


def _dp_matrix_exact(stacks: ChipStacks) -> list[list[Fraction]]:
    n = stacks.n
    counts = stacks.counts
    total = stacks.total
    size = 1 << n
    chips = [0] * size
    for s in range(1, size):
        low = s & -s
        chips[s] = chips[s ^ low] + counts[low.bit_length() - 1]
    # g[s]: probability the players in s occupy the top |s| places in some order.
    g = [Fraction(0)] * size
    g[0] = Fraction(1)
    # h[s] = g[s] / (fraction of chips outside s)
    h = [Fraction(0)] * size
    by_size: list[list[int]] = [[] for _ in range(n + 1)]
    for s in range(size):
        by_size[s.bit_count()].append(s)
    h[0] = Fraction(1)
    for layer in range(1, n):
        for s in by_size[layer]:
            acc = Fraction(0)
            for j in range(n):
                bit = 1 << j
                if s & bit:
                    acc += h[s ^ bit] * Fraction(counts[j], total)
            g[s] = acc
            h[s] = acc * Fraction(total, total - chips[s])
    out = [[Fraction(0)] * n for _ in range(n)]
    for layer in range(n):
        for s in by_size[layer]:
            for i in range(n):
                if not s & (1 << i):
                    out[i][layer] += h[s] * Fraction(counts[i], total)
    return out


def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        pc[1 << j:1 << (j + 1)] = pc[:1 << j] + 1
    return pc


def _dp_matrix_float(stacks: ChipStacks) -> np.ndarray:
    n = stacks.n
    x = np.asarray(stacks.counts, dtype=np.float64) / float(stacks.total)
    size = 1 << n
    mass = np.zeros(size)
    for j in range(n):
        mass[1 << j:1 << (j + 1)] = mass[:1 << j] + x[j]
    pc = _popcounts(n)
    order = np.argsort(pc, kind="stable")
    bounds = np.searchsorted(pc[order], np.arange(n + 2))
    h = np.zeros(size)
    h[0] = 1.0
    out = np.zeros((n, n))
    out[:, 0] = x
    for layer in range(1, n):
        subsets = order[bounds[layer]:bounds[layer + 1]]
        g = np.zeros(subsets.size)
        for j in range(n):
            bit = 1 << j
            has = (subsets & bit) != 0
            g[has] += h[subsets[has] ^ bit] * x[j]
        h[subsets] = g / (1.0 - mass[subsets])
        for i in range(n):
            out[i, layer] = x[i] * h[subsets[(subsets & (1 << i)) == 0]].sum()
    return out


def finish_matrix(stacks: ChipStacks, method: str = "subset-dp",
                  mode: NumericMode = EXACT, cap: int | None = None) -> FinishMatrix:
    """Probability of each player finishing in each place.

    ``method`` is ``"enumerate"`` (sum over all ``n!`` finishing orders) or
    ``"subset-dp"`` (``"dp"`` is accepted as an alias).
    """
    _check_method_cap(stacks.n, method, cap)
    if method == "enumerate":
        rows = _enumerate_matrix(stacks, mode)
    elif mode.exact:
        rows = _dp_matrix_exact(stacks)
    else:
        rows = _dp_matrix_float(stacks).tolist()
    return FinishMatrix(tuple(tuple(row) for row in rows))


def equity(stacks: ChipStacks, payouts: PayoutStructure, mode: NumericMode = EXACT,
           method: str = "subset-dp") -> list:
    """Expected prize of every player."""
    prizes = [mode.convert(m) for m in payouts.padded(stacks.n)]
    fm = finish_matrix(stacks, method=method, mode=mode)
    return [sum(p * m for p, m in zip(row, prizes)) for row in fm.entries]


def decompose_payouts(payouts: PayoutStructure) -> list[tuple]:
    """Split a prize ladder into flat sub-tournaments.

    Returns ``(m_r - m_{r+1}, r)`` pairs: each pays its delta to every one of
    the top ``r`` finishers.  Zero deltas are dropped.
    """
    m = payouts.prizes
    out = []
    for r in range(1, len(m) + 1):
        nxt = m[r] if r < len(m) else 0
        delta = m[r - 1] - nxt
        if delta != 0:
            out.append((delta, r))
    return out


def equity_from_decomposition(fm: FinishMatrix, payouts: PayoutStructure,
                              mode: NumericMode = EXACT) -> list:
    parts = decompose_payouts(payouts)
    return [sum(mode.convert(d) * fm.top_r(i, r) for d, r in parts) for i in range(fm.n)]


def equity_with_eliminations(counts: Iterable[int], payouts: PayoutStructure,
                             mode: NumericMode = EXACT) -> list:
    """Equity when some players may hold zero chips.

    Players with chips share the top places under the ICM; eliminated players
    take the bottom places, each receiving the average of those prizes.
    """
    counts = list(counts)
    n = len(counts)
    if any(c < 0 for c in counts):
        raise DomainError("chip counts must be non-negative")
    alive = [i for i, c in enumerate(counts) if c > 0]
    if not alive:
        raise DomainError("at least one player must hold chips")
    prizes = [mode.convert(m) for m in payouts.padded(n)]
    out = [None] * n
    k = len(alive)
    if k == 1:
        out[alive[0]] = prizes[0]
    else:
        sub = equity(ChipStacks(tuple(counts[i] for i in alive)),
                     PayoutStructure(tuple(prizes[:k])), mode)
        for i, e in zip(alive, sub):
            out[i] = e
    dead = [i for i in range(n) if counts[i] == 0]
    if dead:
        share = sum(prizes[k:]) / len(dead)
        for i in dead:
            out[i] = share
    return out
