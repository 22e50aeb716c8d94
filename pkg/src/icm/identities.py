"""The float probability ``q_k``, its partial-fraction identity and the convex
function ``g_k`` that drives the risk-aversion results."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from icm.core import EXACT, FLOAT_SLACK, DomainError, NumericMode, joint_order_prob


def _convert(values, mode: NumericMode):
    return [mode.convert(v) for v in values]


def qk_eval(x, y, zs: Sequence, mode: NumericMode = EXACT):
    """Probability that the player holding ``y`` finishes first, the players
    holding ``zs`` follow in that relative order, and the player holding ``x``
    lands anywhere among the top ``k + 2``.

    Computed by summing ``p_{k+2}`` over every slot ``x`` can float into.
    """
    x, y = mode.convert(x), mode.convert(y)
    zs = _convert(zs, mode)
    total = 0
    for slot in range(len(zs) + 1):
        total += joint_order_prob([y, *zs[:slot], x, *zs[slot:]])
    return total


def qk_terms(x, y, zs: Sequence, mode: NumericMode = EXACT) -> list:
    x, y = mode.convert(x), mode.convert(y)
    zs = _convert(zs, mode)
    return [joint_order_prob([y, *zs[:slot], x, *zs[slot:]]) for slot in range(len(zs) + 1)]


def lemma1_rhs(x, y, zs: Sequence, mode: NumericMode = EXACT):
    """``y/(x+y) p_{k+1}(x+y, zs) - p_{k+2}(y, zs, 1-x-y-sum(zs))``."""
    x, y = mode.convert(x), mode.convert(y)
    zs = _convert(zs, mode)
    rest = 1 - x - y - sum(zs)
    if isinstance(rest, float) and -FLOAT_SLACK <= rest < 0:
        rest = 0.0
    if rest < 0:
        raise DomainError(f"fractions sum to more than 1 (remainder {rest})")
    first = y / (x + y) * joint_order_prob([x + y, *zs])
    # With nothing left over nobody else can take the last slot.
    second = joint_order_prob([y, *zs, rest]) if rest > 0 else 0
    return first - second


def lemma1_residual(x, y, zs: Sequence, mode: NumericMode = EXACT):
    """Direct ``q_k`` minus its partial-fraction form; zero for valid input."""
    return qk_eval(x, y, zs, mode) - lemma1_rhs(x, y, zs, mode)


def gk(w, y, zs: Sequence, mode: NumericMode = EXACT):
    """``(y+w) / ((1-y-w)(1-y-w-z_1)...(1-y-w-z_1-...-z_k))``."""
    w, y = mode.convert(w), mode.convert(y)
    zs = _convert(zs, mode)
    base = y + w
    if not 0 < base < 1:
        raise DomainError(f"y + w = {base} lies outside (0, 1)")
    den = 1 - base
    remaining = 1 - base
    for j, z in enumerate(zs):
        remaining -= z
        if remaining <= 0:
            raise DomainError(f"denominator factor {j + 1} is {remaining} at w = {w}")
        den *= remaining
    return base / den


@dataclass(frozen=True)
class ConvexityCheck:
    min_value: object
    min_first_difference: object
    min_second_difference: object

    @property
    def ok(self) -> bool:
        return self.min_value > 0 and self.min_first_difference > 0 and self.min_second_difference > 0


def gk_convexity_check(y, zs: Sequence, w_grid: Sequence, mode: NumericMode = EXACT) -> ConvexityCheck:
    """Values, forward differences and second central differences of ``g_k``
    on an evenly spaced increasing grid; all three minima should be positive."""
    grid = _convert(w_grid, mode)
    if len(grid) < 3:
        raise DomainError("the grid needs at least 3 points")
    h = grid[1] - grid[0]
    if h <= 0:
        raise DomainError("the grid must be increasing")
    for a, b in zip(grid, grid[1:]):
        step = b - a
        if (step != h) if mode.exact else abs(step - h) > mode.tolerance * max(1.0, abs(h)):
            raise DomainError("the grid must be evenly spaced")
    values = [gk(w, y, zs, mode) for w in grid]
    first = [b - a for a, b in zip(values, values[1:])]
    second = [values[i + 1] - 2 * values[i] + values[i - 1] for i in range(1, len(values) - 1)]
    return ConvexityCheck(min(values), min(first), min(second))


def admissible_w_range(y, zs: Sequence):
    """Open interval of wagers keeping every factor of ``g_k`` positive."""
    return -y, 1 - y - sum(zs)
