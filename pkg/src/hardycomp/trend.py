"""Verdict policy for finite ladders approaching the circle.

Both compactness criteria are limits as a point tends to the boundary; on a
finite ladder ``1 - 2**-m`` we can only classify the trend.  The quantity
classified must decay like ``2**-m`` for compact symbols (a test-function
mass or a Shapiro ratio), never a p-th root of one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VANISHING = "vanishing"
NON_VANISHING = "non-vanishing"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TrendPolicy:
    decay_factor: float = 10.0
    abs_floor: float = 1e-3
    plateau_rate: float = 0.75
    decay_rate: float = 0.6


def trend_verdict(values, m_max: int, policy: TrendPolicy = TrendPolicy()) -> str:
    v = np.asarray(values, dtype=float)
    if v.size == 0 or not np.all(np.isfinite(v)):
        return INCONCLUSIVE
    first, final = v[0], v[-1]
    floor = policy.decay_factor * first * 2.0 ** (-m_max)
    if final <= 0 or final < floor:
        return VANISHING
    rate = final / v[-2] if v.size > 1 and v[-2] > 0 else 1.0
    if final >= policy.abs_floor and rate >= policy.plateau_rate:
        return NON_VANISHING
    if rate <= policy.decay_rate:
        return VANISHING
    return INCONCLUSIVE


def richardson_limit(values) -> float:
    """Limit guess for a sequence whose error halves per rung (heuristic)."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return float(v[-1]) if v.size else float("nan")
    return float(2 * v[-1] - v[-2])
