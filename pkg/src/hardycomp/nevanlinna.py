"""Nevanlinna counting function and Shapiro's compactness ratio."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import PreconditionError
from .hardy import default_rays
from .parallel import pmap
from .roots import roots_with_multiplicity
from .symbol import Symbol
from .trend import TrendPolicy, richardson_limit, trend_verdict

CLUSTER_TOL = 1e-7
EDGE_TOL = 1e-12
RESIDUAL_TOL = 1e-9


@dataclass
class NevanlinnaSample:
    w: complex
    preimages: list
    value: float
    ratio: float


def _equation(phi: Symbol, w: complex, rational=None):
    num, den = phi.rational() if rational is None else rational
    n = max(len(num), len(den))
    h = np.zeros(n, dtype=complex)
    h[: len(num)] += num
    h[: len(den)] -= w * den
    return h


def preimages(phi: Symbol, w: complex, rational=None, cluster_tol: float = CLUSTER_TOL):
    """Solutions of ``phi(z) = w`` in the disk as ``(z, multiplicity)`` pairs.

    Roots of the cleared numerator come from a balanced companion matrix and
    are Newton-polished.  Roots within ``1e-12`` of the circle and spurious
    roots of cancelled pole/zero pairs are discarded.
    """
    w = complex(w)
    if abs(w) >= 1:
        raise PreconditionError("|w| must be < 1")
    if abs(w - complex(phi.extended(0.0))) < 1e-12:
        raise PreconditionError("w = phi(0) is excluded")
    h = _equation(phi, w, rational)
    if np.max(np.abs(h)) == 0:
        raise PreconditionError("phi is identically w")
    zs, mult = roots_with_multiplicity(h, cluster_tol=cluster_tol)
    out = []
    for z, m in zip(zs, mult):
        if abs(z) >= 1 - EDGE_TOL:
            continue
        if abs(complex(phi.extended(z)) - w) > RESIDUAL_TOL:
            continue
        out.append((complex(z), int(m)))
    return out


def counting(phi: Symbol, w: complex, rational=None) -> float:
    """``N(phi, w) = sum log(1/|z|)`` over preimages, with multiplicity."""
    return float(sum(m * -np.log(abs(z)) for z, m in preimages(phi, w, rational)))


def sample(phi: Symbol, w: complex, rational=None) -> NevanlinnaSample:
    pre = preimages(phi, w, rational)
    val = float(sum(m * -np.log(abs(z)) for z, m in pre))
    return NevanlinnaSample(complex(w), pre, val, val / -np.log(abs(w)))


@dataclass
class ShapiroTrend:
    ray_angles: np.ndarray
    m_values: np.ndarray
    ratios: np.ndarray        # shape (rays, rungs)
    rung_maxima: np.ndarray
    verdict: str
    limit_guess: float
    notes: list = field(default_factory=list)

    @property
    def radii(self):
        return 1.0 - 2.0 ** -self.m_values

    def rows(self):
        for i, ang in enumerate(self.ray_angles):
            for j, r in enumerate(self.radii):
                yield float(ang), float(r), float(self.ratios[i, j])

    def summary(self):
        return {"verdict": self.verdict,
                "rung_maxima": [float(x) for x in self.rung_maxima],
                "last_three": [float(x) for x in self.rung_maxima[-3:]],
                "limit_guess": self.limit_guess, "limit_guess_status": "heuristic",
                "m_values": [int(m) for m in self.m_values]}


def shapiro_trend(phi: Symbol, rays=128, m_min: int = 4, m_max: int = 14,
                  policy: TrendPolicy = TrendPolicy(), threads: int | None = None,
                  n_nodes: int = 8192) -> ShapiroTrend:
    """Max of ``N(phi, w) / log(1/|w|)`` over rays, per rung ``|w| = 1 - 2**-m``."""
    if np.isscalar(rays):
        angles = default_rays(phi, int(rays), n_nodes)
    else:
        angles = np.asarray(rays, dtype=float)
    ms = np.arange(m_min, m_max + 1)
    rat = phi.rational()
    origin = complex(phi.extended(0.0))

    def along(ang):
        row = []
        for m in ms:
            w = (1 - 2.0 ** -m) * np.exp(1j * ang)
            if abs(w - origin) < 1e-12:
                row.append(np.nan)
                continue
            row.append(counting(phi, w, rat) / -np.log(abs(w)))
        return row

    ratios = np.array(pmap(along, angles, threads), dtype=float)
    maxima = np.nanmax(ratios, axis=0)
    verdict = trend_verdict(maxima, m_max, policy)
    return ShapiroTrend(angles, ms, ratios, maxima, verdict, richardson_limit(maxima))
