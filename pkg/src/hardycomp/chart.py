"""Boundary quadrature adapted to a contact point, for test points arbitrarily
close to the circle.

Test points are ``a = zeta (1 - s)`` with a unimodular direction ``zeta`` and a
gap ``s`` that may lie far below the resolution of ``|a|`` in floating point.
Everything is written in terms of

    D(xi) = 1 - conj(zeta) phi(xi),    x = 1 - conj(a) phi = D + s (1 - D),

so ``|g_a(phi)|^p = s (2 - s) / |x|^2`` never forms ``1 - |a|``.  Around each
boundary preimage of ``zeta`` the offset ``t`` is the local coordinate, ``D``
comes from a Taylor expansion in ``u = e^{it} - 1``, and Gauss-Legendre panels
are graded dyadically in ``t`` down to ``rho 2**-depth``.  Panel breakpoints
include the level sets ``|D| = 2**-k`` so the sets ``{|phi - zeta| < 2**-k}``
are unions of whole panels and their masses carry no indicator error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import boundary_preimages
from .exceptions import PreconditionError
from .symbol import Symbol

DEFAULT_DEPTH = 680
MAX_DEPTH = 1000
PANEL_ORDER = 10
FAR_PANELS = 512
TAYLOR_TERMS = 64
SAMPLES_PER_OCTAVE = 8


def _expm1_i(t):
    """``e^{it} - 1`` without cancellation for small ``t``."""
    return -2 * np.sin(t / 2) ** 2 + 1j * np.sin(t)


@dataclass
class ContactChart:
    phi: Symbol
    zeta: complex
    centers: np.ndarray        # angles of the boundary preimages of zeta
    rho: float
    depth: int
    order: int
    center_index: np.ndarray   # per node, -1 in the far region
    offset: np.ndarray         # t for local nodes, the angle for far nodes
    theta: np.ndarray
    weights: np.ndarray        # normalised: sum to 1
    D: np.ndarray

    @property
    def n_nodes(self):
        return len(self.weights)

    @property
    def nodes(self):
        return np.exp(1j * self.theta)

    @property
    def values(self):
        """Boundary values of ``phi`` at the nodes."""
        return self.zeta * (1 - self.D)

    def in_E(self, eps: float):
        """Nodes of ``{|phi - zeta| < eps}``."""
        return np.abs(self.D) < eps

    def log_density(self, s: float):
        """``log |g_a(phi)|^p`` for ``a = zeta (1 - s)``, for every ``p``."""
        x = self.D + s * (1 - self.D)
        return np.log(s) + np.log(2 - s) - 2 * np.log(np.abs(x))

    def density(self, s: float):
        return np.exp(self.log_density(s))

    def mass(self, s: float, mask=None) -> float:
        """``int |g_a o phi|^p dm``, optionally restricted to ``mask``."""
        w = self.weights * self.density(s)
        return float(np.sum(w if mask is None else w[mask]))

    def test_values(self, s: float, p: float):
        """``g_a(phi)`` at the nodes, built from logarithms."""
        x = self.D + s * (1 - self.D)
        return np.exp((np.log(s) + np.log(2 - s)) / p - (2 / p) * np.log(x))

    def norm(self, values, p: float) -> float:
        return float(np.sum(self.weights * np.abs(values) ** p) ** (1 / p))

    def provenance(self):
        return {"zeta": [self.zeta.real, self.zeta.imag], "centers": self.centers.tolist(),
                "rho": self.rho, "depth": self.depth, "order": self.order,
                "n_nodes": self.n_nodes}


class _LocalMap:
    """``D`` as a function of the offset ``t`` around one preimage."""

    def __init__(self, phi: Symbol, zeta: complex, center: float):
        self.phi = phi
        self.zeta = zeta
        self.center = center
        self.xi = np.exp(1j * center)
        poles = phi.poles()
        gap = np.min(np.abs(poles - self.xi)) if len(poles) else np.inf
        radius = min(0.5, 0.5 * gap)
        if not np.isfinite(radius) or radius <= 0:
            raise PreconditionError("symbol has a pole on the circle")
        m = TAYLOR_TERMS
        ring = self.xi + radius * np.exp(2j * np.pi * np.arange(m) / m)
        coef = np.fft.fft(phi.extended(ring)) / m / radius ** np.arange(m)
        self.coef = coef[1:]
        self.r_taylor = min(1e-3, 0.05 * radius)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape, dtype=complex)
        small = np.abs(t) < self.r_taylor
        if small.any():
            u = self.xi * _expm1_i(t[small])
            acc = np.zeros(u.shape, dtype=complex)
            for c in self.coef[::-1]:
                acc = (acc + c) * u
            out[small] = -np.conj(self.zeta) * acc
        if (~small).any():
            z = np.exp(1j * (self.center + t[~small]))
            out[~small] = 1 - np.conj(self.zeta) * self.phi.extended(z)
        return out


def _crossings(f, samples, levels_max):
    """Points in ``samples`` intervals where ``log2 |f|`` crosses an integer
    level ``-k``, ``0 <= k <= levels_max``; refined by bisection."""
    samples = np.asarray(samples, dtype=float)
    lg = np.log2(np.maximum(np.abs(f(samples)), 1e-320))
    lo, hi, lev = [], [], []
    for i in range(len(samples) - 1):
        a, b = lg[i], lg[i + 1]
        top = min(max(a, b), 0.0)
        bot = max(min(a, b), -float(levels_max))
        if top < bot:
            continue
        for k in range(int(np.ceil(-top)), int(np.floor(-bot)) + 1):
            level = -float(k)
            if (a - level) * (b - level) < 0:
                lo.append(samples[i])
                hi.append(samples[i + 1])
                lev.append(level)
    if not lo:
        return np.array([])
    lo, hi, lev = np.array(lo), np.array(hi), np.array(lev)
    sign_lo = np.sign(np.log2(np.abs(f(lo))) - lev)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        sm = np.sign(np.log2(np.maximum(np.abs(f(mid)), 1e-320)) - lev)
        same = sm == sign_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _panels(breaks, order):
    """Gauss-Legendre nodes and (unnormalised) weights on consecutive breaks."""
    x, w = np.polynomial.legendre.leggauss(order)
    breaks = np.asarray(breaks, dtype=float)
    left, right = breaks[:-1], breaks[1:]
    keep = right > left
    left, right = left[keep], right[keep]
    half = (right - left) / 2
    mid = (right + left) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _dedupe(points, rel=1e-12):
    pts = np.unique(np.asarray(points, dtype=float))
    if pts.size < 2:
        return pts
    scale = np.maximum(np.abs(pts[1:]), np.abs(pts[:-1]))
    keep = np.concatenate([[True], np.diff(pts) > rel * scale])
    return pts[keep]


def build_chart(phi: Symbol, zeta: complex = 1.0, depth: int = DEFAULT_DEPTH,
                order: int = PANEL_ORDER, far_panels: int = FAR_PANELS) -> ContactChart:
    """Quadrature chart for test points approaching the unimodular ``zeta``."""
    zeta = complex(zeta)
    if abs(abs(zeta) - 1) > 1e-12:
        raise ValueError("zeta must be unimodular")
    zeta = zeta / abs(zeta)
    if not phi.closed_disk:
        raise PreconditionError("contact charts need a symbol holomorphic on the closed disk")
    depth = int(min(depth, MAX_DEPTH))
    centers = boundary_preimages(phi, zeta)
    if len(centers) > 1:
        sep = np.diff(np.concatenate([centers, [centers[0] + 2 * np.pi]]))
        rho = min(0.25, 0.45 * float(sep.min()))
    else:
        rho = 0.25

    idx_parts, off_parts, th_parts, w_parts, d_parts = [], [], [], [], []

    for ci, c in enumerate(centers):
        local = _LocalMap(phi, zeta, float(c))
        octaves = rho * 2.0 ** -np.arange(depth + 1)
        dense = rho * 2.0 ** (-np.arange(SAMPLES_PER_OCTAVE * depth + 1) / SAMPLES_PER_OCTAVE)
        side = []
        for sgn in (1.0, -1.0):
            cross = _crossings(lambda t: local(sgn * t), dense[::-1], depth)
            side.append(sgn * np.concatenate([octaves, cross]))
        breaks = _dedupe(np.concatenate(side + [[0.0]]))
        t, w = _panels(breaks, order)
        idx_parts.append(np.full(t.shape, ci))
        off_parts.append(t)
        th_parts.append(c + t)
        w_parts.append(w)
        d_parts.append(local(t))

    def direct(theta):
        return 1 - np.conj(zeta) * phi.extended(np.exp(1j * np.asarray(theta)))

    if len(centers):
        arcs = [(c + rho, nxt - rho) for c, nxt in
                zip(centers, np.concatenate([centers[1:], [centers[0] + 2 * np.pi]]))]
    else:
        arcs = [(0.0, 2 * np.pi)]
    for lo, hi in arcs:
        if hi <= lo:
            continue
        n = max(4, int(np.ceil((hi - lo) / (2 * np.pi) * far_panels)))
        base = np.linspace(lo, hi, n + 1)
        dense = np.linspace(lo, hi, SAMPLES_PER_OCTAVE * n + 1)
        breaks = _dedupe(np.concatenate([base, _crossings(direct, dense, depth)]))
        th, w = _panels(breaks, order)
        idx_parts.append(np.full(th.shape, -1))
        off_parts.append(th)
        th_parts.append(th)
        w_parts.append(w)
        d_parts.append(direct(th))

    w = np.concatenate(w_parts) / (2 * np.pi)
    w /= w.sum()
    return ContactChart(phi, zeta, np.asarray(centers, dtype=float), float(rho), depth, order,
                        np.concatenate(idx_parts), np.concatenate(off_parts),
                        np.mod(np.concatenate(th_parts), 2 * np.pi), w,
                        np.concatenate(d_parts))
