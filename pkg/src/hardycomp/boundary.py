"""Boundary geometry of a symbol: contact points and boundary preimages."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .roots import roots_with_multiplicity
from .symbol import Symbol

CONTACT_TOL = 1e-9


@dataclass(frozen=True)
class ContactPoint:
    angle: float      # boundary point exp(i angle)
    image: complex    # unimodular value phi(exp(i angle)) / |phi(...)|
    modulus: float    # |phi| at the refined point


def contact_points(phi: Symbol, n_nodes: int = 8192, tol: float = CONTACT_TOL,
                   full_fraction: float = 0.01):
    """Isolated boundary points where ``|phi| = 1`` (to ``tol``).

    Returns ``(points, full)``.  ``full`` is True when more than
    ``full_fraction`` of the grid touches the circle; then no isolated points
    are listed (inner-like symbols).
    """
    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    mod = np.abs(phi.extended(np.exp(1j * theta)))
    near = mod >= 1 - 1e-4
    if np.mean(mod >= 1 - tol) > full_fraction:
        return [], True
    if not near.any():
        return [], False
    idx = np.flatnonzero(near)
    # split into circular runs
    runs, cur = [], [idx[0]]
    for i in idx[1:]:
        if i == cur[-1] + 1:
            cur.append(i)
        else:
            runs.append(cur)
            cur = [i]
    runs.append(cur)
    if len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == n_nodes - 1:
        runs[0] = runs[-1] + runs[0]
        runs.pop()
    h = 2 * np.pi / n_nodes
    out = []
    for run in runs:
        best = run[int(np.argmax(mod[run]))]
        t0 = theta[best]
        res = minimize_scalar(lambda t: -abs(phi.extended(np.exp(1j * t))),
                              bounds=(t0 - h, t0 + h), method="bounded",
                              options={"xatol": 1e-14})
        t = float(res.x) % (2 * np.pi)
        v = complex(phi.extended(np.exp(1j * t)))
        if abs(v) >= 1 - tol:
            out.append(ContactPoint(t, v / abs(v), abs(v)))
    return out, False


def boundary_preimages(phi: Symbol, zeta: complex, tol: float = 1e-6):
    """Angles of points on the unit circle mapped to the unimodular ``zeta``."""
    num, den = phi.rational()
    n = max(len(num), len(den))
    h = np.zeros(n, dtype=complex)
    h[: len(num)] += num
    h[: len(den)] -= zeta * den
    if np.max(np.abs(h)) == 0:
        return np.array([])
    roots, _ = roots_with_multiplicity(h)
    keep = [z for z in roots if abs(abs(z) - 1) < tol
            and abs(complex(phi.extended(z / abs(z))) - zeta) < 1e-6]
    angles = sorted(float(np.angle(z)) % (2 * np.pi) for z in keep)
    # merge duplicates
    merged = []
    for a in angles:
        if not merged or min(abs(a - merged[-1]), 2 * np.pi - abs(a - merged[-1])) > 1e-9:
            merged.append(a)
    if len(merged) > 1 and 2 * np.pi - merged[-1] + merged[0] < 1e-9:
        merged.pop()
    return np.array(merged)
