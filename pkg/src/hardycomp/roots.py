"""Polynomial roots via balanced companion matrices, with Newton polishing
and multiplicity clustering."""
from __future__ import annotations

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P

from .exceptions import DegreeOverflowError

MAX_DEGREE = 64


def trim(coeffs, rel: float = 1e-14):
    """Drop negligible leading (highest-order) coefficients."""
    c = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0:
        return np.zeros(1, dtype=complex)
    last = len(c) - 1
    while last > 0 and abs(c[last]) <= rel * scale:
        last -= 1
    return c[: last + 1]


def companion_roots(coeffs, max_degree: int = MAX_DEGREE):
    """All roots of the ascending-coefficient polynomial ``coeffs``."""
    c = trim(coeffs)
    deg = len(c) - 1
    if deg > max_degree:
        raise DegreeOverflowError(f"polynomial degree {deg} exceeds {max_degree}")
    if deg < 1:
        return np.array([], dtype=complex)
    # strip roots at the origin so the companion matrix is well scaled
    nz = 0
    while nz < deg and c[nz] == 0:
        nz += 1
    c = c[nz:]
    d = len(c) - 1
    out = [np.zeros(nz, dtype=complex)]
    if d >= 1:
        comp = np.zeros((d, d), dtype=complex)
        comp[1:, :-1] = np.eye(d - 1)
        comp[:, -1] = -c[:-1] / c[-1]
        bal, _ = scipy.linalg.matrix_balance(comp, permute=False)
        out.append(scipy.linalg.eigvals(bal, check_finite=False))
    return np.concatenate(out)


def cluster(roots, tol: float = 1e-7):
    """Group roots closer than ``tol``; returns (centres, multiplicities)."""
    roots = list(np.asarray(roots, dtype=complex))
    centres, mult = [], []
    used = [False] * len(roots)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        group = [r]
        used[i] = True
        for j in range(i + 1, len(roots)):
            if not used[j] and abs(roots[j] - r) < tol:
                group.append(roots[j])
                used[j] = True
        centres.append(np.mean(group))
        mult.append(len(group))
    return np.array(centres, dtype=complex), np.array(mult, dtype=int)


def newton_polish(coeffs, z, mult=1, steps: int = 3):
    """Multiplicity-aware Newton steps; a step is kept only if it helps."""
    c = np.asarray(coeffs, dtype=complex)
    dc = P.polyder(c) if len(c) > 1 else np.zeros(1, dtype=complex)
    z = complex(z)
    fz = P.polyval(z, c)
    for _ in range(steps):
        d = P.polyval(z, dc)
        if d == 0 or fz == 0:
            break
        z_new = z - mult * fz / d
        f_new = P.polyval(z_new, c)
        if abs(f_new) > abs(fz):
            break
        z, fz = z_new, f_new
    return z


def roots_with_multiplicity(coeffs, cluster_tol: float = 1e-7, steps: int = 3,
                            max_degree: int = MAX_DEGREE):
    c = trim(coeffs)
    raw = companion_roots(c, max_degree=max_degree)
    centres, mult = cluster(raw, cluster_tol)
    polished = np.array([newton_polish(c, z, m, steps) for z, m in zip(centres, mult)],
                        dtype=complex)
    return polished, mult
