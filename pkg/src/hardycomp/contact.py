"""Boundary contact set, its measure, and the pullback measure of a symbol.

The pullback measure is ``nu(A) = m({xi in E_phi : phi(xi) in A})``; with
``phi(0) = 0`` it is dominated by normalised arc length, and a lower bound
``d nu / dm >= delta`` on a set ``F`` gives the lower estimate
``int_{E_phi} |f o phi|^p dm >= delta * int_F |f|^p dm``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from .exceptions import PreconditionError
from .hardy import QuadratureGrid, composed_test_mass, poisson_weight
from .symbol import Symbol, boundary_trace_masked, center_at_origin

DEFAULT_TAUS = (0.1, 0.05, 0.02, 0.01, 0.005)
TAU_MIN = 1e-6
DEFAULT_ARCS = 64

ZERO = "zero"
POSITIVE = "positive"
INCONCLUSIVE = "inconclusive"


@dataclass
class ContactProfile:
    theta: np.ndarray
    modulus: np.ndarray
    taus: np.ndarray
    measures: np.ndarray
    m0: float
    stderr: float
    verdict: str
    fit: dict = field(default_factory=dict)
    direct_measure: float = float("nan")   # fraction with |phi| >= 1 - TAU_MIN

    @property
    def n_nodes(self):
        return len(self.theta)

    @property
    def extrapolated_measure(self):
        return self.m0

    def curve(self):
        return list(zip(self.taus.tolist(), self.measures.tolist()))

    def summary(self):
        return {"m0": self.m0, "stderr": self.stderr, "verdict": self.verdict,
                "direct_measure": self.direct_measure, "curve": self.curve(),
                "fit": self.fit, "n_nodes": self.n_nodes}


def _power_law(tau, m0, c, alpha):
    return m0 + c * tau ** alpha


def contact_measure(phi: Symbol, taus=DEFAULT_TAUS,
                    grid: QuadratureGrid = QuadratureGrid()) -> ContactProfile:
    """Estimate ``m(E_phi)`` from the sublevel curve ``m({|phi| >= 1 - tau})``.

    The curve is fit by ``m0 + C tau**alpha`` with binomial weights; ``m0`` is
    declared zero when it is below ``max(3 stderr, 2 / n_nodes)``.
    """
    taus = np.asarray(sorted(taus, reverse=True), dtype=float)
    if taus.size < 1 or np.any(taus <= 0):
        raise ValueError("tau ladder must be positive")
    theta = grid.theta
    vals, ok = boundary_trace_masked(phi, theta)
    mod = np.where(ok, np.abs(vals), np.nan)
    n = np.count_nonzero(ok)
    measures = np.array([np.count_nonzero(mod >= 1 - t) / n for t in taus])
    direct = np.count_nonzero(mod >= 1 - TAU_MIN) / n
    floor = 2.0 / grid.n_nodes
    fit = {}
    if np.ptp(measures) == 0:
        m0, err = float(measures[0]), 0.0
        fit = {"m0": m0, "C": 0.0, "alpha": None, "method": "flat"}
    elif taus.size < 3:
        m0, err = float(measures[-1]), float(abs(measures[-1] - measures[0]))
        fit = {"m0": m0, "method": "last-point"}
    else:
        # binomial errors per point, floored at one node
        sigma = np.sqrt(np.maximum(measures * (1 - measures), 1.0 / n) / n)
        try:
            popt, pcov = curve_fit(_power_law, taus, measures, sigma=sigma, absolute_sigma=True,
                                   p0=(measures[-1] / 2, measures[0], 0.5),
                                   bounds=([0, 0, 0.05], [1, np.inf, 4]), maxfev=20000)
            m0 = float(popt[0])
            err = float(np.sqrt(max(pcov[0, 0], 0))) if np.isfinite(pcov[0, 0]) else np.inf
            fit = {"m0": m0, "C": float(popt[1]), "alpha": float(popt[2]), "method": "power-law"}
        except (RuntimeError, ValueError) as exc:
            return ContactProfile(theta, mod, taus, measures, float("nan"), float("nan"),
                                  INCONCLUSIVE, {"error": str(exc)}, direct)
    if not np.isfinite(err):
        verdict = INCONCLUSIVE
    else:
        verdict = ZERO if m0 < max(3 * err, floor) else POSITIVE
    m0 = min(max(m0, 0.0), 1.0)
    return ContactProfile(theta, mod, taus, measures, m0, err, verdict, fit, direct)


def e_epsilon_mask(values, eps: float, center: complex = 1.0):
    """Nodes of ``E_eps = {|phi(xi) - center| < eps}``."""
    return np.abs(np.asarray(values) - center) < eps


def e_k_mask(values, k: int):
    """Nodes of ``E_k = {|phi(xi)| >= 1 - 1/k}``."""
    return np.abs(np.asarray(values)) >= 1 - 1.0 / k


def mass_split(phi: Symbol, a: complex, p: float, eps: float,
               grid: QuadratureGrid = QuadratureGrid(), center: complex = 1.0):
    """``(int_{E_eps} |C_phi g_a|^p dm, int_{T \\ E_eps} |C_phi g_a|^p dm)``.

    Node classification on the uniform grid, refined until the full integral
    is resolved.  ``phi`` is assumed rotated so the contact point is ``center``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if p < 1:
        raise ValueError("p must be >= 1")
    n = composed_test_mass(phi, a, grid).n_nodes
    theta = 2 * np.pi * np.arange(n) / n
    vals, ok = boundary_trace_masked(phi, theta)
    dens = np.where(ok, poisson_weight(a, np.where(ok, vals, 0)), 0.0)
    inside = e_epsilon_mask(np.where(ok, vals, np.inf), eps, center)
    m = np.count_nonzero(ok)
    return float(np.sum(dens[inside]) / m), float(np.sum(dens[~inside & ok]) / m)


# --------------------------------------------------------------------------
# Poisson extension


def poisson_arc(alpha: float, beta: float, z):
    """Harmonic extension of the indicator of the arc from ``alpha`` to ``beta``
    (counter-clockwise, ``0 <= beta - alpha <= 2 pi``), evaluated at ``z``."""
    z = np.asarray(z, dtype=complex)
    span = beta - alpha
    corr = np.imag(np.log1p(-z * np.exp(-1j * beta)) - np.log1p(-z * np.exp(-1j * alpha)))
    return span / (2 * np.pi) + corr / np.pi


def poisson_extension(samples, z, grid: QuadratureGrid = QuadratureGrid()):
    """Poisson integral of boundary samples (on ``grid.nodes``) at points ``z``."""
    f = np.asarray(samples)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    xi = grid.nodes
    kern = (1 - np.abs(z)[:, None] ** 2) / np.abs(xi[None, :] - z[:, None]) ** 2
    return kern @ f / grid.n_nodes


# --------------------------------------------------------------------------
# Pullback measure


@dataclass
class PullbackReport:
    symbol: str
    n_arcs: int
    n_nodes: int
    arc_edges: np.ndarray
    nu: np.ndarray
    nu_stderr: np.ndarray
    density: np.ndarray
    density_stderr: np.ndarray
    delta: float
    F: np.ndarray                 # boolean per arc
    contact_mass: float
    status: str
    normalized: bool = False

    @property
    def arc_midpoints(self):
        return (self.arc_edges[:-1] + self.arc_edges[1:]) / 2

    @property
    def F_measure(self):
        return float(np.count_nonzero(self.F)) / self.n_arcs

    def in_F(self, theta):
        idx = _arc_index(np.asarray(theta, dtype=float), self.n_arcs)
        return self.F[idx]

    def rows(self):
        for mid, dens, se in zip(self.arc_midpoints, self.density, self.density_stderr):
            yield float(mid), float(dens), float(se)

    def summary(self):
        return {"symbol": self.symbol, "n_arcs": self.n_arcs, "n_nodes": self.n_nodes,
                "delta": self.delta, "F_arcs": np.flatnonzero(self.F).tolist(),
                "F_measure": self.F_measure, "contact_mass": self.contact_mass,
                "status": self.status, "normalized": self.normalized,
                "nu": self.nu.tolist(), "density": self.density.tolist(),
                "density_stderr": self.density_stderr.tolist()}


def _arc_index(theta, n_arcs):
    x = np.mod(theta, 2 * np.pi) * n_arcs / (2 * np.pi)
    # nodes sitting on an arc edge may land a rounding error below it
    return np.floor(x + 1e-9).astype(int) % n_arcs


def pullback_density(phi: Symbol, n_arcs: int = DEFAULT_ARCS,
                     grid: QuadratureGrid = QuadratureGrid(2 ** 16), delta: float | None = None,
                     tau_min: float = TAU_MIN, normalize: bool = True) -> PullbackReport:
    """Histogram estimate of ``d nu / dm`` over a fixed arc partition.

    ``phi`` is first post-composed with the disk automorphism sending
    ``phi(0)`` to 0 when ``normalize`` is set.  Errors are binomial standard
    errors treating boundary nodes as samples.
    """
    if normalize:
        phi = center_at_origin(phi)
    elif abs(complex(phi.extended(0.0))) > 1e-12:
        raise PreconditionError("pullback density requires phi(0) = 0")
    n = grid.n_nodes
    vals, ok = boundary_trace_masked(phi, grid.theta)
    in_e = ok & (np.abs(np.where(ok, vals, 0)) >= 1 - tau_min)
    idx = _arc_index(np.angle(vals[in_e]), n_arcs)
    counts = np.bincount(idx, minlength=n_arcs)
    nu = counts / n
    nu_se = np.sqrt(nu * (1 - nu) / n)
    arc_m = 1.0 / n_arcs
    density = nu / arc_m
    dens_se = nu_se / arc_m
    contact = float(np.count_nonzero(in_e)) / n
    edges = 2 * np.pi * np.arange(n_arcs + 1) / n_arcs
    # a tangential contact point leaves a thin arc above 1 - tau_min; the
    # sublevel extrapolation tells that apart from a contact set of positive measure
    zero = contact == 0 or contact_measure(phi, grid=grid).verdict == ZERO
    if zero:
        return PullbackReport(phi.text, n_arcs, n, edges, nu, nu_se, density, dens_se,
                              float("nan") if delta is None else delta,
                              np.zeros(n_arcs, dtype=bool), contact,
                              "empty: contact set has measure zero", normalize)
    if delta is None:
        delta = 0.5 * float(density.max())
    F = density >= delta
    status = "ok" if F.any() else "empty: no arc reaches delta"
    return PullbackReport(phi.text, n_arcs, n, edges, nu, nu_se, density, dens_se,
                          float(delta), F, contact, status, normalize)


@dataclass
class LowerBoundCheck:
    lhs: float
    rhs: float
    delta: float
    p: float
    passed: bool


def pullback_lower_bound_check(phi: Symbol, f, p: float, report: PullbackReport,
                               tol: float = 1e-12, tau_min: float = TAU_MIN) -> LowerBoundCheck:
    """Check ``int_{E_phi} |f o phi|^p dm >= delta int_F |f|^p dm``.

    ``f`` is a vectorised function of boundary points.  It must vanish on
    grid nodes outside ``F``.  ``phi`` is normalised the same way the report
    was built.
    """
    if report.normalized:
        phi = center_at_origin(phi)
    grid = QuadratureGrid(report.n_nodes)
    xi = grid.nodes
    fv = np.asarray(f(xi))
    outside = ~report.in_F(grid.theta)
    if np.any(np.abs(fv[outside]) > 0):
        raise PreconditionError("test function is not supported on F")
    vals, ok = boundary_trace_masked(phi, grid.theta)
    in_e = ok & (np.abs(np.where(ok, vals, 0)) >= 1 - tau_min)
    img = vals[in_e] / np.abs(vals[in_e])
    lhs = float(np.sum(np.abs(f(img)) ** p) / grid.n_nodes)
    rhs = float(report.delta * np.sum(np.abs(fv[~outside]) ** p) / grid.n_nodes)
    return LowerBoundCheck(lhs, rhs, report.delta, p, lhs >= rhs - tol)
