"""Inductive gliding-hump selection of test functions and empirical frame
bounds for the resulting sequence.

Given test points ``a_m = zeta (1 - 2**-m)`` whose composed norms stay above
``d``, the selection finds indices ``j_1 < j_2 < ...`` and radii
``eps_1 > eps_2 > ...`` so that, with ``E_eps = {|phi - zeta| < eps}``,

    (i)   mass of C_phi g_{a_{j_k}} on E_{eps_n}        < (4**-n delta d)**p   (k < n)
    (ii)  mass of C_phi g_{a_{j_n}} off E_{eps_n}       < (4**-n delta d)**p
    (iii) mass of C_phi g_{a_{j_n}} on E_{eps_n}        > (d / 2)**p

Such humps satisfy ``||sum b_j C_phi g_{a_j}||_p >= (d/4) ||b||_p`` whenever
``delta (1 - 2**-p)**(1/p) < 1/4``.  The thresholds shrink geometrically and
force gaps of order 1e-37 (p = 1) to 1e-148 (p = 4), so all quadrature runs on
a :class:`~hardycomp.chart.ContactChart`.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .boundary import contact_points
from .chart import DEFAULT_DEPTH, FAR_PANELS, MAX_DEPTH, PANEL_ORDER, ContactChart, build_chart
from .exceptions import NoLowerBoundError, ParameterRangeError, PreconditionError
from .symbol import Symbol, parse_symbol

DEFAULT_RUNGS = DEFAULT_DEPTH - 40
DEFAULT_K = 6
D_SAFETY = 0.9
D_FLOOR = 1e-3
REPLAY_TOL = 1e-10


@dataclass
class TestLadder:
    """Test points ``zeta (1 - 2**-m)``, ``m = 1..rungs``, and their masses."""

    __test__ = False  # not a pytest class

    zeta: complex
    exponents: np.ndarray
    masses: np.ndarray
    chart: ContactChart = field(repr=False)

    @property
    def gaps(self):
        return 2.0 ** -self.exponents.astype(float)

    @property
    def points(self):
        # rounds to zeta once the gap drops below machine resolution
        return self.zeta * (1 - self.gaps)

    def norms(self, p):
        return self.masses ** (1 / p)

    def __len__(self):
        return len(self.exponents)


def _check_p(p):
    if p < 1:
        raise ParameterRangeError("p must be >= 1")


def _ladder(phi, zeta, rungs, chart=None):
    rungs = int(min(rungs, MAX_DEPTH - 40))
    if rungs < 1:
        raise ParameterRangeError("need at least one rung")
    if chart is None:
        chart = build_chart(phi, zeta, depth=rungs + 40)
    ms = np.arange(1, rungs + 1)
    masses = np.array([chart.mass(2.0 ** -m) for m in ms])
    return TestLadder(chart.zeta, ms, masses, chart)


def candidate_rays(phi: Symbol):
    """Image directions of isolated contact points, or ``[0]``."""
    pts, full = contact_points(phi)
    if full or not pts:
        return [0.0]
    rays = []
    for cp in pts:
        ang = float(np.angle(cp.image)) % (2 * np.pi)
        if all(min(abs(ang - r), 2 * np.pi - abs(ang - r)) > 1e-9 for r in rays):
            rays.append(ang)
    return rays


def select_test_points(phi: Symbol, p: float, ray: float | None = None,
                       rungs: int = DEFAULT_RUNGS):
    """Uniform lower bound ``d`` for ``||C_phi g_a||_p`` along a ray.

    Returns ``(d, ladder)`` with ``d = 0.9 min_m ||C_phi g_{a_m}||_p``.  With
    ``ray=None`` every contact direction is tried and the best one kept.
    """
    _check_p(p)
    rays = candidate_rays(phi) if ray is None else [float(ray)]
    best = None
    for r in rays:
        lad = _ladder(phi, np.exp(1j * r) if r else 1.0, rungs)
        d = D_SAFETY * float(lad.norms(p).min())
        if best is None or d > best[0]:
            best = (d, lad)
    d, lad = best
    if d < D_FLOOR:
        raise NoLowerBoundError(f"no usable lower bound (d = {d:.3g}); symbol may be compact")
    return d, lad


def delta_rule(delta: float, p: float) -> float:
    """``delta (1 - 2**-p)**(1/p)``, which must stay below 1/4."""
    return delta * (1 - 2.0 ** -p) ** (1 / p)


@dataclass
class HumpCertificate:
    symbol: str
    p: float
    d: float
    delta: float
    zeta: tuple
    chart: dict
    selected: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    complete: bool = False
    failure_stage: str | None = None
    empirical_frame: dict | None = None

    @property
    def K(self):
        return len(self.selected)

    @property
    def gaps(self):
        return [s["gap"] for s in self.selected]

    @property
    def eps(self):
        return [s["eps"] for s in self.selected]

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["zeta"] = tuple(data["zeta"])
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def summary(self):
        return {"K": self.K, "complete": self.complete, "failure_stage": self.failure_stage,
                "d": self.d, "delta": self.delta, "p": self.p,
                "gap_exponents": [s["exponent"] for s in self.selected],
                "eps_exponents": [s["eps_exponent"] for s in self.selected],
                "empirical_frame": self.empirical_frame}


def gliding_hump_select(phi: Symbol, p: float, d: float, points: TestLadder,
                        delta: float, K: int = DEFAULT_K) -> HumpCertificate:
    """Greedy induction: halve ``eps_n`` until (i) holds for all earlier humps,
    then take the next ladder point meeting (ii) and (iii)."""
    _check_p(p)
    if not 0 < delta:
        raise ParameterRangeError("delta must be positive")
    if not delta_rule(delta, p) < 0.25:
        raise ParameterRangeError(
            f"delta (1 - 2^-p)^(1/p) = {delta_rule(delta, p):.6g} is not < 1/4")
    if d <= 0:
        raise ParameterRangeError("d must be positive")
    chart = points.chart
    zeta = complex(points.zeta)
    cert = HumpCertificate(phi.text, float(p), float(d), float(delta), (zeta.real, zeta.imag),
                           {"depth": chart.depth, "order": chart.order, "far_panels": FAR_PANELS})
    big = (d / 2) ** p
    j_prev, eps_k = -1, 1
    for n in range(1, K + 1):
        small = (4.0 ** -n * delta * d) ** p
        # (i): eps_1 = 1, afterwards start one halving below the previous radius
        eps_k = 0 if n == 1 else eps_k + 1
        prev = [2.0 ** -points.exponents[s["index"]] for s in cert.selected]
        while True:
            if eps_k > chart.depth:
                cert.failure_stage = f"eps search exhausted at n={n}"
                return cert
            mask = chart.in_E(2.0 ** -eps_k)
            first = [chart.mass(s, mask) for s in prev]
            if all(m < small for m in first):
                break
            eps_k += 1
        # (ii) and (iii)
        j = j_prev + 1
        while True:
            if j >= len(points):
                cert.failure_stage = f"test points exhausted at n={n}"
                return cert
            s = 2.0 ** -points.exponents[j]
            outside = chart.mass(s, ~mask)
            inside = chart.mass(s, mask)
            if outside < small and inside > big:
                break
            j += 1
        a = zeta * (1 - s)
        cert.selected.append({"index": int(j), "exponent": int(points.exponents[j]), "gap": s,
                              "a": [a.real, a.imag], "eps": 2.0 ** -eps_k,
                              "eps_exponent": int(eps_k)})
        cert.checks.append({"n": n, "threshold": small, "big_threshold": big,
                            "i": first, "ii": outside, "iii": inside,
                            "passed": bool(all(m < small for m in first)
                                           and outside < small and inside > big)})
        j_prev = j
    cert.complete = True
    return cert


def chart_for(cert: HumpCertificate, phi: Symbol | None = None) -> ContactChart:
    phi = parse_symbol(cert.symbol) if phi is None else phi
    c = cert.chart
    return build_chart(phi, complex(*cert.zeta), depth=c["depth"],
                       order=c.get("order", PANEL_ORDER), far_panels=c.get("far_panels", FAR_PANELS))


def certificate_functions(cert: HumpCertificate, chart: ContactChart | None = None):
    """``C_phi g_{a_{j_n}}`` sampled on the chart, with the chart weights."""
    chart = chart_for(cert) if chart is None else chart
    U = np.stack([chart.test_values(s, cert.p) for s in cert.gaps])
    return U, chart.weights


@dataclass
class ReplayResult:
    passed: bool
    max_deviation: float
    failures: list


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def replay(cert: HumpCertificate, tol: float = REPLAY_TOL, chart: ContactChart | None = None):
    """Recompute every stored mass from a fresh chart and recheck thresholds."""
    chart = chart_for(cert) if chart is None else chart
    failures, worst = [], 0.0
    gaps = cert.gaps
    for n, (sel, chk) in enumerate(zip(cert.selected, cert.checks), start=1):
        mask = chart.in_E(sel["eps"])
        small = (4.0 ** -n * cert.delta * cert.d) ** cert.p
        big = (cert.d / 2) ** cert.p
        fresh_i = [chart.mass(s, mask) for s in gaps[: n - 1]]
        fresh_ii = chart.mass(gaps[n - 1], ~mask)
        fresh_iii = chart.mass(gaps[n - 1], mask)
        for name, old, new in ([("i", o, f) for o, f in zip(chk["i"], fresh_i)]
                               + [("ii", chk["ii"], fresh_ii), ("iii", chk["iii"], fresh_iii)]):
            dev = _rel(old, new)
            worst = max(worst, dev)
            if dev > tol:
                failures.append(f"n={n} ({name}) stored {old!r} recomputed {new!r}")
        if not all(m < small for m in fresh_i):
            failures.append(f"n={n} (i) above threshold")
        if not fresh_ii < small:
            failures.append(f"n={n} (ii) above threshold")
        if not fresh_iii > big:
            failures.append(f"n={n} (iii) below threshold")
    return ReplayResult(not failures, worst, failures)


def band_masses(cert: HumpCertificate, values, chart: ContactChart | None = None):
    """Masses of ``|values|^p`` on ``E_{eps_n} \\ E_{eps_{n+1}}``, ``n = 0..K``,
    with ``E_{eps_0} = T`` and the last band equal to ``E_{eps_K}``."""
    chart = chart_for(cert) if chart is None else chart
    dens = chart.weights * np.abs(values) ** cert.p
    masks = [np.ones(chart.n_nodes, dtype=bool)] + [chart.in_E(e) for e in cert.eps]
    out = []
    for n in range(len(masks)):
        band = masks[n] & ~masks[n + 1] if n + 1 < len(masks) else masks[n]
        out.append(float(np.sum(dens[band])))
    return out


# --------------------------------------------------------------------------
# Frame bounds and fit diagnostics


@dataclass
class FrameBounds:
    c1_hat: float
    c2_hat: float
    trials: int
    K: int
    ratios: np.ndarray = field(repr=False)

    def to_dict(self):
        return {"c1_hat": self.c1_hat, "c2_hat": self.c2_hat, "trials": self.trials, "K": self.K}


def random_coefficients(K: int, trials: int, seed=0, p: float | None = None):
    """Components uniform on the complex unit disk, optionally normalised in l^p."""
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.random((trials, K)))
    b = r * np.exp(2j * np.pi * rng.random((trials, K)))
    if p is not None:
        b /= np.sum(np.abs(b) ** p, axis=1, keepdims=True) ** (1 / p)
    return b


def _sum_norms(b, U, w, p, batch=64):
    out = np.empty(len(b))
    for i in range(0, len(b), batch):
        S = b[i: i + batch] @ U
        out[i: i + batch] = np.sum(w * np.abs(S) ** p, axis=1) ** (1 / p)
    return out


def frame_bounds_verify(functions, p: float, trials: int = 1000, seed=0,
                        weights=None, coefficients=None) -> FrameBounds:
    """Min and max of ``||sum b_j u_j||_p / ||b||_p`` over random ``b``.

    ``functions`` has one row of boundary samples per ``u_j``; ``weights``
    defaults to the uniform rule.  ``coefficients`` overrides the random draw.
    """
    U = np.atleast_2d(np.asarray(functions))
    K, N = U.shape
    if K < 2:
        raise ParameterRangeError("need at least two functions")
    w = np.full(N, 1.0 / N) if weights is None else np.asarray(weights)
    if coefficients is None:
        b = random_coefficients(K, trials, seed, p)
    else:
        b = np.atleast_2d(np.asarray(coefficients, dtype=complex))
        b = b / np.sum(np.abs(b) ** p, axis=1, keepdims=True) ** (1 / p)
    ratios = _sum_norms(b, U, w, p)
    return FrameBounds(float(ratios.min()), float(ratios.max()), len(b), K, ratios)


def hump_frame(cert: HumpCertificate, trials: int = 1000, seed=0,
               chart: ContactChart | None = None) -> FrameBounds:
    """Frame bounds of a certificate's humps; stored on the certificate."""
    U, w = certificate_functions(cert, chart)
    fb = frame_bounds_verify(U, cert.p, trials, seed, w)
    cert.empirical_frame = fb.to_dict()
    return fb


@dataclass
class FitRecord:
    p: float
    scale_p: float
    residual_p: float
    scale_2: float
    residual_2: float
    trials: int

    @property
    def winner(self):
        if np.isclose(self.residual_p, self.residual_2, rtol=1e-12, atol=1e-15):
            return "tie"
        return "lp" if self.residual_p < self.residual_2 else "l2"

    def to_dict(self):
        return {**asdict(self), "winner": self.winner}


def _fit(x, y):
    """Least squares ``y ~ c x`` through the origin; relative residual."""
    c = float(x @ y / (x @ x))
    return c, float(np.linalg.norm(y - c * x) / np.linalg.norm(y))


def norm_fit_diagnostic(functions, p: float, trials: int = 1000, seed=0,
                        weights=None) -> FitRecord:
    """Regress ``||sum c_j u_j||_p`` on ``||c||_p`` and on ``||c||_2``."""
    U = np.atleast_2d(np.asarray(functions))
    K, N = U.shape
    w = np.full(N, 1.0 / N) if weights is None else np.asarray(weights)
    c = random_coefficients(K, trials, seed)
    y = _sum_norms(c, U, w, p)
    xp = np.sum(np.abs(c) ** p, axis=1) ** (1 / p)
    x2 = np.sqrt(np.sum(np.abs(c) ** 2, axis=1))
    sp, rp = _fit(xp, y)
    s2, r2 = _fit(x2, y)
    return FitRecord(float(p), sp, rp, s2, r2, trials)


def ellp_vs_ell2_diagnostic(cert: HumpCertificate, trials: int = 1000, seed=0,
                            chart: ContactChart | None = None) -> FitRecord:
    if cert.K < 2:
        raise PreconditionError("certificate has fewer than two humps")
    U, w = certificate_functions(cert, chart)
    return norm_fit_diagnostic(U, cert.p, trials, seed, w)
