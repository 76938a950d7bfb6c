"""Powers of a symbol that behave like an orthogonal sequence in H^2.

When the contact set has positive measure, ``phi**n -> 0`` weakly, so powers
``n_1 = 0 < n_2 < ...`` can be chosen with ``|(phi^{n_j}, phi^{n_k})| <=
2**-2k m(E_phi)``; then ``||sum c_k phi^{n_k}||_2^2 >= m(E_phi)/2 ||c||_2^2``.
Choosing the powers lacunary as well makes Paley-type estimates available.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import ConvergenceError, ParameterRangeError, PreconditionError
from .hardy import QuadratureGrid
from .symbol import Symbol

SCAN_CAP = 10 ** 6


def _node_count(n_max: int, degree: int, base: int):
    need = max(base, 4 * max(n_max, 1) * max(degree, 1))
    return 1 << int(np.ceil(np.log2(need)))


def _boundary(phi: Symbol, n: int):
    theta = 2 * np.pi * np.arange(n) / n
    return phi.extended(np.exp(1j * theta))


def _powers_on(phi: Symbol, powers, n_nodes: int):
    v = _boundary(phi, n_nodes)
    return np.stack([v ** int(k) for k in powers])


def gram_matrix(phi: Symbol, powers, grid: QuadratureGrid = QuadratureGrid(),
                n_nodes: int | None = None):
    """``G[j, k] = int phi^{n_j} conj(phi^{n_k}) dm`` by the trapezoid rule.

    The node count is raised to at least ``4 n_max deg(phi)`` so the integrand
    of a polynomial symbol is integrated exactly.  An explicit ``n_nodes``
    below that bound is refused.
    """
    powers = [int(k) for k in powers]
    if any(k < 0 for k in powers) or len(set(powers)) != len(powers):
        raise ParameterRangeError("powers must be distinct and nonnegative")
    need = _node_count(max(powers), phi.degree, 2)
    if n_nodes is None:
        n_nodes = _node_count(max(powers), phi.degree, grid.n_nodes)
    elif n_nodes < 2 * max(powers) * max(phi.degree, 1):
        raise ParameterRangeError(f"{n_nodes} nodes alias degree {max(powers) * phi.degree}; "
                                  f"use at least {need}")
    F = _powers_on(phi, powers, n_nodes)
    G = F @ F.conj().T / n_nodes
    return (G + G.conj().T) / 2


@dataclass
class LacunaryCertificate:
    symbol: str
    powers: list
    q_ratio: float
    gram: list                  # rows of [re, im] pairs
    m_E: float
    n_nodes: int
    complete: bool = True
    failure: str | None = None
    trace: list = field(default_factory=list)
    bound_checks: dict | None = None

    @property
    def K(self):
        return len(self.powers)

    @property
    def gram_matrix(self):
        return np.array([[complex(*e) for e in row] for row in self.gram])

    def offdiagonal_checks(self):
        """Per pair ``(j, k, |g_jk|, 2**-2k m_E)`` with 1-based ``k`` and ``j < k``."""
        G = self.gram_matrix
        out = []
        for k in range(1, self.K):
            for j in range(k):
                out.append((j + 1, k + 1, float(abs(G[j, k])), 2.0 ** (-2 * (k + 1)) * self.m_E))
        return out

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def summary(self):
        return {"powers": self.powers, "q_ratio": self.q_ratio, "m_E": self.m_E,
                "complete": self.complete, "failure": self.failure,
                "bound_checks": self.bound_checks}


def lacunarity(powers):
    pos = [k for k in powers if k > 0]
    if len(pos) < 2:
        return float("inf")
    return float(min(b / a for a, b in zip(pos[:-1], pos[1:])))


def select_lacunary_powers(phi: Symbol, m_E: float, K: int = 6, q: float = 2.0,
                           grid: QuadratureGrid = QuadratureGrid(),
                           cap: int = SCAN_CAP) -> LacunaryCertificate:
    """Greedy powers ``n_1 = 0 < n_2 < ...`` with ``n_{k+1} >= q n_k`` and
    ``|(phi^{n_j}, phi^{n_k})| <= 2**-2k m_E`` for ``j < k`` (1-based ``k``)."""
    if not m_E > 0:
        raise PreconditionError("contact set must have positive measure (m_E > 0)")
    if q <= 1:
        raise ParameterRangeError("q must exceed 1")
    if K < 1:
        raise ParameterRangeError("K must be positive")
    powers = [0]
    trace = []
    n = 0
    failure = None
    while len(powers) < K:
        k = len(powers) + 1
        bound = 2.0 ** (-2 * k) * m_E
        n = max(n + 1, int(np.ceil(q * n)))
        while True:
            if n > cap:
                failure = f"scan cap {cap} exceeded while choosing power {k}"
                break
            nn = _node_count(n, phi.degree, grid.n_nodes)
            F = _powers_on(phi, powers + [n], nn)
            ip = F[:-1] @ F[-1].conj() / nn
            worst = float(np.max(np.abs(ip)))
            trace.append({"k": k, "n": n, "max_inner": worst, "bound": bound})
            if worst <= bound:
                break
            n = max(n + 1, int(np.ceil(q * n)))
        if failure:
            break
        powers.append(n)
    nn = _node_count(max(powers), phi.degree, grid.n_nodes)
    G = gram_matrix(phi, powers, n_nodes=nn)
    gram = [[[float(z.real), float(z.imag)] for z in row] for row in G]
    return LacunaryCertificate(phi.text, powers, lacunarity(powers), gram, float(m_E), nn,
                               failure is None, failure, trace)


def _gaussian(K, trials, seed):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((trials, K)) + 1j * rng.standard_normal((trials, K))
    return c / np.linalg.norm(c, axis=1, keepdims=True)


def _norms(c, F, p, batch=64):
    out = np.empty(len(c))
    for i in range(0, len(c), batch):
        S = c[i: i + batch] @ F
        out[i: i + batch] = np.mean(np.abs(S) ** p, axis=1) ** (1 / p)
    return out


@dataclass
class TrialStats:
    min: float
    max: float
    trials: int
    bound: float | None = None
    passed: bool | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def l2_lower_bound_verify(phi: Symbol, cert: LacunaryCertificate, trials: int = 1000,
                          seed=0, tol: float = 1e-9) -> TrialStats:
    """``min ||sum c_k phi^{n_k}||_2^2`` over random unit ``c``, against ``m_E / 2``."""
    F = _powers_on(phi, cert.powers, cert.n_nodes)
    q = _norms(_gaussian(cert.K, trials, seed), F, 2.0) ** 2
    bound = 0.5 * cert.m_E
    stats = TrialStats(float(q.min()), float(q.max()), trials, bound,
                       bool(q.min() >= bound - tol))
    cert.bound_checks = stats.to_dict()
    return stats


def sparse_fourth_moment(powers, c) -> float:
    """``||sum c_k z^{n_k}||_4^4`` exactly, as the squared l^2 norm of the
    sparse self-convolution of the coefficients."""
    sq = {}
    for a, ca in zip(powers, c):
        for b, cb in zip(powers, c):
            sq[a + b] = sq.get(a + b, 0) + ca * cb
    return float(sum(abs(v) ** 2 for v in sq.values()))


def paley_equivalence_check(powers, p: float, trials: int = 1000, seed=0,
                            coefficients=None, n_nodes: int | None = None) -> TrialStats:
    """Ratios ``||sum c_k z^{n_k}||_p / ||c||_2`` over random ``c``.

    For ``p = 4`` the exact fourth moment is compared with quadrature and the
    largest deviation is reported under ``extra``.
    """
    powers = [int(k) for k in powers]
    if len(set(powers)) != len(powers) or min(powers) < 0:
        raise ParameterRangeError("powers must be distinct and nonnegative")
    if n_nodes is None:
        n_nodes = _node_count(max(powers), 1, 4096)
    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    F = np.exp(1j * np.outer(powers, theta))
    if coefficients is None:
        c = _gaussian(len(powers), trials, seed)
    else:
        c = np.atleast_2d(np.asarray(coefficients, dtype=complex))
    l2 = np.linalg.norm(c, axis=1)
    norms = _norms(c, F, p)
    ratios = norms / l2
    extra = {"q_ratio": lacunarity(sorted(powers))}
    if p == 4:
        exact = np.array([sparse_fourth_moment(powers, row) ** 0.25 for row in c])
        extra["max_exact_deviation"] = float(np.max(np.abs(exact - norms)))
        extra["exact_norms"] = exact.tolist() if len(c) <= 10 else None
    return TrialStats(float(ratios.min()), float(ratios.max()), len(c), None, None, extra)


def h1_lower_bound_check(phi: Symbol, cert: LacunaryCertificate, trials: int = 1000,
                         seed=0, coefficients=None) -> TrialStats:
    """Empirical ``K' = min ||sum c_k phi^{n_k}||_1 / ||c||_2``."""
    F = _powers_on(phi, cert.powers, cert.n_nodes)
    if coefficients is None:
        c = _gaussian(cert.K, trials, seed)
    else:
        c = np.atleast_2d(np.asarray(coefficients, dtype=complex))
    r = _norms(c, F, 1.0) / np.linalg.norm(c, axis=1)
    return TrialStats(float(r.min()), float(r.max()), len(c), 0.0, bool(r.min() > 0))


def check_gram(cert: LacunaryCertificate, tol: float = 1e-10):
    """Structural checks on a certificate's Gram matrix."""
    G = cert.gram_matrix
    eig = np.linalg.eigvalsh(G)
    off = sum(c[2] for c in cert.offdiagonal_checks())
    if not cert.complete:
        raise ConvergenceError(cert.failure or "incomplete certificate")
    return {"hermitian": bool(np.allclose(G, G.conj().T, atol=tol)),
            "psd": bool(eig.min() >= -tol),
            "diagonal_ok": bool(np.all(np.diag(G).real >= cert.m_E - tol)),
            "offdiagonal_ok": all(c[2] <= c[3] + tol for c in cert.offdiagonal_checks()),
            "offdiagonal_sum": float(off),
            "offdiagonal_sum_ok": bool(off <= cert.m_E / 6 + tol)}
