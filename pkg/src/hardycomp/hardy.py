"""Hardy-space norms by boundary quadrature and the reproducing-kernel test
functions ``g_a``.

For every ``p`` the p-th power of ``|g_a|`` on the circle is the Poisson
kernel ``(1 - |a|^2) / |1 - conj(a) w|^2``, so the p-th power of
``||C_phi g_a||_p`` does not depend on ``p``.  All integrals use the uniform
trapezoid rule, which is spectrally accurate for the smooth periodic
integrands produced by symbols holomorphic on the closed disk.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import contact_points
from .exceptions import BoundaryTraceError
from .parallel import pmap
from .symbol import Symbol, boundary_trace_masked
from .trend import TrendPolicy, trend_verdict

DEFAULT_NODES = 8192
DEFAULT_LADDER_DEPTH = 20
MAX_NODES = 2 ** 22
MAX_EXCLUDED = 1e-3


@dataclass(frozen=True)
class QuadratureGrid:
    n_nodes: int = DEFAULT_NODES
    radius_ladder: tuple = tuple(1.0 - 2.0 ** -m for m in range(1, DEFAULT_LADDER_DEPTH + 1))

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError("need at least two nodes")
        lad = np.asarray(self.radius_ladder)
        if lad.size and (np.any(np.diff(lad) <= 0) or lad[0] < 0 or lad[-1] >= 1):
            raise ValueError("radius ladder must increase strictly inside [0, 1)")

    @property
    def theta(self):
        return 2 * np.pi * np.arange(self.n_nodes) / self.n_nodes

    @property
    def nodes(self):
        return np.exp(1j * self.theta)

    @property
    def weights(self):
        return np.full(self.n_nodes, 1.0 / self.n_nodes)

    def refined(self, factor: int = 2) -> "QuadratureGrid":
        return QuadratureGrid(self.n_nodes * factor, self.radius_ladder)


@dataclass(frozen=True)
class TestFunction:
    """``g_a(z) = (1 - |a|^2)^(1/p) / (1 - conj(a) z)^(2/p)``, unit norm in H^p."""

    __test__ = False  # not a pytest class

    a: complex
    p: float

    def __post_init__(self):
        if abs(self.a) >= 1:
            raise ValueError("|a| must be < 1")
        if self.p <= 0:
            raise ValueError("p must be positive")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        a = complex(self.a)
        scale = ((1 - abs(a)) * (1 + abs(a))) ** (1 / self.p)
        return scale * (1 - a.conjugate() * z) ** (-2 / self.p)

    def modulus_p(self, w):
        """``|g_a(w)|**p`` evaluated without forming powers."""
        return poisson_weight(self.a, w)


def poisson_weight(a: complex, w):
    a = complex(a)
    w = np.asarray(w, dtype=complex)
    return (1 - abs(a)) * (1 + abs(a)) / np.abs(1 - a.conjugate() * w) ** 2


def _check_samples(x):
    x = np.asarray(x)
    if not np.all(np.isfinite(x)):
        raise ValueError("malformed input: NaN or overflow in samples")
    return x


def circle_means(f, p: float, grid: QuadratureGrid = QuadratureGrid()):
    """Integral means ``mean |f(r xi)|^p`` for each radius of the ladder."""
    vals = np.stack([_check_samples(f(r * grid.nodes)) for r in grid.radius_ladder])
    return np.mean(np.abs(vals) ** p, axis=1)


def hp_norm(f, p: float, grid: QuadratureGrid = QuadratureGrid(), closed_disk: bool = True):
    """H^p norm of ``f``.

    ``f`` is a vectorised callable, a 1-D array of boundary samples on the
    grid nodes, or a 2-D array of samples (one row per ladder radius).  For a
    callable holomorphic on the closed disk the unit circle is used directly;
    otherwise the supremum over the radius ladder is returned.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if callable(f):
        if closed_disk:
            samples = _check_samples(f(grid.nodes))
            return float(np.mean(np.abs(samples) ** p) ** (1 / p))
        return float(np.max(circle_means(f, p, grid)) ** (1 / p))
    x = _check_samples(f)
    if x.ndim == 1:
        return float(np.mean(np.abs(x) ** p) ** (1 / p))
    return float(np.max(np.mean(np.abs(x) ** p, axis=1)) ** (1 / p))


@dataclass
class TestMass:
    """``int_T |g_a o phi|^p dm`` together with how it was obtained."""

    __test__ = False  # not a pytest class

    mass: float
    n_nodes: int
    excluded_fraction: float = 0.0
    converged: bool = True

    def norm(self, p: float) -> float:
        return self.mass ** (1 / p)


def _boundary_values(phi: Symbol, theta):
    vals, ok = boundary_trace_masked(phi, theta)
    return vals, ok


def composed_test_mass(phi: Symbol, a: complex, grid: QuadratureGrid = QuadratureGrid(),
                       rtol: float = 1e-12, max_nodes: int = MAX_NODES,
                       cache: dict | None = None) -> TestMass:
    """Trapezoid value of ``int |g_a(phi)|^p dm``, doubling nodes to ``rtol``.

    ``cache`` maps a node count to boundary traces on that uniform grid and
    may be shared between calls for the same symbol.
    """
    if abs(a) >= 1:
        raise ValueError("|a| must be < 1")
    n = grid.n_nodes

    def trace(m):
        if cache is None:
            return _boundary_values(phi, 2 * np.pi * np.arange(m) / m)
        if m not in cache:
            cache[m] = _boundary_values(phi, 2 * np.pi * np.arange(m) / m)
        return cache[m]

    def block(vals, ok):
        w = np.where(ok, poisson_weight(a, np.where(ok, vals, 0)), 0.0)
        return float(np.sum(w)), int(np.count_nonzero(~ok))

    total, bad = block(*trace(n))
    count = n
    current = total / (n - bad) if bad < n else float("nan")
    while True:
        vals, ok = trace(2 * n)
        s, b = block(vals[1::2], ok[1::2])
        total += s
        bad += b
        count += n
        n *= 2
        new = total / (count - bad)
        excl = bad / count
        if excl > MAX_EXCLUDED:
            raise BoundaryTraceError(f"{excl:.2%} of nodes lack a radial limit")
        if abs(new - current) <= rtol * abs(new):
            return TestMass(new, n, excl, True)
        if n >= max_nodes:
            return TestMass(new, n, excl, False)
        current = new


def composed_test_norm(phi: Symbol, a: complex, p: float,
                       grid: QuadratureGrid = QuadratureGrid()) -> float:
    """``||C_phi(g_a)||_p`` via boundary traces."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return composed_test_mass(phi, a, grid).norm(p)


@dataclass
class CompactnessTrend:
    p: float
    ray_angles: np.ndarray
    m_values: np.ndarray
    scores: np.ndarray          # norms, shape (rays, rungs)
    masses: np.ndarray          # p-th powers of the scores
    rung_max: np.ndarray        # max norm per rung
    verdict: str
    converged: bool = True
    notes: list = field(default_factory=list)

    @property
    def radii(self):
        return 1.0 - 2.0 ** -self.m_values

    def rows(self):
        for i, ang in enumerate(self.ray_angles):
            for j, r in enumerate(self.radii):
                yield float(ang), float(r), float(self.scores[i, j])

    def summary(self):
        return {"verdict": self.verdict, "max_scores": [float(x) for x in self.rung_max],
                "p": self.p, "rays": len(self.ray_angles),
                "m_values": [int(m) for m in self.m_values]}


def default_rays(phi: Symbol, n_rays: int, n_nodes: int = DEFAULT_NODES):
    """Uniform ray angles plus the image directions of isolated contact points."""
    rays = list(2 * np.pi * np.arange(n_rays) / n_rays)
    pts, _ = contact_points(phi, n_nodes)
    for cp in pts:
        ang = float(np.angle(cp.image)) % (2 * np.pi)
        if min(min(abs(ang - r), 2 * np.pi - abs(ang - r)) for r in rays) > 1e-12:
            rays.append(ang)
    return np.array(rays)


def compactness_score(phi: Symbol, p: float, rays=64, m_max: int = 12,
                      grid: QuadratureGrid = QuadratureGrid(),
                      policy: TrendPolicy = TrendPolicy(), threads: int | None = None,
                      m_min: int = 1) -> CompactnessTrend:
    """Test-function norms along rays ``a = (1 - 2**-m) e^{i ray}``.

    ``rays`` is a count (uniform angles plus contact directions) or an
    explicit array of angles.  The verdict is taken on the per-rung maximum
    mass, which decays like ``2**-m`` exactly when the scores vanish.
    """
    if np.isscalar(rays):
        angles = default_rays(phi, int(rays), grid.n_nodes)
    else:
        angles = np.asarray(rays, dtype=float)
    ms = np.arange(m_min, m_max + 1)

    # traces shared by every ray; threads may race to fill a level with equal values
    cache: dict = {}
    for m in (grid.n_nodes, 2 * grid.n_nodes):
        cache[m] = _boundary_values(phi, 2 * np.pi * np.arange(m) / m)

    def along(ang):
        out = [composed_test_mass(phi, (1 - 2.0 ** -m) * np.exp(1j * ang), grid, cache=cache)
               for m in ms]
        return [t.mass for t in out], all(t.converged for t in out)

    res = pmap(along, angles, threads)
    masses = np.array([r[0] for r in res])
    converged = all(r[1] for r in res)
    scores = masses ** (1 / p)
    verdict = trend_verdict(masses.max(axis=0), m_max, policy)
    notes = [] if converged else ["quadrature did not converge for some rungs"]
    return CompactnessTrend(p, angles, ms, scores, masses, scores.max(axis=0),
                            verdict, converged, notes)
