"""Run configuration shared by the classifier and the command line."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .contact import DEFAULT_ARCS, DEFAULT_TAUS
from .glidinghump import DEFAULT_K, DEFAULT_RUNGS
from .hardy import DEFAULT_NODES

SCHEMA_VERSION = "1.0"


@dataclass
class RunConfig:
    n_nodes: int = DEFAULT_NODES
    # Shapiro ratio ladder |w| = 1 - 2**-m
    shapiro_rays: int = 128
    shapiro_m_min: int = 4
    shapiro_m_max: int = 14
    # test-function ladder |a| = 1 - 2**-m
    score_rays: int = 64
    score_m_max: int = 12
    taus: tuple = DEFAULT_TAUS
    n_arcs: int = DEFAULT_ARCS
    pullback_nodes: int = 2 ** 16
    delta: float = 0.1
    K: int = DEFAULT_K
    q: float = 2.0
    rungs: int = DEFAULT_RUNGS
    trials: int = 1000
    seed: int = 0
    threads: int | None = None
    attach_certificates: bool = True
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_nodes < 16:
            raise ValueError("n_nodes must be at least 16")
        if any(t <= 0 for t in self.taus):
            raise ValueError("tau values must be positive")
        if self.delta <= 0 or self.q <= 1 or self.K < 1 or self.trials < 1:
            raise ValueError("delta > 0, q > 1, K >= 1 and trials >= 1 are required")
        if self.seed is None:
            raise ValueError("a seed is required")

    def doubled(self) -> "RunConfig":
        d = asdict(self)
        d["n_nodes"] *= 2
        d["pullback_nodes"] *= 2
        return RunConfig(**d)

    def to_dict(self):
        d = asdict(self)
        d["taus"] = list(self.taus)
        return d
