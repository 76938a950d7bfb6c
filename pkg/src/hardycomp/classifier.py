"""Three-way classification of ``C_phi`` on H^p from numerical evidence.

(i)   compact: the Shapiro ratio and the test-function norms both vanish;
(ii)  fixes l^p but not l^2: not compact and the contact set is null;
(iii) fixes l^2 (and l^p): the contact set has positive measure.

For ``p = 2`` the two non-compact cases coincide.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .config import SCHEMA_VERSION, RunConfig
from .contact import POSITIVE, ZERO, contact_measure, pullback_density
from .exceptions import HardycompError, ParameterRangeError
from .glidinghump import gliding_hump_select, hump_frame, select_test_points
from .hardy import QuadratureGrid, compactness_score
from .lacunary import l2_lower_bound_verify, select_lacunary_powers
from .nevanlinna import shapiro_trend
from .symbol import Symbol
from .trend import NON_VANISHING, VANISHING

COMPACT = "Compact(i)"
FIXES_LP_ONLY = "FixesLpOnly(ii)"
FIXES_L2 = "FixesL2(iii)"
INCONCLUSIVE = "Inconclusive"

EXIT_CODES = {COMPACT: 0, FIXES_LP_ONLY: 1, FIXES_L2: 2, INCONCLUSIVE: 3}


@dataclass
class TrichotomyReport:
    symbol: str
    p: float
    verdict: str
    evidence: dict = field(default_factory=dict)
    annotations: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def exit_code(self):
        return EXIT_CODES[self.verdict]

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "symbol": self.symbol, "p": self.p,
                "verdict": self.verdict, "exit_code": self.exit_code,
                "evidence": self.evidence, "annotations": self.annotations,
                "grid": {"n_nodes": self.config.get("n_nodes"),
                         "pullback_nodes": self.config.get("pullback_nodes")},
                "config": self.config,
                # wall-clock data lives here so the rest of the report is reproducible
                "timestamp": self.timing}


def _combine(shapiro: str, score: str):
    if shapiro == VANISHING and score == VANISHING:
        return "compact"
    if VANISHING in (shapiro, score):
        return "conflict" if NON_VANISHING in (shapiro, score) else "unclear"
    if NON_VANISHING in (shapiro, score):
        return "noncompact"
    return "unclear"


def classify(phi: Symbol, p: float, config: RunConfig | None = None) -> TrichotomyReport:
    if p < 1:
        raise ParameterRangeError("p must be >= 1")
    config = RunConfig() if config is None else config
    clock = {}
    t0 = time.perf_counter()
    report = TrichotomyReport(phi.text, float(p), INCONCLUSIVE, config=config.to_dict(),
                              timing={"created": time.strftime("%Y-%m-%dT%H:%M:%S"),
                                      "elapsed_s": clock})
    if not phi.nonconstant:
        report.verdict = COMPACT
        report.annotations.append("constant symbol: C_phi has rank one")
        clock["total"] = time.perf_counter() - t0
        return report

    grid = QuadratureGrid(config.n_nodes)
    t = time.perf_counter()
    sh = shapiro_trend(phi, config.shapiro_rays, config.shapiro_m_min, config.shapiro_m_max,
                       threads=config.threads, n_nodes=config.n_nodes)
    clock["shapiro"] = time.perf_counter() - t
    t = time.perf_counter()
    sc = compactness_score(phi, p, config.score_rays, config.score_m_max, grid,
                           threads=config.threads)
    clock["compactness"] = time.perf_counter() - t
    report.evidence["shapiro"] = sh.summary()
    report.evidence["compactness"] = sc.summary()

    state = _combine(sh.verdict, sc.verdict)
    if state == "compact":
        report.verdict = COMPACT
    elif state in ("conflict", "unclear"):
        report.annotations.append(f"trends disagree or are unresolved: shapiro={sh.verdict}, "
                                  f"test functions={sc.verdict}")
    else:
        t = time.perf_counter()
        prof = contact_measure(phi, config.taus, grid)
        clock["contact"] = time.perf_counter() - t
        report.evidence["contact"] = prof.summary()
        if prof.verdict == ZERO:
            report.verdict = FIXES_LP_ONLY
        elif prof.verdict == POSITIVE:
            report.verdict = FIXES_L2
        else:
            report.annotations.append("contact measure fit inconclusive")
        if p == 2 and report.verdict == FIXES_LP_ONLY:
            report.verdict = FIXES_L2
            report.annotations.append("p = 2: l^p and l^2 coincide, so a non-compact operator "
                                      "fixes l^2 although the contact set is null")
        if config.attach_certificates and report.verdict in (FIXES_LP_ONLY, FIXES_L2):
            _attach(report, phi, p, prof, config, clock)
    clock["total"] = time.perf_counter() - t0
    return report


def _attach(report, phi, p, prof, config, clock):
    t = time.perf_counter()
    try:
        d, ladder = select_test_points(phi, p, rungs=config.rungs)
        cert = gliding_hump_select(phi, p, d, ladder, config.delta, config.K)
        if cert.K >= 2:
            hump_frame(cert, config.trials, config.seed, ladder.chart)
        report.evidence["hump"] = cert.to_dict()
        if not cert.complete:
            report.annotations.append(f"hump certificate partial: {cert.failure_stage}")
    except HardycompError as exc:
        report.annotations.append(f"hump certificate unavailable: {exc}")
    clock["hump"] = time.perf_counter() - t
    if report.verdict != FIXES_L2 or prof.verdict != POSITIVE:
        return
    t = time.perf_counter()
    try:
        lac = select_lacunary_powers(phi, prof.m0, config.K, config.q,
                                     QuadratureGrid(config.n_nodes))
        l2_lower_bound_verify(phi, lac, config.trials, config.seed)
        report.evidence["lacunary"] = lac.to_dict()
    except HardycompError as exc:
        report.annotations.append(f"lacunary certificate unavailable: {exc}")
    pb = pullback_density(phi, config.n_arcs, QuadratureGrid(config.pullback_nodes))
    report.evidence["pullback"] = pb.summary()
    clock["lacunary_pullback"] = time.perf_counter() - t
