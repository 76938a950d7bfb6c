"""Command line interface: ``hardycomp <command> --symbol ... [options]``.

Every command prints a one-line summary.  With ``--out DIR`` it writes
``<command>.json`` and, for ``--format csv``, the CSV tables (plus PNG
figures with ``--plot``).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .classifier import classify
from .config import SCHEMA_VERSION, RunConfig
from .contact import (DEFAULT_TAUS, POSITIVE, contact_measure, pullback_density,
                      pullback_lower_bound_check)
from .exceptions import HardycompError
from .glidinghump import (DEFAULT_RUNGS, HumpCertificate, ellp_vs_ell2_diagnostic,
                          gliding_hump_select, hump_frame, replay, select_test_points)
from .hardy import QuadratureGrid, compactness_score
from .lacunary import (LacunaryCertificate, check_gram, gram_matrix, h1_lower_bound_check,
                       l2_lower_bound_verify, paley_equivalence_check, select_lacunary_powers)
from .nevanlinna import shapiro_trend
from .reports import write_csv, write_json
from .symbol import parse_symbol

COMMANDS = ("classify", "shapiro", "compactness", "contact", "hump", "lacunary", "paley",
            "pullback")
EXIT_ERROR = 4
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--symbol", help="symbol expression, e.g. 'compose(power(2), mobius(0.5))'")
    common.add_argument("--p", type=float, default=2.0)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, help="directory for artifacts")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--plot", action="store_true", help="render PNGs next to the CSV files")
    common.add_argument("--threads", type=int)
    common.add_argument("--n-nodes", type=int, default=8192)
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--error-json", action="store_true",
                        help="print errors as JSON on stdout")

    parser = _Parser(prog="hardycomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common])
    s = sub.add_parser("shapiro", parents=[common])
    s.add_argument("--rays", type=int, default=128)
    s.add_argument("--m-min", type=int, default=4)
    s.add_argument("--m-max", type=int, default=14)
    s = sub.add_parser("compactness", parents=[common])
    s.add_argument("--rays", type=int, default=64)
    s.add_argument("--m-max", type=int, default=12)
    s = sub.add_parser("contact", parents=[common])
    s.add_argument("--tau", type=_floats, default=DEFAULT_TAUS)
    s = sub.add_parser("hump", parents=[common])
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--K", type=int, default=6)
    s.add_argument("--rungs", type=int, default=DEFAULT_RUNGS)
    s.add_argument("--ray", type=float)
    s.add_argument("--verify", type=Path, help="replay a stored certificate")
    s = sub.add_parser("lacunary", parents=[common])
    s.add_argument("--K", type=int, default=6)
    s.add_argument("--q", type=float, default=2.0)
    s.add_argument("--m-e", type=float, help="contact measure (estimated when omitted)")
    s.add_argument("--verify", type=Path, help="recheck a stored certificate")
    s = sub.add_parser("paley", parents=[common])
    s.add_argument("--powers", type=_ints, required=True)
    s = sub.add_parser("pullback", parents=[common])
    s.add_argument("--arcs", type=int, default=64)
    s.add_argument("--delta", type=float)
    s.add_argument("--pullback-nodes", type=int, default=2 ** 16)
    return parser


class _Output:
    def __init__(self, args):
        self.args = args
        self.files = []

    def payload(self, command, body, grid=None):
        return {"schema_version": SCHEMA_VERSION, "command": command,
                "symbol": self.args.symbol, "seed": self.args.seed,
                "grid": grid or {"n_nodes": self.args.n_nodes}, **body}

    def json(self, name, payload):
        if self.args.out is not None:
            self.files.append(write_json(self.args.out / f"{name}.json", payload))

    def csv(self, name, header, rows, plot=None):
        if self.args.out is None or self.args.format != "csv" and not self.args.plot:
            return
        path = write_csv(self.args.out / f"{name}.csv", header, rows)
        self.files.append(path)
        if self.args.plot and plot is not None:
            from .plotting import plot_csv
            self.files.append(plot_csv(path, **plot))


def _symbol(args):
    if not args.symbol:
        raise UsageError("--symbol is required")
    return parse_symbol(args.symbol)


def cmd_classify(args, out):
    phi = _symbol(args)
    cfg = RunConfig(n_nodes=args.n_nodes, trials=args.trials, seed=args.seed,
                    threads=args.threads)
    rep = classify(phi, args.p, cfg)
    out.json("classify", out.payload("classify", rep.to_dict()))
    sh = rep.evidence.get("shapiro")
    if sh:
        out.csv("classify_shapiro", ["m", "max_ratio"],
                zip(sh["m_values"], sh["rung_maxima"]), {"x": "m", "y": "max_ratio"})
    cs = rep.evidence.get("compactness")
    if cs:
        out.csv("classify_scores", ["m", "max_score"], zip(cs["m_values"], cs["max_scores"]),
                {"x": "m", "y": "max_score", "logy": True})
    print(f"{phi.text} p={args.p:g}: {rep.verdict}")
    return rep.exit_code


def cmd_shapiro(args, out):
    phi = _symbol(args)
    tr = shapiro_trend(phi, args.rays, args.m_min, args.m_max, threads=args.threads,
                       n_nodes=args.n_nodes)
    out.json("shapiro", out.payload("shapiro", tr.summary()))
    out.csv("shapiro", ["ray_angle", "abs_w", "ratio"], tr.rows(),
            {"x": "abs_w", "y": "ratio", "reduce": "max"})
    print(f"{phi.text}: shapiro {tr.verdict}, limit guess {tr.limit_guess:.6g} (heuristic)")
    return 0


def cmd_compactness(args, out):
    phi = _symbol(args)
    tr = compactness_score(phi, args.p, args.rays, args.m_max, QuadratureGrid(args.n_nodes),
                           threads=args.threads)
    out.json("compactness", out.payload("compactness", tr.summary()))
    out.csv("compactness", ["ray_angle", "abs_a", "score"], tr.rows(),
            {"x": "abs_a", "y": "score", "reduce": "max"})
    print(f"{phi.text} p={args.p:g}: test-function norms {tr.verdict}")
    return 0


def cmd_contact(args, out):
    phi = _symbol(args)
    prof = contact_measure(phi, args.tau, QuadratureGrid(args.n_nodes))
    out.json("contact", out.payload("contact", prof.summary()))
    out.csv("contact_profile", ["theta", "abs_phi"], zip(prof.theta, prof.modulus),
            {"x": "theta", "y": "abs_phi"})
    out.csv("contact_curve", ["tau", "measure"], prof.curve(),
            {"x": "tau", "y": "measure", "logx": True})
    for tau, m in prof.curve():
        print(f"tau={tau:g} measure={m:.6f}")
    print(f"{phi.text}: m0={prof.m0:.6g} +/- {prof.stderr:.2g} ({prof.verdict})")
    return 0


def cmd_hump(args, out):
    if args.verify:
        cert = HumpCertificate.from_json(args.verify.read_text(encoding="utf-8"))
        res = replay(cert)
        out.json("hump_verify", out.payload("hump_verify", {
            "passed": res.passed, "max_deviation": res.max_deviation,
            "failures": res.failures}))
        print(f"replay {'passed' if res.passed else 'FAILED'} "
              f"(max relative deviation {res.max_deviation:.2e})")
        return 0 if res.passed else 1
    phi = _symbol(args)
    d, ladder = select_test_points(phi, args.p, args.ray, args.rungs)
    cert = gliding_hump_select(phi, args.p, d, ladder, args.delta, args.K)
    fit = None
    if cert.K >= 2:
        fb = hump_frame(cert, args.trials, args.seed, ladder.chart)
        fit = ellp_vs_ell2_diagnostic(cert, args.trials, args.seed, ladder.chart)
    body = {"certificate": cert.to_dict(), "chart": ladder.chart.provenance(),
            "fit": fit.to_dict() if fit else None}
    out.json("hump", out.payload("hump", body, grid=ladder.chart.provenance()))
    if args.out is not None:
        out.files.append(write_json(args.out / "hump_certificate.json", cert.to_dict()))
    out.csv("hump", ["n", "gap_exponent", "eps_exponent", "mass_inside", "mass_outside"],
            [(c["n"], s["exponent"], s["eps_exponent"], c["iii"], c["ii"])
             for c, s in zip(cert.checks, cert.selected)],
            {"x": "n", "y": "mass_outside", "logy": True})
    msg = f"{phi.text} p={args.p:g}: K={cert.K} d={d:.6g}"
    if cert.empirical_frame:
        msg += f" c1_hat={fb.c1_hat:.6g} c2_hat={fb.c2_hat:.6g}"
    if not cert.complete:
        msg += f" (partial: {cert.failure_stage})"
    print(msg)
    return 0 if cert.complete else 1


def cmd_lacunary(args, out):
    phi = _symbol(args)
    if args.verify:
        cert = LacunaryCertificate.from_dict(json.loads(args.verify.read_text(encoding="utf-8")))
        fresh = gram_matrix(phi, cert.powers, n_nodes=cert.n_nodes)
        dev = float(np.max(np.abs(fresh - cert.gram_matrix)))
        checks = check_gram(cert)
        ok = dev <= 1e-10 and all(v for k, v in checks.items() if k.endswith("ok"))
        out.json("lacunary_verify", out.payload("lacunary_verify",
                                                {"passed": ok, "gram_deviation": dev, **checks}))
        print(f"lacunary certificate {'passed' if ok else 'FAILED'} (gram deviation {dev:.2e})")
        return 0 if ok else 1
    m_e = args.m_e
    if m_e is None:
        prof = contact_measure(phi, grid=QuadratureGrid(args.n_nodes))
        # a fitted m0 below its noise floor is not evidence of positive measure
        m_e = prof.m0 if prof.verdict == POSITIVE else 0.0
    cert = select_lacunary_powers(phi, m_e, args.K, args.q, QuadratureGrid(args.n_nodes))
    l2 = l2_lower_bound_verify(phi, cert, args.trials, args.seed)
    h1 = h1_lower_bound_check(phi, cert, args.trials, args.seed)
    body = {"certificate": cert.to_dict(), "l2": l2.to_dict(), "h1": h1.to_dict()}
    out.json("lacunary", out.payload("lacunary", body, grid={"n_nodes": cert.n_nodes}))
    if args.out is not None:
        out.files.append(write_json(args.out / "lacunary_certificate.json", cert.to_dict()))
    out.csv("lacunary_gram", ["j", "k", "abs_gram", "bound"], cert.offdiagonal_checks(),
            {"x": "k", "y": "abs_gram"})
    print(f"{phi.text}: powers {cert.powers} min l2 quotient {l2.min:.6g} "
          f"(bound {l2.bound:.6g}) min l1 ratio {h1.min:.6g}")
    return 0 if cert.complete and l2.passed else 1


def cmd_paley(args, out):
    st = paley_equivalence_check(args.powers, args.p, args.trials, args.seed)
    out.json("paley", out.payload("paley", {"powers": args.powers, "p": args.p, **st.to_dict()}))
    print(f"powers {args.powers} p={args.p:g}: ratios in [{st.min:.9f}, {st.max:.9f}]")
    return 0


def cmd_pullback(args, out):
    phi = _symbol(args)
    rep = pullback_density(phi, args.arcs, QuadratureGrid(args.pullback_nodes), args.delta)
    body = rep.summary()
    if rep.F.any():
        chk = pullback_lower_bound_check(phi, lambda z: rep.in_F(np.angle(z)).astype(float),
                                         args.p, rep)
        body["lower_bound"] = {"lhs": chk.lhs, "rhs": chk.rhs, "passed": chk.passed}
    out.json("pullback", out.payload("pullback", body, grid={"n_nodes": args.pullback_nodes}))
    out.csv("pullback", ["arc_midpoint", "density", "stderr"], rep.rows(),
            {"x": "arc_midpoint", "y": "density", "kind": "bar"})
    print(f"{phi.text}: {rep.status}; |F| = {rep.F_measure:.4f}, delta = {rep.delta:.4g}")
    return 0


HANDLERS = {"classify": cmd_classify, "shapiro": cmd_shapiro, "compactness": cmd_compactness,
            "contact": cmd_contact, "hump": cmd_hump, "lacunary": cmd_lacunary,
            "paley": cmd_paley, "pullback": cmd_pullback}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--error-json" in argv
    try:
        args = build_parser().parse_args(argv)
        return HANDLERS[args.command](args, _Output(args))
    except UsageError as exc:
        return _fail("usage", exc, want_json, EXIT_USAGE)
    except (HardycompError, ValueError, RuntimeError) as exc:
        return _fail(type(exc).__name__, exc, want_json, EXIT_ERROR)


def _fail(kind, exc, want_json, code):
    if want_json:
        print(json.dumps({"error": kind, "message": str(exc), "exit_code": code}, sort_keys=True))
    else:
        print(f"hardycomp: {kind}: {exc}", file=sys.stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
