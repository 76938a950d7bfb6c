import numpy as np
import pytest

from hardycomp.exceptions import NoLowerBoundError, ParameterRangeError, PreconditionError
from hardycomp.glidinghump import (HumpCertificate, band_masses, certificate_functions,
                                   chart_for, delta_rule, ellp_vs_ell2_diagnostic,
                                   frame_bounds_verify, gliding_hump_select, hump_frame,
                                   norm_fit_diagnostic, random_coefficients, replay,
                                   select_test_points)
from hardycomp.symbol import parse_symbol

# gap exponents m (a_n = 1 - 2**-m) found for (1 + z)/2 with delta = 0.1
FROZEN = {1: ([1, 16, 36, 60, 88, 120], [0, 8, 26, 48, 74, 104]),
          4: ([1, 61, 137, 229, 337, 461], [0, 31, 99, 183, 283, 399])}


@pytest.fixture(scope="module", params=[1, 4])
def cert(request):
    phi = parse_symbol("half_plus")
    d, ladder = select_test_points(phi, request.param)
    return gliding_hump_select(phi, request.param, d, ladder, 0.1)


def test_selection_matches_frozen(cert):
    gaps, eps = FROZEN[int(cert.p)]
    assert cert.complete and cert.failure_stage is None
    assert [s["exponent"] for s in cert.selected] == gaps
    assert [s["eps_exponent"] for s in cert.selected] == eps
    assert all(c["passed"] for c in cert.checks)


def test_nesting(cert):
    assert np.all(np.diff(cert.gaps) < 0)
    assert np.all(np.diff(cert.eps) < 0)
    idx = [s["index"] for s in cert.selected]
    assert idx == sorted(set(idx))


def test_thresholds_hold(cert):
    for n, chk in enumerate(cert.checks, start=1):
        small = (4.0 ** -n * cert.delta * cert.d) ** cert.p
        assert chk["threshold"] == pytest.approx(small)
        assert all(m < small for m in chk["i"])
        assert chk["ii"] < small and chk["iii"] > (cert.d / 2) ** cert.p


def test_replay_and_json_roundtrip(cert):
    chart = chart_for(cert)
    back = HumpCertificate.from_json(cert.to_json())
    res = replay(back, chart=chart)
    assert res.passed and res.max_deviation <= 1e-10
    assert back.summary()["gap_exponents"] == cert.summary()["gap_exponents"]


def test_replay_catches_tampering(cert):
    bad = HumpCertificate.from_json(cert.to_json())
    bad.checks[2]["ii"] *= 1.5
    bad.selected[3]["eps"] = 1.0
    res = replay(bad, chart=chart_for(cert))
    assert not res.passed and len(res.failures) >= 2


def test_band_partition_identity(cert):
    chart = chart_for(cert)
    rng = np.random.default_rng(1)
    values = rng.standard_normal(chart.n_nodes) + 1j * rng.standard_normal(chart.n_nodes)
    bands = band_masses(cert, values, chart)
    assert len(bands) == cert.K + 1
    total = np.sum(chart.weights * np.abs(values) ** cert.p)
    assert sum(bands) == pytest.approx(total, rel=1e-13)


def test_frame_bounds_for_humps(cert):
    chart = chart_for(cert)
    fb = hump_frame(cert, trials=300, seed=2, chart=chart)
    U, w = certificate_functions(cert, chart)
    norms = np.sum(w * np.abs(U) ** cert.p, axis=1) ** (1 / cert.p)
    assert fb.c1_hat >= cert.d / 4
    assert fb.c2_hat <= cert.K ** (1 - 1 / cert.p) * norms.max() + 1e-12
    assert cert.empirical_frame["trials"] == 300


@pytest.mark.parametrize("delta,p,ok", [(0.1, 1, True), (0.3, 1, True), (0.5, 1, False),
                                        (0.26, 4, False), (0.25, 4, True)])
def test_delta_rule(delta, p, ok):
    assert (delta_rule(delta, p) < 0.25) == ok


def test_delta_rule_enforced():
    phi = parse_symbol("half_plus")
    d, ladder = select_test_points(phi, 1, rungs=40)
    with pytest.raises(ParameterRangeError):
        gliding_hump_select(phi, 1, d, ladder, 0.5)
    with pytest.raises(ParameterRangeError):
        gliding_hump_select(phi, 0.5, d, ladder, 0.1)
    with pytest.raises(ParameterRangeError):
        gliding_hump_select(phi, 1, 0.0, ladder, 0.1)


def test_short_ladder_reports_failure_stage():
    phi = parse_symbol("half_plus")
    d, ladder = select_test_points(phi, 1, rungs=40)
    cert = gliding_hump_select(phi, 1, d, ladder, 0.1)
    assert not cert.complete and cert.failure_stage is not None
    assert 1 <= cert.K < 6


def test_compact_symbol_has_no_lower_bound():
    with pytest.raises(NoLowerBoundError):
        select_test_points(parse_symbol("dilation(0.5)"), 2, rungs=60)


def test_orthonormal_frame_is_tight():
    z = np.exp(2j * np.pi * np.arange(64) / 64)
    U = np.stack([z ** k for k in range(4)])
    fb = frame_bounds_verify(U, 2, trials=200)
    assert fb.c1_hat == pytest.approx(1.0) and fb.c2_hat == pytest.approx(1.0)
    with pytest.raises(ParameterRangeError):
        frame_bounds_verify(U[:1], 2)


def test_disjoint_supports_give_lp_isometry():
    U = np.kron(np.eye(3), np.ones(4))
    for p in (1, 3):
        fb = frame_bounds_verify(U * 3 ** (1 / p), p, trials=100, seed=4)
        assert fb.c1_hat == pytest.approx(1.0) and fb.c2_hat == pytest.approx(1.0)
    fb = frame_bounds_verify(U, 2, coefficients=[[1, 0, 0], [1, 1, 1]])
    assert fb.trials == 2


def test_random_coefficients():
    b = random_coefficients(5, 1000, seed=0)
    assert np.all(np.abs(b) <= 1)
    bn = random_coefficients(5, 10, seed=0, p=3)
    assert np.allclose(np.sum(np.abs(bn) ** 3, axis=1), 1)
    assert np.array_equal(random_coefficients(5, 10, seed=7), random_coefficients(5, 10, seed=7))


def test_fit_diagnostic_prefers_lp_for_disjoint_functions():
    U = np.kron(np.eye(6), np.ones(4))
    rec = norm_fit_diagnostic(U, 4, trials=500)
    assert rec.winner == "lp" and rec.residual_p < 1e-12


def test_hump_fit_diagnostic_at_p4():
    phi = parse_symbol("half_plus")
    d, ladder = select_test_points(phi, 4)
    cert = gliding_hump_select(phi, 4, d, ladder, 0.1)
    rec = ellp_vs_ell2_diagnostic(cert, trials=1000, seed=0)
    assert rec.residual_p < rec.residual_2
    short = HumpCertificate.from_json(cert.to_json())
    short.selected = short.selected[:1]
    with pytest.raises(PreconditionError):
        ellp_vs_ell2_diagnostic(short)


def test_ten_rung_ladder_floor():
    # a ten-point ladder gives a positive floor but cannot host a second hump
    phi = parse_symbol("half_plus")
    d, ladder = select_test_points(phi, 1, 0.0, 10)
    assert d == pytest.approx(0.9 * 1.5, rel=1e-12) and len(ladder) == 10
    cert = gliding_hump_select(phi, 1, d, ladder, 0.1)
    assert cert.K == 1 and cert.failure_stage == "test points exhausted at n=2"
