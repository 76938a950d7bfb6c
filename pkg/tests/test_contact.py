import numpy as np
import pytest
from scipy.integrate import quad

from hardycomp.contact import (POSITIVE, ZERO, contact_measure, e_epsilon_mask, e_k_mask,
                               mass_split, poisson_arc, poisson_extension,
                               pullback_density, pullback_lower_bound_check)
from hardycomp.exceptions import PreconditionError
from hardycomp.hardy import QuadratureGrid, composed_test_mass
from hardycomp.symbol import parse_symbol

from oracles import half_plus_sublevel_fraction, half_plus_sublevel_measure


@pytest.mark.parametrize("n", [2 ** 12, 2 ** 14])
def test_half_plus_sublevel_curve(n):
    prof = contact_measure(parse_symbol("half_plus"), grid=QuadratureGrid(n))
    for tau, m in prof.curve():
        assert abs(m - half_plus_sublevel_measure(tau)) <= 2 / n
        assert m == pytest.approx(half_plus_sublevel_fraction(tau, n), abs=1e-15)
    assert prof.verdict == ZERO


@pytest.mark.parametrize("text", ["identity", "power(2)", "mobius(0.5)", "blaschke(0.5, -0.3i)"])
def test_inner_symbols_have_full_contact(text):
    prof = contact_measure(parse_symbol(text))
    assert prof.verdict == POSITIVE
    assert prof.m0 == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("text", ["dilation(0.5)", "poly(0.1, 0.4, 0.3)", "const(0.2)"])
def test_interior_symbols_have_no_contact(text):
    prof = contact_measure(parse_symbol(text))
    assert prof.verdict == ZERO and prof.m0 == 0


def test_masks():
    v = np.array([1.0, 0.99, 0.5, -1.0, 0.9j])
    assert e_epsilon_mask(v, 0.05).tolist() == [True, True, False, False, False]
    assert e_k_mask(v, 10).tolist() == [True, True, False, True, True]
    assert e_epsilon_mask(v, 0.05, center=-1).tolist() == [False, False, False, True, False]


@pytest.mark.parametrize("a", [0.9, 0.99, 0.999])
@pytest.mark.parametrize("eps", [0.05, 0.2, 0.5])
def test_mass_split_partition_and_tail_bound(a, eps):
    phi = parse_symbol("half_plus")
    inside, outside = mass_split(phi, a, 2, eps)
    total = composed_test_mass(phi, a).mass
    assert inside + outside == pytest.approx(total, rel=1e-10)
    if eps > 1 - a:
        assert outside <= (1 - a * a) / (eps - (1 - a)) ** 2 + 1e-12


def test_mass_split_large_eps_takes_everything():
    inside, outside = mass_split(parse_symbol("half_plus"), 0.9, 1, 2.5)
    assert outside == 0 and inside == pytest.approx(1.9, rel=1e-10)
    with pytest.raises(ValueError):
        mass_split(parse_symbol("half_plus"), 0.9, 1, 0.0)


def test_poisson_arc_against_quadrature():
    rng = np.random.default_rng(20)
    for _ in range(20):
        alpha = rng.uniform(0, 2 * np.pi)
        beta = alpha + rng.uniform(0.01, 2 * np.pi - 0.01)
        z = 0.9 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        kern = lambda t: (1 - abs(z) ** 2) / abs(np.exp(1j * t) - z) ** 2 / (2 * np.pi)
        ref, _ = quad(kern, alpha, beta, epsabs=1e-13, epsrel=1e-13, limit=200)
        assert float(poisson_arc(alpha, beta, z)) == pytest.approx(ref, abs=1e-10)


def test_poisson_arc_full_circle_and_extension():
    z = np.array([0, 0.3 + 0.4j, -0.7j])
    assert np.allclose(poisson_arc(0.0, 2 * np.pi, z), 1.0, atol=1e-14)
    grid = QuadratureGrid(4096)
    samples = np.real(grid.nodes ** 3)
    assert np.allclose(poisson_extension(samples, z, grid), np.real(z ** 3), atol=1e-12)


@pytest.mark.parametrize("text", ["power(2)", "identity", "blaschke(0.5, -0.3i)"])
def test_pullback_of_inner_is_lebesgue(text):
    rep = pullback_density(parse_symbol(text), n_arcs=32, grid=QuadratureGrid(2 ** 14))
    assert rep.status == "ok"
    assert np.sum(rep.nu) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(rep.density - 1)) < 6 * np.max(rep.density_stderr) + 0.02
    assert rep.F_measure == 1.0


def test_pullback_empty_for_tangential_contact():
    rep = pullback_density(parse_symbol("half_plus"), n_arcs=32, grid=QuadratureGrid(2 ** 14))
    assert rep.status.startswith("empty")
    assert rep.F_measure == 0
    assert np.all(np.isfinite(rep.density))


def test_pullback_absolutely_continuous_bound():
    # nu(arc) <= m(E) so every density is at most n_arcs
    rep = pullback_density(parse_symbol("power(3)"), n_arcs=16, grid=QuadratureGrid(2 ** 12))
    assert np.all(rep.density <= 16 + 1e-12)
    assert np.all(rep.nu >= 0)


def test_pullback_requires_centered_symbol_without_normalisation():
    with pytest.raises(PreconditionError):
        pullback_density(parse_symbol("half_plus"), normalize=False)


def test_lower_bound_check_passes_for_inner():
    phi = parse_symbol("power(2)")
    rep = pullback_density(phi, n_arcs=32, grid=QuadratureGrid(2 ** 12))
    for p in (1, 2, 4):
        chk = pullback_lower_bound_check(phi, lambda xi: 1 + xi, p, rep)
        assert chk.passed and chk.lhs >= chk.rhs


def test_lower_bound_check_rejects_support_leak():
    phi = parse_symbol("power(2)")
    rep = pullback_density(phi, n_arcs=32, grid=QuadratureGrid(2 ** 12), delta=2.0)
    assert rep.F_measure == 0
    with pytest.raises(PreconditionError):
        pullback_lower_bound_check(phi, lambda xi: 1 + xi, 2, rep)
    chk = pullback_lower_bound_check(phi, lambda xi: 0 * xi, 2, rep)
    assert chk.passed
