import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardycomp.exceptions import (BoundaryTraceError, ParameterRangeError, SelfMapError,
                                  SymbolSyntaxError)
from hardycomp.symbol import (GALLERY, Symbol, boundary_trace, center_at_origin, compose,
                              make_symbol, parse_node, parse_symbol, rotate)

BUILTINS = GALLERY + ("power(3)", "dilation(0.9)", "const(0.3+0.2i)", "poly(0, 0.5, 0.5)",
                      "blaschke(0.5, -0.3i)", "compose(power(2), mobius(0.5))")


@pytest.mark.parametrize("text", BUILTINS)
def test_builtins_validate(text):
    phi = parse_symbol(text)
    assert phi.boundary_max <= 1 + 1e-9


def test_identity_and_half_plus():
    z = np.array([0.1 + 0.2j, -0.5, 0.3j])
    assert np.allclose(parse_symbol("identity")(z), z)
    assert np.allclose(parse_symbol("half_plus")(z), (1 + z) / 2)


def test_composition_order():
    phi = parse_symbol("compose(power(2), mobius(0.5))")
    z = 0.3 - 0.1j
    s = (0.5 - z) / (1 - 0.5 * z)
    assert phi(z) == pytest.approx(s ** 2, abs=1e-15)


@pytest.mark.parametrize("text,z,expected", [
    ("half_plus", 1, 1), ("power(2)", 1j, -1), ("dilation(0.5)", 0.8, 0.4)])
def test_eval_examples(text, z, expected):
    assert parse_symbol(text)(z) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("text,theta,expected", [
    ("half_plus", 0.0, 1.0), ("power(3)", np.pi, -1.0),
    ("dilation(0.9)", 1.3, 0.9 * np.exp(1.3j))])
def test_boundary_trace_examples(text, theta, expected):
    assert boundary_trace(parse_symbol(text), theta) == pytest.approx(expected, abs=1e-14)


def test_boundary_trace_ladder_path():
    # an unflagged symbol goes through the radial ladder
    node = parse_node("half_plus")
    phi = Symbol(node, closed_disk=False)
    assert boundary_trace(phi, 0.7) == pytest.approx((1 + np.exp(0.7j)) / 2, abs=1e-6)
    curved = Symbol(parse_node("power(5)"), closed_disk=False)
    with pytest.raises(BoundaryTraceError):
        boundary_trace(curved, 0.7, ladder=[0.5, 0.6, 0.7])
    with pytest.raises(BoundaryTraceError):
        phi(np.exp(0.7j))


def test_outside_disk_rejected():
    with pytest.raises(ValueError):
        parse_symbol("identity")(1.5)


@pytest.mark.parametrize("text,pos", [("powr(2)", 0), ("power(2", 7), ("power(2.5)", 6),
                                      ("compose(identity identity)", 17), ("identity)", 8),
                                      ("mobius(0.5+i)", 10)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(SymbolSyntaxError) as err:
        parse_symbol(text)
    assert err.value.position == pos
    assert f"position {pos}" in str(err.value)


@pytest.mark.parametrize("text", ["mobius(1.0)", "mobius(0.8+0.8i)", "blaschke(0.5, 1.2)",
                                  "dilation(1.5)", "const(1)", "power(-1)"])
def test_parameter_range(text):
    with pytest.raises(ParameterRangeError):
        parse_symbol(text)


def test_selfmap_violation():
    with pytest.raises(SelfMapError):
        parse_symbol("poly(0, 0.8, 0.8)")


def test_complex_literals():
    assert parse_symbol("const(0.3-0.2i)")(0) == pytest.approx(0.3 - 0.2j)
    assert parse_symbol("const(0.4i)")(0) == pytest.approx(0.4j)
    assert parse_symbol("mobius(-.25e0)")(0) == pytest.approx(-0.25)


def test_constant_flag():
    assert not parse_symbol("const(0.3)").nonconstant
    assert parse_symbol("half_plus").nonconstant


def test_text_roundtrip():
    for text in BUILTINS:
        phi = parse_symbol(text)
        again = parse_symbol(phi.text)
        z = np.array([0.1, -0.4 + 0.3j, 0.7j])
        assert np.allclose(phi(z), again(z), atol=1e-14)


def test_rational_matches_eval():
    phi = parse_symbol("compose(blaschke(0.3, -0.2+0.1i), compose(half_plus, mobius(0.4i)))")
    num, den = phi.rational()
    z = np.array([0.2 + 0.1j, -0.6j, 0.9])
    assert np.allclose(np.polyval(num[::-1], z) / np.polyval(den[::-1], z), phi(z), atol=1e-13)
    assert phi.degree == 2


def test_rotation_normalises_contact_point():
    # half_plus touches the circle at 1 with image 1; rotate the image to i and back
    phi = rotate(parse_symbol("half_plus"), np.pi / 2)
    assert boundary_trace(phi, 0.0) == pytest.approx(1j, abs=1e-15)
    back = rotate(phi, -np.pi / 2)
    assert boundary_trace(back, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_center_at_origin():
    phi = center_at_origin(parse_symbol("half_plus"))
    assert abs(phi(0)) < 1e-15


points = st.tuples(st.floats(0, 0.999), st.floats(0, 2 * np.pi)).map(
    lambda rt: rt[0] * np.exp(1j * rt[1]))


@settings(max_examples=50, deadline=None)
@given(st.lists(points, min_size=20, max_size=20))
def test_composition_consistency(zs):
    f = parse_symbol("blaschke(0.5, -0.3i)")
    g = parse_symbol("compose(half_plus, power(3))")
    fg = compose(f, g)
    z = np.array(zs)
    assert np.allclose(fg(z), f(g(z)), atol=1e-12)


def test_composition_consistency_thousand_points():
    rng = np.random.default_rng(5)
    z = np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000)) * 0.999
    f, g = parse_symbol("mobius(0.3-0.4i)"), parse_symbol("poly(0.1, 0.5, 0.3i)")
    assert np.max(np.abs(compose(f, g)(z) - f(g(z)))) < 1e-12


def test_make_symbol_constant_outside_rejected():
    from hardycomp.symbol import Constant
    with pytest.raises(SelfMapError):
        make_symbol(Constant(1.2))
