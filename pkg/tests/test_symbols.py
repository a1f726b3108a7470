
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockhankel import parse_symbol, translated, xia
from fockhankel.errors import SymbolParseError, UnsupportedSymbolError
from fockhankel.symbols import Conjugate, Indicator, Polynomial, SingleFrequency, frequency_of


def test_parse_examples():
    f = parse_symbol("xia")
    nu, g = f.single_frequency()
    assert nu == -1 and g.tag == "invr_outside" and g.param == 1
    nu, g2 = parse_symbol("conj(xia)").single_frequency()
    assert nu == 1 and g2.tag == g.tag and g2.param == g.param
    z = parse_symbol("poly(0,1)")
    assert isinstance(z, Polynomial) and not z.bounded and z.degree == 1


def test_eval_examples():
    f = xia()
    assert f(2.0) == pytest.approx(0.5, abs=1e-15)
    assert f(0.5) == 0
    assert f(1.0) == 1.0  # closed cut
    assert parse_symbol("conj(poly(0,1))")(1j) == -1j


def test_frequency_examples():
    assert frequency_of(parse_symbol("xia")) == -1
    assert frequency_of(parse_symbol("conj(xia)")) == 1
    assert frequency_of(parse_symbol("poly(0,0,1)")) == 2
    assert frequency_of(parse_symbol("poly(1,1)")) is None
    assert frequency_of(parse_symbol("indicator(2)")) == 0


@pytest.mark.parametrize("text", [
    "xia", "conj(xia)", "poly(0,1)", "poly(1,2-1i,0.5i,-3)", "conj(poly(0,1))",
    "radial(nu=3, g=power(0.5))", "radial(nu=-2, g=invr_outside(2.5))",
    "radial(nu=0, g=indicator(1))", "indicator(1.25)", "conj(conj(xia))",
])
def test_round_trip(text):
    f = parse_symbol(text)
    g = parse_symbol(f.text())
    assert g.text() == f.text()
    z = np.array([0.3 + 0.1j, -2 + 1j, 1.7j, 3.3])
    np.testing.assert_array_equal(f(z), g(z))


@pytest.mark.parametrize("text,pos", [("xiaa", 3), ("poly(1,)", 7), ("conj(xia", 8), ("foo", 0),
                                      ("radial(nu=x, g=power(1))", 10)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(SymbolParseError) as exc:
        parse_symbol(text)
    assert exc.value.position == pos


def test_unsupported():
    with pytest.raises(UnsupportedSymbolError):
        parse_symbol("radial(nu=1, g=bogus(1))")
    with pytest.raises(UnsupportedSymbolError):
        parse_symbol("indicator(-1)")


def test_complex_literals():
    f = parse_symbol("poly(1.5, -2i, i, 3-i, 1e-3+2.5e1i)")
    assert f.coeffs == (1.5, -2j, 1j, 3 - 1j, 1e-3 + 25j)


def test_single_frequency_structure():
    rng = np.random.default_rng(3)
    rho = rng.uniform(0.1, 4, 50)
    th = rng.uniform(-np.pi, np.pi, 50)
    z = rho * np.exp(1j * th)
    for text in ("xia", "conj(xia)", "radial(nu=3, g=power(1.5))", "poly(0,0,2)", "indicator(2)"):
        f = parse_symbol(text)
        nu, g = f.single_frequency()
        np.testing.assert_allclose(f(z), np.exp(1j * nu * th) * g(rho), rtol=1e-13, atol=1e-15)
        assert np.abs((f(z) * np.exp(-1j * nu * th)).imag).max() < 1e-13


complex_pts = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(z=complex_pts)
def test_conjugation_pointwise(z):
    for text in ("xia", "poly(1,2-1i,0.5i)", "radial(nu=2, g=power(0.5))", "indicator(1.5)"):
        f = parse_symbol(text)
        assert Conjugate(f)(z) == np.conj(f(z))
        np.testing.assert_array_equal(Conjugate(Conjugate(f))(z), f(z))


@settings(max_examples=60, deadline=None)
@given(coeffs=st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
                       min_size=1, max_size=5))
def test_polynomial_round_trip_property(coeffs):
    f = Polynomial(tuple(coeffs))
    g = parse_symbol(f.text())
    assert g.coeffs == f.coeffs


def test_eval_total_and_finite():
    z = np.array([0, 1e-300, 1, -1, 1e6j])
    for text in ("xia", "conj(xia)", "radial(nu=-2, g=invr_outside(0.5))", "indicator(1)"):
        assert np.all(np.isfinite(parse_symbol(text)(z)))


def test_break_circles_and_translation():
    f = xia()
    assert f.break_circles() == ((0j, 1.0),)
    assert Indicator(2.0).break_circles() == ((0j, 2.0),)
    assert parse_symbol("poly(1,1)").break_circles() == ()
    t = translated(f, 2 + 1j)
    assert t.break_circles() == ((-2 - 1j, 1.0),)
    w = np.array([0.1, -2 - 1j + 1.5, 3j])
    np.testing.assert_array_equal(t(w), f(w + 2 + 1j))


def test_symbols_are_immutable():
    f = SingleFrequency(-1, xia().g)
    with pytest.raises(Exception):
        f.nu = 2
