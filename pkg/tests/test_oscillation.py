import math

import numpy as np
import pytest
from scipy import integrate

from fockhankel import (
    FockBasis,
    OscillationParams,
    bmo_sup,
    compactness_probe,
    g_functional,
    ida_norm,
    imo_norm,
    lattice_points,
    mean_avg,
    mo,
    parse_symbol,
)
from fockhankel.errors import NumericalInconsistencyError
from fockhankel.symbols import General

XIA = parse_symbol("xia")
CXIA = parse_symbol("conj(xia)")
Z = parse_symbol("poly(0,1)")
ZBAR = parse_symbol("conj(poly(0,1))")
ABS2 = General(lambda w: np.abs(w) ** 2, (), False, "|w|^2")
ONE = parse_symbol("poly(1)")


def test_mean_avg_examples():
    for z in (0, 1.3 - 0.4j, 7j):
        assert abs(mean_avg(Z, z) - z) < 1e-10
    assert abs(mean_avg(ABS2, 0) - 0.5) < 1e-14
    assert abs(mean_avg(ONE, 2 + 2j, r=0.3) - 1) < 1e-14


def test_mo_examples():
    assert mo(parse_symbol("poly(2-1i)"), 1j) < 1e-14
    assert abs(mo(parse_symbol("poly(0,0,1)"), 0) - math.sqrt(1 / 3)) < 1e-12


def test_mo_conj_xia_against_radial_oracle():
    # MO^2 = avg |1/w|^2 - |avg 1/w|^2 on B(z, 1) with |z| > 2, and avg 1/w = 1/z
    for x in (2.5, 4.0, 9.0):
        num, _ = integrate.dblquad(lambda r, t: r / abs(x + r * np.exp(1j * t)) ** 2, 0, 2 * math.pi, 0, 1,
                                   epsabs=1e-14, epsrel=1e-13)
        ref = math.sqrt(num / math.pi - 1 / x**2)
        assert abs(mo(CXIA, x) - ref) < 1e-10
    Z2 = 16.0
    assert abs(mo(CXIA, 4) - math.sqrt(math.log(Z2 / (Z2 - 1)) - 1 / Z2)) < 1e-12


def test_g_examples():
    assert g_functional(parse_symbol("poly(1,2,-1i,0.5)"), 0.3 + 2j, D=5) < 1e-12
    assert g_functional(XIA, 0) == 0
    assert g_functional(XIA, 3, D=20) <= 1e-8
    for z in (0, 1 + 1j, -4):
        assert abs(g_functional(ZBAR, z) - 1 / math.sqrt(2)) < 1e-12


def test_g_matches_orthogonal_expansion():
    # G^2 = avg|f|^2 - sum_j (j+1)|b_j|^2 r^{-2j} with b_j = avg f conj((w-z)^j)
    f, z, r, D = parse_symbol("indicator(1.2)"), 0.5 + 0.5j, 1.0, 8
    from fockhankel.quadrature import PolarGrid, disk

    grid = PolarGrid(gauss_order=40, n_theta=256).with_domain(disk(z, r), f.break_circles())
    pts, w = grid.points, grid.weights / (math.pi * r * r)
    vals = f(pts)
    g2 = np.sum(w * np.abs(vals) ** 2)
    for j in range(D + 1):
        b = np.sum(w * vals * np.conj(pts - z) ** j)
        g2 -= (j + 1) * abs(b) ** 2 / r ** (2 * j)
    assert abs(g_functional(f, z, r, D=D) - math.sqrt(g2)) < 1e-8


def test_g_monotone_in_D():
    for f, z in ((XIA, 1.2), (parse_symbol("indicator(1.5)"), 1 + 0.5j), (CXIA, 0.7j)):
        vals = [g_functional(f, z, D=D) for D in (0, 2, 5, 10, 20)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_g_stable_in_D_for_holomorphic():
    for z in (2.5, 3j, -5 + 1j):
        assert abs(g_functional(XIA, z, D=20) - g_functional(XIA, z, D=25)) < 1e-9


def test_scaling_and_shift():
    rng = np.random.default_rng(5)
    for f in (XIA, CXIA, parse_symbol("indicator(1)")):
        for _ in range(3):
            z = complex(*rng.uniform(-2, 2, 2))
            c = complex(*rng.normal(size=2))
            cf = General(lambda w, f=f, c=c: c * f(w), f.break_circles())
            assert abs(g_functional(cf, z) - abs(c) * g_functional(f, z)) < 1e-10
            assert abs(mo(cf, z) - abs(c) * mo(f, z)) < 1e-10
            h = General(lambda w, f=f: f(w) + 1 - 2j * w + w**3, f.break_circles())
            assert abs(g_functional(h, z) - g_functional(f, z)) < 1e-9


def test_holomorphic_identities():
    f = parse_symbol("poly(1,-1i,0.5,0.2+0.1i)")
    df = np.polynomial.polynomial.polyder(np.array(f.coeffs))
    f2 = General(lambda w: np.abs(f(w)) ** 2)
    for z in (0, 1 - 1j, 2.5j):
        m = mo(f, z)
        assert m >= abs(np.polynomial.polynomial.polyval(z, df)) / math.sqrt(2) - 1e-12
        assert abs(m**2 - (mean_avg(f2, z).real - abs(f(z)) ** 2)) < 1e-9


def test_irls_q1_and_q4():
    val, ok, _ = g_functional(ZBAR, 0.5, q=1.0, full_output=True)
    assert ok
    # conj(u) is orthogonal to holomorphic functions; h = 0 stays optimal and
    # G_1 = avg |u| = 2/3
    assert abs(val - 2 / 3) < 1e-6
    val4 = g_functional(ZBAR, 0.0, q=4.0)
    assert abs(val4 - (1 / 3) ** 0.25) < 1e-6
    _, ok, it = g_functional(XIA, 1.0, q=1.5, max_iter=2, full_output=True)
    assert not ok and it == 2


def test_lattice_points():
    pts = lattice_points(0.5, 2.0)
    assert pts[0] == 0
    assert np.all(np.diff(np.round(np.abs(pts), 12)) >= 0)
    assert len(pts) == sum(1 for i in range(-4, 5) for j in range(-4, 5) if i * i + j * j <= 16)


def test_params_validation():
    with pytest.raises(ValueError):
        OscillationParams(r=0)
    with pytest.raises(ValueError):
        OscillationParams(D=-1)
    assert OscillationParams(R_max=10).aggregation_radii() == (1.0, 2.0, 4.0, 8.0, 10.0)


def test_ida_examples():
    zbar = ida_norm(ZBAR, OscillationParams(D=5, R_max=6))
    assert zbar.diverging
    aggs = [a for _, a in zbar.partial_aggregates]
    assert all(b > a for a, b in zip(aggs, aggs[1:]))
    zero = ida_norm(parse_symbol("poly(0)"), OscillationParams(D=3, R_max=3))
    assert zero.norm == 0 and not zero.diverging


def test_imo_constant_and_report_invariants():
    rep = imo_norm(ONE, OscillationParams(R_max=3))
    assert rep.norm == 0
    rep = imo_norm(XIA, OscillationParams(R_max=4, s=2))
    assert np.all(rep.values >= 0)
    aggs = [a for _, a in rep.partial_aggregates]
    assert aggs == sorted(aggs)


def test_imo_p2_tail_bound():
    params = OscillationParams(s=2.0, R_max=16, radii=(8.0, 16.0))
    rep = imo_norm(CXIA, params)
    tail = math.pi / (2 * 8**2) - math.pi / (2 * 16**2)
    assert abs(rep.increments[-1] - tail) < 0.3 * tail


def test_bmo_examples():
    sup, growth = bmo_sup(parse_symbol("poly(0,0,1)"), OscillationParams(R_max=8))
    assert growth and sup > 10
    sup, growth, rings, where = bmo_sup(XIA, OscillationParams(R_max=8), full_output=True)
    assert not growth and 0.5 <= abs(where) <= 1.5
    assert bmo_sup(ONE, OscillationParams(R_max=4)) == (0.0, False)


def test_threads_deterministic():
    a = imo_norm(XIA, OscillationParams(R_max=3, threads=4))
    b = imo_norm(XIA, OscillationParams(R_max=3, threads=1))
    np.testing.assert_array_equal(a.values, b.values)
    assert a.partial_aggregates == b.partial_aggregates


def test_independence_of_r_probe():
    # finite vs divergent verdicts should not depend on the ball radius
    for r in (0.5, 1.0, 2.0):
        rep = ida_norm(XIA, OscillationParams(r=r, D=12, delta=1.0, R_max=8, radii=(5.0, 6.5, 8.0)))
        assert not rep.diverging
        rep = imo_norm(ZBAR, OscillationParams(r=r, delta=1.0, R_max=8))
        assert rep.diverging


@pytest.fixture(scope="module")
def basis():
    return FockBasis.classical(40)


def test_probe_examples(basis):
    from scipy.special import exp1

    assert abs(compactness_probe(XIA, 0, 40, basis) - math.sqrt(math.pi * exp1(1.0))) < 1e-9
    vals = [compactness_probe(XIA, lam, 40, basis) for lam in (2, 4, 8)]
    assert vals[0] > vals[1] > vals[2]
    assert compactness_probe(parse_symbol("poly(1,1)"), 1.5 - 2j, 5, basis) <= 1e-9


def test_probe_matches_radicand_form(basis):
    # the residual integral agrees with sqrt(||F||^2 - sum |c_m|^2)
    from fockhankel.symbols import translated

    F = translated(CXIA, 2 + 1j)
    grid = basis.plane_grid(40, n_theta=256, breaks=F.break_circles())
    pts, w = grid.points, grid.weights
    vals = F(pts) * np.exp(-0.5 * np.abs(pts) ** 2)
    c = basis.project_coeffs(F, 40, grid)
    rad = np.sum(w * np.abs(vals) ** 2) - np.sum(np.abs(c) ** 2)
    assert abs(compactness_probe(CXIA, 2 + 1j, 40, basis) - math.sqrt(rad)) < 1e-7


def test_probe_inconsistency_detected(basis, monkeypatch):
    # a basis that is not orthonormal for the quadrature breaks Bessel's inequality
    original = FockBasis.weighted_basis
    monkeypatch.setattr(FockBasis, "weighted_basis", lambda self, ks, pts: 2 * original(self, ks, pts))
    with pytest.raises(NumericalInconsistencyError):
        compactness_probe(ZBAR, 1 + 1j, 10, basis)
