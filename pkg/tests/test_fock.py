import math

import numpy as np
import pytest
from scipy import integrate

from fockhankel import FockBasis, RadialWeight, log_monomial_norm, monomial_norm, parse_symbol
from fockhankel.errors import InvalidWeightError, TruncationError


def test_monomial_norm_examples():
    cl = RadialWeight.classical()
    assert abs(monomial_norm(cl, 0) - math.pi) < 1e-13
    assert abs(monomial_norm(cl, 2) - 2 * math.pi) < 1e-13
    assert abs(monomial_norm(RadialWeight.gaussian(1.0), 0) - math.pi / 2) < 1e-13


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.3])
def test_gaussian_norms_match_quadrature_oracle(alpha):
    w = RadialWeight.gaussian(alpha)
    for k in (0, 1, 5, 17):
        ref, _ = integrate.quad(lambda r: 2 * math.pi * r ** (2 * k + 1) * math.exp(-2 * alpha * r * r),
                                0, np.inf, epsrel=1e-13)
        assert abs(monomial_norm(w, k) / ref - 1) < 1e-10


def test_log_norm_ratio():
    w = RadialWeight.gaussian(0.7)
    for k in (0, 10, 500, 3000):
        d = log_monomial_norm(w, k + 1) - log_monomial_norm(w, k)
        assert abs(d - math.log((k + 1) / 1.4)) < 1e-12 * max(1, abs(d)) + 1e-12


def test_large_k_finite_in_log_domain():
    b = FockBasis.classical(4096)
    assert np.all(np.isfinite(b.log_norms))
    assert math.isinf(monomial_norm(RadialWeight.classical(), 400))


def test_custom_weight_matches_gaussian():
    custom = RadialWeight.custom(lambda r: 0.5 * np.square(r), lambda r: np.full(np.shape(r), 2.0), 2.0, 2.0)
    cl = RadialWeight.classical()
    for k in (0, 3, 40, 200):
        assert abs(log_monomial_norm(custom, k) - log_monomial_norm(cl, k)) < 1e-10


def test_custom_weight_nonquadratic_oracle():
    # phi = rho^2/2 + log(1 + rho^2)/4 has Laplacian 2 + 1/(1+rho^2)^2 in [2, 3]
    phi = lambda r: 0.5 * np.square(r) + 0.25 * np.log1p(np.square(r))
    lap = lambda r: 2 + 1 / (1 + np.square(r)) ** 2
    w = RadialWeight.custom(phi, lap, 2.0, 3.0)
    for k in (0, 4):
        ref, _ = integrate.quad(lambda r: 2 * math.pi * r ** (2 * k + 1) * math.exp(-2 * phi(r)), 0, np.inf,
                                epsrel=1e-13)
        assert abs(monomial_norm(w, k) / ref - 1) < 1e-10


def test_invalid_weights():
    with pytest.raises(InvalidWeightError):
        RadialWeight.gaussian(0)
    with pytest.raises(InvalidWeightError):
        RadialWeight.custom(lambda r: r**2, lambda r: np.full(np.shape(r), 4.0), 1.0, 2.0)
    with pytest.raises(InvalidWeightError):
        RadialWeight.custom(lambda r: r**2, lambda r: 4 + 0 * r, 3.0, 1.0)


def test_basis_eval_examples():
    b = FockBasis.classical(20)
    assert abs(b.eval(0, 3 + 4j) - 1 / math.sqrt(math.pi)) < 1e-15
    assert b.eval(5, 0) == 0
    assert abs(b.eval(1, 1) - 1 / math.sqrt(math.pi)) < 1e-15
    with pytest.raises(TruncationError):
        b.eval(21, 1)


def test_kernel_examples():
    b = FockBasis.classical(80)
    assert abs(b.kernel_eval(0, 0, 10) - 1 / math.pi) < 1e-15
    assert abs(b.kernel_eval(1, 1, 60) - math.e / math.pi) < 1e-12
    assert abs(b.kernel_eval(2 - 1j, 0, 30) - 1 / math.pi) < 1e-15
    w, z = 0.4 + 1.1j, -0.7 + 0.2j
    assert abs(b.kernel_eval(w, z, 80) - np.exp(w * np.conj(z)) / math.pi) < 1e-12


def test_gram_identity():
    b = FockBasis.classical(40)
    assert np.abs(b.gram(40) - np.eye(41)).max() <= 1e-9
    b = FockBasis(RadialWeight.gaussian(1.5), 30)
    assert np.abs(b.gram(30) - np.eye(31)).max() <= 1e-9


def test_project_coeffs_examples():
    b = FockBasis.classical(30)
    c = b.project_coeffs(lambda z: z**3 / math.sqrt(6 * math.pi), 10)  # e_3, c_3 = 3! pi
    expected = np.zeros(11)
    expected[3] = 1
    assert np.abs(c - expected).max() < 1e-9
    c = b.project_coeffs(parse_symbol("xia"), 10, grid=b.plane_grid(10, breaks=((0j, 1.0),)))
    assert np.abs(c).max() <= 1e-12
    c = b.project_coeffs(lambda z: np.abs(z) ** 2, 5)
    assert abs(c[0] - math.sqrt(math.pi)) < 1e-10


def test_project_coeffs_linear():
    b = FockBasis.classical(20)
    f = lambda z: np.exp(-np.abs(z - 1) ** 2) * z
    g = lambda z: np.conj(z) ** 2
    lhs = b.project_coeffs(lambda z: 2 * f(z) - 1j * g(z), 12)
    rhs = 2 * b.project_coeffs(f, 12) - 1j * b.project_coeffs(g, 12)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_kernel_reproducing_truncated():
    b = FockBasis.classical(60)
    z = 0.6 - 0.3j
    terms = 40
    c = b.project_coeffs(lambda w: np.array([b.kernel_eval(x, z, terms) for x in w]), terms - 5,
                         grid=b.plane_grid(terms, n_theta=128))
    ref = np.conj([b.eval(k, z) for k in range(terms - 4)])
    assert np.abs(c - ref).max() < 1e-8


def test_weighted_radial_no_warnings():
    b = FockBasis.classical(10)
    with np.errstate(divide="raise", invalid="raise", over="raise"):
        vals = b.weighted_radial(np.arange(4), np.array([0.0, 1.0, 40.0]))
    assert vals[0, 0] > 0 and vals[1, 0] == 0 and np.all(vals[:, 2] < 1e-300)
