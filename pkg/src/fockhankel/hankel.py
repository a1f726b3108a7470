"""Finite sections of Hankel operators H_f = (I - P) M_f on F^2_phi.

Columns k = 0..N index the domain monomials e_k, rows m = 0..M the range
monomials used to compute P(f e_k).  With

    A[m, k] = <f e_k, e_m>,    B[j, k] = <f e_k, f e_j>,

the Gram matrix of the vectors H_f e_k is B - A^H A, whose eigenvalues are
the squared singular values of the finite section.

For a single-frequency symbol f = e^{i nu t} g(rho) the product f e_k has
frequency k + nu, so P(f e_k) is a multiple of e_{k+nu} and H_f^* H_f is
diagonal; :func:`single_frequency_spectrum` evaluates it mode by mode with
one-dimensional radial quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NumericalInconsistencyError, TruncationError
from .quadrature import radial_window_rule
from .spectra import HermitianMatrix, SingularSpectrum, singular_values_from_normal

_TWO_PI = 2.0 * math.pi
# relative size below which ||H_f e_k|| cannot be told apart from rounding
_RESOLUTION = 16 * np.finfo(float).eps


def default_M(symbol, N):
    sf = symbol.single_frequency()
    nu = abs(sf[0]) if sf else 0
    return N + 16 + max(nu, symbol.degree)


@dataclass(eq=False)
class HankelModel:
    """Truncation (N, M) of H_f for a symbol on a Fock basis."""

    basis: object
    symbol: object
    N: int
    M: int | None = None
    grid: object = None

    def __post_init__(self):
        if self.M is None:
            self.M = default_M(self.symbol, self.N)
        if self.M < self.N:
            raise TruncationError(f"need M >= N, got N={self.N}, M={self.M}")
        k_max = max(self.M, self.N + self.symbol.degree)
        if self.grid is None:
            sf = self.symbol.single_frequency()
            spread = self.M + self.N + 2 * self.symbol.degree + 1
            floor = 64 if (sf is not None or hasattr(self.symbol, "coeffs")) else 256
            n_theta = max(floor, 1 << spread.bit_length())
            self.grid = self.basis.plane_grid(
                k_max, n_theta=n_theta, breaks=self.symbol.break_circles()
            )
        elif self.grid.domain.rho_max < self.basis.plane_radius(k_max) - 1e-9:
            raise TruncationError("grid does not cover the plane radius of the basis")

    @cached_property
    def _columns(self):
        pts, wts = self.grid.points, self.grid.weights
        E = self.basis.weighted_basis(np.arange(self.M + 1), pts)
        F = np.asarray(self.symbol(pts), dtype=complex) * np.ones(pts.shape)
        FE = F * E[: self.N + 1]
        return E, FE, wts

    @cached_property
    def cross(self):
        E, FE, wts = self._columns
        return (E.conj() * wts) @ FE.T

    @cached_property
    def gram(self):
        _, FE, wts = self._columns
        B = (FE.conj() * wts) @ FE.T
        return 0.5 * (B + B.conj().T)

    @cached_property
    def residuals(self):
        """Rows f e_k - sum_m A[m, k] e_m (times exp(-phi)) at the nodes."""
        E, FE, _ = self._columns
        return FE - self.cross.T @ E


def cross_matrix(model, fast=False):
    """A[m, k] = <f e_k, e_m>, shape (M+1, N+1).

    With ``fast=True`` and a single-frequency symbol only the diagonal
    m = k + nu is computed, by radial quadrature.
    """
    if fast:
        sf = model.symbol.single_frequency()
        if sf is None:
            raise ValueError("fast path needs a single-frequency symbol")
        nu, g = sf
        A = np.zeros((model.M + 1, model.N + 1), dtype=complex)
        for k in range(model.N + 1):
            if 0 <= k + nu <= model.M:
                A[k + nu, k] = _mode(model.basis, nu, g, k)[0]
        return A
    return model.cross


def gram_matrix(model):
    """B[j, k] = <f e_k, f e_j>, Hermitian (N+1) x (N+1)."""
    return model.gram


def normal_matrix(model, check=True):
    """The truncated H_f^* H_f, equal to B - A^H A.

    It is assembled as the Gram matrix of the residual columns
    ``f e_k - P_M(f e_k)``; with an orthonormal discrete basis this is
    algebraically B - A^H A, but it avoids the cancellation of two O(|f|^2)
    terms when H_f is small.  With ``check`` the subtraction form is
    compared against it as a consistency test.
    """
    R, wts = model.residuals, model._columns[2]
    H = (R.conj() * wts) @ R.T
    H = 0.5 * (H + H.conj().T)
    if check and H.size:
        A = model.cross
        alt = model.gram - A.conj().T @ A
        defect = np.abs(alt - H).max()
        scale = max(1.0, float(np.abs(np.diagonal(model.gram)).max()))
        if defect > 1e-8 * scale:
            raise NumericalInconsistencyError(
                f"B - A^H A differs from the residual Gram matrix by {defect:.2e}; "
                "the quadrature does not resolve the basis"
            )
    return H


def dense_spectrum(model):
    """Sorted singular values of the finite section via the Jacobi solver."""
    return singular_values_from_normal(
        HermitianMatrix(normal_matrix(model)), N=model.N, M=model.M
    )


def hs_norm_direct(model):
    """Hilbert-Schmidt norm of the finite section, sqrt(trace(B - A^H A)).

    The trace is summed from the residual columns, not by subtraction.
    """
    R, wts = model.residuals, model._columns[2]
    return math.sqrt(float(np.sum(wts * np.abs(R) ** 2)))


def _mode(basis, nu, g, k):
    """(<f e_k, e_{k+nu}>, ||H_f e_k||^2) for f = e^{i nu t} g(rho).

    The squared norm is integrated as the residual |f e_k - beta e_{k+nu}|^2
    rather than as ||f e_k||^2 - |beta|^2, avoiding cancellation when the
    projection captures almost all of f e_k; an error in beta then enters
    only quadratically.
    """
    weight = basis.weight
    j = k + nu
    if j > basis.n_max:
        raise TruncationError(f"mode {k} maps to index {j} beyond n_max={basis.n_max}")
    lck = basis.log_norms[k]
    lcj = basis.log_norms[j] if j >= 0 else None

    def env(rho):
        lr = np.log(rho)
        ph = 2 * weight.phi(rho)
        with np.errstate(divide="ignore"):
            e = 2 * np.log(np.abs(g(rho))) + (2 * k + 1) * lr - ph - lck
        if lcj is not None:
            e = np.maximum(e, (2 * j + 1) * lr - ph - lcj)
        return e

    start = math.sqrt((2 * max(k, j) + 4) / weight.m) + 10 / math.sqrt(weight.m)
    x, w = radial_window_rule(env, g.break_radii, start_radius=start)
    if x.size == 0:
        return 0.0, 0.0
    lr = np.log(x)
    ph = weight.phi(x)
    gx = g(x)
    if lcj is None:
        beta = 0.0
        s2 = _TWO_PI * float(np.sum(w * x * np.abs(gx * np.exp(k * lr - ph - 0.5 * lck)) ** 2))
    else:
        # f e_k = ratio * e_{k+nu} pointwise; one exponential keeps the
        # residual ratio - beta free of independent rounding in two terms
        u2sq = x * np.exp(2 * (j * lr - ph) - lcj)
        ratio = gx * np.exp(-nu * lr + 0.5 * (lcj - lck))
        # projecting on the quadrature-normalised e_{k+nu} makes the residual
        # insensitive to the absolute rounding of large log-norms
        mass = np.sum(w * u2sq)
        beta = np.sum(w * u2sq * ratio) / mass
        s2 = _TWO_PI * float(np.sum(w * u2sq * np.abs(ratio - beta) ** 2))
        norm2 = _TWO_PI * float(np.sum(w * u2sq * np.abs(ratio) ** 2))
        if s2 <= (_RESOLUTION**2) * norm2:
            s2 = 0.0
    beta = complex(beta) if np.iscomplexobj(beta) else float(beta)
    return beta, s2


def single_frequency_spectrum(nu, g, basis, K):
    """Mode-indexed singular values s_k, k = 0..K, of H_f for f = e^{i nu t} g.

    ``g`` is a radial profile (callable with ``break_radii``).  The returned
    spectrum keeps both the sorted values and the mode-indexed sequence.
    """
    if K + nu > basis.n_max:
        raise TruncationError(f"K + nu = {K + nu} exceeds n_max={basis.n_max}")
    s2 = np.array([_mode(basis, nu, g, k)[1] for k in range(K + 1)])
    return SingularSpectrum.from_modes(np.sqrt(s2), nu=nu, K=K, weight=basis.weight.label)


def symbol_spectrum(symbol, basis, K):
    """Closed-form path for a symbol whose single-frequency form is known."""
    sf = symbol.single_frequency()
    if sf is None:
        raise ValueError(f"{symbol} is not a single-frequency symbol")
    return single_frequency_spectrum(sf[0], sf[1], basis, K)
