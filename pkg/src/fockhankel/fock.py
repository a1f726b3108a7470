"""Radial weights, the monomial orthonormal basis of F^2_phi and its kernel.

The space is L^2(C, exp(-2 phi) dv).  For a radial weight the monomials are
orthogonal, with squared norms

    c_k = 2 pi int_0^inf rho^(2k+1) exp(-2 phi(rho)) d rho,

and e_k = z^k / sqrt(c_k) is an orthonormal basis.  All norms are kept as
logarithms: c_k overflows a double near k = 170 for the classical weight.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidWeightError, TruncationError
from .quadrature import (
    DEFAULT_ORDER,
    DEFAULT_PANEL_WIDTH,
    PolarGrid,
    plane_truncated,
    radial_window_rule,
)

DEFAULT_N_MAX = 4096
_LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True, eq=False)
class RadialWeight:
    """A radial weight ``phi(|z|)`` with ``m <= Laplacian(phi) <= M``.

    Use :meth:`gaussian`, :meth:`classical` or :meth:`custom` rather than the
    constructor.
    """

    kind: str
    m: float
    M: float
    alpha: float | None = None
    phi_fn: object = None
    laplacian_fn: object = None
    label: str = ""

    @classmethod
    def gaussian(cls, alpha):
        alpha = float(alpha)
        if not alpha > 0:
            raise InvalidWeightError("gaussian weight needs alpha > 0")
        return cls("gaussian", 4 * alpha, 4 * alpha, alpha=alpha, label=f"gaussian:{alpha!r}")

    @classmethod
    def classical(cls):
        """phi = |z|^2 / 2, i.e. the measure exp(-|z|^2) dv."""
        w = cls.gaussian(0.5)
        object.__setattr__(w, "label", "classical")
        return w

    @classmethod
    def custom(cls, phi, laplacian, m, M, sample_radius=60.0, samples=2001, label="custom"):
        """Weight from callables ``phi(rho)`` and its radial Laplacian.

        The claimed bounds are checked on ``samples`` points of
        ``[0, sample_radius]``; a violation raises :class:`InvalidWeightError`.
        """
        m, M = float(m), float(M)
        if not (0 < m <= M):
            raise InvalidWeightError(f"need 0 < m <= M, got m={m}, M={M}")
        rho = np.linspace(0.0, sample_radius, samples)
        lap = np.asarray(laplacian(rho), dtype=float) * np.ones_like(rho)
        val = np.asarray(phi(rho), dtype=float) * np.ones_like(rho)
        if not (np.all(np.isfinite(lap)) and np.all(np.isfinite(val))):
            raise InvalidWeightError("phi or its Laplacian is not finite on the sample")
        slack = 1e-9 * max(1.0, M)
        if lap.min() < m - slack or lap.max() > M + slack:
            raise InvalidWeightError(
                f"Laplacian range [{lap.min():.6g}, {lap.max():.6g}] "
                f"violates claimed bounds [{m}, {M}]"
            )
        return cls("custom", m, M, phi_fn=phi, laplacian_fn=laplacian, label=label)

    def phi(self, rho):
        if self.kind == "gaussian":
            return self.alpha * np.square(rho)
        return self.phi_fn(rho)

    def laplacian(self, rho):
        if self.kind == "gaussian":
            return np.full(np.shape(rho), 4 * self.alpha)
        return self.laplacian_fn(rho)

    def tail_bound(self, R):
        """Bound on the mass of exp(-2 phi) outside |z| > R."""
        phi0 = float(self.phi(np.array(0.0)))
        return 2 * math.pi / self.m * math.exp(-2 * phi0 - self.m * R * R / 2)

    def default_radius(self):
        return math.sqrt(20.0 / self.m) + 2.0


def log_monomial_norm(weight, k, order=DEFAULT_ORDER, panel_width=DEFAULT_PANEL_WIDTH):
    """``log c_k`` for the weight; closed form for gaussian weights."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if weight.kind == "gaussian":
        return math.log(math.pi) + math.lgamma(k + 1) - (k + 1) * math.log(2 * weight.alpha)
    return _log_radial_moment(weight, 2 * k + 1, order, panel_width)


def _log_radial_moment(weight, power, order, panel_width):
    """log of 2 pi int rho^power exp(-2 phi) d rho by windowed quadrature."""

    def env(rho):
        return power * np.log(rho) - 2 * weight.phi(rho)

    start = math.sqrt((power + 1) / weight.m) + 10 / math.sqrt(weight.m)
    x, w = radial_window_rule(env, (), order, panel_width, start_radius=start)
    if x.size == 0:
        raise InvalidWeightError("weight is not integrable against monomials")
    e = env(x)
    top = e.max()
    total = float(np.sum(w * np.exp(e - top)))
    if not (math.isfinite(top) and total > 0):
        raise InvalidWeightError("weight is not integrable against monomials")
    return _LOG_2PI + top + math.log(total)


def monomial_norm(weight, k):
    """``c_k`` in linear scale (overflows to inf for large k; prefer logs)."""
    lc = log_monomial_norm(weight, k)
    return math.exp(lc) if lc < 709.0 else math.inf


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Orthonormal monomials e_k = z^k / sqrt(c_k), k = 0..n_max."""

    weight: RadialWeight
    n_max: int = DEFAULT_N_MAX
    log_norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        logs = np.array([log_monomial_norm(self.weight, k) for k in range(self.n_max + 1)])
        logs.setflags(write=False)
        object.__setattr__(self, "log_norms", logs)

    @classmethod
    def classical(cls, n_max=DEFAULT_N_MAX):
        return cls(RadialWeight.classical(), n_max)

    def _check(self, k):
        if k > self.n_max:
            raise TruncationError(f"index {k} exceeds basis truncation n_max={self.n_max}")

    def eval(self, k, z):
        """e_k(z); returns 0 when the magnitude underflows."""
        self._check(k)
        z = complex(z)
        if k == 0:
            return complex(math.exp(-0.5 * self.log_norms[0]))
        if z == 0:
            return 0j
        logmag = k * math.log(abs(z)) - 0.5 * self.log_norms[k]
        if logmag < -745:
            return 0j
        return cmath.exp(logmag + 1j * k * cmath.phase(z))

    def weighted_radial(self, ks, rho):
        """Array ``rho^k exp(-phi(rho)) / sqrt(c_k)`` of shape (len(ks), len(rho))."""
        ks = np.asarray(ks)
        if ks.size and ks.max() > self.n_max:
            self._check(int(ks.max()))
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lr = np.log(rho)
            expo = ks[:, None] * lr[None, :] - self.weight.phi(rho)[None, :] - 0.5 * self.log_norms[ks][:, None]
        # k = 0 at rho = 0 gives 0 * log 0
        expo = np.where(ks[:, None] == 0, -self.weight.phi(rho)[None, :] - 0.5 * self.log_norms[0], expo)
        return np.exp(expo)

    def weighted_basis(self, ks, points):
        """``e_k(z) exp(-phi(|z|))`` at the points, shape (len(ks), len(points))."""
        ks = np.asarray(ks)
        points = np.asarray(points, dtype=complex)
        rad = self.weighted_radial(ks, np.abs(points))
        return rad * np.exp(1j * ks[:, None] * np.angle(points)[None, :])

    def plane_radius(self, k_max, log_eps=-46.0):
        """Radius beyond which the normalised density of e_0..e_{k_max} is negligible.

        Chosen so that ``2 pi rho |e_k|^2 exp(-2 phi)`` stays below
        ``exp(log_eps)`` past the radius for every k <= k_max.
        """
        self._check(k_max)
        k = k_max
        rho = math.sqrt((2 * k + 1) / self.weight.m) + 1.0
        while True:
            ld = _LOG_2PI + (2 * k + 1) * math.log(rho) - 2 * float(self.weight.phi(np.array(rho))) - self.log_norms[k]
            if ld < log_eps:
                return rho
            rho += 0.25

    def plane_grid(self, k_max, n_theta=None, breaks=(), order=DEFAULT_ORDER,
                   panel_width=DEFAULT_PANEL_WIDTH, radius=None):
        """Polar grid on the truncated plane adequate for e_0..e_{k_max}."""
        R = self.plane_radius(k_max) if radius is None else radius
        if n_theta is None:
            n_theta = max(64, 1 << (2 * k_max + 2).bit_length())
        return PolarGrid(plane_truncated(R), order, n_theta, panel_width, tuple(breaks))

    def gram(self, N, grid=None):
        """Quadrature Gram matrix of e_0..e_N (identity up to quadrature error)."""
        grid = grid or self.plane_grid(N)
        E = self.weighted_basis(np.arange(N + 1), grid.points)
        return (E * grid.weights) @ E.conj().T

    def kernel_eval(self, w, z, terms):
        """Truncated reproducing kernel sum_{k<=terms} e_k(w) conj(e_k(z))."""
        self._check(terms)
        k = np.arange(terms + 1)
        w, z = complex(w), complex(z)
        if w == 0 or z == 0:
            return complex(math.exp(-self.log_norms[0]))
        lmag = k * (math.log(abs(w)) + math.log(abs(z))) - self.log_norms[: terms + 1]
        phase = np.exp(1j * k * (cmath.phase(w) - cmath.phase(z)))
        return complex(np.sum(np.exp(lmag) * phase))

    def project_coeffs(self, fn, M, grid=None):
        """Coefficients <fn, e_m>_phi for m = 0..M (quadrature on ``grid``)."""
        grid = grid or self.plane_grid(M)
        pts, wts = grid.points, grid.weights
        vals = np.asarray(fn(pts), dtype=complex) * np.ones(pts.shape)
        vals = vals * np.exp(-self.weight.phi(np.abs(pts)))
        E = self.weighted_basis(np.arange(M + 1), pts)
        return E.conj() @ (wts * vals)


__all__ = [
    "FockBasis",
    "RadialWeight",
    "log_monomial_norm",
    "monomial_norm",
]
