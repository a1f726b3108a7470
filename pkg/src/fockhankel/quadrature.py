"""Polar-coordinate quadrature on disks, annuli and the truncated plane.

Radial integration uses composite Gauss-Legendre panels, angular integration
the uniform trapezoid rule.  Circles on which an integrand is not smooth can
be declared as *break circles*; panel edges are placed on them so that each
panel sees a smooth integrand.  Circles concentric with the grid become
ordinary panel edges, off-centre circles are handled ray by ray.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache

import numpy as np

from .errors import QuadratureError

DEFAULT_ORDER = 12
DEFAULT_PANEL_WIDTH = 0.5
DEFAULT_N_THETA = 64
_ARC_GRADING = np.array([0.004, 0.02, 0.1])


@lru_cache(maxsize=None)
def gauss_legendre(order):
    """Nodes and weights of the `order`-point rule on [-1, 1] (read-only)."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class Domain:
    """Annular region ``rho_min <= |w - center| <= rho_max``.

    Disks, annuli and the truncated plane are all special cases.
    """

    center: complex
    rho_min: float
    rho_max: float
    kind: str = "annulus"

    def __post_init__(self):
        if not (0.0 <= self.rho_min < self.rho_max) or not math.isfinite(self.rho_max):
            raise ValueError(f"invalid radii ({self.rho_min}, {self.rho_max})")

    @property
    def area(self):
        return math.pi * (self.rho_max**2 - self.rho_min**2)


def disk(center, r):
    if r <= 0:
        raise ValueError("disk radius must be positive")
    return Domain(complex(center), 0.0, float(r), "disk")


def annulus(center, r_in, r_out):
    return Domain(complex(center), float(r_in), float(r_out), "annulus")


def plane_truncated(R):
    return Domain(0j, 0.0, float(R), "plane")


def _panel_edges(a, b, width, cuts=()):
    n = max(1, math.ceil((b - a) / width - 1e-12))
    edges = set(np.linspace(a, b, n + 1).tolist())
    edges.update(c for c in cuts if a < c < b)
    edges = np.array(sorted(edges))
    # drop slivers created by a cut landing next to a uniform edge
    keep = np.concatenate(([True], np.diff(edges) > 1e-13 * max(1.0, b)))
    edges = edges[keep]
    edges[-1] = b
    return edges


def composite_rule(edges, order):
    """Composite Gauss-Legendre nodes/weights for d(rho) on the given panels."""
    x, w = gauss_legendre(order)
    edges = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class PolarGrid:
    """Tensor (or ray-wise) polar quadrature over a :class:`Domain`.

    Parameters
    ----------
    domain : Domain
        Region of integration.
    gauss_order : int
        Gauss-Legendre nodes per radial panel (>= 4).
    n_theta : int
        Number of equispaced angles (>= 8).
    panel_width : float
        Maximal radial panel length.
    breaks : tuple of (complex, float)
        Circles ``|w - c| = R`` across which integrands may be non-smooth.
    """

    domain: Domain = field(default_factory=lambda: disk(0, 1))
    gauss_order: int = DEFAULT_ORDER
    n_theta: int = DEFAULT_N_THETA
    panel_width: float = DEFAULT_PANEL_WIDTH
    breaks: tuple = ()

    def __post_init__(self):
        if self.gauss_order < 4:
            raise ValueError("gauss_order must be >= 4")
        if self.n_theta < 8:
            raise ValueError("n_theta must be >= 8")
        if not self.panel_width > 0:
            raise ValueError("panel_width must be positive")
        object.__setattr__(
            self, "breaks", tuple((complex(c), float(R)) for c, R in self.breaks)
        )

    def with_domain(self, domain, breaks=None):
        return replace(self, domain=domain, breaks=self.breaks if breaks is None else tuple(breaks))

    def _split_breaks(self):
        c0, lo, hi = self.domain.center, self.domain.rho_min, self.domain.rho_max
        concentric, offcentre = [], []
        for c, R in self.breaks:
            d = abs(c - c0)
            if d <= 1e-14 * max(1.0, abs(c0)):
                concentric.append(R)
            elif max(abs(d - R), lo) < min(d + R, hi):
                offcentre.append((c, R))
        return concentric, offcentre

    @cached_property
    def radial_panels(self):
        """Panel edges shared by every ray (concentric breaks included)."""
        concentric, _ = self._split_breaks()
        return _panel_edges(
            self.domain.rho_min, self.domain.rho_max, self.panel_width, concentric
        )

    def _critical_angles(self, offcentre):
        """Ray angles where a break circle meets a boundary circle or is tangent."""
        lo, hi = self.domain.rho_min, self.domain.rho_max
        angles = []
        for c, R in offcentre:
            dc = c - self.domain.center
            d, psi = abs(dc), cmath.phase(dc)
            for rb in (lo, hi):
                if rb > 0:
                    cos_t = (rb * rb + d * d - R * R) / (2 * rb * d)
                    if -1 < cos_t < 1:
                        a = math.acos(cos_t)
                        angles += [psi - a, psi + a]
            if abs(d - R) <= 1e-12 * R:
                # the circle passes through the centre; the cut radius
                # reaches 0 perpendicular to dc
                angles += [psi - math.pi / 2, psi + math.pi / 2]
            elif d > R:
                a = math.asin(R / d)
                angles += [psi - a, psi + a]
        return sorted({round(a % (2 * math.pi), 15) for a in angles})

    def _angular_rule(self, offcentre):
        """Equispaced trapezoid, or graded Gauss-Legendre arcs between critical angles.

        On each arc ``theta = a + L (3 t^2 - 2 t^3)``; the map has zero slope
        at both ends, which smooths the square-root behaviour of cut radii at
        tangent rays.
        """
        crit = self._critical_angles(offcentre)
        if not crit:
            theta = 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta
            return theta, np.full(self.n_theta, 2.0 * np.pi / self.n_theta)
        starts = np.array(crit)
        lengths = np.diff(np.append(starts, starts[0] + 2 * math.pi))
        theta, wt = [], []
        for a, L in zip(starts, lengths):
            if L <= 1e-14:
                continue
            m = max(3, math.ceil(self.n_theta * L / (2 * math.pi * self.gauss_order)))
            # extra small panels at the ends resolve singularities lying just
            # outside the arc (a tangent ray next to a boundary crossing)
            edges = np.unique(np.concatenate((np.linspace(0.0, 1.0, m + 1), _ARC_GRADING, 1 - _ARC_GRADING)))
            t, w = composite_rule(edges, self.gauss_order)
            theta.append(a + L * t * t * (3 - 2 * t))
            wt.append(w * 6 * L * t * (1 - t))
        return np.concatenate(theta), np.concatenate(wt)

    @cached_property
    def _nodes(self):
        c0 = self.domain.center
        lo, hi = self.domain.rho_min, self.domain.rho_max
        _, offcentre = self._split_breaks()
        if not offcentre:
            theta = 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta
            dtheta = 2.0 * np.pi / self.n_theta
            rho, wr = composite_rule(self.radial_panels, self.gauss_order)
            pts = c0 + rho[None, :] * np.exp(1j * theta)[:, None]
            wts = np.broadcast_to(wr * rho * dtheta, pts.shape)
            return pts.ravel(), np.ascontiguousarray(wts).ravel()
        pts, wts = [], []
        base = self.radial_panels
        for t, dtheta in zip(*self._angular_rule(offcentre)):
            e = complex(math.cos(t), math.sin(t))
            cuts = []
            for c, R in offcentre:
                # |c0 + rho e - c| = R  <=>  rho^2 + 2 b rho + q = 0
                dc = c0 - c
                b = (dc * e.conjugate()).real
                q = abs(dc) ** 2 - R * R
                disc = b * b - q
                if disc > 0:
                    s = math.sqrt(disc)
                    cuts.extend(x for x in (-b - s, -b + s) if lo < x < hi)
            edges = _panel_edges(lo, hi, self.panel_width, list(base) + cuts) if cuts else base
            rho, wr = composite_rule(edges, self.gauss_order)
            pts.append(c0 + rho * e)
            wts.append(wr * rho * dtheta)
        return np.concatenate(pts), np.concatenate(wts)

    @property
    def points(self):
        return self._nodes[0]

    @property
    def weights(self):
        return self._nodes[1]

    def integrate(self, fn):
        """Return ``sum(weights * fn(points))``; fn must be vectorised."""
        return _weighted_sum(fn, self.points, self.weights)


def _weighted_sum(fn, points, weights):
    vals = np.asarray(fn(points))
    if vals.shape == ():
        vals = np.full(points.shape, vals)
    bad = ~np.isfinite(vals)
    if bad.any():
        raise QuadratureError("non-finite integrand value", points[np.argmax(bad)])
    total = np.sum(weights * vals)
    return complex(total) if np.iscomplexobj(total) else float(total)


def integrate_disk(fn, center, r, grid=None):
    """Integrate ``fn`` over the disk ``|w - center| < r``."""
    grid = (grid or PolarGrid()).with_domain(disk(center, r))
    return grid.integrate(fn)


def integrate_annulus(fn, center, r_in, r_out, grid=None):
    grid = (grid or PolarGrid()).with_domain(annulus(center, r_in, r_out))
    return grid.integrate(fn)


@dataclass(frozen=True)
class WeightedIntegral:
    value: complex
    tail_bound: float
    tail_ok: bool


def integrate_plane_weighted(fn, weight, R=None, grid=None, tol=1e-12):
    """Integrate ``fn(z) exp(-2 phi(z))`` over ``|z| <= R``.

    The neglected tail is bounded with the lower curvature bound ``m`` of the
    weight, which forces ``phi(rho) >= phi(0) + m rho^2 / 4``; the bound is
    scaled by the largest ``|fn|`` seen on the outermost ring of nodes.  A
    tail above ``tol`` only sets ``tail_ok=False``.
    """
    R = weight.default_radius() if R is None else float(R)
    grid = (grid or PolarGrid()).with_domain(plane_truncated(R))
    pts, wts = grid.points, grid.weights

    def weighted(z):
        return np.asarray(fn(z)) * np.exp(-2.0 * weight.phi(np.abs(z)))

    value = _weighted_sum(weighted, pts, wts)
    vals = np.abs(np.asarray(fn(pts)) * np.ones(pts.shape))
    outer = np.abs(pts) >= np.abs(pts).max() * (1 - 1e-12) - grid.panel_width
    scale = max(1.0, float(vals[outer].max())) if outer.any() else 1.0
    tail = scale * weight.tail_bound(R)
    return WeightedIntegral(value, tail, tail <= tol)


@dataclass(frozen=True)
class ExactnessReport:
    rows: tuple  # (a, b, exact, computed, error)
    max_error: float


def exactness_report(grid, max_degree=None):
    """Errors of the grid on monomials ``u^a conj(u)^b`` with ``u = w - center``.

    Only meaningful for disk domains.  Errors are relative to the exact value
    when it is nonzero and to ``area * r^(a+b)`` otherwise.
    """
    if max_degree is None:
        max_degree = 2 * grid.gauss_order - 2
    c0, r = grid.domain.center, grid.domain.rho_max
    u = grid.points - c0
    w = grid.weights
    rows = []
    for a in range(max_degree + 1):
        for b in range(max_degree + 1 - a):
            computed = complex(np.sum(w * u**a * np.conj(u) ** b))
            exact = 2 * math.pi * r ** (2 * a + 2) / (2 * a + 2) if a == b else 0.0
            scale = abs(exact) if exact else grid.domain.area * r ** (a + b)
            rows.append((a, b, exact, computed, abs(computed - exact) / scale))
    return ExactnessReport(tuple(rows), max(row[-1] for row in rows))


def radial_window_rule(log_envelope, breaks=(), order=DEFAULT_ORDER,
                       panel_width=DEFAULT_PANEL_WIDTH, start_radius=8.0, drop=90.0):
    """Gauss-Legendre rule for ``d rho`` restricted to where an integrand matters.

    ``log_envelope`` (vectorised in rho) is sampled on a coarse grid that is
    extended until it falls ``drop`` below its maximum; the returned panels
    cover the region above that level (plus one coarse step each side) and are
    split at ``breaks``.
    """
    step = min(0.125, panel_width / 4)
    R = max(float(start_radius), max(breaks, default=0.0) + 1.0)
    while True:
        rho = np.arange(1, math.ceil(R / step) + 1) * step
        with np.errstate(divide="ignore", invalid="ignore"):
            env = np.asarray(log_envelope(rho), dtype=float)
        env = np.where(np.isnan(env), -np.inf, env)
        top = env.max()
        if not np.isfinite(top):
            return np.empty(0), np.empty(0)
        if env[-1] < top - drop and np.argmax(env) < len(env) - 1:
            break
        R *= 1.5
    above = np.nonzero(env >= top - drop)[0]
    a = max(0.0, rho[above[0]] - 2 * step)
    b = rho[above[-1]] + 2 * step
    edges = _panel_edges(a, b, panel_width, breaks)
    return composite_rule(edges, order)
