"""Local oscillation functionals of symbols and their lattice aggregates.

For a ball B = B(z, r):

* ``mean_avg``  -- the average of f over B;
* ``mo``        -- MO_{p,r}(f)(z), the L^p deviation of f from that average;
* ``g_functional`` -- G_{q,r}(f)(z), the normalised L^q distance from f to
  holomorphic functions on B, approximated by polynomials in (w - z) of
  degree <= D.

Lattice reports sum these over delta * (Z + iZ) to approximate L^s norms on
the plane, exposing partial sums so that divergence stays visible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalInconsistencyError
from .quadrature import PolarGrid, disk
from .spectra import divergence_flag
from .symbols import translated


def _disk_grid(f, z, r, grid, min_order=0):
    grid = grid or PolarGrid()
    if grid.gauss_order < min_order:
        grid = PolarGrid(grid.domain, min_order, grid.n_theta, grid.panel_width)
    return grid.with_domain(disk(z, r), f.break_circles())


def _values(f, g):
    vals = np.asarray(f(g.points), dtype=complex) * np.ones(g.points.shape)
    if not np.all(np.isfinite(vals)):
        from .errors import QuadratureError

        bad = np.argmax(~np.isfinite(vals))
        raise QuadratureError("non-finite symbol value", g.points[bad])
    return vals


def mean_avg(f, z, r=1.0, grid=None):
    """Average of f over the disk B(z, r)."""
    g = _disk_grid(f, z, r, grid)
    return complex(np.sum(g.weights * _values(f, g))) / (math.pi * r * r)


def mo(f, z, r=1.0, p=2.0, grid=None):
    """Mean oscillation MO_{p,r}(f)(z)."""
    g = _disk_grid(f, z, r, grid)
    vals = _values(f, g)
    area = math.pi * r * r
    mean = np.sum(g.weights * vals) / area
    dev = np.abs(vals - mean)
    return float(np.sum(g.weights * dev**p) / area) ** (1.0 / p)


def _poly_design(g, z, r, D):
    t = (g.points - z) / r
    return np.power.outer(t, np.arange(D + 1)) * np.sqrt(np.arange(1, D + 2))


def g_functional(f, z, r=1.0, q=2.0, D=25, grid=None, tol=1e-9, max_iter=200,
                 damping=0.5, full_output=False):
    """Distance G_{q,r}(f)(z) from f to polynomials of degree <= D on B(z, r).

    For q = 2 this is a weighted least-squares problem on the quadrature
    nodes.  The basis sqrt(j+1) ((w-z)/r)^j is orthonormal for the
    normalised area measure, so on an exact grid the solution is the
    orthogonal expansion of f.  Other q use damped iteratively reweighted
    least squares started from the q = 2 solution.

    With ``full_output`` returns ``(value, converged, iterations)``.
    """
    g = _disk_grid(f, z, r, grid, min_order=D + 2)
    vals = _values(f, g)
    w = g.weights / (math.pi * r * r)
    V = _poly_design(g, z, r, D)
    sw = np.sqrt(w)
    c = np.linalg.lstsq(V * sw[:, None], vals * sw, rcond=None)[0]
    res = vals - V @ c
    if q == 2:
        value = math.sqrt(float(np.sum(w * np.abs(res) ** 2)))
        return (value, True, 0) if full_output else value

    def objective(res):
        return float(np.sum(w * np.abs(res) ** q)) ** (1.0 / q)

    best = objective(res)
    converged, it = False, 0
    floor = 1e-12 * max(1.0, float(np.abs(vals).max()))
    for it in range(1, max_iter + 1):
        omega = np.maximum(np.abs(res), floor) ** (q - 2)
        sw = np.sqrt(w * omega)
        c_ls = np.linalg.lstsq(V * sw[:, None], vals * sw, rcond=None)[0]
        c_new = (1 - damping) * c + damping * c_ls
        step = float(np.linalg.norm(c_new - c))
        c = c_new
        res = vals - V @ c
        best = min(best, objective(res))
        if step < tol * max(1.0, float(np.linalg.norm(c))):
            converged = True
            break
    return (best, converged, it) if full_output else best


# -- lattice aggregation -----------------------------------------------------

@dataclass(frozen=True)
class OscillationParams:
    r: float = 1.0
    q: float = 2.0
    s: float = 1.0
    D: int = 25
    delta: float = 0.5
    R_max: float = 8.0
    tol: float = 1e-9
    radii: tuple | None = None
    grid: PolarGrid | None = None
    threads: int = 1

    def __post_init__(self):
        if not (self.r > 0 and self.delta > 0 and self.tol > 0 and self.R_max > 0):
            raise ValueError("r, delta, tol and R_max must be positive")
        if self.D < 0:
            raise ValueError("D must be >= 0")
        if not self.s > 0:
            raise ValueError("outer exponent must be positive")

    def aggregation_radii(self):
        if self.radii is not None:
            return tuple(sorted(float(R) for R in self.radii if R <= self.R_max))
        radii, R = [], 1.0
        while R < self.R_max:
            radii.append(R)
            R *= 2
        radii.append(float(self.R_max))
        return tuple(radii)


@dataclass(frozen=True)
class LatticeReport:
    points: np.ndarray
    values: np.ndarray
    partial_aggregates: tuple  # ((R, aggregate), ...)
    s: float
    diverging: bool
    meta: dict = field(default_factory=dict)

    @property
    def increments(self):
        aggs = [a for _, a in self.partial_aggregates]
        return tuple(b - a for a, b in zip(aggs, aggs[1:]))

    def aggregate(self, R):
        for RR, a in self.partial_aggregates:
            if abs(RR - R) < 1e-12:
                return a
        raise KeyError(R)

    @property
    def norm(self):
        """s-th root of the outermost aggregate."""
        last = self.partial_aggregates[-1][1]
        return last if math.isinf(self.s) else last ** (1.0 / self.s)


def lattice_points(delta, R_max):
    """delta * (Z + iZ) inside |z| <= R_max, ordered by modulus then argument."""
    n = int(math.floor(R_max / delta + 1e-9))
    i, j = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1), indexing="ij")
    z = delta * (i.ravel() + 1j * j.ravel())
    z = z[np.abs(z) <= R_max * (1 + 1e-12)]
    order = np.lexsort((np.angle(z), np.round(np.abs(z), 12)))
    return z[order]


def _lattice_map(fn, points, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return np.array(list(ex.map(fn, points)), dtype=float)
    return np.array([fn(z) for z in points], dtype=float)


def _aggregates(points, values, s, delta, radii):
    mod = np.abs(points)
    out = []
    for R in radii:
        v = values[mod <= R * (1 + 1e-12)]
        if math.isinf(s):
            agg = float(v.max()) if v.size else 0.0
        else:
            agg = delta * delta * math.fsum(np.power(v, s).tolist())
        out.append((R, agg))
    return tuple(out)


def _report(points, values, params, **meta):
    radii = params.aggregation_radii()
    aggs = _aggregates(points, values, params.s, params.delta, radii)
    diverging = divergence_flag([a for _, a in aggs], atol=params.tol)
    return LatticeReport(points, values, aggs, params.s, diverging, meta)


def reaggregate(report, params):
    """Re-aggregate the values of ``report`` with the exponent and radii of ``params``."""
    return _report(report.points, report.values, params, **report.meta)


def ida_norm(f, params=OscillationParams()):
    """Lattice approximation of ||G_{q,r}(f)||_{L^s} (as s-th power sums)."""
    pts = lattice_points(params.delta, params.R_max)
    vals = _lattice_map(
        lambda z: g_functional(f, z, params.r, params.q, params.D, params.grid, params.tol),
        pts, params.threads,
    )
    inner = np.abs(pts) < 2 * params.r
    return _report(pts, vals, params, max_value=float(vals.max()),
                   max_inner=float(vals[inner].max()) if inner.any() else 0.0)


def imo_norm(f, params=OscillationParams()):
    """Lattice approximation of int MO_{2,r}(f)^s dv."""
    pts = lattice_points(params.delta, params.R_max)
    vals = _lattice_map(lambda z: mo(f, z, params.r, 2.0, params.grid), pts, params.threads)
    return _report(pts, vals, params, max_value=float(vals.max()))


def bmo_sup(f, params=OscillationParams(), full_output=False):
    """Running supremum of MO_{q,r}(f) over the lattice up to R_max.

    The growth flag is set when the supremum sits on the outermost ring and
    the ring maxima increase strictly across the last three rings.
    """
    pts = lattice_points(params.delta, params.R_max)
    vals = _lattice_map(lambda z: mo(f, z, params.r, params.q, params.grid), pts, params.threads)
    radii = params.aggregation_radii()
    mod = np.abs(pts)
    ring_max, lo = [], -1.0
    for R in radii:
        sel = (mod > lo * (1 + 1e-12)) & (mod <= R * (1 + 1e-12))
        ring_max.append(float(vals[sel].max()) if sel.any() else 0.0)
        lo = R
    sup = float(vals.max())
    tail = ring_max[-3:]
    growth = (
        len(tail) == 3
        and sup == ring_max[-1]
        and tail[0] < tail[1] < tail[2]
        and sup > params.tol
    )
    if full_output:
        return sup, bool(growth), tuple(zip(radii, ring_max)), pts[int(np.argmax(vals))]
    return sup, bool(growth)


# -- compactness probe -------------------------------------------------------

def compactness_probe(f, lam, M, basis, grid=None, tol=1e-9):
    """Truncated ||(I - P)(f o tau_lam)||_phi with tau_lam(w) = w + lam.

    The projection uses e_0..e_M.  The residual is integrated directly; the
    identity ||F||^2 - sum |<F, e_m>|^2 is checked against it and a radicand
    below ``-tol`` raises :class:`NumericalInconsistencyError`.
    """
    F = translated(f, lam)
    if grid is None:
        grid = basis.plane_grid(M, n_theta=max(256, 1 << (2 * M + 2).bit_length()),
                                breaks=F.break_circles())
    else:
        grid = grid.with_domain(grid.domain, F.break_circles())
    pts, wts = grid.points, grid.weights
    vals = np.asarray(F(pts), dtype=complex) * np.exp(-basis.weight.phi(np.abs(pts)))
    E = basis.weighted_basis(np.arange(M + 1), pts)
    coeffs = E.conj() @ (wts * vals)
    total = float(np.sum(wts * np.abs(vals) ** 2))
    radicand = total - math.fsum((np.abs(coeffs) ** 2).tolist())
    if radicand < -tol * max(1.0, total):
        raise NumericalInconsistencyError(f"negative projection residual {radicand:.3e}")
    res = vals - coeffs @ E
    return math.sqrt(float(np.sum(wts * np.abs(res) ** 2)))
