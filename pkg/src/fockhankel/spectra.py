"""Complex Hermitian Jacobi eigensolver and singular-value spectra."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, NumericalInconsistencyError

log = logging.getLogger(__name__)

MAX_ORDER = 4096
MAX_SWEEPS = 60


class HermitianMatrix:
    """Square complex matrix, symmetrised as (A + A^H) / 2 on construction."""

    def __init__(self, entries):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        self.entries = 0.5 * (a + a.conj().T)
        self.entries.setflags(write=False)

    @property
    def order(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def _off_norm(a):
    off = a - np.diag(np.diagonal(a))
    return float(np.linalg.norm(off))


def jacobi_eigen(mat, tol=1e-14, max_sweeps=MAX_SWEEPS, return_vectors=False):
    """Eigenvalues of a Hermitian matrix by cyclic-by-row complex Jacobi sweeps.

    Each rotation first removes the phase of ``a[p, q]`` with a diagonal
    unitary and then applies the real symmetric rotation that annihilates it.
    Iteration stops once the off-diagonal Frobenius mass is below
    ``tol * ||A||_F``.

    Returns
    -------
    w : ndarray
        Eigenvalues sorted nonincreasing.
    v : ndarray, optional
        Unitary matrix of eigenvectors (columns), if ``return_vectors``.
    """
    if not isinstance(mat, HermitianMatrix):
        mat = HermitianMatrix(mat)
    n = mat.order
    if n > MAX_ORDER:
        raise ValueError(f"order {n} exceeds the configured maximum {MAX_ORDER}")
    a = np.array(mat.entries)
    v = np.eye(n, dtype=complex) if return_vectors else None
    scale = float(np.linalg.norm(a))
    target = tol * scale
    off = _off_norm(a)
    sweeps = 0
    while off > target:
        if sweeps == max_sweeps:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", off)
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g <= 1e-300 or g < 1e-18 * scale / n:
                    continue
                phase = apq / g
                app, aqq = a[p, p].real, a[q, q].real
                zeta = (aqq - app) / (2.0 * g)
                t = 1.0 / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                if zeta < 0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase.conjugate()
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - sp * colq
                a[:, q] = s * colp + c * phase.conjugate() * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * phase * rowq
                a[q, :] = s * rowp + c * phase * rowq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = app - t * g
                a[q, q] = aqq + t * g
                if v is not None:
                    vp = v[:, p].copy()
                    v[:, p] = c * vp - sp * v[:, q]
                    v[:, q] = s * vp + c * phase.conjugate() * v[:, q]
        off = _off_norm(a)
    w = np.diagonal(a).real.copy()
    order = np.argsort(-w, kind="stable")
    if return_vectors:
        return w[order], v[:, order]
    return w[order]


def psd_clip(values, tol=1e-8):
    """Map values in (-tol, 0) to 0; anything <= -tol is an error."""
    values = np.asarray(values, dtype=float)
    if values.size and values.min() <= -tol:
        raise NumericalInconsistencyError(
            f"eigenvalue {values.min():.3e} is below -{tol:g}; the truncation is inconsistent"
        )
    return np.where(values < 0, 0.0, values)


@dataclass(frozen=True)
class SingularSpectrum:
    """Singular values sorted nonincreasing, with optional mode-indexed copy."""

    values: np.ndarray
    mode_indexed: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.size and (vals.min() < 0 or np.any(np.diff(vals) > 0)):
            raise ValueError("singular values must be nonnegative and nonincreasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_modes(cls, modes, **meta):
        modes = np.asarray(modes, dtype=float)
        return cls(np.sort(modes)[::-1].copy(), modes, dict(meta))

    def __len__(self):
        return len(self.values)


def singular_values_from_normal(mat, clip_tol=1e-8, reject_tol=1e-6, **meta):
    """Singular values s_j = sqrt(lambda_j) of the normal matrix H^H H.

    Eigenvalues in (-clip_tol, 0) are rounding noise and become 0.  Values in
    (-reject_tol, -clip_tol] are clipped with a warning; lower values raise
    :class:`NumericalInconsistencyError`.
    """
    lam = jacobi_eigen(mat)
    if lam.size and lam.min() <= -clip_tol:
        log.warning("normal-matrix eigenvalue %.3e below -%g clipped", lam.min(), clip_tol)
    lam = psd_clip(lam, reject_tol)
    return SingularSpectrum(np.sqrt(lam), meta=dict(meta))


def schatten_partial(spec, p, K=None):
    """Partial Schatten sum  sum_{j<K} s_j^p  over the sorted spectrum."""
    if not p > 0:
        raise ValueError("p must be positive")
    vals = spec.values if isinstance(spec, SingularSpectrum) else np.sort(np.asarray(spec, float))[::-1]
    K = len(vals) if K is None else K
    if K > len(vals):
        raise ValueError(f"K={K} exceeds spectrum length {len(vals)}")
    return math.fsum(np.power(vals[:K], p).tolist())


def divergence_flag(partials, ratio=0.9, atol=1e-9):
    """Heuristic divergence test on partial sums at geometrically growing cutoffs.

    The series is flagged divergent when the last increment exceeds ``atol``
    and is at least ``ratio`` times the previous one.  For terms ~ k^-p this
    separates p <= 1 (increment ratio 2^(1-p) >= 1 per doubling) from p > 1.
    """
    partials = list(partials)
    if len(partials) < 3:
        return False
    last = partials[-1] - partials[-2]
    prev = partials[-2] - partials[-3]
    return bool(last > atol and last >= ratio * prev)
