"""Numerical experiments with Hankel operators on Fock spaces."""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    FockHankelError,
    InvalidWeightError,
    NumericalInconsistencyError,
    QuadratureError,
    SymbolParseError,
    TruncationError,
    UnsupportedSymbolError,
)
from .fock import FockBasis, RadialWeight, log_monomial_norm, monomial_norm
from .hankel import (
    HankelModel,
    cross_matrix,
    dense_spectrum,
    gram_matrix,
    hs_norm_direct,
    normal_matrix,
    single_frequency_spectrum,
    symbol_spectrum,
)
from .oscillation import (
    LatticeReport,
    OscillationParams,
    bmo_sup,
    compactness_probe,
    g_functional,
    ida_norm,
    imo_norm,
    lattice_points,
    mean_avg,
    mo,
)
from .quadrature import (
    PolarGrid,
    annulus,
    disk,
    exactness_report,
    gauss_legendre,
    integrate_annulus,
    integrate_disk,
    integrate_plane_weighted,
    plane_truncated,
)
from .spectra import (
    HermitianMatrix,
    SingularSpectrum,
    divergence_flag,
    jacobi_eigen,
    schatten_partial,
    singular_values_from_normal,
)
from .symbols import parse_symbol, translated, xia

__all__ = [
    "ConvergenceError", "FockHankelError", "InvalidWeightError", "NumericalInconsistencyError",
    "QuadratureError", "SymbolParseError", "TruncationError", "UnsupportedSymbolError",
    "FockBasis", "RadialWeight", "log_monomial_norm", "monomial_norm",
    "HankelModel", "cross_matrix", "dense_spectrum", "gram_matrix", "hs_norm_direct",
    "normal_matrix", "single_frequency_spectrum", "symbol_spectrum",
    "LatticeReport", "OscillationParams", "bmo_sup", "compactness_probe", "g_functional",
    "ida_norm", "imo_norm", "lattice_points", "mean_avg", "mo",
    "PolarGrid", "annulus", "disk", "exactness_report", "gauss_legendre", "integrate_annulus",
    "integrate_disk", "integrate_plane_weighted", "plane_truncated",
    "HermitianMatrix", "SingularSpectrum", "divergence_flag", "jacobi_eigen",
    "schatten_partial", "singular_values_from_normal",
    "parse_symbol", "translated", "xia",
]
