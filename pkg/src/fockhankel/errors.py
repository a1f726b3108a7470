"""Exception hierarchy shared by all modules."""


class FockHankelError(Exception):
    """Base class for every error raised by this package."""


class InvalidWeightError(FockHankelError, ValueError):
    pass


class SymbolParseError(FockHankelError, ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnsupportedSymbolError(FockHankelError, ValueError):
    pass


class QuadratureError(FockHankelError, ArithmeticError):
    """A quadrature node produced a non-finite integrand value."""

    def __init__(self, message, node=None):
        if node is not None:
            message = f"{message} at node {complex(node)!r}"
        super().__init__(message)
        self.node = node


class NumericalInconsistencyError(FockHankelError, ArithmeticError):
    """Computed quantities violate an identity they must satisfy (e.g. PSD)."""


class TruncationError(NumericalInconsistencyError):
    """A truncation parameter is too small for the requested computation."""


class ConvergenceError(FockHankelError, ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
