"""Custom exceptions for the freudsobolev toolkit."""


class FreudSobolevError(Exception):
    """Base exception for freudsobolev errors."""
    pass


class ConfigurationError(FreudSobolevError):
    """Raised when a run configuration or argument is invalid."""
    def __init__(self, message: str, details: dict = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class DomainError(FreudSobolevError):
    """Raised when an argument lies outside the domain of a formula."""
    def __init__(self, message: str, value=None):
        super().__init__(message)
        self.message = message
        self.value = value


class SolverError(FreudSobolevError):
    """Raised when the Newton solve of the string equation does not converge."""
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.message = message
        self.residual = residual
        self.iterations = iterations


class TableExhaustedError(FreudSobolevError):
    """Raised when a degree beyond the computed table is requested."""
    def __init__(self, requested: int, available: int):
        super().__init__(f"Degree {requested} requested but table only reaches {available}")
        self.requested = requested
        self.available = available


class OracleError(FreudSobolevError):
    """Raised when a quadrature oracle disagrees with its refinement."""
    def __init__(self, message: str, discrepancy: float):
        super().__init__(f"{message} (discrepancy={discrepancy:.3e})")
        self.message = message
        self.discrepancy = discrepancy


class BracketingError(FreudSobolevError):
    """Raised when fewer sign changes than expected zeros are found."""
    def __init__(self, label: str, n: int, found: int, expected: int, grid_size: int):
        super().__init__(
            f"Bracketing failed for {label} n={n}: {found} of {expected} "
            f"positive zeros on a grid of {grid_size} points"
        )
        self.label = label
        self.n = n
        self.found = found
        self.expected = expected
        self.grid_size = grid_size


class DegenerateSystemError(FreudSobolevError):
    """Raised when a ladder determinant or coefficient vanishes identically."""
    def __init__(self, what: str, n: int):
        super().__init__(f"{what} vanishes identically for n={n}")
        self.what = what
        self.n = n


class UnexpectedRegimeError(FreudSobolevError):
    """Raised when the biquartic's quadratic has complex roots."""
    def __init__(self, message: str, discriminant: float):
        super().__init__(f"{message} (discriminant={discriminant:.6e})")
        self.message = message
        self.discriminant = discriminant


class ReferenceParseError(FreudSobolevError):
    """Raised when a reference table file cannot be parsed."""
    def __init__(self, path: str, reason: str):
        super().__init__(f"Cannot parse reference file {path}: {reason}")
        self.path = path
        self.reason = reason
