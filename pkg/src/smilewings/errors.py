"""Exception types shared across the library."""


class SmileWingsError(Exception):
    """Base class for all library-specific errors."""


class DomainError(SmileWingsError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PoleProximityError(DomainError):
    """Evaluation point is within the guard radius of an mgf pole."""


class NoSolutionError(SmileWingsError, ValueError):
    """Target price lies strictly outside the static-arbitrage band."""


class BoundaryError(SmileWingsError, ValueError):
    """Target price sits exactly on the arbitrage band edge, so no finite vol exists."""


class ConvergenceError(SmileWingsError, RuntimeError):
    """An iterative scheme failed to converge; carries diagnostics."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class EvaluationOverflowError(SmileWingsError, OverflowError):
    """An exponent exceeded the representable double range; carries the exponent."""

    def __init__(self, message, exponent):
        super().__init__(message)
        self.exponent = exponent
