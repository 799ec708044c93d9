"""Exception taxonomy shared by all modules."""


class ParameterError(ValueError):
    """A parameter tuple violates the admissible window."""


class DomainError(ValueError):
    """An argument lies outside the validity strip of a special function."""


class QuadratureError(RuntimeError):
    """A quadrature failed to converge; carries the last error estimate."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DomainExtensionNeeded(RuntimeError):
    """A profile is not small at the window ends; carries a suggested half-length."""

    def __init__(self, message, suggested_L):
        super().__init__(message)
        self.suggested_L = suggested_L


class SolverError(RuntimeError):
    """Ground-state iteration failed; carries the residual trace when available."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class EigenError(RuntimeError):
    """Eigensolver did not meet its residual target."""


class ConfigError(ValueError):
    """A run configuration is invalid (CLI exit code 2)."""
