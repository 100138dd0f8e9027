"""Exception types shared across the package."""


class CapplanError(Exception):
    """Base class for all errors raised by this package."""


class CdfParseError(CapplanError):
    """Malformed IEEE Common Data Format input."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ValidationError(CapplanError):
    """Network or plan data violates a model invariant."""


class ConfigError(CapplanError):
    """Run configuration file is missing, malformed, or inconsistent."""


class SolverError(CapplanError):
    """Numerical failure inside the power-flow solver (e.g. singular Jacobian)."""


class ConvergenceError(CapplanError):
    """An operation that requires a converged power flow did not get one."""
