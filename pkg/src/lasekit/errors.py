"""Exception types raised by lasekit."""


class LasekitError(Exception):
    """Base class for all domain errors."""


class ParseError(LasekitError):
    """Malformed input file."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class ConfigError(LasekitError, ValueError):
    """Invalid parameters for a sampler, weight strategy or experiment."""


class SpectralError(LasekitError):
    """An embedding cannot be formed (e.g. the r-th eigenvalue is not positive)."""


class ConvergenceError(SpectralError):
    """The iterative eigensolver did not reach the requested tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals
