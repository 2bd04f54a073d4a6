"""Exception types. Every error carries a stable ``code`` string."""


class MeasureIsoError(Exception):
    """Base class; ``code`` names the failure (e.g. ``"NEGATIVE_WEIGHT"``)."""

    code = "ERROR"

    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


class ValidationError(MeasureIsoError, ValueError):
    """Malformed input: bad weights, points outside the space, bad shapes."""


class DomainError(MeasureIsoError, ValueError):
    """Well-formed input that the requested operation cannot handle."""


class SolverError(MeasureIsoError, RuntimeError):
    """Internal solver failure (iteration cap). Never expected."""
