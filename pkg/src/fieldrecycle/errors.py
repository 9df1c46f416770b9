"""Exception types raised by the numerical routines."""


class FieldRecycleError(Exception):
    """Base class for all package errors."""


class TruncationError(FieldRecycleError):
    """Fock-space truncation discards more probability than allowed."""


class DimensionTooSmall(FieldRecycleError):
    """Requested dimension cannot hold the state's support."""


class DegenerateAncilla(FieldRecycleError):
    """Ancilla colatitude at a pole where a construction breaks down."""


class NoConvergence(FieldRecycleError):
    """Iteration hit its cap before the stopping rule was met.

    The partial result is attached so callers can still inspect it.
    """

    def __init__(self, message, rho=None, trace=None):
        super().__init__(message)
        self.rho = rho
        self.trace = trace


class ConfigError(FieldRecycleError):
    """Experiment configuration failed to parse or validate."""
