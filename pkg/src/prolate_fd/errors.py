"""Exception types shared across the package."""


class ProlateError(Exception):
    """Base class for all package errors."""


class ValidationError(ProlateError, ValueError):
    """Bad user input: shapes, ranges, inconsistent parameters."""


class DimensioningError(ProlateError):
    """A truncation or basis size is too small for the requested accuracy."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConsistencyError(ProlateError):
    """An internal numerical invariant failed."""


class UnderflowError(ProlateError):
    """A quantity fell below the representable range."""


class CertificationError(ProlateError):
    """A certifiability precondition for an error bound is violated."""
