"""Exception hierarchy shared by the services, the CLI and the HTTP API."""

from typing import Iterable, Sequence


class GlmbToolkitError(Exception):
    """Base class for every error raised on purpose by this package."""


class DomainError(GlmbToolkitError, ValueError):
    """An input lies outside the domain of an operation."""


class CapacityError(GlmbToolkitError):
    """A requested enumeration or allocation exceeds the configured guard."""


class NumericError(GlmbToolkitError, ArithmeticError):
    """A numerical routine could not complete (e.g. singular covariance)."""


class ReportWriteError(GlmbToolkitError, OSError):
    """An output file or directory could not be written."""


class ConfigValidationError(GlmbToolkitError, ValueError):
    """Configuration failed validation; ``keys`` lists the offending dotted keys."""

    def __init__(self, keys: Sequence[str], details: Iterable[str] = ()):
        self.keys = list(keys)
        self.details = list(details)
        message = "invalid configuration keys: " + ", ".join(self.keys)
        if self.details:
            message += " (" + "; ".join(self.details) + ")"
        super().__init__(message)
