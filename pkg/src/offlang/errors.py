"""Shared exception types.

The CLI maps these onto distinct exit codes: usage errors (bad flags) are
handled by click itself, ParseError/ValidationError and friends count as
data errors, everything else is a runtime failure.
"""


class OfflangError(Exception):
    """Base class for all toolkit-specific errors."""


class ParseError(OfflangError):
    """A file could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(OfflangError):
    """Data violates a structural invariant (labels, duplicate ids, ...)."""


class ConfigError(OfflangError):
    """Inconsistent model/training configuration."""


class StratificationError(OfflangError):
    """A class has too few samples for the requested fold count."""


class InsufficientDataError(OfflangError):
    """An operation needs data that the input does not contain."""


class NotFoundError(OfflangError):
    """A referenced session, post, or annotator does not exist."""
