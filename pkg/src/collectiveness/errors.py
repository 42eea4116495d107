"""Exception types shared across the package."""


class CollectivenessError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(CollectivenessError, ValueError):
    """An argument is outside its legal range or otherwise unusable."""


class InvariantError(CollectivenessError, ValueError):
    """An input violates a structural invariant it was required to satisfy."""


class ParseError(CollectivenessError, ValueError):
    """A text input could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyClipError(CollectivenessError, ValueError):
    """A trajectory clip has no usable frames after preprocessing."""


class UndefinedMetricError(CollectivenessError, ValueError):
    """A metric is undefined for the given input (e.g. constant series)."""
