"""Exception hierarchy shared across the package."""


class WristmoodError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WristmoodError):
    """A value is outside the domain a function accepts."""


class ParseError(WristmoodError):
    """A session file line could not be parsed."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class FormatError(WristmoodError):
    """A file is structurally invalid (record order, version, kind)."""


class EmptySessionError(WristmoodError):
    """Cleaning removed every sample from a recording."""


class InsufficientDataError(WristmoodError):
    """Not enough readings to compute a metric."""


class SpecError(WristmoodError):
    """A feature-set or configuration spec does not resolve."""


class DegenerateInputError(WristmoodError):
    """Input too degenerate for the algorithm (e.g. < k distinct points)."""


class DegenerateLabelError(WristmoodError):
    """A required class is missing from the labels."""


class ShapeError(WristmoodError):
    """Input width does not match what the model was trained on."""


class DataError(WristmoodError):
    """Inconsistent data (e.g. conflicting labels within one group)."""
