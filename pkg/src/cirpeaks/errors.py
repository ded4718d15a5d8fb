"""Exception hierarchy shared by all cirpeaks modules."""


class CirPeaksError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CirPeaksError):
    """An argument or configuration violates a documented precondition."""


class DegenerateInputError(ValidationError):
    """Input is structurally valid but numerically degenerate (e.g. a
    constant series handed to the standard scaler)."""


class InsufficientDataError(ValidationError):
    """A series is too short for the requested operation."""


class ParseError(CirPeaksError):
    """A file could not be parsed; the message names the offending line."""


class NumericalError(CirPeaksError):
    """A computation produced non-finite values or an unstable design."""
