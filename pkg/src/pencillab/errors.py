"""Exception types shared across the package."""


class PencilLabError(Exception):
    """Base class for all package errors."""


class ZeroFormError(PencilLabError, ValueError):
    """Raised when an operation needs a nonzero form."""


class DegreeMismatchError(PencilLabError, ValueError):
    """Raised when two forms that must share a degree do not."""


class BaseLocusError(PencilLabError):
    """Raised when a pencil has a (numerically) nonempty base locus."""


class DegeneratePencilError(PencilLabError, ValueError):
    """Raised for proportional forms or pencils with a non-isolated critical locus."""


class UnsupportedError(PencilLabError, NotImplementedError):
    """Raised when a method is requested outside its supported range."""


class RecordParseError(PencilLabError, ValueError):
    """Malformed experiment file; ``lineno`` names the offending line."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class IntegrityError(PencilLabError):
    """A stored summary does not match the one recomputed from the rows."""
