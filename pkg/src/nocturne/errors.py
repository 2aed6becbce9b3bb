"""Exception types shared across the package."""


class NocturneError(Exception):
    """Base class for all package-specific errors."""


class FormatError(NocturneError):
    """An image file is in an unsupported or malformed format."""


class DegenerateInputError(NocturneError):
    """An input is numerically degenerate for the requested operation
    (e.g. a histogram whose quantiles collapse)."""
