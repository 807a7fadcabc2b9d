"""Exception hierarchy shared across the package."""


class SparsepaintError(Exception):
    """Base class for all errors raised by sparsepaint."""


class FormatError(SparsepaintError):
    """A file did not conform to the expected PGM/PFM grammar."""


class ValidationError(SparsepaintError):
    """Input data violated a documented precondition or invariant."""


class DimensionMismatchError(SparsepaintError):
    """Two grids that must share dimensions do not."""


class NoKnownDataError(SparsepaintError):
    """An inpainting was requested with an empty mask / all-zero confidence."""

    def __init__(self, message: str = "no known data"):
        super().__init__(message)
