"""Exception hierarchy.

Each class carries the process exit code the command-line interface maps it to.
"""


class GaussfidError(Exception):
    exit_code = 1


class MalformedInputError(GaussfidError, ValueError):
    """Input that cannot be interpreted: bad JSON, wrong shapes, non-finite entries."""

    exit_code = 2


class DimensionError(MalformedInputError):
    """Inconsistent mode counts or array dimensions."""


class NotSymplecticError(MalformedInputError):
    pass


class UnphysicalStateError(GaussfidError, ValueError):
    """Well-formed covariance data that violates the uncertainty relation."""

    exit_code = 3


class DomainError(UnphysicalStateError):
    """A numerical routine was called outside its mathematical domain."""


class UnsupportedModeCountError(GaussfidError):
    exit_code = 4


class NumericalInconsistencyError(GaussfidError, ArithmeticError):
    """A bound that holds for physical inputs was violated beyond round-off."""

    exit_code = 5


class CutoffTooSmallError(GaussfidError):
    exit_code = 6

    def __init__(self, message: str, suggested_cutoff: int | None = None):
        super().__init__(message)
        self.suggested_cutoff = suggested_cutoff
