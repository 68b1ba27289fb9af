"""Exception types raised across the package.

All of them subclass :class:`ValueError` so callers that only care about
"bad input" can catch one thing.  The CLI exits with status 1 for the
failed-computation errors (search exhausted, grid mismatch, no transition)
and with status 2 for the rest.
"""


class IifsError(ValueError):
    """Base class for package errors."""


class UsageError(IifsError):
    """Malformed system description or argument."""


class DomainError(IifsError):
    """A numeric argument lies outside the domain of the operation."""


class InvalidWordError(IifsError):
    """A word references a map that is not in the system."""


class GridMismatchError(IifsError):
    """Two curves were combined over different theta grids."""


class NoTransitionError(IifsError):
    """The Hausdorff dimension is too large for a phase transition."""


class RegimeError(IifsError):
    """Parameters fall outside the regime where a bound is valid."""


class ContainmentError(IifsError):
    """A realized map does not send the domain cube into itself."""


class GuardError(IifsError):
    """A sampling or regression guard was not met."""


class SearchExhaustedError(IifsError):
    """A grid search ran off the end of its grid."""


class SaturationWarning(UserWarning):
    """A dimension search saturated at the ambient dimension."""
