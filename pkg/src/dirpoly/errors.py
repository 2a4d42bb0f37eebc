"""Exception hierarchy for dirpoly.

Every error raised deliberately by the library derives from
:class:`DirpolyError`, so callers (and the CLI) can catch one type.  The
subclasses map one-to-one onto the failure modes of the public API:

``InvalidArgument``
    a precondition on arguments was violated (bad range, bad enum value,
    unsorted list, ...).  Also a ``ValueError``.
``TableTooSmall``
    an operation needed primes or factorizations beyond what the supplied
    prime table certifies.
``ResourceLimit``
    an enumeration would exceed an explicit cap (smooth-number lists,
    sign-pattern sets).
``DivergentFactor``
    a weighted Euler product was requested with a parameter that makes a
    factor infinite or negative.
``UndefinedWeight``
    a table-backed weight was evaluated outside its table.
``ConditionViolated``
    a bound that is only valid under a fitted/declared growth condition was
    requested for a weight that fails the condition.
"""


class DirpolyError(Exception):
    """Base class for all dirpoly errors."""


class InvalidArgument(DirpolyError, ValueError):
    """An argument violated a documented precondition."""


class TableTooSmall(DirpolyError):
    """The prime table does not certify the requested range."""


class ResourceLimit(DirpolyError):
    """An enumeration exceeded its explicit cap."""


class DivergentFactor(DirpolyError):
    """A weighted Euler product factor diverges for these parameters."""


class UndefinedWeight(DirpolyError):
    """A table-backed weight has no value at the requested integer."""


class ConditionViolated(DirpolyError):
    """A required growth condition fails for the supplied weight."""
