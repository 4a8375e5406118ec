"""Exception hierarchy shared by all modules."""


class PospresError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(PospresError, ValueError):
    pass


class DegreeBudgetExceeded(PospresError, ValueError):
    """Input degree is above the order an operator is stored to."""


class InconsistentAction(PospresError):
    """A recovered canonical table does not reproduce the action it came from."""


class NotAlgebraElement(PospresError, ValueError):
    pass


class NotGroupElement(PospresError, ValueError):
    pass


class DegreeBudgetExceedsOperatorOrder(PospresError, ValueError):
    pass


class NotInvariant(PospresError):
    """The operator maps some basis vector out of the subspace."""


class NotInSubspace(PospresError, ValueError):
    pass


class GridPointOutsideK(PospresError, ValueError):
    pass


class InvalidTriplet(PospresError, ValueError):
    pass


class NegativeTime(PospresError, ValueError):
    pass


class NotDegreePreserving(PospresError, ValueError):
    pass


class MalformedInput(PospresError, ValueError):
    """Raised by the JSON readers."""
