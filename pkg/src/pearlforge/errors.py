"""Exception vocabulary shared by all modules."""


class PearlforgeError(Exception):
    """Base class for all package errors."""


class MalformedPresentationError(PearlforgeError):
    """Presentation data violates the structural/weight constraints."""


class MalformedWordError(PearlforgeError):
    """Word refers to a generator index out of range."""


class UncheckedPresentationError(PearlforgeError):
    """Arithmetic requested on a presentation that never passed its
    consistency check.  This is a hard error by design, never a warning."""


class InconsistentPresentationError(PearlforgeError):
    """Presentation failed its consistency check."""


class UndefinedSeriesError(PearlforgeError):
    """Invariant undefined at this order (e.g. two-step centralizer at p^3)."""


class UnsupportedGroupError(PearlforgeError):
    """Operation restricted to maximal-class groups got something else."""


class BudgetExceededError(PearlforgeError):
    """Search/enumeration exceeded its node budget.  Carries partial info but
    callers must never treat it as a (smaller) complete answer."""

    def __init__(self, message, nodes_visited=None, detail=None):
        super().__init__(message)
        self.nodes_visited = nodes_visited
        self.detail = detail


class InvarianceError(PearlforgeError):
    """Subgroup not invariant under the automorphism being restricted."""


class InconclusiveError(PearlforgeError):
    """Isomorphism search exhausted its budget with no certificate."""


class FalsificationError(PearlforgeError):
    """A verified-on-load catalog property failed to re-verify."""


class CollectionLimitError(PearlforgeError):
    """Collection step guard tripped (should not happen on weighted input)."""
