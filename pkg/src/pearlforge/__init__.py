"""pearlforge: exact computations on maximal-class p-groups.

Groups are given by weighted power-commutator presentations; everything
(central series, subgroup machinery, automorphism lifting, pearl
candidates and their normalizer towers, fusion certificates, constrained
family derivation) is exact integer arithmetic over the collection kernel.
"""

from .errors import (
    BudgetExceededError,
    CollectionLimitError,
    FalsificationError,
    InconclusiveError,
    InconsistentPresentationError,
    InvarianceError,
    MalformedPresentationError,
    MalformedWordError,
    PearlforgeError,
    UncheckedPresentationError,
    UndefinedSeriesError,
    UnsupportedGroupError,
)
from .kernel import kernel_backend
from .presentation import (
    PcPresentation,
    collect,
    commutator,
    consistency_check,
    element_order,
)

__version__ = "0.1.0"
