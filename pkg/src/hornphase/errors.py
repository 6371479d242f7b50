"""Exception hierarchy shared by every hornphase module."""


class HornError(Exception):
    """Base class for all hornphase errors."""


class InvalidArity(HornError, ValueError):
    """A variable count outside the supported range (usually t < 1)."""


class ArityTooLarge(HornError, ValueError):
    """Raised by exhaustive routines when n exceeds their guard."""


class InvalidClause(HornError, ValueError):
    """A clause that violates the Horn clause invariants."""


class DomainError(HornError, ValueError):
    """An analytic function evaluated outside its domain."""


class ResourceLimitError(HornError, MemoryError):
    """A request that would exceed the configured memory budget."""


class InvalidProfile(HornError, ValueError):
    """A clause-class profile with negative components or a bad stage."""


class NotNormalized(HornError, ValueError):
    """A probability vector that does not sum to one."""


class EmptyCell(HornError, ValueError):
    """Summary statistics requested for a cell with no usable records."""


class DimacsError(HornError, ValueError):
    """Base class for DIMACS parse failures.

    ``clause_index`` is 1-based when the error concerns a particular clause.
    """

    def __init__(self, message, clause_index=None):
        super().__init__(message)
        self.clause_index = clause_index


class MalformedHeader(DimacsError):
    pass


class NonHornClause(DimacsError):
    pass


class ComplementaryClause(NonHornClause):
    """A clause containing both v and -v outside padded-tolerant mode."""


class LiteralOutOfRange(DimacsError):
    pass


class ClauseCountMismatch(DimacsError):
    pass


class EmptyClauseInInput(DimacsError):
    pass
