"""Exception hierarchy for the defining-sets toolkit.

Library code raises these; the command line turns them into exit codes.
"""


class DefiningSetsError(ValueError):
    """Base class for every error raised by the package."""


class MatrixFormatError(DefiningSetsError):
    """Matrix text is empty, malformed, or contains an illegal character."""


class DimensionMismatchError(DefiningSetsError):
    """Two matrices (or a matrix and a margin vector) disagree on shape."""


class SideMismatchError(DefiningSetsError):
    """A row-side index set was used where a column-side one was expected, or vice versa."""


class MarginError(DefiningSetsError):
    """Margin vectors are structurally invalid."""


class TotalMismatchError(MarginError):
    """Row sums and column sums have different totals."""


class MarginRangeError(MarginError):
    """A row sum exceeds n or a column sum exceeds m."""


class InconsistentPartialError(DefiningSetsError):
    """A partial matrix already violates one of the margins."""


class CapExceededError(DefiningSetsError):
    """An exhaustive computation would exceed its configured cap."""


class EmptyClassError(DefiningSetsError):
    """The margin class A(s,t) has no members."""


class NotDefiningError(DefiningSetsError):
    """A partial matrix expected to be a defining set is not one."""


class DomainError(DefiningSetsError):
    """A numeric parameter lies outside the domain of a formula."""


class InvalidPermutationError(DefiningSetsError):
    """A sequence is not a permutation of the expected index range."""


class ProblemTooLargeError(DefiningSetsError):
    """An exact scan was requested beyond its supported size."""
