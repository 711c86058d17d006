"""Exception hierarchy.

Every domain failure raised by the library derives from :class:`WalkLengthError`
so the CLI can map it to exit status 1 in one place.
"""


class WalkLengthError(ValueError):
    """Base class for domain errors."""


class NegativeWeight(WalkLengthError):
    pass


class NonzeroDiagonal(WalkLengthError):
    pass


class ZeroOffDiagonal(WalkLengthError):
    pass


class InvalidWalk(WalkLengthError):
    pass


class NotStronglyConnected(WalkLengthError):
    pass


class NotSymmetric(WalkLengthError):
    pass


class NonMonotoneFiltration(WalkLengthError):
    pass


class EmptyRelation(WalkLengthError):
    pass


class SizeMismatch(WalkLengthError):
    pass


class SearchSpaceTooLarge(WalkLengthError):
    pass


class InfeasibleArena(WalkLengthError):
    pass
