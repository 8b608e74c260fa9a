"""Exception hierarchy shared by all modules."""


class WittHeightError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(WittHeightError, ValueError):
    pass


class RankDeficient(WittHeightError, ValueError):
    pass


class UnsupportedField(WittHeightError, NotImplementedError):
    """Only the rational field is implemented."""


class UnknownBound(WittHeightError, KeyError):
    pass


class MissingParameter(WittHeightError, KeyError):
    pass


class SiegelBoundNotMet(WittHeightError):
    """A small-height basis violating the Bombieri-Vaaler bound.

    The bound is a theorem, so this always signals an implementation fault.
    """


class NoSingularZero(WittHeightError, ValueError):
    pass


class BudgetExceeded(WittHeightError):
    """Lattice enumeration hit the configured node budget before finishing."""

    def __init__(self, message, nodes=None, bound_sq=None):
        super().__init__(message)
        self.nodes = nodes
        self.bound_sq = bound_sq


class NotIsotropic(WittHeightError, ValueError):
    pass


class NotAnIsometry(WittHeightError, ValueError):
    pass


class InconsistentResult(WittHeightError):
    """Two independent routes disagreed (an implementation fault)."""
