"""Shared exception types.

Every error raised on purpose by this package derives from IntrametricError,
so callers can catch one base class at API boundaries (the CLI maps them to
exit code 2).
"""


class IntrametricError(Exception):
    """Base class for all errors raised by intrametric."""


class DimensionMismatchError(IntrametricError, ValueError):
    """Operands live in different dimensions, or a family does not support d."""


class UndecidableToleranceError(IntrametricError):
    """Rationality cannot be decided: tol is coarser than the Farey spacing."""


class UnsupportedFamilyError(IntrametricError):
    """The requested operation has no rule for this exception-set family."""


class NotPermeableFamilyError(IntrametricError):
    """Certificate refused: the family is known not to admit one.

    Attributes:
        family: kind string of the offending exception set.
        reason: human-readable explanation of the known obstruction.
    """

    def __init__(self, family: str, reason: str):
        super().__init__(f"{family}: {reason}")
        self.family = family
        self.reason = reason


class BudgetExhaustedError(IntrametricError):
    """A randomized construction ran out of retries (all samples rejected)."""


class ChartDetourLeavesChartError(IntrametricError):
    """Detour apex would leave the chart's coordinate box; halve the slope."""


class NoConstructionError(IntrametricError):
    """No admissible-path construction is known for these inputs."""


class OutOfDomainError(IntrametricError, ValueError):
    """A point lies outside the operation's domain."""


class DepthExceededError(IntrametricError):
    """A countable-set descriptor exceeds its declared nesting depth."""


class SubsetViolationError(IntrametricError):
    """The alleged subset family produced a point outside the superset."""


class NoFinitePairError(IntrametricError):
    """Every sampled pair had infinite distance; no ratio can be formed."""


class GridTooLargeError(IntrametricError):
    """The requested resolution would exceed the grid-size safety cap."""


class SceneError(IntrametricError, ValueError):
    """A scene description failed validation.

    Attributes:
        field: slash-separated path of the offending entry, e.g.
            "exception_set/kind".
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
