"""
Errors Module

Exception hierarchy shared by the geometry kernels, the tiling constructions
and the command-line front end.
"""

from typing import Optional


class SimtileError(Exception):
    """Base class for every error raised by simtile."""


class DimensionMismatch(SimtileError, ValueError):
    """Operands live in different ambient dimensions."""


class InvalidGeometry(SimtileError, ValueError):
    """A value violates its type invariant (non-unit normal, empty body, ...)."""


class PreconditionError(SimtileError, ValueError):
    """An operation was called outside of its documented precondition."""


class NoUniqueFixedPoint(SimtileError):
    """The similarity has no fixed point, or infinitely many."""


class NumericalFailure(SimtileError):
    """A computed result failed its own accuracy check."""


class NotFoundWithinBudget(SimtileError):
    """A bounded search ran out of budget before finding an answer."""

    def __init__(self, message: str, budget: int):
        super().__init__(message)
        self.budget = budget


class UntaggedTile(SimtileError):
    """The selected tile carries no similarity to the ambient body."""


class UntaggedTiling(SimtileError):
    """The tiling carries no tagged tile at all."""


class EmptyIntersection(SimtileError):
    """No piece of a meet has nonempty interior."""


class EpsNotFound(SimtileError):
    """No probed radius around the fixed point is dominated by the tile."""


class TargetOutsideHull(SimtileError):
    """The requested fixed point is not in the hull of the available ones."""


class StepBudgetExceeded(SimtileError):
    """The composition search used up its step budget."""


class EmptySlice(SimtileError):
    """The hyperplane misses the body."""


class DegenerateSlice(SimtileError):
    """The hyperplane meets the body without relative interior."""


class FormatError(SimtileError):
    """A tiling document could not be parsed or does not describe valid geometry."""

    def __init__(self, path: str, field: str, reason: str):
        super().__init__(f"{path}: {field}: {reason}")
        self.path = path
        self.field = field
        self.reason = reason


class InteriorFixedPointWarning(UserWarning):
    """The fixed point of a similar tile lies in the interior of the ambient body.

    The ambient body is then a polytope; constructions still run.
    """


def field_path(loc: Optional[tuple]) -> str:
    """Render a pydantic error location as a dotted field path."""
    if not loc:
        return "<document>"
    return ".".join(str(part) for part in loc)
