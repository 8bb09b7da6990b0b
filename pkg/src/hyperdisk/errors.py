"""Exception types shared across the package."""

from __future__ import annotations


class SingularAngleError(ValueError):
    """A generating angle touched or left the open interval (0, pi)."""


class InconsistentFieldError(ValueError):
    """An angle field failed a compatibility check (residual or path test)."""


class NoRootError(RuntimeError):
    """A bracketed root finder found no sign change over its bracket."""


class BoundaryExceededError(RuntimeError):
    """A geodesic construction ran into the domain boundary before finishing.

    Carries the arclength that *was* attainable so callers can report or
    retry with a smaller radius.
    """

    def __init__(self, message: str, attained_radius: float | None = None,
                 blocking_direction: float | None = None):
        super().__init__(message)
        self.attained_radius = attained_radius
        self.blocking_direction = blocking_direction


class StartOnSingularityError(ValueError):
    """A geodesic was launched from a point outside the chart's safe domain."""


class SchemaError(ValueError):
    """A CSV file did not carry the expected column header."""
