"""Exception types shared across the toolkit."""
from __future__ import annotations


class CbtopoError(Exception):
    """Base class for all toolkit errors."""


class EmptyInput(CbtopoError):
    """An operation that needs at least one element received none."""


class MalformedSimplex(CbtopoError):
    """A simplex was built from an empty vertex list or with repeated vertices."""


class UnknownVertex(CbtopoError):
    """A vertex set refers to vertices that are not part of the complex."""


class DimensionOutOfRange(CbtopoError):
    """A dimension argument falls outside the valid range for the complex."""


class NotColored(CbtopoError):
    """The operation requires a task with the opposite coloring convention."""


class InvalidTask(CbtopoError):
    """Task components violate a structural invariant (totality, coloring, images)."""


class BadResilience(CbtopoError):
    """The resilience parameter falls outside the admissible range."""


class InvalidSchedule(CbtopoError):
    """A simulator schedule references an event that cannot occur."""


class ResourceBound(CbtopoError):
    """A bounded search exceeded its configured node budget."""

    def __init__(self, message: str, explored: int = 0) -> None:
        super().__init__(message)
        self.explored = explored
