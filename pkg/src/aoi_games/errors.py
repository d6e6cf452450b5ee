"""Exception hierarchy shared by all solver and simulator modules."""

from __future__ import annotations


class AoiGamesError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AoiGamesError, ValueError):
    """Invalid input: non-positive rate, bad probability, index out of range."""


class BracketingError(AoiGamesError):
    """Scalar root-finder was given an interval without a sign change."""


class ConvergenceError(AoiGamesError):
    """Iteration budget exhausted before the residual target was met."""


class DivergenceError(AoiGamesError):
    """Iterates blew past the divergence cap; signals an unbounded regime."""


class ConsistencyError(AoiGamesError):
    """Two redundant computations of the same quantity disagree."""
