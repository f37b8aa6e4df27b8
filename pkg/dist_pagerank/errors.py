"""Exception hierarchy for dist-pagerank."""

from typing import Any, Optional


class DistPageRankError(Exception):
    """Base class for all errors raised by this package."""


class GraphValidationError(DistPageRankError, ValueError):
    """A web graph or generator parameter violates a structural requirement."""


class EdgeListParseError(GraphValidationError):
    """A line of an edge-list file could not be parsed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class MatrixValidationError(DistPageRankError, ValueError):
    """A dense matrix input is not stochastic or has incompatible dimensions."""


class CapacityError(DistPageRankError, ValueError):
    """A dense or enumerative operation was requested for too large a dimension."""


class NonConvergenceError(DistPageRankError, RuntimeError):
    """An iteration hit its cap before reaching the requested tolerance."""

    def __init__(self, message: str, iterations: int, last_iterate: Optional[Any] = None):
        self.iterations = iterations
        self.last_iterate = last_iterate
        super().__init__(f"{message} (after {iterations} iterations)")


class ConsistencyError(DistPageRankError, RuntimeError):
    """A matrix identity or bound that must hold was found violated."""
