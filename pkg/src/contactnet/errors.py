"""Exception hierarchy.

Every error raised by the toolkit derives from :class:`ContactNetError`.
``DataError`` subclasses signal a problem with the input data (CLI exit
code 3); ``ConfigError`` signals invalid parameters (exit code 2).
"""

from __future__ import annotations


class ContactNetError(Exception):
    """Base class for all toolkit errors."""


class DataError(ContactNetError):
    """Input data is malformed or unsuitable for the requested analysis."""


class ConfigError(ContactNetError):
    """Invalid parameters or configuration."""


class RowError(DataError):
    """A data row failed validation; ``row`` is the 1-based line number in the file."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class DuplicateVertexId(RowError):
    pass


class DuplicateEdge(RowError):
    pass


class SelfLoop(RowError):
    pass


class DanglingEndpoint(RowError):
    pass


class MalformedRow(RowError):
    pass


class IoFailure(ContactNetError):
    pass


class MissingCovariate(DataError):
    pass


class EmptyGraph(DataError):
    pass


class NoTriples(DataError):
    pass


class EmptyTail(DataError):
    pass


class DegenerateTail(DataError):
    pass


class AlphaOutOfRange(ConfigError):
    pass


class BadM(ConfigError):
    pass


class ZeroVariance(DataError):
    pass


class UnassignedVertex(DataError):
    pass


class DegenerateMatrix(DataError):
    pass


class EmptyObservation(DataError):
    pass


class TooFewEdges(DataError):
    pass


class CoincidentVertices(DataError):
    pass


class NotConnected(DataError):
    pass


class MissingPositions(DataError):
    pass
