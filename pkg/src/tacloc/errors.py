"""Exception types shared across the library."""

from __future__ import annotations


class TaclocError(Exception):
    """Base class for all tacloc errors."""


class MismatchedFrames(TaclocError):
    """Marker frames disagree in marker count."""

    def __init__(self, message: str, frame_index: int | None = None):
        super().__init__(message)
        self.frame_index = frame_index


class TooFewMarkers(TaclocError):
    """Fewer than three markers; rigid registration is undefined."""

    def __init__(self, message: str, frame_index: int | None = None):
        super().__init__(message)
        self.frame_index = frame_index


class DegenerateMarkers(TaclocError):
    """Marker covariance rank below 2; the rotation is unobservable."""

    def __init__(self, message: str, frame_index: int | None = None):
        super().__init__(message)
        self.frame_index = frame_index


class TooFewFrames(TaclocError):
    """Not enough moving frames for the requested estimate."""


class IllConditioned(TaclocError):
    """Strict mode: the motion sequence does not determine the estimate."""


class AmbiguousDirection(TaclocError):
    """The direction null space has dimension >= 2; no unique answer."""


class RankDeficientBeyondLine(TaclocError):
    """The edge-point system determines fewer than 2 directions."""


class InvalidSchedule(TaclocError):
    """A scheduled motion violates the scenario's own contact constraint."""


class ParseError(TaclocError):
    """Malformed input file."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaVersionMismatch(TaclocError):
    """File declares a schema this library does not read."""


class NonFiniteValue(TaclocError):
    """A coordinate in the file is NaN or infinite."""
