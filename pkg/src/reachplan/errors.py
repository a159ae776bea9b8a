"""Exception types raised by reachplan."""


class ReachplanError(Exception):
    """Base class for all package errors."""


class InvalidAxes(ReachplanError, ValueError):
    """Ellipse semi-axes do not satisfy 0 < b <= a."""


class GridTooCoarse(ReachplanError, ValueError):
    """A non-empty obstacle contains no grid node."""


class DimensionMismatch(ReachplanError, ValueError):
    """Control vector length does not match the arm model."""


class ValidationError(ReachplanError, ValueError):
    """A scenario value violates a model invariant."""


class ParseError(ReachplanError, ValueError):
    """Malformed scenario file. Carries the offending line number."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
