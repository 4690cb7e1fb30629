"""Exception hierarchy.  Every error raised on purpose by the package derives
from :class:`FracharmError` so callers can catch the whole family at once."""


class FracharmError(Exception):
    pass


class InvalidOrder(FracharmError, ValueError):
    pass


class InvalidInterval(FracharmError, ValueError):
    pass


class OverlappingIntervals(FracharmError, ValueError):
    pass


class NoConvergence(FracharmError, RuntimeError):
    pass


class AmbiguousProjection(FracharmError, ValueError):
    pass


class NotOnManifold(FracharmError, ValueError):
    pass


class GridError(FracharmError, ValueError):
    pass


class GridMismatch(FracharmError, ValueError):
    pass


class MisalignedSubwindow(FracharmError, ValueError):
    pass


class ProjectionFailure(FracharmError, RuntimeError):
    pass


class Stalled(FracharmError, RuntimeError):
    pass


class WrongTarget(FracharmError, ValueError):
    pass


class GridTooCoarse(FracharmError, ValueError):
    pass


class RegionNotCovered(FracharmError, ValueError):
    pass


class BadRadii(FracharmError, ValueError):
    pass


class CoverageExceeded(FracharmError, ValueError):
    pass


class InsufficientRadii(FracharmError, ValueError):
    pass


class ConfigError(FracharmError, ValueError):
    """Bad experiment configuration; ``line`` and ``field`` locate the problem."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
