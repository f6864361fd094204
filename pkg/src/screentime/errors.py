"""Exception types shared across the engine."""


class ScreentimeError(Exception):
    """Base class for engine errors."""


class MalformedInputError(ScreentimeError, ValueError):
    """Raised for structurally invalid data (bad intervals, bad records)."""


class VideoMismatchError(ScreentimeError, ValueError):
    """Raised when combining interval sets from different videos."""


class SchemaError(ScreentimeError, ValueError):
    """Raised when an input file violates its record schema.

    Carries the offending file path and 1-based line number when known.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(loc + message)


class QuerySyntaxError(ScreentimeError, ValueError):
    """Raised for unparseable query strings; carries the byte offset."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at offset {offset})")


class UnknownVideoError(ScreentimeError, KeyError):
    """Raised when a video id is not present in the archive."""
