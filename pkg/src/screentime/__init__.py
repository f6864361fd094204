"""In-memory screen-time analytics engine for annotated TV news archives."""

__version__ = "0.1.0"

from .intervals import IntervalSet

__all__ = ["IntervalSet", "__version__"]
