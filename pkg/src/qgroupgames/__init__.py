"""Sequential quantum games whose move sets are groups of unitaries."""

__version__ = "0.1.0"
