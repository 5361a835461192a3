"""Module initialization."""

__version__ = "0.1.0"
__name__ = "temperedlevy"
