"""Construction, search and verification of row-dropping certificates."""

__version__ = "0.1.0"
