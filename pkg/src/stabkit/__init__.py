"""Exact computational checks for bounded-charge homological stability."""

__version__ = "0.1.0"
