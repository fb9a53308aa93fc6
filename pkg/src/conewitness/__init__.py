"""Exact classicality (simplex-embeddability) analysis of prepare-measure fragments."""

__version__ = "0.1.0"
