"""Synthetic structural health monitoring benchmark generator for a fixed-fixed steel beam."""

__version__ = "0.1.0"
