"""Retrieval-augmented agricultural advisory engine."""

__version__ = "0.1.0"
