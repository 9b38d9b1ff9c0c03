"""Topological interlocking of platonic-solid layers: construction and lock verification."""

__version__ = "0.1.0"
