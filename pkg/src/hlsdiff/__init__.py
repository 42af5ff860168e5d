"""Differential testing of software vs. hardware semantics for directive-annotated MiniC."""

__version__ = "0.1.0"
