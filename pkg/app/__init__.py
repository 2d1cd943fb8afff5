"""Boundary-law solver for the hard-core model on Cayley trees."""

__version__ = "0.1.0"
