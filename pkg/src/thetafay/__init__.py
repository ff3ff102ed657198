"""Characteristic combinatorics of Sp(g, F2), Fay's operators, and theta-constant checks."""

__version__ = "0.1.0"
