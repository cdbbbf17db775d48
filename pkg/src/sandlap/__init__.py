"""Sandpile-group invariants and corank statistics of random directed graphs."""

__version__ = "0.1.0"
