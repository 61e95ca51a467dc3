"""Generalised Sierpinski gaskets in RP^n built from a tree of integer bases."""

__version__ = "0.1.0"
