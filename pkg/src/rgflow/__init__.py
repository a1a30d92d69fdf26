"""Symbolic Wick-contraction algebra and numerical renormalization-group flows."""

__version__ = "0.1.0"
