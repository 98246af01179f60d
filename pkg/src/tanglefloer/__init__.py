"""Combinatorial tangle Floer homology and its decategorification."""

__version__ = "0.1.0"
