"""Heisenberg XXX chain: structured determinants, Bethe states, form factors
and their thermodynamic limit."""

__version__ = "0.1.0"
