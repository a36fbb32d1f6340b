"""Numerical and exact verification of local formulas behind GSp(4) Petersson norms."""

__version__ = "0.1.0"
