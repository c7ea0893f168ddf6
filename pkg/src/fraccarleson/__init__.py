"""Numerical toolkit for fractional-monomial Carleson operators."""

__version__ = "0.1.0"
