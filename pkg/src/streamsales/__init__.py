"""Explainable regression toolkit for livestream sales forecasting."""

__version__ = "0.1.0"
