"""Empirical likelihood ratio tests with distribution function constraints."""

__version__ = "0.1.0"
