"""Exact Shintani cone computations for totally real fields."""

__version__ = "0.1.0"
