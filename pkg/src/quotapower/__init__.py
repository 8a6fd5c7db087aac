"""Exact and simulated Shapley-Shubik power as a function of the quota."""

__version__ = "0.1.0"
