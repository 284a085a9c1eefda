"""Dependence measures, tail bounds and Monte Carlo checks for weakly dependent time series."""

__version__ = "0.1.0"
