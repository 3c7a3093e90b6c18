"""Cubical sweepouts, filling radius estimates and homological filling functions."""

__version__ = "0.1.0"
