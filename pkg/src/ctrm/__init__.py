"""Coupled continuous time random maxima: simulation, limit laws and checks."""

__version__ = "0.1.0"
