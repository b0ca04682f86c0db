"""Hardness reductions and testers for Ising models and graph colorings."""

__version__ = "0.1.0"
