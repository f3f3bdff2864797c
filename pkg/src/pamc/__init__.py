"""Permutation-aware block synthesis and qubit mapping."""

__version__ = "0.1.0"
