"""Temporal-logic misuse intrusion detection over finite behavior traces."""

__version__ = "0.1.0"
