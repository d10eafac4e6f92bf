"""Truncated q-series over Z/mZ, eta-quotient bookkeeping and congruence certificates."""

__version__ = "0.1.0"
