"""Homogeneous structures with three linear orders: lattices of congruences,
subquotient orders, amalgamation checks, the case analysis and the catalog."""

__version__ = "0.1.0"
