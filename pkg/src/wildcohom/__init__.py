"""Exact equivariant cohomology of Artin-Schreier covers and p-group towers
in characteristic p, with independent brute-force verification oracles."""

__version__ = "0.1.0"
