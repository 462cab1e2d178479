"""Exact Bernstein-Sato polynomials, V-filtrations and Hodge ideals of Q-divisors."""

__version__ = "0.1.0"
