"""Numerical beta-change tensor calculus and Killing correspondence for Finsler spaces."""
__version__ = "0.1.0"
