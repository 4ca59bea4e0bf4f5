"""Fractional-order element-free Galerkin solver for nonlocal plates."""
__version__ = "0.1.0"
