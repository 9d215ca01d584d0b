"""Casimir energies of gently curved surfaces beyond the proximity force approximation."""
__version__ = "0.1.0"
