"""Thermally driven correlations of two atoms in fiber-coupled cavities."""
__version__ = "0.1.0"
