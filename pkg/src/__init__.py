"""fracground - ground states of fractional Schrodinger equations on a periodic box."""

__version__ = "1.0.0"
__author__ = "fracground contributors"
