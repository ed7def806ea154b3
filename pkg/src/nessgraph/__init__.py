"""Graph and algebraic criteria for unique stationary states of open spin lattices."""

__version__ = "0.1.0"
