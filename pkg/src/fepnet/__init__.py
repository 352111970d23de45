"""Free-energy agents, attachment kernels and the degree distributions they grow."""

__version__ = "0.1.0"
