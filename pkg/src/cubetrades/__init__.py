"""Classification and analysis of extended 1-perfect, 1-perfect, and
Steiner trades in small hypercubes."""

__version__ = "0.1.0"
