"""Combinatorial and Monte Carlo toolkit for dilute Wigner matrix moments.

Subpackages:
    walks   -- closed even walks: canonical form, marked steps, reductions, cells
    catalan -- exact Catalan-family counting and bound evaluators
    oracle  -- exact rational moments for small (n, s)
    sim     -- Monte Carlo sampling of dilute Wigner matrices
    cli     -- command line entry point
"""

__version__ = "0.1.0"
