"""Boundary reachability of the 1D heat equation in complex-analytic terms.

Modules: domains (regions and quadrature), spaces (Bergman, Smirnov and
weighted norms), transforms (Laplace, Cauchy, Poisson tools), heat (the
controlled heat equation and its reachable-space operators), cauchy
(boundary Cauchy decomposition on the square), cousin (the two-sector
splitting through a dbar solve), io, verify and cli.
"""

from . import cauchy, cousin, domains, heat, io, spaces, transforms, verify

__all__ = ["cauchy", "cousin", "domains", "heat", "io", "spaces", "transforms", "verify"]
__version__ = "0.1.0"
