"""Numerics for positive solutions of Δu = u^tau with tau < 0.

Modules: ``core`` (problem records, closed forms, residuals), ``radial``
(shooting and radial boundary value problems), ``elliptic`` (grid solvers),
``auditor`` (estimate checks), ``spectral`` (linearized spectra and Morse
index), ``potential`` (Riesz integral equation and symmetry tools) and
``cli``.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Annulus,
    Ball,
    Box,
    GridField,
    ProblemSpec,
    RadialProfile,
    make_grid,
    pde_residual,
    quadratic_solution,
    rescale_blowup,
    singular_solution,
)
from .errors import SelabError  # noqa: E402
