"""High-precision eigenvalues of 1D Schrodinger operators between infinite walls.

Units are hbar = 1, 2m = 1 throughout; the box is [-L, L] with Dirichlet
conditions psi(+/-L) = 0.
"""

from .numerics import (PrecisionContext, agree_digits, escalate, make_context,
                       render)
from .potential import Potential, anharmonic, morse_series, parse_potential, \
    render_potential
from .series import (BoundaryEval, SeriesSolution, boundary_det, boundary_even,
                     boundary_odd, series_coefficients, wavefunction_samples)
from .eigensolver import (Bracket, ConvergenceError, EigenvalueRecord,
                          SplittingReport, bisect, converge_in_terms,
                          converge_in_width, scan, solve_spectrum, splitting)
from .oracle import (MorseParams, fd_eigenvalues, morse_exact_energy,
                     square_well_energy)

__version__ = "0.1.0"

__all__ = [
    "PrecisionContext", "make_context", "escalate", "render", "agree_digits",
    "Potential", "anharmonic", "morse_series", "parse_potential",
    "render_potential",
    "SeriesSolution", "BoundaryEval", "series_coefficients",
    "boundary_even", "boundary_odd", "boundary_det", "wavefunction_samples",
    "Bracket", "EigenvalueRecord", "SplittingReport", "ConvergenceError",
    "scan", "bisect", "converge_in_terms", "converge_in_width", "splitting",
    "solve_spectrum",
    "MorseParams", "morse_exact_energy", "square_well_energy",
    "fd_eigenvalues",
]
