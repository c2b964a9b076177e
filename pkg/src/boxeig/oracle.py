"""Independent references: closed-form spectra and a finite-difference solver.

Nothing here touches the power-series machinery, so agreement between the two
routes is a genuine cross-check rather than a tautology.  The finite-difference
solver runs at machine precision only; it validates leading digits, never the
deep-precision results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpfr, mpq
from scipy.linalg import eigh_tridiagonal

from .numerics import PrecisionContext, to_real, working_context
from .potential import Potential

__all__ = ["MorseParams", "morse_exact_energy", "square_well_energy",
           "fd_eigenvalues"]


@dataclass(frozen=True)
class MorseParams:
    """Depth/range parameters of the Morse well V0*(1 - exp(-lam*x))**2."""

    V0: mpq
    lam: mpq

    def __post_init__(self):
        if self.V0 <= 0:
            raise ValueError("V0 must be > 0")
        if self.lam == 0:
            raise ValueError("lambda must be nonzero")

    @property
    def n_max(self) -> int:
        """Highest bound-state index: floor(sqrt(V0)/lam - 1/2)."""
        ratio = math.sqrt(float(self.V0)) / abs(float(self.lam))
        n = int(math.floor(ratio - 0.5))
        if n < 0:
            raise ValueError("well too shallow: no bound states")
        return n


def _exact_sqrt(q: mpq):
    """Rational square root of q, or None when q is not a perfect square."""
    num, den = q.numerator, q.denominator
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    return None


def morse_exact_energy(p: MorseParams, n: int, ctx: PrecisionContext) -> mpfr:
    """Closed-form bound-state energy of the unbounded Morse well.

        E_n = 2*lam*sqrt(V0) * [(n + 1/2) - (n + 1/2)**2 * lam / (2*sqrt(V0))]

    Exact (rational) when V0 is a perfect rational square.
    """
    V0 = mpq(p.V0)
    lam = abs(mpq(p.lam))
    if n < 0 or n > p.n_max:
        raise ValueError("n=%d outside the bound-state range 0..%d"
                         % (n, p.n_max))
    half = mpq(2 * n + 1, 2)
    root = _exact_sqrt(V0)
    if root is not None:
        return to_real(2 * lam * root * half - lam**2 * half**2, ctx)
    with working_context(ctx):
        s = gmpy2.sqrt(to_real(V0, ctx))
        return 2 * to_real(lam, ctx) * s * to_real(half, ctx) \
            - to_real(lam**2 * half**2, ctx)


def square_well_energy(L, n: int, ctx: PrecisionContext) -> mpfr:
    """Level n of the empty box [-L, L]: (n*pi / (2*L))**2, n = 1, 2, ..."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with working_context(ctx):
        Lr = to_real(L, ctx)
        if not Lr > 0:
            raise ValueError("L must be > 0")
        k = n * gmpy2.const_pi() / (2 * Lr)
        return k * k


def fd_eigenvalues(P: Potential, L: float, gridN: int, count: int):
    """Lowest eigenvalues of the central-difference discretization (float64).

    Dirichlet walls at +/-L, uniform interior grid of gridN points,
    h = 2L/(gridN+1); truncation error is O(h**2).
    """
    if gridN < 16:
        raise ValueError("gridN must be >= 16")
    if count < 1 or count > gridN // 4:
        raise ValueError("count must be in 1..gridN//4")
    if L <= 0:
        raise ValueError("L must be > 0")
    h = 2.0 * L / (gridN + 1)
    x = -L + h * np.arange(1, gridN + 1)
    v = np.zeros_like(x)
    for j, c in P.coeffs.items():
        v += float(c) * x**j
    diag = 2.0 / h**2 + v
    off = np.full(gridN - 1, -1.0 / h**2)
    vals = eigh_tridiagonal(diag, off, select="i",
                            select_range=(0, count - 1),
                            eigvals_only=True)
    return [float(w) for w in vals]
