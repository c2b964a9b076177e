"""Power-series wavefunctions and boundary functionals.

The wavefunction ansatz ``psi(x) = sum_l a_l x^l`` turns the eigenvalue
problem into a linear recurrence for the ``a_l``:

    l*(l-1)*a_l = sum_j v_j * a_{l-2-j}  -  E * a_{l-2}

with ``a_l = 0`` for ``l < 0`` and seeds ``(a_0, a_1)``.  Eigenvalues are the
energies at which a boundary functional vanishes at the walls ``x = +/-L``:
the truncated series itself for a definite-parity solution of a symmetric
potential, or the 2x2 determinant built from the two basis solutions for an
asymmetric one.

Summation at the wall loses digits to cancellation between huge alternating
terms; every boundary value therefore carries an audit (largest partial-term
magnitude, estimated digits cancelled) that callers use to escalate the
working precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .numerics import PrecisionContext, to_real, working_context
from .potential import Potential

__all__ = [
    "SeriesSolution",
    "BoundaryEval",
    "series_coefficients",
    "evaluate_series",
    "boundary_even",
    "boundary_odd",
    "boundary_det",
    "boundary_value",
    "wavefunction_samples",
]


@dataclass(frozen=True)
class SeriesSolution:
    """Truncated coefficient vector a_0..a_D with its seed and term count."""

    a: tuple
    nonzero_terms: int
    seed: tuple

    @property
    def degree(self) -> int:
        return len(self.a) - 1


@dataclass(frozen=True)
class BoundaryEval:
    """Boundary-functional value plus a cancellation audit."""

    value: mpfr
    max_term_magnitude: mpfr
    cancellation_digits: int


def _max_degree(P: Potential, a0, a1, terms: int) -> tuple[int, int]:
    """(max degree, parity) so that `terms` structurally nonzero coefficients
    exist, the seed term included.  parity is 0/1 for pure-parity series of a
    symmetric potential, -1 when every index may be populated."""
    if P.symmetric and a1 == 0 and a0 != 0:
        return 2 * (terms - 1), 0
    if P.symmetric and a0 == 0 and a1 != 0:
        return 1 + 2 * (terms - 1), 1
    return terms - 1, -1


def series_coefficients(P: Potential, E, a0, a1, terms: int,
                        ctx: PrecisionContext) -> SeriesSolution:
    """Run the recurrence until `terms` nonvanishing coefficients exist."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    D, _parity = _max_degree(P, a0, a1, terms)
    with working_context(ctx):
        E = to_real(E, ctx)
        v = {j: to_real(c, ctx) for j, c in P.coeffs.items()}
        a = [to_real(a0, ctx), to_real(a1, ctx)]
        for l in range(2, D + 1):
            t = -E * a[l - 2]
            for j, vj in v.items():
                if l - 2 - j >= 0:
                    t += vj * a[l - 2 - j]
            a.append(t / (l * (l - 1)))
        seed = (a[0], a[1])
        a = a[: D + 1]
    return SeriesSolution(tuple(a), terms, seed)


def evaluate_series(sol: SeriesSolution, x, ctx: PrecisionContext):
    """Sum a_l x^l with a running max-|term| audit.

    Returns (value, max_term_magnitude).
    """
    with working_context(ctx):
        x = to_real(x, ctx)
        s = mpfr(0)
        mx = mpfr(0)
        xp = mpfr(1)
        for al in sol.a:
            term = al * xp
            s += term
            t = abs(term)
            if t > mx:
                mx = t
            xp *= x
    return s, mx


def _audit(value, max_term, ctx: PrecisionContext) -> int:
    """Digits lost to cancellation: log10(max_term / |value|), clamped >= 0.

    A value indistinguishable from zero at this precision reports the full
    working width as cancelled.
    """
    if max_term == 0:
        return 0
    if value == 0:
        return ctx.working_digits
    with working_context(ctx):
        c = gmpy2.log10(max_term / abs(value))
    return max(0, int(gmpy2.ceil(c)))


def boundary_even(P: Potential, E, L, terms: int,
                  ctx: PrecisionContext) -> BoundaryEval:
    """psi(L) for the even basis solution (seed a0=1, a1=0)."""
    if not P.symmetric:
        raise ValueError("parity split requires a symmetric potential")
    sol = series_coefficients(P, E, 1, 0, terms, ctx)
    value, mx = evaluate_series(sol, L, ctx)
    return BoundaryEval(value, mx, _audit(value, mx, ctx))


def boundary_odd(P: Potential, E, L, terms: int,
                 ctx: PrecisionContext) -> BoundaryEval:
    """psi(L) for the odd basis solution (seed a0=0, a1=1)."""
    if not P.symmetric:
        raise ValueError("parity split requires a symmetric potential")
    sol = series_coefficients(P, E, 0, 1, terms, ctx)
    value, mx = evaluate_series(sol, L, ctx)
    return BoundaryEval(value, mx, _audit(value, mx, ctx))


def boundary_det(P: Potential, E, L, terms: int,
                 ctx: PrecisionContext) -> BoundaryEval:
    """Wall determinant f0(L)*f1(-L) - f1(L)*f0(-L).

    f0 and f1 are the basis solutions with seeds (1,0) and (0,1); the
    determinant vanishing is the solvability condition for psi(+/-L)=0.
    Works for symmetric and asymmetric potentials alike.

    Cancellation compounds here: digits lost inside each of the four wall
    sums are lost again when the two products nearly cancel, so the audit
    adds the two stages.
    """
    f0 = series_coefficients(P, E, 1, 0, terms, ctx)
    f1 = series_coefficients(P, E, 0, 1, terms, ctx)
    with working_context(ctx):
        Lr = to_real(L, ctx)
        f0p, m1 = evaluate_series(f0, Lr, ctx)
        f0m, m2 = evaluate_series(f0, -Lr, ctx)
        f1p, m3 = evaluate_series(f1, Lr, ctx)
        f1m, m4 = evaluate_series(f1, -Lr, ctx)
        value = f0p * f1m - f1p * f0m
        prod = max(abs(f0p * f1m), abs(f1p * f0m))
        mx = max(m1, m2, m3, m4, prod)
    canc_sums = max(_audit(f, m, ctx) for f, m in
                    ((f0p, m1), (f0m, m2), (f1p, m3), (f1m, m4)))
    canc_det = _audit(value, prod, ctx)
    return BoundaryEval(value, mx, min(canc_sums + canc_det,
                                       2 * ctx.working_digits))


_KIND_FUNCS = {
    "even": boundary_even,
    "odd": boundary_odd,
    "determinant": boundary_det,
}


def boundary_value(P: Potential, E, L, terms: int, kind: str,
                   ctx: PrecisionContext) -> BoundaryEval:
    """Dispatch on kind in {'even', 'odd', 'determinant'}."""
    try:
        fn = _KIND_FUNCS[kind]
    except KeyError:
        raise ValueError("unknown boundary kind %r" % kind) from None
    return fn(P, E, L, terms, ctx)


def wavefunction_samples(P: Potential, E, L, terms: int, seed,
                         npoints: int, ctx: PrecisionContext):
    """Unnormalized psi on a uniform grid over [-L, L].

    Returns a list of (x, psi) mpfr pairs, npoints long.
    """
    if npoints < 2:
        raise ValueError("npoints must be >= 2")
    a0, a1 = seed
    sol = series_coefficients(P, E, a0, a1, terms, ctx)
    rows = []
    with working_context(ctx):
        Lr = to_real(L, ctx)
        for i in range(npoints):
            x = -Lr + (2 * Lr * i) / (npoints - 1)
            value, _ = evaluate_series(sol, x, ctx)
            rows.append((x, value))
    return rows
