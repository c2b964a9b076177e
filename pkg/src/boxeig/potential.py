"""Polynomial potentials with exact-rational coefficients.

A :class:`Potential` is a sparse map ``degree -> mpq``.  Builders cover the
anharmonic family ``mu2*x^2 + g*x^(2k)`` and the truncated power series of
the Morse well ``V0*(1 - exp(-lam*x))^2``; arbitrary polynomials come in
through :func:`parse_potential`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType

import gmpy2
from gmpy2 import mpq

from .numerics import rational_from_text

__all__ = ["Potential", "anharmonic", "morse_series", "morse_coefficient",
           "parse_potential", "render_potential"]


@dataclass(frozen=True)
class Potential:
    """Sparse polynomial potential; immutable, coefficients exact rationals."""

    coeffs: MappingProxyType
    symmetric: bool
    label: str

    @staticmethod
    def from_dict(coeffs: dict, label: str = "") -> "Potential":
        clean = {int(j): mpq(c) for j, c in coeffs.items() if c != 0}
        for j in clean:
            if j < 0:
                raise ValueError("negative degree %d" % j)
        symmetric = all(j % 2 == 0 for j in clean)
        if not label:
            label = render_potential_coeffs(clean)
        return Potential(MappingProxyType(clean), symmetric, label)

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    def __call__(self, x):
        """Evaluate by Horner's rule; exact for rational x."""
        acc = 0
        for j in range(self.degree, -1, -1):
            acc = acc * x + self.coeffs.get(j, 0)
        return acc

    def __str__(self):
        return self.label


def anharmonic(mu2, g, k: int) -> Potential:
    """Build ``mu2*x^2 + g*x^(2k)``; mu2 may be negative (double well)."""
    mu2 = mpq(mu2)
    g = mpq(g)
    if g <= 0:
        raise ValueError("coupling g must be > 0")
    if k < 1:
        raise ValueError("k must be >= 1")
    return Potential.from_dict({2: mu2, 2 * k: g})


def morse_coefficient(V0, lam, j: int) -> mpq:
    """Exact x^j coefficient of the Morse series: V0*lam^j*((-2)^j - 2(-1)^j)/j!."""
    V0 = mpq(V0)
    lam = mpq(lam)
    return V0 * lam**j * ((-2) ** j - 2 * (-1) ** j) / math.factorial(j)


def morse_series(V0, lam, J: int = 30) -> Potential:
    """Morse well expanded to degree J about the origin (x^0, x^1 vanish)."""
    V0 = mpq(V0)
    lam = mpq(lam)
    if V0 <= 0:
        raise ValueError("well depth V0 must be > 0")
    if lam == 0:
        raise ValueError("range parameter lambda must be nonzero")
    if J < 2:
        raise ValueError("truncation degree J must be >= 2")
    coeffs = {j: morse_coefficient(V0, lam, j) for j in range(2, J + 1)}
    p = Potential.from_dict(coeffs)
    return Potential(p.coeffs, p.symmetric,
                     "morse(V0=%s, lambda=%s, J=%d)" % (V0, lam, J))


_TERM_RE = re.compile(
    r"""^\s*
    (?P<coef>[+-]?(?:\d+\s*/\s*\d+|\d+\.\d*|\.\d+|\d+))?   # optional coefficient
    \s*(?P<star>\*)?\s*
    (?P<x>x(?:\s*\^\s*(?P<exp>[+-]?\d+))?)?                # optional x power
    \s*$""",
    re.VERBOSE,
)


class PotentialSyntaxError(ValueError):
    def __init__(self, message, position):
        super().__init__("%s (at position %d)" % (message, position))
        self.position = position


def _split_terms(expr: str):
    """Split on top-level +/- keeping signs; yields (sign, text, position)."""
    terms = []
    sign = 1
    start = 0
    i = 0
    if not expr.strip():
        raise PotentialSyntaxError("empty expression", 0)
    while i < len(expr):
        ch = expr[i]
        if ch in "+-" and i > start and expr[start:i].strip():
            prev = expr[start:i].rstrip()
            # '-' after '*','/','^' or 'e' in a float is not a term break
            if prev and prev[-1] not in "*/^":
                terms.append((sign, expr[start:i], start))
                sign = 1 if ch == "+" else -1
                start = i + 1
        elif ch in "+-" and not expr[start:i].strip():
            sign = sign * (1 if ch == "+" else -1)
            start = i + 1
        i += 1
    terms.append((sign, expr[start:], start))
    return terms


def parse_potential(expr: str) -> Potential:
    """Parse a sum of ``c*x^j`` terms into canonical sparse form.

    Coefficients may be integers, decimals, or rationals ('7/12').
    '0' parses to the zero polynomial (free particle).
    """
    coeffs: dict = {}
    for sgn, text, pos in _split_terms(expr):
        if not text.strip():
            raise PotentialSyntaxError("missing term", pos)
        m = _TERM_RE.match(text)
        if not m or (m.group("coef") is None and m.group("x") is None):
            raise PotentialSyntaxError("cannot parse term %r" % text.strip(), pos)
        coef = mpq(1) if m.group("coef") is None else rational_from_text(m.group("coef"))
        if m.group("x") is None:
            j = 0
        elif m.group("exp") is None:
            j = 1
        else:
            j = int(m.group("exp"))
            if j < 0:
                raise PotentialSyntaxError("negative exponent", pos)
        coeffs[j] = coeffs.get(j, mpq(0)) + sgn * coef
    coeffs = {j: c for j, c in coeffs.items() if c != 0}
    return Potential.from_dict(coeffs, label=expr.strip())


def _coef_text(c: mpq) -> str:
    return str(c)


def render_potential_coeffs(coeffs: dict) -> str:
    if not coeffs:
        return "0"
    parts = []
    for j in sorted(coeffs):
        c = coeffs[j]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if j == 0:
            body = _coef_text(mag)
        else:
            xpow = "x" if j == 1 else "x^%d" % j
            body = xpow if mag == 1 else "%s*%s" % (_coef_text(mag), xpow)
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += sign + body
    return out


def render_potential(p: Potential) -> str:
    """Canonical sorted rendering; parse(render(p)) == p."""
    return render_potential_coeffs(dict(p.coeffs))
