"""Arbitrary-precision arithmetic contract shared by all solver modules.

Everything downstream computes with GMP/MPFR numbers (via gmpy2):

* ``mpq`` -- exact rationals, used for potential coefficients.
* ``mpfr`` -- arbitrary-precision reals, used for energies and series sums.

Precision is managed in *decimal digits* through :class:`PrecisionContext`.
The context separates the digits the caller wants to trust (``target_digits``)
from the digits actually carried internally (``working_digits``).  Catastrophic
cancellation observed while summing a series is fed back through
:func:`escalate` to widen the gap between the two.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

__all__ = [
    "GUARD_DIGITS",
    "PrecisionContext",
    "make_context",
    "escalate",
    "working_context",
    "digits_to_bits",
    "to_real",
    "rational_from_text",
    "render",
    "agree_digits",
]

#: Minimum number of extra working digits beyond the target.
GUARD_DIGITS = 10

_LOG2_10 = math.log2(10.0)


def digits_to_bits(digits: int) -> int:
    """Binary precision comfortably covering `digits` decimal digits."""
    return int(math.ceil(digits * _LOG2_10)) + 8


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable precision contract: requested vs. carried decimal digits."""

    target_digits: int
    working_digits: int

    def __post_init__(self):
        if self.target_digits < 1:
            raise ValueError("target_digits must be >= 1")
        if self.working_digits < self.target_digits + GUARD_DIGITS:
            raise ValueError(
                "working_digits must be >= target_digits + %d" % GUARD_DIGITS
            )

    @property
    def bits(self) -> int:
        return digits_to_bits(self.working_digits)


def make_context(target_digits: int) -> PrecisionContext:
    """Fresh context carrying `GUARD_DIGITS` digits beyond the target."""
    if target_digits < 1:
        raise ValueError("target_digits must be >= 1")
    return PrecisionContext(target_digits, target_digits + GUARD_DIGITS)


def escalate(ctx: PrecisionContext, observed_cancellation_digits: int) -> PrecisionContext:
    """Widen the working precision to absorb an observed cancellation.

    The returned context carries at least
    ``target + observed_cancellation_digits + GUARD_DIGITS`` digits.
    """
    needed = ctx.target_digits + max(0, observed_cancellation_digits) + GUARD_DIGITS
    return PrecisionContext(ctx.target_digits, max(ctx.working_digits, needed))


def working_context(ctx: PrecisionContext):
    """gmpy2 context manager running at `ctx`'s working precision."""
    return gmpy2.context(precision=ctx.bits)


def to_real(value, ctx: PrecisionContext) -> mpfr:
    """Convert int/str/Fraction/mpq/mpfr to an mpfr at working precision."""
    if isinstance(value, Fraction):
        value = mpq(value.numerator, value.denominator)
    with working_context(ctx):
        if isinstance(value, str):
            return mpfr(value)
        return mpfr(value) * 1  # force rounding into this precision


_RAT_RE = re.compile(r"^([+-]?\d+)\s*/\s*(\d+)$")


def rational_from_text(text: str) -> mpq:
    """Parse 'p/q', integer, or decimal literal into an exact rational."""
    text = text.strip()
    m = _RAT_RE.match(text)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise ValueError("zero denominator in %r" % text)
        return mpq(int(m.group(1)), den)
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError("not a rational literal: %r" % text) from exc
    return mpq(frac.numerator, frac.denominator)


def _significand(x: mpfr, ndigits: int):
    """Decimal significand/exponent of x, correctly rounded to ndigits."""
    ds, exp, _ = x.digits(10, ndigits)
    neg = ds.startswith("-")
    if neg:
        ds = ds[1:]
    return neg, ds, exp


def render(x, ndigits: int) -> str:
    """Render to `ndigits` significant decimal digits (round-half-even).

    Plain positional notation for |x| in [1e-6, 1e9); otherwise 'e'
    notation with a two-digit minimum exponent.  Zero renders as '0'.
    """
    if ndigits < 1:
        raise ValueError("ndigits must be >= 1")
    x = mpfr(x) if not isinstance(x, mpfr) else x
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "-inf" if x < 0 else "inf"
    if x == 0:
        return "0"
    neg, ds, exp = _significand(x, ndigits)
    sign = "-" if neg else ""
    # value = 0.ds * 10**exp
    if -5 <= exp <= 9:
        if exp <= 0:
            body = "0." + "0" * (-exp) + ds
        elif exp >= len(ds):
            body = ds + "0" * (exp - len(ds))
        else:
            body = ds[:exp] + "." + ds[exp:]
        return sign + body
    e = exp - 1  # exponent in d.ddd form
    mant = ds[0] + ("." + ds[1:] if len(ds) > 1 else "")
    esign = "-" if e < 0 else "+"
    return "%s%se%s%02d" % (sign, mant, esign, abs(e))


def agree_digits(a, b, ndigits: int = 80) -> int:
    """Leading significant decimal digits on which a and b agree.

    Returns 0 when signs or decimal exponents differ.  Comparison is on
    the correctly rounded `ndigits`-digit renderings.
    """
    a = mpfr(a) if not isinstance(a, mpfr) else a
    b = mpfr(b) if not isinstance(b, mpfr) else b
    if a == b:
        return ndigits
    if a == 0 or b == 0 or (a < 0) != (b < 0):
        return 0
    na, da, ea = _significand(a, ndigits)
    nb, db, eb = _significand(b, ndigits)
    if ea != eb:
        return 0
    n = 0
    for ca, cb in zip(da, db):
        if ca != cb:
            break
        n += 1
    return n
