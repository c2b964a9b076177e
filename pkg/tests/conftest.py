import re

import gmpy2
import pytest
from gmpy2 import mpfr

from boxeig.numerics import digits_to_bits


def sig_parts(text: str):
    """(sign, significant-digit string, decimal exponent) of a decimal literal.

    Exponent convention: value = 0.digits * 10**exp.
    """
    text = text.strip().replace(" ", "")
    m = re.match(r"^([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?$", text)
    if not m or (not m.group(2) and not m.group(3)):
        raise ValueError("not a decimal literal: %r" % text)
    sign = -1 if m.group(1) == "-" else 1
    ipart = m.group(2) or ""
    fpart = m.group(3) or ""
    e = int(m.group(4) or 0)
    digits = (ipart + fpart).lstrip("0")
    if not digits:
        return sign, "0", 0
    lead_zeros = len(ipart + fpart) - len((ipart + fpart).lstrip("0"))
    exp = len(ipart) - lead_zeros + e
    return sign, (ipart + fpart).lstrip("0"), exp


def digits_match(value, printed: str) -> bool:
    """Does `value` reproduce every printed digit of the reference string?

    Accepts either correct rounding or truncation at the printed length
    (published tables mix both conventions).  `value` must carry at least
    four digits beyond the printed length.
    """
    psign, pdigits, pexp = sig_parts(printed)
    n = len(pdigits)
    v = value if isinstance(value, mpfr) else mpfr(str(value),
                                                   digits_to_bits(n + 10))
    if (v < 0 and psign > 0) or (v > 0 and psign < 0):
        return False
    rounded, rexp, _ = v.digits(10, n)
    full, fexp, _ = v.digits(10, n + 4)
    rounded = rounded.lstrip("-")
    truncated = full.lstrip("-")[:n]
    if rexp != pexp and fexp != pexp:
        return False
    return (rexp == pexp and rounded == pdigits) or \
           (fexp == pexp and truncated == pdigits)


@pytest.fixture
def quartic():
    from boxeig.potential import parse_potential

    return parse_potential("x^2+x^4")


@pytest.fixture
def free_particle():
    from boxeig.potential import parse_potential

    return parse_potential("0")
