"""Exact rational scalars and small helpers shared across the package.

All core arithmetic is exact; floats never enter any computation that
produces a reported value.  gmpy2's GMP-backed rationals are used when
available, with the stdlib Fraction as a drop-in fallback.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rat

Rational = Rat

ZERO = Rat(0)
ONE = Rat(1)


def as_rational(value) -> Rational:
    """Coerce ints, strings like "p/q", and existing rationals. Floats are rejected."""
    if isinstance(value, float):
        raise ValueError("floats are not exact; pass an int or a 'p/q' string")
    if isinstance(value, bool):
        raise ValueError("booleans are not rational scalars")
    return Rat(value)


def format_rational(value) -> str:
    """Render as "p" or "p/q"; parses back bit-exactly via as_rational."""
    return str(as_rational(value))


def format_decimal(value, digits: int) -> str:
    """Decimal rendering with round-half-even at the given number of digits."""
    x = as_rational(value)
    num = int(x.numerator)
    den = int(x.denominator)
    sign = "-" if num < 0 else ""
    scaled = abs(num) * 10**digits
    q, r = divmod(scaled, den)
    if 2 * r > den or (2 * r == den and q % 2 == 1):
        q += 1
    text = str(q).rjust(digits + 1, "0")
    if digits == 0:
        return sign + text
    return sign + text[:-digits] + "." + text[-digits:]


def bit_length(value) -> int:
    """Bits needed for the larger of numerator and denominator."""
    x = as_rational(value)
    return max(int(x.numerator).bit_length(), int(x.denominator).bit_length())


def exp_enclosure(t, terms: int = 30) -> tuple:
    """Rational lower/upper bounds on e**t for rational |t| < 1.

    The enclosure is tight (relative width well below 1/terms!), so an
    inner bound can stand in for the irrational e**t in inequalities.
    """
    t = as_rational(t)
    if t < 0:
        lo, hi = exp_enclosure(-t, terms)
        return ONE / hi, ONE / lo
    if t >= 1:
        raise ValueError("exp_enclosure requires |t| < 1")
    total = ONE
    term = ONE
    for k in range(1, terms + 1):
        term = term * t / k
        total += term
    # Remaining tail is term * (t/(n+1) + ...) < term * t / (1 - t).
    if t == 0:
        return total, total
    tail = term * t / (1 - t)
    return total, total + tail
