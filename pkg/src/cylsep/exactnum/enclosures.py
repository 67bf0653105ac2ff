"""Certified rational enclosures for log, exp, powers, and square roots.

Everything is Fraction arithmetic; each function returns a RatInterval that
provably contains the exact value, of width at most 2**-bits. Term counts
and the final dyadic rounding grid are monotone in the requested precision,
so enclosures at higher precision are nested inside lower-precision ones.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

from .intervals import RatInterval, dyadic_outward

__all__ = ["log_interval", "exp_interval", "pow_interval", "sqrt_interval"]


def _bits_width(bits: int) -> Fraction:
    return Fraction(1, 1 << bits)


@functools.lru_cache(maxsize=512)
def _atanh_enclosure(z: Fraction, bits: int) -> RatInterval:
    """Enclosure of atanh(z) for |z| <= 1/5, raw (no grid rounding).

    Tail bound: |sum_{k>K} z^(2k+1)/(2k+1)| <= 2|z|^(2K+3)/(2K+3) once
    |z| <= 1/5, since the geometric ratio z^2 <= 1/25.
    """
    assert abs(z) <= Fraction(1, 5)
    target = _bits_width(bits) / 2
    s = Fraction(0)
    term = z
    k = 0
    z2 = z * z
    while True:
        s += term
        bound = 2 * abs(term) * z2 / (2 * k + 3)
        if bound <= target:
            return RatInterval(s - bound, s + bound)
        term = term * z2 * (2 * k + 1) / (2 * k + 3)
        k += 1


@functools.lru_cache(maxsize=64)
def _ln2_enclosure(bits: int) -> RatInterval:
    # log 2 = 2 atanh(1/3); 1/3 > 1/5 so split: log 2 = log(3/2) + log(4/3)
    a = _atanh_enclosure(Fraction(1, 5), bits + 2)   # atanh((3/2-1)/(3/2+1))
    b = _atanh_enclosure(Fraction(1, 7), bits + 2)   # atanh((4/3-1)/(4/3+1))
    return RatInterval(2 * (a.lo + b.lo), 2 * (a.hi + b.hi))


def _log_point(x: Fraction, bits: int) -> RatInterval:
    """Raw enclosure of log x for a positive rational, no grid rounding."""
    if x <= 0:
        raise ValueError("log requires a positive argument")
    m, e = x, 0
    while m >= Fraction(3, 2):
        m /= 2
        e += 1
    while m < Fraction(3, 4):
        m *= 2
        e -= 1
    inner = bits + 3 + (abs(e).bit_length() if e else 0)
    z = (m - 1) / (m + 1)
    body = _atanh_enclosure(z, inner)
    lo, hi = 2 * body.lo, 2 * body.hi
    if e:
        l2 = _ln2_enclosure(inner)
        if e > 0:
            lo, hi = lo + e * l2.lo, hi + e * l2.hi
        else:
            lo, hi = lo + e * l2.hi, hi + e * l2.lo
    return RatInterval(lo, hi)


def log_interval(x, bits: int = 53) -> RatInterval:
    """Enclosure of the natural log; x a positive Fraction or RatInterval."""
    if isinstance(x, RatInterval):
        lo_enc = _log_point(x.lo, bits + 2)
        hi_enc = _log_point(x.hi, bits + 2) if x.hi != x.lo else lo_enc
        return dyadic_outward(RatInterval(lo_enc.lo, hi_enc.hi), bits + 2)
    return dyadic_outward(_log_point(Fraction(x), bits + 2), bits + 2)


def _exp_small(h: Fraction, bits: int) -> RatInterval:
    """Raw Taylor enclosure of exp(h) for |h| <= 1/8."""
    target = _bits_width(bits) / 2
    s = Fraction(1)
    term = Fraction(1)
    k = 0
    while True:
        k += 1
        term = term * h / k
        s += term
        bound = 2 * abs(term * h) / (k + 1)
        if bound <= target:
            return RatInterval(s - bound, s + bound)


def _exp_point(x: Fraction, bits: int) -> RatInterval:
    x = Fraction(x)
    shifts = 0
    h = x
    while abs(h) > Fraction(1, 8):
        h /= 2
        shifts += 1
    inner = bits + 2 * shifts + 8
    while True:
        enc = _exp_small(h, inner)
        lo, hi = enc.lo, enc.hi
        if lo <= 0:
            inner += 16
            continue
        for _ in range(shifts):
            lo, hi = lo * lo, hi * hi
            # cap coefficient growth; outward so containment is kept
            capped = dyadic_outward(RatInterval(lo, hi), inner + 64)
            lo, hi = max(capped.lo, Fraction(0)), capped.hi
        if hi - lo <= _bits_width(bits):
            return RatInterval(lo, hi)
        inner += 16


def exp_interval(x, bits: int = 53) -> RatInterval:
    """Enclosure of exp; x a Fraction or RatInterval. Lower bound stays > 0."""
    if isinstance(x, RatInterval):
        lo_enc = _exp_point(x.lo, bits + 2)
        hi_enc = _exp_point(x.hi, bits + 2) if x.hi != x.lo else lo_enc
        raw = RatInterval(lo_enc.lo, hi_enc.hi)
    else:
        raw = _exp_point(Fraction(x), bits + 2)
    out = dyadic_outward(raw, bits + 2)
    if out.lo <= 0 < raw.lo:
        out = RatInterval(raw.lo, out.hi)
    return out


def pow_interval(base, exponent, bits: int = 53) -> RatInterval:
    """Enclosure of base**exponent for positive base.

    base: positive Fraction or RatInterval; exponent: Fraction or
    RatInterval. Integer exponents of rational bases are computed exactly.
    """
    if not isinstance(exponent, RatInterval):
        exponent = Fraction(exponent)
    if isinstance(base, RatInterval) and base.lo == base.hi:
        base = base.lo
    if isinstance(exponent, Fraction) and not isinstance(base, RatInterval):
        base = Fraction(base)
        if base <= 0:
            raise ValueError("pow requires a positive base")
        if exponent.denominator == 1 and abs(exponent) <= 64:
            v = base ** int(exponent)
            return RatInterval.point(v)
    # a genuine interval argument has inherent value spread, so the width
    # target can only be enforced for point arguments
    spread = (isinstance(exponent, RatInterval) and exponent.width() > 0) \
        or (isinstance(base, RatInterval) and base.width() > 0)
    inner = bits + 8
    while True:
        logb = log_interval(base, inner)
        if isinstance(exponent, RatInterval):
            m = logb * exponent
        else:
            m = logb * RatInterval.point(exponent)
        e = exp_interval(m, inner)
        if spread or e.width() <= _bits_width(bits):
            return dyadic_outward(e, bits + 2)
        inner += 16


def sqrt_interval(x, bits: int = 53) -> RatInterval:
    """Enclosure of the square root of a nonnegative Fraction."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt requires a nonnegative argument")
    if x == 0:
        return RatInterval.point(Fraction(0))
    g = bits + 1
    scaled = (x.numerator << (2 * g)) // x.denominator
    s = math.isqrt(scaled)
    return RatInterval(Fraction(s, 1 << g), Fraction(s + 1, 1 << g))
