"""Interval types: exact rational intervals and outward-rounded float intervals.

RatInterval is the workhorse for certified enclosures; every arithmetic
operation returns an interval containing the exact image set. FloatInterval
is the fast advisory filter used by the search pruners: hardware floats with
outward rounding via math.nextafter, so containment still holds, only
tightness is sacrificed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = ["RatInterval", "FloatInterval", "dyadic_outward"]


@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @classmethod
    def point(cls, x) -> "RatInterval":
        x = Fraction(x)
        return cls(x, x)

    @classmethod
    def hull(cls, *values) -> "RatInterval":
        vals = [Fraction(v) for v in values]
        return cls(min(vals), max(vals))

    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def intersects(self, other: "RatInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def sign(self):
        """+1/-1 if strictly one-signed, 0 if the point interval {0}, else None."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == 0 and self.hi == 0:
            return 0
        return None

    def abs_upper(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def abs_lower(self) -> Fraction:
        if self.lo > 0:
            return self.lo
        if self.hi < 0:
            return -self.hi
        return Fraction(0)

    def __add__(self, other):
        other = _coerce(other)
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        other = _coerce(other)
        return RatInterval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __mul__(self, other):
        other = _coerce(other)
        prods = (self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi)
        return RatInterval(min(prods), max(prods))

    def __rmul__(self, other):
        return self.__mul__(other)

    def square(self) -> "RatInterval":
        if self.lo >= 0:
            return RatInterval(self.lo * self.lo, self.hi * self.hi)
        if self.hi <= 0:
            return RatInterval(self.hi * self.hi, self.lo * self.lo)
        m = max(-self.lo, self.hi)
        return RatInterval(Fraction(0), m * m)


def _coerce(x) -> RatInterval:
    if isinstance(x, RatInterval):
        return x
    return RatInterval.point(Fraction(x))


def dyadic_outward(iv: RatInterval, bits: int) -> RatInterval:
    """Round endpoints outward onto the 2^-bits grid, capping denominator growth."""
    scale = 1 << bits
    lo = Fraction(math.floor(iv.lo * scale), scale)
    hi = Fraction(math.ceil(iv.hi * scale), scale)
    return RatInterval(lo, hi)


def _next_down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _next_up(x: float) -> float:
    return math.nextafter(x, math.inf)


@dataclass(frozen=True)
class FloatInterval:
    lo: float
    hi: float

    @classmethod
    def from_fraction(cls, x: Fraction) -> "FloatInterval":
        try:
            f = float(x)
        except OverflowError:
            f = math.inf if x > 0 else -math.inf
        if math.isinf(f):
            return cls(_next_down(f), math.inf) if f > 0 \
                else cls(-math.inf, _next_up(f))
        # float() rounds to nearest; one ulp either way restores containment
        return cls(_next_down(f), _next_up(f))

    @classmethod
    def point(cls, x: float) -> "FloatInterval":
        return cls(x, x)

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def abs_lower(self) -> float:
        if self.lo > 0.0:
            return self.lo
        if self.hi < 0.0:
            return -self.hi
        return 0.0

    def abs_upper(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def __add__(self, other):
        return FloatInterval(_next_down(self.lo + other.lo),
                             _next_up(self.hi + other.hi))

    def __sub__(self, other):
        return FloatInterval(_next_down(self.lo - other.hi),
                             _next_up(self.hi - other.lo))

    def __neg__(self):
        return FloatInterval(-self.hi, -self.lo)

    def __mul__(self, other):
        prods = (self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi)
        return FloatInterval(_next_down(min(prods)), _next_up(max(prods)))

    def scale(self, c: float) -> "FloatInterval":
        a, b = self.lo * c, self.hi * c
        if a > b:
            a, b = b, a
        return FloatInterval(_next_down(a), _next_up(b))
