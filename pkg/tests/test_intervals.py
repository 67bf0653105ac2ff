"""Rational/float intervals and certified elementary-function enclosures."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylsep.exactnum.intervals import (
    FloatInterval,
    RatInterval,
    dyadic_outward,
)
from cylsep.exactnum.enclosures import (
    exp_interval,
    log_interval,
    pow_interval,
    sqrt_interval,
)

LOG2 = 0.6931471805599453
E = 2.718281828459045
SQRT2 = 1.4142135623730951


class TestRatInterval:
    def test_construct_and_width(self):
        iv = RatInterval(Fraction(1, 3), Fraction(1, 2))
        assert iv.width() == Fraction(1, 6)

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            RatInterval(Fraction(1), Fraction(0))

    def test_point(self):
        iv = RatInterval.point(Fraction(5, 7))
        assert iv.lo == iv.hi == Fraction(5, 7)

    def test_add_sub(self):
        a = RatInterval(Fraction(0), Fraction(1))
        b = RatInterval(Fraction(2), Fraction(3))
        assert (a + b).lo == 2 and (a + b).hi == 4
        assert (a - b).lo == -3 and (a - b).hi == -1

    def test_mul_sign_cases(self):
        a = RatInterval(Fraction(-1), Fraction(2))
        b = RatInterval(Fraction(-3), Fraction(1))
        prod = a * b
        # endpoints: min/max of {3, -1, -6, 2}
        assert prod.lo == -6 and prod.hi == 3

    def test_contains(self):
        iv = RatInterval(Fraction(0), Fraction(1))
        assert iv.contains(Fraction(1, 2))
        assert iv.contains(Fraction(1))
        assert not iv.contains(Fraction(2))

    def test_sign(self):
        assert RatInterval(Fraction(1), Fraction(2)).sign() == 1
        assert RatInterval(Fraction(-2), Fraction(-1)).sign() == -1
        assert RatInterval(Fraction(-1), Fraction(1)).sign() is None
        assert RatInterval(Fraction(0), Fraction(0)).sign() == 0

    def test_dyadic_outward_contains(self):
        iv = RatInterval(Fraction(1, 3), Fraction(2, 3))
        out = dyadic_outward(iv, 10)
        assert out.lo <= iv.lo and iv.hi <= out.hi
        assert out.lo.denominator <= 2**10
        assert out.hi.denominator <= 2**10
        assert out.width() <= iv.width() + Fraction(2, 2**10)


class TestFloatInterval:
    def test_from_fraction_contains(self):
        x = Fraction(1, 3)
        iv = FloatInterval.from_fraction(x)
        assert iv.lo <= x <= iv.hi

    def test_outward_add(self):
        a = FloatInterval.from_fraction(Fraction(1, 3))
        b = FloatInterval.from_fraction(Fraction(1, 6))
        c = a + b
        assert c.lo <= Fraction(1, 2) <= c.hi

    def test_outward_mul(self):
        a = FloatInterval.from_fraction(Fraction(1, 3))
        c = a * a
        assert c.lo <= Fraction(1, 9) <= c.hi

    def test_contains_zero(self):
        assert FloatInterval(-1.0, 1.0).contains_zero()
        assert not FloatInterval(0.5, 1.0).contains_zero()

    @given(st.fractions(max_denominator=997, min_value=-1000, max_value=1000),
           st.fractions(max_denominator=997, min_value=-1000, max_value=1000))
    @settings(max_examples=100)
    def test_arithmetic_always_contains(self, x, y):
        a = FloatInterval.from_fraction(x)
        b = FloatInterval.from_fraction(y)
        assert (a + b).lo <= x + y <= (a + b).hi
        assert (a - b).lo <= x - y <= (a - b).hi
        assert (a * b).lo <= x * y <= (a * b).hi


class TestEnclosures:
    def test_log2(self):
        iv = log_interval(Fraction(2), 40)
        assert iv.width() <= Fraction(1, 2**40)
        assert iv.lo <= Fraction(LOG2) <= iv.hi

    def test_log_half_negative(self):
        iv = log_interval(Fraction(1, 2), 40)
        assert iv.lo <= Fraction(-LOG2) <= iv.hi

    def test_log_one_is_zero(self):
        iv = log_interval(Fraction(1), 40)
        assert iv.lo <= 0 <= iv.hi

    def test_log_large(self):
        iv = log_interval(Fraction(10**6), 30)
        assert iv.lo <= Fraction(13.815510557964274) <= iv.hi

    def test_log_requires_positive(self):
        with pytest.raises(ValueError):
            log_interval(Fraction(0), 10)

    def test_exp_one(self):
        iv = exp_interval(Fraction(1), 40)
        assert iv.width() <= Fraction(1, 2**40)
        assert iv.lo <= Fraction(E) <= iv.hi

    def test_exp_zero(self):
        iv = exp_interval(Fraction(0), 20)
        assert iv.lo <= 1 <= iv.hi

    def test_exp_negative(self):
        iv = exp_interval(Fraction(-1), 40)
        assert iv.lo <= Fraction(1 / E) <= iv.hi
        assert iv.lo > 0

    def test_exp_log_roundtrip(self):
        x = Fraction(7, 3)
        iv = exp_interval(log_interval(x, 60).midpoint(), 50)
        assert abs(float(iv.midpoint()) - float(x)) < 1e-12

    def test_sqrt(self):
        iv = sqrt_interval(Fraction(2), 40)
        assert iv.width() <= Fraction(1, 2**40)
        assert iv.lo <= Fraction(SQRT2) <= iv.hi

    def test_sqrt_exact_square(self):
        iv = sqrt_interval(Fraction(9, 4), 20)
        assert iv.lo <= Fraction(3, 2) <= iv.hi

    def test_sqrt_zero(self):
        iv = sqrt_interval(Fraction(0), 10)
        assert iv.lo == 0

    def test_sqrt_negative_rejected(self):
        with pytest.raises(ValueError):
            sqrt_interval(Fraction(-1), 10)

    def test_pow_square_root_case(self):
        iv = pow_interval(Fraction(1, 2), Fraction(1, 2), 40)
        assert iv.lo <= Fraction(0.7071067811865476) <= iv.hi
        assert iv.width() <= Fraction(1, 2**40)

    def test_pow_integer_exponent_matches_exact(self):
        iv = pow_interval(Fraction(2, 3), Fraction(3), 50)
        assert iv.lo <= Fraction(8, 27) <= iv.hi

    def test_pow_zero_exponent(self):
        iv = pow_interval(Fraction(5, 7), Fraction(0), 20)
        assert iv.lo <= 1 <= iv.hi

    def test_pow_interval_exponent(self):
        s = RatInterval(Fraction(1), Fraction(2))
        iv = pow_interval(Fraction(1, 2), s, 30)
        assert iv.lo <= Fraction(1, 4) and Fraction(1, 2) <= iv.hi

    @given(st.fractions(min_value=Fraction(1, 50), max_value=50, max_denominator=99))
    @settings(max_examples=40, deadline=None)
    def test_log_contains_math_log(self, x):
        iv = log_interval(x, 52)
        v = math.log(x)
        assert float(iv.lo) <= v + 1e-9 and v - 1e-9 <= float(iv.hi)

    @given(st.fractions(min_value=-20, max_value=20, max_denominator=99))
    @settings(max_examples=40, deadline=None)
    def test_exp_contains_math_exp(self, x):
        iv = exp_interval(x, 52)
        v = math.exp(x)
        rel = max(abs(v) * 1e-9, 1e-12)
        assert float(iv.lo) <= v + rel and v - rel <= float(iv.hi)

    def test_nesting(self):
        # higher precision gives a sub-interval
        a = log_interval(Fraction(3), 20)
        b = log_interval(Fraction(3), 40)
        assert a.lo <= b.lo and b.hi <= a.hi
