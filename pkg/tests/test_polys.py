"""Integer-polynomial utilities: arithmetic, Sturm chains, resultants.

Expected values in this file are hand-derived (long division, Sylvester
determinants, binomial expansion) and frozen; they act as the oracle for
the kernel everything else sits on.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylsep.exactnum.polys import (
    charpoly_int,
    det_bareiss,
    lagrange_int_poly,
    poly_add,
    poly_compose,
    poly_content,
    poly_degree,
    poly_derivative,
    poly_divmod_fr,
    poly_eval_fr,
    poly_eval_int,
    poly_gcd_int,
    poly_mul,
    poly_neg,
    poly_negate_roots,
    poly_primitive,
    poly_reverse,
    poly_scale_roots_fr,
    poly_shift_roots_fr,
    poly_sub,
    poly_trim,
    resultant_int,
    root_count_open,
    squarefree_part,
    sturm_chain,
)

# Little-endian coefficient tuples: p = (c0, c1, ..., cd).
X2_MINUS_2 = (-2, 0, 1)
GOLDEN = (-1, 1, 1)  # x^2 + x - 1, positive root (sqrt5-1)/2


class TestBasics:
    def test_trim_drops_leading_zeros(self):
        assert poly_trim((1, 2, 0, 0)) == (1, 2)
        assert poly_trim((0, 0)) == ()
        assert poly_trim(()) == ()

    def test_degree(self):
        assert poly_degree(()) == -1
        assert poly_degree((5,)) == 0
        assert poly_degree(X2_MINUS_2) == 2

    def test_add_sub_neg(self):
        assert poly_add((1, 1), (1, -1)) == (2,)
        assert poly_sub((1, 1), (1, 1)) == ()
        assert poly_neg((1, -2)) == (-1, 2)

    def test_mul(self):
        # (1 + x)(1 - x) = 1 - x^2
        assert poly_mul((1, 1), (1, -1)) == (1, 0, -1)
        assert poly_mul((), (1, 1)) == ()

    def test_eval(self):
        assert poly_eval_int(X2_MINUS_2, 3) == 7
        assert poly_eval_fr(X2_MINUS_2, Fraction(1, 2)) == Fraction(-7, 4)
        assert poly_eval_fr((), Fraction(5)) == 0

    def test_derivative(self):
        assert poly_derivative((1, 2, 3)) == (2, 6)
        assert poly_derivative((7,)) == ()

    def test_content_primitive(self):
        assert poly_content((6, -9, 12)) == 3
        assert poly_primitive((6, -9, 12)) == (2, -3, 4)
        # primitive normalizes the leading coefficient to be positive
        assert poly_primitive((2, -4)) == (-1, 2)

    def test_divmod(self):
        # x^3 + x - 1 = (x - 1)(x^2 + x - 1) + (3x - 2), by long division
        q, r = poly_divmod_fr((-1, 1, 0, 1), GOLDEN)
        assert q == (Fraction(-1), Fraction(1))
        assert r == (Fraction(-2), Fraction(3))

    def test_divmod_exact(self):
        q, r = poly_divmod_fr(poly_mul(GOLDEN, (5, -1, 2)), GOLDEN)
        assert r == ()
        assert q == (Fraction(5), Fraction(-1), Fraction(2))

    def test_compose(self):
        # p(x) = x^2 - 2 composed with x + 1: (x+1)^2 - 2 = x^2 + 2x - 1
        assert poly_compose(X2_MINUS_2, (1, 1)) == (-1, 2, 1)


class TestGcdSquarefree:
    def test_gcd_common_factor(self):
        a = poly_mul((-1, 0, 1), (2, 1))  # (x^2-1)(x+2)
        b = poly_mul((-1, 0, 1), (3, 1))  # (x^2-1)(x+3)
        assert poly_gcd_int(a, b) == (-1, 0, 1)

    def test_gcd_coprime(self):
        assert poly_gcd_int(X2_MINUS_2, (-3, 0, 1)) == (1,)

    def test_squarefree(self):
        # (x-1)^2 (x+2) -> (x-1)(x+2) = x^2 + x - 2
        p = poly_mul(poly_mul((-1, 1), (-1, 1)), (2, 1))
        assert squarefree_part(p) == (-2, 1, 1)

    def test_squarefree_of_squarefree(self):
        assert squarefree_part(GOLDEN) == GOLDEN


class TestRootTransforms:
    def test_shift_roots(self):
        # roots of x^2 - 2 shifted by +1 satisfy (x-1)^2 - 2 = x^2 - 2x - 1
        assert poly_shift_roots_fr(X2_MINUS_2, Fraction(1)) == (-1, -2, 1)

    def test_shift_roots_rational(self):
        # root 1/2 shifted by 1/3 -> 5/6: primitive of (6x - 5)
        assert poly_shift_roots_fr((-1, 2), Fraction(1, 3)) == (-5, 6)

    def test_scale_roots(self):
        # roots of x^2 - 2 scaled by 3/2 satisfy 2x^2 - 9
        assert poly_scale_roots_fr(X2_MINUS_2, Fraction(3, 2)) == (-9, 0, 2)

    def test_negate_roots(self):
        assert poly_negate_roots((-1, 2)) == (1, 2)
        # even polynomial is fixed up to normalization
        assert poly_negate_roots(X2_MINUS_2) == X2_MINUS_2

    def test_reverse(self):
        # reciprocals of roots of x^2 - 2 satisfy 2x^2 - 1
        assert poly_reverse(X2_MINUS_2) == (-1, 0, 2)
        # zero root is dropped: x^2 - x has roots {0, 1} -> reciprocal {1}
        assert poly_reverse((0, -1, 1)) == (-1, 1)


class TestSturm:
    def test_chain_endpoints(self):
        chain = sturm_chain(X2_MINUS_2)
        assert chain[0] == X2_MINUS_2
        assert poly_degree(chain[-1]) == 0

    def test_root_counts(self):
        p = X2_MINUS_2
        assert root_count_open(p, Fraction(-2), Fraction(2)) == 2
        assert root_count_open(p, Fraction(0), Fraction(2)) == 1
        assert root_count_open(p, Fraction(2), Fraction(3)) == 0

    def test_root_count_endpoint_is_root(self):
        # endpoints that are themselves roots are excluded (open interval)
        p = (0, -1, 1)  # x(x-1)
        assert root_count_open(p, Fraction(0), Fraction(1)) == 0
        assert root_count_open(p, Fraction(-1), Fraction(1)) == 1

    def test_cubic_three_roots(self):
        p = (0, -1, 0, 1)  # x^3 - x, roots -1, 0, 1
        assert root_count_open(p, Fraction(-2), Fraction(2)) == 3


class TestDetResultant:
    def test_bareiss_2x2(self):
        assert det_bareiss([[1, 2], [3, 4]]) == -2

    def test_bareiss_singular(self):
        assert det_bareiss([[1, 2, 3], [2, 4, 6], [1, 0, 1]]) == 0

    def test_bareiss_4x4(self):
        m = [[2, 0, 0, 0], [1, 3, 0, 0], [0, 1, 4, 0], [0, 0, 1, 5]]
        assert det_bareiss(m) == 120

    def test_resultant_linear_pair(self):
        # res(x - a, x - b) = lc^... * q(a) = a - b
        assert resultant_int((-5, 1), (-3, 1)) == 2
        assert resultant_int((-3, 1), (-5, 1)) == -2

    def test_resultant_shared_root(self):
        assert resultant_int(X2_MINUS_2, poly_mul(X2_MINUS_2, (1, 1))) == 0

    def test_resultant_quadratics(self):
        # res(x^2-2, x^2-3) = (2-3)^2 = 1
        assert resultant_int(X2_MINUS_2, (-3, 0, 1)) == 1

    def test_resultant_degree_one_vs_two(self):
        # res(x^2-2, x-1) = p(1) = -1 (monic conventions)
        assert resultant_int(X2_MINUS_2, (-1, 1)) == -1

    def test_lagrange(self):
        # points (0,1), (1,3), (2,7) -> 1 + x + x^2
        assert lagrange_int_poly([0, 1, 2], [1, 3, 7]) == (1, 1, 1)

    def test_lagrange_constant(self):
        assert lagrange_int_poly([0], [4]) == (4,)

    def test_charpoly(self):
        # [[2,1],[1,2]] has charpoly t^2 - 4t + 3
        assert charpoly_int([[2, 1], [1, 2]]) == (3, -4, 1)

    def test_charpoly_identity(self):
        assert charpoly_int([[1, 0], [0, 1]]) == (1, -2, 1)


small_polys = st.lists(st.integers(-9, 9), min_size=1, max_size=5).map(tuple)


class TestProperties:
    @given(small_polys, small_polys)
    def test_mul_degree(self, p, q):
        p, q = poly_trim(p), poly_trim(q)
        r = poly_mul(p, q)
        if p and q:
            assert poly_degree(r) == poly_degree(p) + poly_degree(q)
        else:
            assert r == ()

    @given(small_polys, small_polys)
    @settings(max_examples=50)
    def test_divmod_identity(self, p, q):
        q = poly_trim(q)
        if not q:
            return
        quot, rem = poly_divmod_fr(p, q)
        x = Fraction(7, 3)
        lhs = poly_eval_fr(p, x)
        rhs = poly_eval_fr(quot, x) * poly_eval_fr(q, x) + poly_eval_fr(rem, x)
        assert lhs == rhs
        assert poly_degree(rem) < poly_degree(q)

    @given(small_polys, small_polys)
    @settings(max_examples=50)
    def test_resultant_zero_iff_common_root_case(self, p, q):
        # a shared linear factor forces a zero resultant
        p, q = poly_trim(p), poly_trim(q)
        if not p or not q:
            return
        shared = (1, 1)
        assert resultant_int(poly_mul(p, shared), poly_mul(q, shared)) == 0

    @given(small_polys)
    def test_eval_int_matches_fraction(self, p):
        assert poly_eval_int(p, 3) == poly_eval_fr(p, Fraction(3))
