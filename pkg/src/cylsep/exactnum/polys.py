"""Integer polynomials as little-endian coefficient tuples.

The zero polynomial is the empty tuple; every function returns trimmed
tuples (nonzero leading coefficient). Rational-coefficient intermediates
appear only inside division; everything stored is integer and primitive
where noted. Sturm chains are kept sign-faithful by clearing denominators
with positive factors only.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

__all__ = [
    "poly_trim", "poly_degree", "poly_add", "poly_sub", "poly_neg",
    "poly_mul", "poly_scale", "poly_eval_int", "poly_eval_fr",
    "poly_eval_interval", "poly_derivative", "poly_content",
    "poly_primitive", "poly_divmod_fr", "poly_gcd_int", "squarefree_part",
    "poly_compose", "poly_shift_roots_fr", "poly_scale_roots_fr",
    "poly_negate_roots", "poly_reverse", "sturm_chain", "root_count_open",
    "cauchy_root_bound", "det_bareiss", "resultant_int",
    "sylvester_det_formal", "lagrange_int_poly", "charpoly_int",
    "clear_denominators",
]


def poly_trim(p: Sequence[int]) -> tuple:
    p = tuple(p)
    end = len(p)
    while end > 0 and p[end - 1] == 0:
        end -= 1
    return p[:end]


def poly_degree(p: Sequence[int]) -> int:
    return len(poly_trim(p)) - 1


def poly_add(p, q) -> tuple:
    n = max(len(p), len(q))
    return poly_trim(tuple(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
        for i in range(n)))


def poly_sub(p, q) -> tuple:
    n = max(len(p), len(q))
    return poly_trim(tuple(
        (p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0)
        for i in range(n)))


def poly_neg(p) -> tuple:
    return tuple(-c for c in p)


def poly_mul(p, q) -> tuple:
    p, q = poly_trim(p), poly_trim(q)
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(tuple(out))


def poly_scale(p, c) -> tuple:
    if c == 0:
        return ()
    return tuple(c * a for a in poly_trim(p))


def poly_eval_int(p, x: int) -> int:
    acc = 0
    for c in reversed(poly_trim(p)):
        acc = acc * x + c
    return acc


def poly_eval_fr(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(poly_trim(p)):
        acc = acc * x + c
    return acc


def poly_eval_interval(p, iv):
    """Interval Horner evaluation; p may have int or Fraction coefficients."""
    from .intervals import RatInterval

    acc = RatInterval.point(Fraction(0))
    for c in reversed(tuple(p)):
        acc = acc * iv + RatInterval.point(Fraction(c))
    return acc


def poly_derivative(p) -> tuple:
    p = poly_trim(p)
    if len(p) <= 1:
        return ()
    return poly_trim(tuple(i * p[i] for i in range(1, len(p))))


def poly_content(p) -> int:
    p = poly_trim(p)
    return math.gcd(*(abs(c) for c in p)) if p else 0


def poly_primitive(p) -> tuple:
    """Divide out the content and normalize the leading coefficient positive."""
    p = poly_trim(p)
    if not p:
        return ()
    g = poly_content(p)
    if p[-1] < 0:
        g = -g
    return tuple(c // g for c in p)


def _primitive_signfaithful(p_fr) -> tuple:
    """Clear denominators of a Fraction tuple with a positive factor only.

    Multiplying by a positive rational preserves the sign of the polynomial
    at every point, which is what Sturm chains need.
    """
    p_fr = tuple(Fraction(c) for c in p_fr)
    while p_fr and p_fr[-1] == 0:
        p_fr = p_fr[:-1]
    if not p_fr:
        return ()
    den = math.lcm(*(c.denominator for c in p_fr))
    ints = [int(c * den) for c in p_fr]
    g = math.gcd(*(abs(c) for c in ints))
    return tuple(c // g for c in ints)


def clear_denominators(p_fr):
    """Fraction tuple -> (int tuple, positive int d) with p_fr = ints / d."""
    p_fr = tuple(Fraction(c) for c in p_fr)
    while p_fr and p_fr[-1] == 0:
        p_fr = p_fr[:-1]
    if not p_fr:
        return (), 1
    den = math.lcm(*(c.denominator for c in p_fr))
    return tuple(int(c * den) for c in p_fr), den


def poly_divmod_fr(p, q):
    """Long division over the rationals. Returns (quotient, remainder)."""
    q = poly_trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero polynomial")
    rem = [Fraction(c) for c in poly_trim(p)]
    dq = len(q) - 1
    lead = Fraction(q[-1])
    quot = [Fraction(0)] * max(0, len(rem) - dq)
    while len(rem) - 1 >= dq and rem:
        shift = len(rem) - 1 - dq
        factor = rem[-1] / lead
        quot[shift] = factor
        for i in range(dq + 1):
            rem[shift + i] -= factor * q[i]
        while rem and rem[-1] == 0:
            rem.pop()
    return _fr_trim(quot), _fr_trim(rem)


def _fr_trim(t) -> tuple:
    t = tuple(t)
    end = len(t)
    while end > 0 and t[end - 1] == 0:
        end -= 1
    return t[:end]


def poly_gcd_int(p, q) -> tuple:
    """Primitive gcd via rational Euclid; result primitive, positive leading."""
    a, b = poly_primitive(p), poly_primitive(q)
    while b:
        _, r = poly_divmod_fr(a, b)
        a, b = b, _primitive_signfaithful(r)
    return poly_primitive(a) if a else ()


def squarefree_part(p) -> tuple:
    p = poly_primitive(p)
    if poly_degree(p) <= 1:
        return p
    g = poly_gcd_int(p, poly_derivative(p))
    if poly_degree(g) == 0:
        return p
    quot, rem = poly_divmod_fr(p, g)
    assert rem == ()
    return _primitive_signfaithful(quot)


def poly_compose(p, u) -> tuple:
    """p(u(x)) by Horner over polynomials; integer coefficients throughout."""
    acc = ()
    for c in reversed(poly_trim(p)):
        acc = poly_add(poly_mul(acc, u), (c,))
    return acc


def poly_shift_roots_fr(p, r: Fraction) -> tuple:
    """Primitive polynomial whose roots are (roots of p) + r."""
    r = Fraction(r)
    # p(x - r): compose with the linear (-r, 1) over Fractions, then clear
    lin = (-r, Fraction(1))
    accf = ()
    for c in reversed(poly_trim(p)):
        accf = _fr_add(_fr_mul(accf, lin), (Fraction(c),))
    return _primitive_signfaithful(accf)


def poly_scale_roots_fr(p, r: Fraction) -> tuple:
    """Primitive polynomial whose roots are r * (roots of p); r nonzero."""
    r = Fraction(r)
    if r == 0:
        raise ValueError("scale factor must be nonzero")
    p = poly_trim(p)
    # p(x/r) * r^deg: coefficient i picks up r^(deg - i)
    d = len(p) - 1
    coeffs = [Fraction(c) * r ** (d - i) for i, c in enumerate(p)]
    return _primitive_signfaithful(coeffs)


def poly_negate_roots(p) -> tuple:
    p = poly_trim(p)
    return poly_primitive(tuple(c if i % 2 == 0 else -c for i, c in enumerate(p)))


def poly_reverse(p) -> tuple:
    """Primitive polynomial whose roots are reciprocals of nonzero roots of p."""
    p = poly_trim(p)
    while p and p[0] == 0:
        p = p[1:]
    return poly_primitive(tuple(reversed(p)))


def _fr_add(p, q):
    n = max(len(p), len(q))
    out = tuple((p[i] if i < len(p) else Fraction(0)) +
                (q[i] if i < len(q) else Fraction(0)) for i in range(n))
    while out and out[-1] == 0:
        out = out[:-1]
    return out


def _fr_mul(p, q):
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def sturm_chain(p) -> list:
    """Sturm chain of a squarefree primitive polynomial.

    Each remainder is rescaled by a positive rational only, so the sign
    pattern at every point matches the textbook chain exactly.
    """
    chain = [poly_primitive(p)]
    d = poly_derivative(chain[0])
    if d:
        chain.append(_primitive_signfaithful(d))
    while len(chain) >= 2 and poly_degree(chain[-1]) > 0:
        _, r = poly_divmod_fr(chain[-2], chain[-1])
        if not r:
            break
        chain.append(poly_neg(_primitive_signfaithful(r)))
    return chain


def _sign_variations(chain, x: Fraction) -> int:
    signs = []
    for q in chain:
        v = poly_eval_fr(q, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _deflate_root(p, r: Fraction) -> tuple:
    """Divide out (x - r); r must be a root."""
    q, rem = poly_divmod_fr(p, (-r.numerator, r.denominator))
    assert rem == ()
    return _primitive_signfaithful(q)


def root_count_open(p, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of p in the open interval (lo, hi)."""
    if lo >= hi:
        return 0
    p = squarefree_part(p)
    if poly_degree(p) <= 0:
        return 0
    while poly_eval_fr(p, lo) == 0 or poly_eval_fr(p, hi) == 0:
        if poly_eval_fr(p, lo) == 0:
            p = _deflate_root(p, lo)
        else:
            p = _deflate_root(p, hi)
        if poly_degree(p) <= 0:
            return 0
    chain = sturm_chain(p)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def cauchy_root_bound(p) -> Fraction:
    """Strict bound B with all real roots of p in (-B, B)."""
    p = poly_trim(p)
    if poly_degree(p) < 1:
        return Fraction(1)
    lead = abs(p[-1])
    m = max(abs(c) for c in p[:-1]) if len(p) > 1 else 0
    return Fraction(m, lead) + 2


def det_bareiss(matrix) -> int:
    """Exact determinant of an integer matrix (fraction-free Gaussian steps)."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def resultant_int(p, q) -> int:
    """Resultant via the Sylvester matrix; res(x-a, x-b) = a-b convention."""
    p, q = poly_trim(p), poly_trim(q)
    if not p or not q:
        return 0
    m, n = len(p) - 1, len(q) - 1
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    size = m + n
    rows = []
    pd = tuple(reversed(p))  # descending order for the standard layout
    qd = tuple(reversed(q))
    for i in range(n):
        rows.append([0] * i + list(pd) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(qd) + [0] * (size - n - 1 - i))
    return det_bareiss(rows)


def sylvester_det_formal(p, q) -> int:
    """Sylvester determinant at the formal degrees len(p)-1, len(q)-1.

    Unlike resultant_int, leading entries may be zero: the value is the
    specialization of the symbolic resultant built at those formal degrees,
    a fixed constant multiple of the true resultant. That fixed shape is
    what makes pointwise values interpolate to the symbolic determinant.
    """
    p, q = tuple(p), tuple(q)
    if not p or not q:
        return 0
    m, n = len(p) - 1, len(q) - 1
    if m == 0 and n == 0:
        return 1
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    size = m + n
    rows = []
    pd = tuple(reversed(p))
    qd = tuple(reversed(q))
    for i in range(n):
        rows.append([0] * i + list(pd) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(qd) + [0] * (size - n - 1 - i))
    return det_bareiss(rows)


def lagrange_int_poly(xs, ys) -> tuple:
    """Interpolating polynomial through integer points; must have int coeffs."""
    n = len(xs)
    assert len(ys) == n and len(set(xs)) == n
    coeffs = [Fraction(0)] * n
    for x_i, y_i in zip(xs, ys):
        if y_i == 0:
            continue
        basis = (Fraction(1),)
        denom = Fraction(1)
        for x_j in xs:
            if x_j == x_i:
                continue
            basis = _fr_mul(basis, (Fraction(-x_j), Fraction(1)))
            denom *= x_i - x_j
        w = Fraction(y_i) / denom
        for k, c in enumerate(basis):
            coeffs[k] += w * c
    out = []
    for c in coeffs:
        assert c.denominator == 1, "interpolation of non-integer polynomial"
        out.append(int(c))
    return poly_trim(tuple(out))


def charpoly_int(matrix) -> tuple:
    """Characteristic polynomial det(tI - M) of an integer matrix.

    Faddeev-LeVerrier recursion; the divisions are exact over the integers.
    """
    n = len(matrix)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    c = 0
    mk = None
    for k in range(1, n + 1):
        if k == 1:
            mk = [row[:] for row in matrix]
        else:
            adj = [[mk[i][j] + (c if i == j else 0) for j in range(n)]
                   for i in range(n)]
            mk = _mat_mul_int(matrix, adj)
        tr = sum(mk[i][i] for i in range(n))
        assert tr % k == 0
        c = -(tr // k)
        coeffs[n - k] = c
    return poly_trim(tuple(coeffs))


def _mat_mul_int(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]
