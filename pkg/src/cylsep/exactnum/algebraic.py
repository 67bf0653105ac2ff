"""Real algebraic numbers with certified sign determination.

A value is a square-free primitive integer polynomial together with an
isolating rational interval. Rationals are the degree-1 case and carry a
degenerate [r, r] isolator; arithmetic collapses back to that form whenever
the result is a rational of moderate height, so rational fast paths stay
available downstream.

Zero tests never rely on numeric refinement alone: a value is zero exactly
when gcd(p, defining) has a root inside the isolator. Arithmetic on two
genuinely algebraic operands goes through resultants, built by evaluating
the Sylvester matrix at integer points and interpolating (the matrix shape
is fixed, so interpolation recovers the symbolic determinant).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .intervals import FloatInterval, RatInterval
from .polys import (
    cauchy_root_bound,
    clear_denominators,
    lagrange_int_poly,
    poly_degree,
    poly_divmod_fr,
    poly_eval_fr,
    poly_eval_interval,
    poly_gcd_int,
    poly_mul,
    poly_negate_roots,
    poly_reverse,
    poly_scale_roots_fr,
    poly_shift_roots_fr,
    poly_trim,
    resultant_int,
    squarefree_part,
    sturm_chain,
    sylvester_det_formal,
    _deflate_root,
    _sign_variations,
)

__all__ = [
    "AlgebraicNumber", "isolate_real_roots", "make_algebraic", "sign_at",
    "refine", "s_add", "s_sub", "s_mul", "s_div", "s_neg", "s_abs",
    "s_sign", "s_cmp", "s_eq", "eval_int_poly", "eval_poly2", "as_rational",
    "to_float", "float_enclosure", "fraction_enclosure", "scalar_to_json",
    "scalar_from_json",
]

_QUICK_RAT_BITS = 64  # rationalization attempted up to denominator ~2^31
_DEEP_RAT_BITS = 256


@dataclass(frozen=True)
class AlgebraicNumber:
    """Square-free defining polynomial plus isolating interval.

    Invariants: poly is primitive with positive leading coefficient; either
    lo == hi (rational value, poly linear) or poly(lo)*poly(hi) < 0 with
    exactly one real root in (lo, hi).

    rep, when set, is (gen_poly, gen_lo, gen_hi, coords): the value equals
    sum coords[i] * gamma^i for the root gamma of gen_poly isolated in
    (gen_lo, gen_hi). Values produced from a common generator keep reps
    over that generator, so chained arithmetic stays inside its number
    field at bounded degree instead of compounding resultants. rep never
    participates in equality or hashing; it is a certificate of field
    membership, not part of the value's identity.
    """

    poly: tuple
    lo: Fraction
    hi: Fraction
    rep: tuple | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_rational(cls, r) -> "AlgebraicNumber":
        r = Fraction(r)
        return cls((-r.numerator, r.denominator), r, r)

    @property
    def is_rational(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("not a rational value")
        return self.lo

    def interval(self) -> RatInterval:
        return RatInterval(self.lo, self.hi)

    def __repr__(self):
        if self.is_rational:
            return f"AlgebraicNumber({self.lo})"
        return (f"AlgebraicNumber(poly={self.poly}, "
                f"~{float((self.lo + self.hi) / 2):.6g})")


def _coerce(x) -> AlgebraicNumber:
    if isinstance(x, AlgebraicNumber):
        return x
    return AlgebraicNumber.from_rational(x)


def _gen_rep(x: AlgebraicNumber) -> tuple:
    """Coordinates of an irrational x over some generator (self if untagged)."""
    if x.rep is not None:
        return x.rep
    return (x.poly, x.lo, x.hi, (Fraction(0), Fraction(1)))


def _attach_rep(v: AlgebraicNumber, gen: tuple, coords) -> AlgebraicNumber:
    if not v.is_rational:
        object.__setattr__(
            v, "rep",
            (gen[0], gen[1], gen[2], tuple(Fraction(c) for c in coords)))
    return v


def _coords_value(gen: tuple, coords) -> AlgebraicNumber:
    """The value sum coords[i]*gamma^i over the generator described by gen."""
    x = AlgebraicNumber(gen[0], gen[1], gen[2])
    return eval_int_poly(tuple(coords), x)


def _polyfr_compose_mod(w, c: tuple, gp: tuple) -> tuple:
    """w(c(x)) reduced mod gp, all over the rationals (Horner)."""
    acc = ()
    for k in reversed(tuple(w)):
        acc = _reduce_mod(poly_mul(acc, c), gp)
        acc = _fr_sub(acc, (-Fraction(k),))
    return acc


def _polyfr_invmod(c, p: tuple):
    """Inverse of c mod p over the rationals, or None when gcd(c, p) != 1."""
    c = tuple(Fraction(k) for k in poly_trim(c))
    if not c:
        return None
    r0, r1 = tuple(Fraction(k) for k in p), c
    s0, s1 = (), (Fraction(1),)
    while poly_degree(r1) >= 1:
        q, r = poly_divmod_fr(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _fr_sub(s0, poly_mul(q, s1))
        if not r1:
            return None
    if not r1:
        return None
    inv_lead = 1 / Fraction(r1[0])
    return tuple(k * inv_lead for k in s1)


def _fr_sub(p, q) -> tuple:
    n = max(len(p), len(q))
    out = tuple((p[i] if i < len(p) else Fraction(0))
                - (q[i] if i < len(q) else Fraction(0)) for i in range(n))
    while out and out[-1] == 0:
        out = out[:-1]
    return out


@functools.lru_cache(maxsize=4096)
def _chain_cached(p: tuple):
    return tuple(sturm_chain(p))


def _count_open_sf(p_sf: tuple, lo: Fraction, hi: Fraction) -> int:
    """Open-interval root count for a squarefree p with p(lo), p(hi) != 0."""
    chain = _chain_cached(p_sf)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def _simplest_in(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with smallest denominator (then numerator) in [lo, hi]."""
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -_simplest_in(-hi, -lo)
    # 0 < lo <= hi
    n = floor(lo)
    a, b = lo - n, hi - n
    if a == 0:
        return Fraction(n)
    if b >= 1:
        return Fraction(n + 1)
    return n + 1 / _simplest_in(1 / b, 1 / a)


def _bisect_once(p_sf, lo, hi):
    """One bisection step keeping the sign-change half; None if mid is a root."""
    mid = (lo + hi) / 2
    v = poly_eval_fr(p_sf, mid)
    if v == 0:
        return None, mid
    if (poly_eval_fr(p_sf, lo) > 0) != (v > 0):
        return (lo, mid), None
    return (mid, hi), None


def _try_rationalize(p_sf, lo, hi, bits) -> Fraction | None:
    """Search for a rational root of p_sf that is the unique root in (lo, hi)."""
    target = Fraction(1, 1 << bits)
    while True:
        cand = _simplest_in(lo, hi)
        if lo < cand < hi and poly_eval_fr(p_sf, cand) == 0:
            return cand
        if hi - lo <= target:
            return None
        half, mid_root = _bisect_once(p_sf, lo, hi)
        if mid_root is not None:
            return mid_root
        lo, hi = half


def make_algebraic(poly, lo, hi) -> AlgebraicNumber:
    """Normalize (poly, window) into a canonical AlgebraicNumber.

    The window is closed: a root sitting exactly on an endpoint is accepted
    and returned as that rational. Exactly one root of poly must lie in
    [lo, hi].
    """
    lo, hi = Fraction(lo), Fraction(hi)
    p_sf = squarefree_part(poly)
    if poly_degree(p_sf) < 1:
        raise ValueError("defining polynomial must have positive degree")
    if lo > hi:
        raise ValueError("window endpoints out of order")
    at_lo = poly_eval_fr(p_sf, lo) == 0
    at_hi = hi > lo and poly_eval_fr(p_sf, hi) == 0
    work = _strip_endpoint_roots(p_sf, lo, hi)
    inner = _count_open_sf(work, lo, hi) \
        if poly_degree(work) >= 1 and lo < hi else 0
    total = int(at_lo) + int(at_hi) + inner
    if total != 1:
        raise ValueError(f"window contains {total} roots, expected exactly 1")
    if at_lo:
        return AlgebraicNumber.from_rational(lo)
    if at_hi:
        return AlgebraicNumber.from_rational(hi)
    if poly_degree(p_sf) == 1:
        return AlgebraicNumber.from_rational(Fraction(-p_sf[0], p_sf[1]))
    r = _try_rationalize(p_sf, lo, hi, _QUICK_RAT_BITS)
    if r is not None:
        return AlgebraicNumber.from_rational(r)
    # shrink until the sign change is visible (guaranteed: one simple root)
    while (poly_eval_fr(p_sf, lo) > 0) == (poly_eval_fr(p_sf, hi) > 0):
        half, mid_root = _bisect_once(p_sf, lo, hi)
        if mid_root is not None:
            return AlgebraicNumber.from_rational(mid_root)
        lo, hi = half
    out = AlgebraicNumber(p_sf, lo, hi)
    return _attach_rep(out, (p_sf, lo, hi), (Fraction(0), Fraction(1)))


def _strip_endpoint_roots(p_sf, lo, hi):
    work = p_sf
    if poly_eval_fr(work, lo) == 0:
        work = _deflate_root(work, lo)
    if poly_degree(work) >= 1 and hi > lo and poly_eval_fr(work, hi) == 0:
        work = _deflate_root(work, hi)
    return work


def isolate_real_roots(p, lo=None, hi=None) -> tuple:
    """All real roots of p in the closed window [lo, hi], in increasing order.

    Without a window, a Cauchy bound covers every real root. Roots are
    returned as AlgebraicNumbers with pairwise disjoint isolators.
    """
    p = poly_trim(p)
    if not p:
        raise ValueError("cannot isolate roots of the zero polynomial")
    p_sf = squarefree_part(p)
    if poly_degree(p_sf) < 1:
        return ()
    if lo is None:
        lo = -cauchy_root_bound(p_sf)
    if hi is None:
        hi = cauchy_root_bound(p_sf)
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("window endpoints out of order")
    found = []
    work = p_sf
    if poly_eval_fr(work, lo) == 0:
        found.append(AlgebraicNumber.from_rational(lo))
        work = _deflate_root(work, lo)
    if hi > lo and poly_degree(work) >= 1 and poly_eval_fr(work, hi) == 0:
        found.append(AlgebraicNumber.from_rational(hi))
        work = _deflate_root(work, hi)
    if poly_degree(work) >= 1 and lo < hi:
        _isolate_open(work, lo, hi, found)
    found.sort(key=lambda a: (a.lo, a.hi))
    return tuple(found)


def _isolate_open(p_sf, lo, hi, out):
    """Collect roots in the open interval; p_sf(lo), p_sf(hi) nonzero."""
    total = _count_open_sf(p_sf, lo, hi)

    def rec(a, b, cnt):
        if cnt == 0:
            return
        if cnt == 1:
            out.append(make_algebraic(p_sf, a, b))
            return
        m = (a + b) / 2
        if poly_eval_fr(p_sf, m) == 0:
            out.append(AlgebraicNumber.from_rational(m))
            eta = (b - a) / 4
            while (poly_eval_fr(p_sf, m - eta) == 0
                   or poly_eval_fr(p_sf, m + eta) == 0
                   or _count_open_sf(p_sf, m - eta, m + eta) != 1):
                eta /= 2
            rec(a, m - eta, _count_open_sf(p_sf, a, m - eta))
            rec(m + eta, b, _count_open_sf(p_sf, m + eta, b))
        else:
            left = _count_open_sf(p_sf, a, m)
            rec(a, m, left)
            rec(m, b, cnt - left)

    rec(lo, hi, total)


def _refine_step(x: AlgebraicNumber) -> AlgebraicNumber:
    if x.is_rational:
        return x
    half, mid_root = _bisect_once(x.poly, x.lo, x.hi)
    if mid_root is not None:
        return AlgebraicNumber.from_rational(mid_root)
    return AlgebraicNumber(x.poly, half[0], half[1], x.rep)


def refine(x: AlgebraicNumber, width) -> AlgebraicNumber:
    """Shrink the isolator to width <= width; value unchanged."""
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    while x.hi - x.lo > width:
        x = _refine_step(x)
    return x


def sign_at(p, x: AlgebraicNumber) -> int:
    """Exact sign of p at x; p has integer (or Fraction) coefficients."""
    ints, _den = clear_denominators(p)
    if not ints:
        return 0
    if x.is_rational:
        v = poly_eval_fr(ints, x.value)
        return 0 if v == 0 else (1 if v > 0 else -1)
    g = poly_gcd_int(ints, x.poly)
    if poly_degree(g) >= 1 and _count_open_sf(squarefree_part(g), x.lo, x.hi) >= 1:
        return 0
    q_sf = squarefree_part(ints)
    lo, hi = x.lo, x.hi
    while True:
        if (poly_eval_fr(q_sf, lo) != 0 and poly_eval_fr(q_sf, hi) != 0
                and _count_open_sf(q_sf, lo, hi) == 0):
            v = poly_eval_fr(ints, (lo + hi) / 2)
            return 1 if v > 0 else -1
        half, mid_root = _bisect_once(x.poly, lo, hi)
        if mid_root is not None:
            v = poly_eval_fr(ints, mid_root)
            return 0 if v == 0 else (1 if v > 0 else -1)
        lo, hi = half


def s_sign(x) -> int:
    x = _coerce(x)
    if x.is_rational:
        v = x.value
        return 0 if v == 0 else (1 if v > 0 else -1)
    if poly_eval_fr(x.poly, Fraction(0)) == 0 and x.lo < 0 < x.hi:
        return 0
    lo, hi = x.lo, x.hi
    while lo < 0 < hi:
        half, mid_root = _bisect_once(x.poly, lo, hi)
        if mid_root is not None:
            return 0 if mid_root == 0 else (1 if mid_root > 0 else -1)
        lo, hi = half
    return 1 if lo >= 0 else -1


def s_cmp(a, b) -> int:
    a, b = _coerce(a), _coerce(b)
    if a.is_rational and b.is_rational:
        va, vb = a.value, b.value
        return 0 if va == vb else (1 if va > vb else -1)
    if a.hi < b.lo:
        return -1
    if b.hi < a.lo:
        return 1
    if not a.is_rational and not b.is_rational:
        ra, rb = _gen_rep(a), _gen_rep(b)
        if ra[:3] == rb[:3]:
            diff = _fr_sub(ra[3], rb[3])
            if not diff:
                return 0
            return sign_at(diff, AlgebraicNumber(ra[0], ra[1], ra[2]))
    # equality is decided through a common factor in the overlap
    if a.is_rational:
        r = a.value
        if poly_eval_fr(b.poly, r) == 0 and b.lo < r < b.hi:
            return 0
    elif b.is_rational:
        r = b.value
        if poly_eval_fr(a.poly, r) == 0 and a.lo < r < a.hi:
            return 0
    else:
        g = poly_gcd_int(a.poly, b.poly)
        if poly_degree(g) >= 1:
            ilo, ihi = max(a.lo, b.lo), min(a.hi, b.hi)
            if ilo < ihi and _count_open_sf(squarefree_part(g), ilo, ihi) >= 1:
                return 0
    while True:
        if a.hi < b.lo:
            return -1
        if b.hi < a.lo:
            return 1
        a, b = _refine_step(a), _refine_step(b)
        if a.is_rational and b.is_rational:
            va, vb = a.value, b.value
            return 0 if va == vb else (1 if va > vb else -1)


def s_eq(a, b) -> bool:
    return s_cmp(a, b) == 0


def s_neg(x) -> AlgebraicNumber:
    x = _coerce(x)
    if x.is_rational:
        return AlgebraicNumber.from_rational(-x.value)
    gp, glo, ghi, cx = _gen_rep(x)
    out = AlgebraicNumber(poly_negate_roots(x.poly), -x.hi, -x.lo)
    return _attach_rep(out, (gp, glo, ghi), tuple(-c for c in cx))


def s_abs(x) -> AlgebraicNumber:
    x = _coerce(x)
    return s_neg(x) if s_sign(x) < 0 else x


def _sample_points(count):
    pts = [0]
    k = 1
    while len(pts) < count:
        pts.append(k)
        if len(pts) < count:
            pts.append(-k)
        k += 1
    return pts


def _resultant_in_t(p: tuple, q_at, deg_bound: int) -> tuple:
    """Interpolate t -> res_x(p, q_at(t)) through deg_bound + 1 points.

    q_at(t) must return an x-polynomial whose length and leading coefficient
    do not depend on t, so the determinant is a polynomial in t of the
    predicted degree and pointwise resultants interpolate it exactly.
    """
    pts = _sample_points(deg_bound + 1)
    vals = [resultant_int(p, q_at(t)) for t in pts]
    return lagrange_int_poly(pts, vals)


def _isolate_value(r_poly: tuple, operands, iv_of) -> AlgebraicNumber:
    """Build the AlgebraicNumber for a value known to be a root of r_poly.

    operands are refined until the enclosing interval iv_of(operands)
    pins down a single root of r_poly (counting the closed interval).
    """
    r_sf = squarefree_part(r_poly)
    if poly_degree(r_sf) < 1:
        raise ValueError("degenerate resultant")
    operands = list(operands)
    while True:
        iv = iv_of(operands)
        at_lo = poly_eval_fr(r_sf, iv.lo) == 0
        at_hi = iv.hi > iv.lo and poly_eval_fr(r_sf, iv.hi) == 0
        work = _strip_endpoint_roots(r_sf, iv.lo, iv.hi)
        inner = _count_open_sf(work, iv.lo, iv.hi) \
            if poly_degree(work) >= 1 and iv.lo < iv.hi else 0
        total = int(at_lo) + int(at_hi) + inner
        if total == 1:
            if at_lo:
                return AlgebraicNumber.from_rational(iv.lo)
            if at_hi:
                return AlgebraicNumber.from_rational(iv.hi)
            return make_algebraic(r_sf, iv.lo, iv.hi)
        operands = [_refine_step(o) for o in operands]


def s_add(a, b) -> AlgebraicNumber:
    a, b = _coerce(a), _coerce(b)
    if a.is_rational and b.is_rational:
        return AlgebraicNumber.from_rational(a.value + b.value)
    if a.is_rational:
        a, b = b, a
    if b.is_rational:
        r = b.value
        if r == 0:
            return a
        gp, glo, ghi, cx = _gen_rep(a)
        out = make_algebraic(poly_shift_roots_fr(a.poly, r),
                             a.lo + r, a.hi + r)
        return _attach_rep(out, (gp, glo, ghi),
                           (Fraction(cx[0]) + r,) + tuple(cx[1:]))
    ra, rb = _gen_rep(a), _gen_rep(b)
    if ra[:3] == rb[:3]:
        ca, cb = ra[3], rb[3]
        n = max(len(ca), len(cb))
        coords = tuple((ca[i] if i < len(ca) else 0)
                       + (cb[i] if i < len(cb) else 0) for i in range(n))
        return _coords_value(ra[:3], coords)
    deg = poly_degree(a.poly) * poly_degree(b.poly)
    q = b.poly

    def q_at(t):
        # q(t - x) as a polynomial in x
        return _compose_linear_int(q, t)

    r_poly = _resultant_in_t(a.poly, q_at, deg)
    return _isolate_value(
        r_poly, [a, b],
        lambda ops: RatInterval(ops[0].lo + ops[1].lo, ops[0].hi + ops[1].hi))


def _compose_linear_int(q: tuple, t: int) -> tuple:
    """q(t - x) expanded as an integer polynomial in x."""
    acc = ()
    lin = (t, -1)
    for c in reversed(q):
        acc = _int_add(poly_mul(acc, lin), (c,))
    return acc


def _int_add(p, q):
    n = max(len(p), len(q))
    return tuple((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                 for i in range(n))


def s_sub(a, b) -> AlgebraicNumber:
    return s_add(a, s_neg(b))


def _strip_zero_roots(p: tuple) -> tuple:
    p = poly_trim(p)
    while p and p[0] == 0:
        p = p[1:]
    return p


def s_mul(a, b) -> AlgebraicNumber:
    a, b = _coerce(a), _coerce(b)
    if a.is_rational and b.is_rational:
        return AlgebraicNumber.from_rational(a.value * b.value)
    if a.is_rational:
        a, b = b, a
    if b.is_rational:
        r = b.value
        if r == 0:
            return AlgebraicNumber.from_rational(0)
        gp, glo, ghi, cx = _gen_rep(a)
        iv = RatInterval.hull(a.lo * r, a.hi * r)
        out = make_algebraic(poly_scale_roots_fr(a.poly, r), iv.lo, iv.hi)
        return _attach_rep(out, (gp, glo, ghi), tuple(c * r for c in cx))
    ra, rb = _gen_rep(a), _gen_rep(b)
    if ra[:3] == rb[:3]:
        return _coords_value(ra[:3], poly_mul(ra[3], rb[3]))
    # both irrational, hence nonzero: strip zero roots so the formal degree
    # of the second Sylvester block cannot collapse
    p = _strip_zero_roots(a.poly)
    q = _strip_zero_roots(b.poly)
    n = len(q) - 1
    deg = (len(p) - 1) * n

    def q_at(t):
        return tuple(q[n - i] * t ** (n - i) for i in range(n + 1))

    r_poly = _resultant_in_t(p, q_at, deg)
    return _isolate_value(
        r_poly, [a, b],
        lambda ops: ops[0].interval() * ops[1].interval())


def s_div(a, b) -> AlgebraicNumber:
    a, b = _coerce(a), _coerce(b)
    sb = s_sign(b)
    if sb == 0:
        raise ZeroDivisionError("division by zero scalar")
    if b.is_rational:
        return s_mul(a, AlgebraicNumber.from_rational(1 / b.value))
    rb = _gen_rep(b)
    inv_coords = _polyfr_invmod(rb[3], rb[0])
    if inv_coords is not None:
        if a.is_rational:
            return _coords_value(
                rb[:3], tuple(a.value * c for c in inv_coords))
        ra = _gen_rep(a)
        if ra[:3] == rb[:3]:
            return _coords_value(rb[:3], poly_mul(ra[3], inv_coords))
        inv = _coords_value(rb[:3], inv_coords)
        return s_mul(a, inv)
    while b.lo <= 0 <= b.hi:
        b = _refine_step(b)
    inv = make_algebraic(poly_reverse(b.poly), 1 / b.hi, 1 / b.lo)
    return s_mul(a, inv)


def _reduce_mod(w, p: tuple):
    """w (int/Fraction coefficients) reduced mod p: Fraction tuple, deg < deg p."""
    wf = tuple(Fraction(c) for c in w)
    _q, r = poly_divmod_fr(wf, p)
    return r


def eval_int_poly(w, x: AlgebraicNumber, den=1) -> AlgebraicNumber:
    """The value w(x)/den, exactly; w may have int or Fraction coefficients.

    This is the workhorse for polynomial expressions in a single generator:
    the result's defining polynomial never exceeds the generator's degree.
    """
    den = Fraction(den)
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    x = _coerce(x)
    if x.is_rational:
        return AlgebraicNumber.from_rational(poly_eval_fr(w, x.value) / den)
    v = _reduce_mod(w, x.poly)
    if not v:
        return AlgebraicNumber.from_rational(0)
    n_poly, d = clear_denominators(v)
    full_den = den * d
    if poly_degree(n_poly) == 0:
        return AlgebraicNumber.from_rational(Fraction(n_poly[0]) / full_den)
    c_num, c_den = full_den.numerator, full_den.denominator
    # value z satisfies c_num*z = c_den*N(x): resultant eliminates x
    scaled_n = tuple(c_den * c for c in n_poly)

    def q_at(t):
        out = list(-c for c in scaled_n)
        out[0] += c_num * t
        return tuple(out)

    r_poly = _resultant_in_t(x.poly, q_at, poly_degree(x.poly))
    out = _isolate_value(r_poly, [x], lambda ops: _scale_iv(
        poly_eval_interval(v, ops[0].interval()), 1 / den))
    if x.rep is not None and x.rep[3] != (Fraction(0), Fraction(1)):
        gp, glo, ghi, cx = x.rep
        coords = _polyfr_compose_mod(v, cx, gp)
    else:
        gp, glo, ghi = (x.rep[:3] if x.rep is not None
                        else (x.poly, x.lo, x.hi))
        coords = v
    return _attach_rep(out, (gp, glo, ghi),
                       tuple(Fraction(c) / den for c in coords))


def _scale_iv(iv: RatInterval, c: Fraction) -> RatInterval:
    return RatInterval.hull(iv.lo * c, iv.hi * c)


def eval_poly2(w, a: AlgebraicNumber, b: AlgebraicNumber, den=1) -> AlgebraicNumber:
    """The value W(a, b)/den for an integer coefficient matrix W[i][j] x^i y^j.

    Two-generator expressions; reduction happens mod both defining
    polynomials first, so degrees stay bounded by deg(a.poly)*deg(b.poly).
    """
    den = Fraction(den)
    a, b = _coerce(a), _coerce(b)
    rows = [tuple(row) for row in w]
    if a.is_rational:
        # collapse x: W(a, y) is a univariate polynomial in y
        cols = max((len(r) for r in rows), default=0)
        ypoly = [Fraction(0)] * cols
        for i, row in enumerate(rows):
            xi = a.value ** i
            for j, c in enumerate(row):
                ypoly[j] += Fraction(c) * xi
        return eval_int_poly(tuple(ypoly), b, den)
    if b.is_rational:
        xpoly = []
        for row in rows:
            acc = Fraction(0)
            for j, c in enumerate(row):
                acc += Fraction(c) * b.value ** j
            xpoly.append(acc)
        return eval_int_poly(tuple(xpoly), a, den)
    # reduce x-powers mod a.poly, y-powers mod b.poly
    reduced = _reduce_bivariate(rows, a.poly, b.poly)
    flat = [c for row in reduced for c in row]
    if all(c == 0 for c in flat):
        return AlgebraicNumber.from_rational(0)
    nmat, d = _clear_matrix(reduced)
    full_den = den * d
    only_x = all(c == 0 for row in nmat for c in row[1:])
    only_y = all(all(c == 0 for c in row) for row in nmat[1:])
    if only_x:
        return eval_int_poly(tuple(row[0] for row in nmat), a, full_den)
    if only_y:
        return eval_int_poly(tuple(nmat[0]), b, full_den)
    r_poly = _bivar_resultant(nmat, full_den, a.poly, b.poly)
    if r_poly is None:
        # degenerate elimination; fall back to Horner over s_mul/s_add
        return _horner_fallback(nmat, full_den, a, b)
    return _isolate_value(r_poly, [a, b], lambda ops: _scale_iv(
        _matrix_interval(nmat, ops[0].interval(), ops[1].interval()), 1 / full_den))


def _reduce_bivariate(rows, p: tuple, q: tuple):
    dp, dq = poly_degree(p), poly_degree(q)
    out = [[Fraction(0)] * dq for _ in range(dp)]
    xred = _power_table(p, len(rows))
    mid = {}
    for i, row in enumerate(rows):
        xi = xred[i]
        for j, c in enumerate(row):
            if c == 0:
                continue
            for ii, xc in enumerate(xi):
                if xc:
                    mid[(ii, j)] = mid.get((ii, j), Fraction(0)) + Fraction(c) * xc
    maxj = max((j for (_, j) in mid), default=0)
    yred = _power_table(q, maxj + 1)
    for (ii, j), c in mid.items():
        for jj, yc in enumerate(yred[j]):
            if yc:
                out[ii][jj] += c * yc
    return out


@functools.lru_cache(maxsize=256)
def _power_table_cached(p: tuple, count: int):
    dp = poly_degree(p)
    lead = Fraction(p[-1])
    table = []
    cur = (Fraction(1),)
    for _ in range(count):
        padded = tuple(cur) + (Fraction(0),) * (dp - len(cur))
        table.append(padded[:dp])
        # multiply by x, reduce mod p
        nxt = [Fraction(0)] * (len(cur) + 1)
        for k, c in enumerate(cur):
            nxt[k + 1] = c
        if len(nxt) - 1 >= dp:
            top = nxt[dp]
            for k in range(dp):
                nxt[k] -= top * Fraction(p[k]) / lead
            nxt = nxt[:dp]
        while nxt and nxt[-1] == 0:
            nxt.pop()
        cur = tuple(nxt) if nxt else (Fraction(0),)
    return tuple(table)


def _power_table(p: tuple, count: int):
    return _power_table_cached(p, count)


def _clear_matrix(rows):
    dens = [c.denominator for row in rows for c in row]
    d = math.lcm(*dens) if dens else 1
    return [[int(c * d) for c in row] for row in rows], d


def _matrix_interval(nmat, aiv: RatInterval, biv: RatInterval) -> RatInterval:
    acc = RatInterval.point(Fraction(0))
    for row in reversed(nmat):
        inner = RatInterval.point(Fraction(0))
        for c in reversed(row):
            inner = inner * biv + RatInterval.point(Fraction(c))
        acc = acc * aiv + inner
    return acc


def _bivar_resultant(nmat, full_den: Fraction, p: tuple, q: tuple):
    """E(t) = res_y(q, res_x(p, c_num*t - c_den*W(x,y))); None if degenerate.

    Both eliminations go through fixed-shape Sylvester determinants so that
    sampled values interpolate the symbolic polynomial even where leading
    coefficients vanish at a sample point.
    """
    c_num, c_den = full_den.numerator, full_den.denominator
    dp, dq = poly_degree(p), poly_degree(q)
    dy = max(len(row) for row in nmat) - 1
    deg_g_y = dp * max(dy, 1)
    deg_e_t = dp * dq
    t_pts = _sample_points(deg_e_t + 1)
    y_pts = _sample_points(deg_g_y + 1)
    e_vals = []
    for t in t_pts:
        g_vals = []
        for s in y_pts:
            # c_num*t - c_den*W(x, s) at formal x-degree len(nmat) - 1
            wx = []
            for row in nmat:
                acc = 0
                for j, c in enumerate(row):
                    acc += c * s ** j
                wx.append(-c_den * acc)
            wx[0] += c_num * t
            g_vals.append(sylvester_det_formal(p, tuple(wx)))
        g_poly = lagrange_int_poly(y_pts, g_vals)
        padded = tuple(g_poly) + (0,) * (deg_g_y + 1 - len(g_poly))
        e_vals.append(sylvester_det_formal(q, padded))
    if all(v == 0 for v in e_vals):
        return None
    return lagrange_int_poly(t_pts, e_vals)


def _horner_fallback(nmat, full_den, a, b):
    acc = AlgebraicNumber.from_rational(0)
    for row in reversed(nmat):
        inner = eval_int_poly(tuple(row), b)
        acc = s_add(s_mul(acc, a), inner)
    return s_mul(acc, AlgebraicNumber.from_rational(1 / full_den))


def as_rational(x: AlgebraicNumber):
    """Fraction value if x is rational (detected up to large height), else None."""
    x = _coerce(x)
    if x.is_rational:
        return x.value
    r = _try_rationalize(x.poly, x.lo, x.hi, _DEEP_RAT_BITS)
    return r


def to_float(x: AlgebraicNumber) -> float:
    x = refine(_coerce(x), Fraction(1, 1 << 60))
    return float((x.lo + x.hi) / 2)


def float_enclosure(x: AlgebraicNumber) -> FloatInterval:
    x = _coerce(x)
    lo = FloatInterval.from_fraction(x.lo)
    hi = FloatInterval.from_fraction(x.hi)
    return FloatInterval(lo.lo, hi.hi)


def fraction_enclosure(x: AlgebraicNumber, width) -> tuple:
    x = refine(_coerce(x), width)
    return (x.lo, x.hi)


def _frac_str(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def scalar_to_json(x):
    """Rationals as "p/q" strings; algebraic numbers as poly + isolator."""
    if isinstance(x, Fraction):
        return _frac_str(x)
    x = _coerce(x)
    if x.is_rational:
        return _frac_str(x.value)
    return {
        "poly": [int(c) for c in x.poly],
        "isolator": [_frac_str(x.lo), _frac_str(x.hi)],
    }


def scalar_from_json(obj) -> AlgebraicNumber:
    if isinstance(obj, str):
        return AlgebraicNumber.from_rational(Fraction(obj))
    if isinstance(obj, dict):
        extra = set(obj) - {"poly", "isolator"}
        if extra or "poly" not in obj or "isolator" not in obj:
            raise ValueError(f"malformed scalar object: {sorted(obj)}")
        poly = tuple(int(c) for c in obj["poly"])
        lo, hi = (Fraction(s) for s in obj["isolator"])
        return make_algebraic(poly, lo, hi)
    raise ValueError(f"cannot parse scalar from {type(obj).__name__}")
