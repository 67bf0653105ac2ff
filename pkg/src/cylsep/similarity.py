"""Similarity maps of R^d with exact scalars.

A map is phi(x) = r*Ox + t with contraction ratio r, a signed-permutation
orthogonal part O, and translation vector t. Scalars are Fractions or
AlgebraicNumbers; every rational value is normalized to a Fraction at
construction so downstream code can branch on type for fast paths.

Two distances live here. The strict one is infinite unless ratio and
orthogonal part agree exactly, and otherwise the sup-norm of the
translation gap, an exact scalar. The Hochman distance is advisory and
interval-valued: Euclidean translation gap plus log-ratio gap plus the
operator norm of the orthogonal difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactnum import (
    AlgebraicNumber,
    RatInterval,
    eval_int_poly,
    fraction_enclosure,
    isolate_real_roots,
    log_interval,
    make_algebraic,
    pow_interval,
    refine,
    s_add,
    s_cmp,
    s_div,
    s_mul,
    s_neg,
    s_sign,
    s_sub,
    scalar_from_json,
    scalar_to_json,
    sqrt_interval,
    to_float,
)
from .exactnum.polys import (
    charpoly_int,
    poly_compose,
    poly_degree,
    poly_eval_fr,
    root_count_open,
    squarefree_part,
)

__all__ = [
    "SignedPermutation", "SimilarityMap", "IFSInstance", "StrictDistance",
    "identity_map", "compose", "compose_word", "dist_strict", "dist_hochman",
    "similarity_dimension", "dim_upper_bounds", "ifs_to_json",
    "ifs_from_json", "sc_norm", "sc_add", "sc_sub", "sc_mul", "sc_neg",
    "sc_abs", "sc_cmp", "sc_eq", "sc_sign", "sc_enclosure", "sc_float",
]


# ---------------------------------------------------------------------------
# scalar helpers: Fraction fast paths over the algebraic kernel

def sc_norm(x):
    """Canonical scalar: Fraction when the value is rational."""
    if isinstance(x, AlgebraicNumber):
        return x.value if x.is_rational else x
    return Fraction(x)


def _collapse(x: AlgebraicNumber):
    return x.value if x.is_rational else x


def sc_add(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return _collapse(s_add(a, b))


def sc_sub(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a - b
    return _collapse(s_sub(a, b))


def sc_mul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return _collapse(s_mul(a, b))


def sc_div(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    return _collapse(s_div(a, b))


def sc_neg(a):
    if isinstance(a, Fraction):
        return -a
    return s_neg(a)


def sc_sign(a) -> int:
    if isinstance(a, Fraction):
        return 0 if a == 0 else (1 if a > 0 else -1)
    return s_sign(a)


def sc_abs(a):
    return sc_neg(a) if sc_sign(a) < 0 else a


def sc_cmp(a, b) -> int:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return 0 if a == b else (1 if a > b else -1)
    return s_cmp(a, b)


def sc_eq(a, b) -> bool:
    return sc_cmp(a, b) == 0


def sc_enclosure(a, width) -> RatInterval:
    if isinstance(a, Fraction):
        return RatInterval.point(a)
    lo, hi = fraction_enclosure(a, width)
    return RatInterval(lo, hi)


def sc_float(a) -> float:
    if isinstance(a, Fraction):
        return float(a)
    return to_float(a)


# ---------------------------------------------------------------------------
# signed permutations

@dataclass(frozen=True)
class SignedPermutation:
    """Orthogonal matrix with one entry of +-1 per row and column.

    Sends e_i to signs[i] * e_{perm[i]}.
    """

    perm: tuple
    signs: tuple

    def __post_init__(self):
        d = len(self.perm)
        if sorted(self.perm) != list(range(d)):
            raise ValueError(f"not a permutation of 0..{d - 1}: {self.perm}")
        if len(self.signs) != d or any(s not in (-1, 1) for s in self.signs):
            raise ValueError(f"signs must be +-1 of length {d}: {self.signs}")

    @classmethod
    def identity(cls, d: int) -> "SignedPermutation":
        return cls(tuple(range(d)), (1,) * d)

    @property
    def dim(self) -> int:
        return len(self.perm)

    def is_identity(self) -> bool:
        return self == SignedPermutation.identity(self.dim)

    def apply(self, vec):
        out = [None] * self.dim
        for i, x in enumerate(vec):
            s = self.signs[i]
            out[self.perm[i]] = x if s == 1 else sc_neg(x)
        return tuple(out)

    def __matmul__(self, other: "SignedPermutation") -> "SignedPermutation":
        """self o other: apply other first."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        perm = tuple(self.perm[other.perm[i]] for i in range(self.dim))
        signs = tuple(other.signs[i] * self.signs[other.perm[i]]
                      for i in range(self.dim))
        return SignedPermutation(perm, signs)

    def inverse(self) -> "SignedPermutation":
        perm = [0] * self.dim
        signs = [1] * self.dim
        for i in range(self.dim):
            perm[self.perm[i]] = i
            signs[self.perm[i]] = self.signs[i]
        return SignedPermutation(tuple(perm), tuple(signs))

    def matrix(self):
        """Integer matrix M with M @ x = apply(x)."""
        m = [[0] * self.dim for _ in range(self.dim)]
        for i in range(self.dim):
            m[self.perm[i]][i] = self.signs[i]
        return m


# ---------------------------------------------------------------------------
# similarity maps and IFS instances

class SimilarityMap:
    __slots__ = ("ratio", "orthogonal", "translation")

    def __init__(self, ratio, orthogonal: SignedPermutation, translation):
        ratio = sc_norm(ratio)
        if sc_sign(ratio) <= 0:
            raise ValueError("contraction ratio must be positive")
        translation = tuple(sc_norm(t) for t in translation)
        if len(translation) != orthogonal.dim:
            raise ValueError("translation length differs from dimension")
        object.__setattr__(self, "ratio", ratio)
        object.__setattr__(self, "orthogonal", orthogonal)
        object.__setattr__(self, "translation", translation)

    def __setattr__(self, *a):
        raise AttributeError("SimilarityMap is immutable")

    @property
    def dim(self) -> int:
        return self.orthogonal.dim

    def __eq__(self, other):
        if not isinstance(other, SimilarityMap):
            return NotImplemented
        return (self.orthogonal == other.orthogonal
                and sc_eq(self.ratio, other.ratio)
                and all(sc_eq(a, b) for a, b in
                        zip(self.translation, other.translation)))

    def __hash__(self):
        # hash only on structure that is cheap and stable
        return hash((self.orthogonal, len(self.translation)))

    def __repr__(self):
        t = ", ".join(f"{sc_float(x):.6g}" for x in self.translation)
        return f"SimilarityMap(r={sc_float(self.ratio):.6g}, t=({t}))"


def identity_map(d: int) -> SimilarityMap:
    return SimilarityMap(Fraction(1), SignedPermutation.identity(d),
                         (Fraction(0),) * d)


def compose(f: SimilarityMap, g: SimilarityMap) -> SimilarityMap:
    """f o g exactly: ratio r_f r_g, orthogonal O_f O_g, t = r_f O_f(t_g) + t_f."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    rotated = f.orthogonal.apply(g.translation)
    trans = tuple(sc_add(sc_mul(f.ratio, x), t)
                  for x, t in zip(rotated, f.translation))
    return SimilarityMap(sc_mul(f.ratio, g.ratio),
                         f.orthogonal @ g.orthogonal, trans)


class IFSInstance:
    """Ordered, labelled family of contracting similarity maps."""

    __slots__ = ("maps", "_index")

    def __init__(self, maps):
        maps = tuple((label, m) for label, m in maps)
        if len(maps) < 2:
            raise ValueError("an IFS needs at least 2 maps")
        labels = [label for label, _ in maps]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels: {labels}")
        d = maps[0][1].dim
        for label, m in maps:
            if m.dim != d:
                raise ValueError("maps of mixed dimension")
            if sc_cmp(m.ratio, Fraction(1)) >= 0:
                raise ValueError(f"map {label!r} is not a contraction")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "_index", {label: m for label, m in maps})

    def __setattr__(self, *a):
        raise AttributeError("IFSInstance is immutable")

    @property
    def dim(self) -> int:
        return self.maps[0][1].dim

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.maps)

    def map_for(self, label) -> SimilarityMap:
        return self._index[label]

    def __len__(self):
        return len(self.maps)

    def __eq__(self, other):
        if not isinstance(other, IFSInstance):
            return NotImplemented
        return (self.labels == other.labels
                and all(a == b for (_, a), (_, b) in
                        zip(self.maps, other.maps)))

    def __repr__(self):
        return f"IFSInstance({', '.join(map(str, self.labels))})"


def compose_word(phi: IFSInstance, word) -> SimilarityMap:
    """Left-to-right composition phi_{w1} o ... o phi_{wn}; () is identity."""
    out = identity_map(phi.dim)
    for label in word:
        out = compose(out, phi.map_for(label))
    return out


# ---------------------------------------------------------------------------
# distances

@dataclass(frozen=True)
class StrictDistance:
    """Either infinite (different ratio/orthogonal class) or an exact value."""

    value: object  # None encodes infinity

    @classmethod
    def infinite(cls) -> "StrictDistance":
        return cls(None)

    @classmethod
    def finite(cls, v) -> "StrictDistance":
        v = sc_norm(v)
        if sc_sign(v) < 0:
            raise ValueError("distances are nonnegative")
        return cls(v)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def cmp(self, other: "StrictDistance") -> int:
        if self.is_infinite and other.is_infinite:
            return 0
        if self.is_infinite:
            return 1
        if other.is_infinite:
            return -1
        return sc_cmp(self.value, other.value)

    def to_float(self) -> float:
        return math.inf if self.is_infinite else sc_float(self.value)

    def __repr__(self):
        return "StrictDistance(inf)" if self.is_infinite \
            else f"StrictDistance({self.to_float():.6g})"


def dist_strict(f: SimilarityMap, g: SimilarityMap) -> StrictDistance:
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    if f.orthogonal != g.orthogonal or not sc_eq(f.ratio, g.ratio):
        return StrictDistance.infinite()
    best = None
    for a, b in zip(f.translation, g.translation):
        gap = sc_abs(sc_sub(a, b))
        if best is None or sc_cmp(gap, best) > 0:
            best = gap
    return StrictDistance.finite(best)


def _interval_abs(iv: RatInterval) -> RatInterval:
    if iv.lo >= 0:
        return iv
    if iv.hi <= 0:
        return RatInterval(-iv.hi, -iv.lo)
    return RatInterval(Fraction(0), max(-iv.lo, iv.hi))


def _orth_gap_sq_max(f: SimilarityMap, g: SimilarityMap):
    """Largest eigenvalue of (O-O')^T (O-O') as an exact scalar."""
    mf, mg = f.orthogonal.matrix(), g.orthogonal.matrix()
    d = f.dim
    m = [[mf[i][j] - mg[i][j] for j in range(d)] for i in range(d)]
    mtm = [[sum(m[k][i] * m[k][j] for k in range(d)) for j in range(d)]
           for i in range(d)]
    if all(mtm[i][j] == 0 for i in range(d) for j in range(d)):
        return Fraction(0)
    roots = isolate_real_roots(charpoly_int(mtm))
    return sc_norm(roots[-1])


def dist_hochman(f: SimilarityMap, g: SimilarityMap,
                 precision: Fraction) -> RatInterval:
    """Certified enclosure of |t-t'|_2 + |log r - log r'| + ||O-O'||_op."""
    precision = Fraction(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    lam = _orth_gap_sq_max(f, g)
    bits = 8
    while True:
        w = Fraction(1, 1 << bits)
        # Euclidean translation gap
        sq = RatInterval.point(Fraction(0))
        for a, b in zip(f.translation, g.translation):
            sq = sq + sc_enclosure(sc_sub(a, b), w).square()
        tgap = RatInterval(sqrt_interval(sq.lo, bits).lo,
                           sqrt_interval(sq.hi, bits).hi)
        # log-ratio gap
        lf = log_interval(sc_enclosure(f.ratio, w), bits)
        lg = log_interval(sc_enclosure(g.ratio, w), bits)
        rgap = _interval_abs(lf - lg)
        # operator norm of the orthogonal difference
        lam_iv = sc_enclosure(lam, w)
        ogap = RatInterval(sqrt_interval(max(Fraction(0), lam_iv.lo), bits).lo,
                           sqrt_interval(lam_iv.hi, bits).hi)
        total = tgap + rgap + ogap
        if total.width() <= precision:
            return total
        bits += 8


# ---------------------------------------------------------------------------
# dimension formulas

def _nthroot_floor(n: int, k: int) -> int:
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0
    x = 1 << (-(-n.bit_length() // k))
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _exact_pow_rat(r, s: Fraction):
    """r**s as an exact scalar for 0 < r < 1 and rational s > 0."""
    p, q = s.numerator, s.denominator
    if isinstance(r, Fraction):
        rp = r ** p
        if q == 1:
            return rp
        poly = (-rp.numerator,) + (0,) * (q - 1) + (rp.denominator,)
        return _collapse(make_algebraic(poly, Fraction(0), Fraction(1)))
    # algebraic base: z = r^p, then the positive q-th root of z
    z = eval_int_poly((0,) * p + (1,), r)
    if z.is_rational:
        return _exact_pow_rat(z.value, Fraction(1, q))
    if q == 1:
        return z
    composed = squarefree_part(poly_compose(z.poly, (0,) * q + (1,)))
    g = 16
    while True:
        z = refine(z, Fraction(1, 1 << g))
        zl, zh = max(Fraction(0), z.lo), z.hi
        if zl > 0:
            ylo = Fraction(_nthroot_floor(
                (zl.numerator << (q * g)) // zl.denominator, q), 1 << g)
            yhi = Fraction(_nthroot_floor(
                -(-(zh.numerator << (q * g)) // zh.denominator), q) + 1,
                1 << g)
            if (poly_eval_fr(composed, ylo) != 0
                    and poly_eval_fr(composed, yhi) != 0
                    and root_count_open(composed, ylo, yhi) == 1):
                return _collapse(make_algebraic(composed, ylo, yhi))
        g += 8


def _moran_sum_exact_cmp(ratios, s: Fraction) -> int:
    """Exact sign of (sum r_i^s) - 1 at a rational exponent."""
    total = Fraction(0)
    for r in ratios:
        total = sc_add(total, _exact_pow_rat(r, s))
    return sc_cmp(total, Fraction(1))


def _exact_affordable(ratios, s: Fraction) -> bool:
    # the q-th-root construction for algebraic bases builds a polynomial of
    # degree q * deg(base); refuse silly exponent denominators
    if all(isinstance(r, Fraction) for r in ratios):
        return True
    return s.denominator <= 64


def _moran_sign(ratios, s: Fraction, start_bits: int = 24) -> int:
    """Sign of (sum r_i^s) - 1, certified; s rational, s > 0 assumed."""
    bits = start_bits
    limit = 192 if _exact_affordable(ratios, s) else 4096
    while bits <= limit:
        total = RatInterval.point(Fraction(0))
        ok = True
        for r in ratios:
            base = sc_enclosure(r, Fraction(1, 1 << bits))
            if base.lo <= 0:
                ok = False
                break
            total = total + pow_interval(base, s, bits)
        if ok:
            if total.lo > 1:
                return 1
            if total.hi < 1:
                return -1
        bits *= 2
    if _exact_affordable(ratios, s):
        return _moran_sum_exact_cmp(ratios, s)
    raise RuntimeError(f"cannot certify Moran sum sign at s = {s}")


def similarity_dimension(phi: IFSInstance, tol: Fraction) -> RatInterval:
    """Enclosure of the s >= 0 with sum r_i^s = 1, width <= tol."""
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    ratios = [m.ratio for _, m in phi.maps]
    # sum at s=0 equals the map count > 1; find an upper end with sum < 1
    lo, hi = Fraction(0), Fraction(1)
    sign_hi = _moran_sign(ratios, hi)
    while sign_hi > 0:
        lo, hi = hi, hi * 2
        sign_hi = _moran_sign(ratios, hi)
    if sign_hi == 0:
        return RatInterval.point(hi)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        sign = _moran_sign(ratios, mid)
        if sign == 0:
            return RatInterval.point(mid)
        if sign > 0:
            lo = mid
        else:
            hi = mid
    return RatInterval(lo, hi)


def _interval_div(a: RatInterval, b: RatInterval) -> RatInterval:
    if b.lo <= 0 <= b.hi:
        raise ZeroDivisionError("denominator interval straddles zero")
    inv = RatInterval(1 / b.hi, 1 / b.lo)
    return a * inv


def _interval_min_const(iv: RatInterval, c: Fraction) -> RatInterval:
    return RatInterval(min(iv.lo, c), min(iv.hi, c))


def dim_upper_bounds(phi: IFSInstance, p, q: Fraction, tol: Fraction):
    """Upper bounds for measure dimension and L^q dimension.

    Returns (measure_upper, lq_upper): enclosures of
    min{(sum p_i log p_i)/(sum p_i log r_i), d} and min{T/(q-1), d} where
    sum p_i^q r_i^(-T) = 1.
    """
    p = tuple(Fraction(x) for x in p)
    q = Fraction(q)
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if len(p) != len(phi.maps):
        raise ValueError("probability vector length mismatch")
    if any(x <= 0 for x in p) or sum(p) != 1:
        raise ValueError("probabilities must be positive and sum to 1")
    if q <= 1:
        raise ValueError("q must exceed 1")
    ratios = [m.ratio for _, m in phi.maps]
    d = Fraction(phi.dim)

    bits = 16
    while True:
        w = Fraction(1, 1 << bits)
        num = RatInterval.point(Fraction(0))
        den = RatInterval.point(Fraction(0))
        for pi, r in zip(p, ratios):
            num = num + log_interval(pi, bits) * pi
            den = den + log_interval(sc_enclosure(r, w), bits) * pi
        if den.hi < 0:
            meas = _interval_min_const(_interval_div(num, den), d)
            if meas.width() <= tol:
                break
        bits *= 2
    lq = _interval_min_const(_lq_exponent(p, ratios, q, tol), d)
    return meas, lq


def _lq_sign(p, ratios, q: Fraction, s: Fraction) -> int:
    """Sign of (sum p_i^q r_i^(-s)) - 1; increasing in s."""
    affordable = _exact_affordable(ratios, s) and q.denominator <= 64
    bits = 24
    limit = 192 if affordable else 4096
    while bits <= limit:
        total = RatInterval.point(Fraction(0))
        ok = True
        for pi, r in zip(p, ratios):
            w = Fraction(1, 1 << bits)
            term = pow_interval(pi, q, bits)
            if s != 0:
                renc = sc_enclosure(r, w)
                if renc.lo <= 0:
                    ok = False
                    break
                inv = RatInterval(1 / renc.hi, 1 / renc.lo)
                term = term * pow_interval(inv, s, bits)
            total = total + term
        if ok:
            if total.lo > 1:
                return 1
            if total.hi < 1:
                return -1
        bits *= 2
    if not affordable:
        raise RuntimeError(f"cannot certify L^q sum sign at s = {s}")
    total = Fraction(0)
    for pi, r in zip(p, ratios):
        term = _exact_pow_rat(pi, q)
        if s != 0:
            term = sc_mul(term, sc_div(Fraction(1), _exact_pow_rat(r, s)))
        total = sc_add(total, term)
    return sc_cmp(total, Fraction(1))


def _lq_exponent(p, ratios, q: Fraction, tol: Fraction) -> RatInterval:
    """T/(q-1) with T solving sum p_i^q r_i^(-T) = 1, enclosed within tol."""
    lo, hi = Fraction(0), Fraction(1)
    sign_hi = _lq_sign(p, ratios, q, hi)
    while sign_hi < 0:
        lo, hi = hi, hi * 2
        sign_hi = _lq_sign(p, ratios, q, hi)
    if sign_hi == 0:
        return RatInterval.point(hi / (q - 1))
    target = tol * (q - 1)
    while hi - lo > target:
        mid = (lo + hi) / 2
        sign = _lq_sign(p, ratios, q, mid)
        if sign == 0:
            return RatInterval.point(mid / (q - 1))
        if sign < 0:
            lo = mid
        else:
            hi = mid
    return RatInterval(lo / (q - 1), hi / (q - 1))


# ---------------------------------------------------------------------------
# serialization

def ifs_to_json(phi: IFSInstance) -> dict:
    return {
        "dim": phi.dim,
        "maps": [
            {
                "label": str(label),
                "ratio": scalar_to_json(m.ratio),
                "perm": list(m.orthogonal.perm),
                "signs": list(m.orthogonal.signs),
                "t": [scalar_to_json(t) for t in m.translation],
            }
            for label, m in phi.maps
        ],
    }


def ifs_from_json(obj: dict) -> IFSInstance:
    extra = set(obj) - {"dim", "maps"}
    if extra:
        raise ValueError(f"unknown IFS fields: {sorted(extra)}")
    d = int(obj["dim"])
    maps = []
    for entry in obj["maps"]:
        extra = set(entry) - {"label", "ratio", "perm", "signs", "t"}
        if extra:
            raise ValueError(f"unknown map fields: {sorted(extra)}")
        orth = SignedPermutation(tuple(int(i) for i in entry["perm"]),
                                 tuple(int(s) for s in entry["signs"]))
        m = SimilarityMap(
            _collapse(scalar_from_json(entry["ratio"])), orth,
            tuple(_collapse(scalar_from_json(t)) for t in entry["t"]))
        if m.dim != d:
            raise ValueError("map dimension differs from declared dim")
        maps.append((entry["label"], m))
    return IFSInstance(tuple(maps))
