"""Parametrised families of self-similar systems with exact overlap
bookkeeping.

Two families are built in.  For the product-digit family ("example1") with
contraction ratio lam in (0, 1/2] and dimension d, the maps are
x -> lam(x + a) where the digit vectors a run over the product of
{0, 1, u_j, 1 + u_j} across coordinates; a second copy uses digits
{0, 1, v_j, 1 + v_j}, and the joint system glues the two digit sets
together.  The two-map family ("example2") has a single parameter
u in (1/2, 1) and maps x -> u(x + 1), x -> u(x + 2).

Digit labels are formal: digits with equal values keep distinct labels, so
an exact overlap is visible as two distinct words naming one map.  A
parameter point admits a level-n overlap on the u side exactly when some
coordinate satisfies

    u_j = (sum_i kappa_i lam^i) / (sum_i delta_i lam^i)

for nonzero sign vectors kappa, delta in {-1,0,1}^n (product-digit
family), or when sum_{i=1..n} kappa_i u^i = 0 for a nonzero sign vector
(two-map family).  Overlap levels found by search are cross-checked
against these closed forms.

`perturb_primary` and `perturb_secondary` implement the two nudge steps:
given parameters with known low overlap levels, they move the level past a
prescribed threshold L0 by an exact shift smaller than a given epsilon,
keeping the perturbed pair free of joint overlaps up to L0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactnum import (
    AlgebraicNumber,
    FloatInterval,
    float_enclosure,
    fraction_enclosure,
    isolate_real_roots,
    refine,
    sign_at,
)
from .separation import (
    DEFAULT_BUDGET,
    WitnessPair,
    has_exact_overlap_upto,
    pair_distance,
)
from .similarity import (
    IFSInstance,
    SignedPermutation,
    SimilarityMap,
    StrictDistance,
    sc_abs,
    sc_add,
    sc_cmp,
    sc_eq,
    sc_mul,
    sc_norm,
    sc_sub,
)

__all__ = [
    "FamilySpec", "OverlapLevel", "ParamPoint", "SearchIndeterminate",
    "digit_span", "enumerate_h1", "h1_level_exact", "h_level",
    "instantiate", "joint_gap", "perturb_primary", "perturb_secondary",
    "trilinear_gap", "witness_gap",
]

# canonical slot order for sign-vector enumeration; every "first solution"
# promise below refers to itertools.product over this tuple
SIGNS = (0, 1, -1)

_MERGES = ("union", "full")
_HALF = Fraction(1, 2)
_ONE = Fraction(1)
_ZERO = Fraction(0)


class SearchIndeterminate(RuntimeError):
    """An overlap decision ran out of search budget."""


@dataclass(frozen=True)
class ParamPoint:
    """Point in parameter space; coordinates are exact scalars."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(sc_norm(c) for c in self.coords)
        if not coords:
            raise ValueError("a parameter point needs at least one "
                             "coordinate")
        object.__setattr__(self, "coords", coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def _as_point(p) -> ParamPoint:
    return p if isinstance(p, ParamPoint) else ParamPoint(tuple(p))


@dataclass(frozen=True)
class FamilySpec:
    """Family identity plus its fixed data (ratio, dimension, digit merge
    for the product family)."""

    variant: str
    lam: Fraction | None = None
    dim: int = 1
    merge: str = "union"

    def __post_init__(self):
        if self.variant == "example1":
            lam = self.lam if isinstance(self.lam, Fraction) \
                else Fraction(self.lam)
            object.__setattr__(self, "lam", lam)
            if not _ZERO < lam <= _HALF:
                raise ValueError("contraction ratio must lie in (0, 1/2]")
            if not isinstance(self.dim, int) or self.dim < 1:
                raise ValueError(f"bad dimension {self.dim!r}")
            if self.merge not in _MERGES:
                raise ValueError(f"merge must be one of {_MERGES}")
        elif self.variant == "example2":
            if self.lam is not None or self.dim != 1 \
                    or self.merge != "union":
                raise ValueError("the two-map family takes no extra data")
        else:
            raise ValueError(f"unknown family variant {self.variant!r}")

    @classmethod
    def example1(cls, lam, dim: int = 1,
                 merge: str = "union") -> "FamilySpec":
        return cls("example1", Fraction(lam), dim, merge)

    @classmethod
    def example2(cls) -> "FamilySpec":
        return cls("example2")

    @property
    def arity(self) -> int:
        """Number of coordinates of one parameter point."""
        return self.dim if self.variant == "example1" else 1

    def to_config(self) -> dict:
        if self.variant == "example1":
            return {"variant": "example1", "lambda": str(self.lam),
                    "dim": self.dim, "merge": self.merge}
        return {"variant": "example2"}

    @classmethod
    def from_config(cls, cfg) -> "FamilySpec":
        """Parse {"variant": ..., "lambda": ..., "dim": ..., "merge": ...};
        unknown fields are rejected."""
        if not isinstance(cfg, dict):
            raise ValueError("family config must be a mapping")
        variant = cfg.get("variant")
        if variant == "example1":
            extra = set(cfg) - {"variant", "lambda", "dim", "merge"}
            if extra:
                raise ValueError(f"unknown config fields: {sorted(extra)}")
            if "lambda" not in cfg:
                raise ValueError("product family config needs 'lambda'")
            try:
                lam = Fraction(cfg["lambda"])
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise ValueError(f"bad lambda: {cfg['lambda']!r}") from exc
            return cls.example1(lam, dim=int(cfg.get("dim", 1)),
                                merge=cfg.get("merge", "union"))
        if variant == "example2":
            extra = set(cfg) - {"variant"}
            if extra:
                raise ValueError(f"unknown config fields: {sorted(extra)}")
            return cls.example2()
        raise ValueError(f"unknown family variant {variant!r}")

    def domain_check(self, point: ParamPoint) -> None:
        if len(point) != self.arity:
            raise ValueError(f"expected {self.arity} coordinate(s), "
                             f"got {len(point)}")
        if self.variant == "example1":
            for c in point:
                if sc_eq(c, _ZERO) or sc_eq(c, _ONE):
                    raise ValueError("coordinate values 0 and 1 are "
                                     "excluded")
        else:
            c = point[0]
            if sc_cmp(c, _HALF) <= 0 or sc_cmp(c, _ONE) >= 0:
                raise ValueError("parameter must lie strictly in (1/2, 1)")


@dataclass(frozen=True)
class OverlapLevel:
    """Least word length at which two distinct words name one map.

    starred means the level is exact: no overlap exists at any shorter
    length."""

    level: int
    witness: WitnessPair
    starred: bool

    def __post_init__(self):
        if not isinstance(self.level, int) or self.level < 1:
            raise ValueError(f"bad level {self.level!r}")
        if self.witness.level != self.level:
            raise ValueError("witness length disagrees with the level")


# ---------------------------------------------------------------------------
# instantiation

_ID1 = SignedPermutation.identity(1)


def _ex1_side_digits(spec, point, letter):
    """Per-coordinate formal digits (name, value): 0, 1, the parameter
    coordinate, and 1 plus the coordinate."""
    per = []
    for j in range(spec.dim):
        x = point[j]
        per.append((("0", _ZERO), ("1", _ONE),
                    (letter, x), ("1" + letter, sc_add(_ONE, x))))
    return per


def _ex1_full_digits(spec, u, v):
    per = []
    for j in range(spec.dim):
        uj, vj = u[j], v[j]
        uv = sc_add(uj, vj)
        per.append((("0", _ZERO), ("1", _ONE),
                    ("u", uj), ("1u", sc_add(_ONE, uj)),
                    ("v", vj), ("1v", sc_add(_ONE, vj)),
                    ("uv", uv), ("1uv", sc_add(_ONE, uv))))
    return per


def _product_maps(spec, per_coordinate):
    lam = spec.lam
    orth = SignedPermutation.identity(spec.dim)
    sep = spec.dim > 1
    maps = []
    for combo in itertools.product(*per_coordinate):
        label = "|".join(n for n, _ in combo) if sep else combo[0][0]
        trans = tuple(sc_mul(lam, val) for _, val in combo)
        maps.append((label, SimilarityMap(lam, orth, trans)))
    return maps


def _ex2_pair(x, prefix):
    return [(prefix + "1", SimilarityMap(x, _ID1, (x,))),
            (prefix + "2", SimilarityMap(x, _ID1, (sc_mul(Fraction(2),
                                                          x),)))]


def instantiate(spec: FamilySpec, side: str, u=None, v=None) -> IFSInstance:
    """Build the labelled system for one side of the family.

    side "U" uses the point u, side "V" uses v, and side "joint" glues the
    two digit sets together.  Labels are formal, so digits whose values
    coincide still get distinct labels."""
    if side not in ("U", "V", "joint"):
        raise ValueError(f"side must be 'U', 'V' or 'joint', got {side!r}")
    if side in ("U", "joint"):
        if u is None:
            raise ValueError(f"side {side!r} needs the u point")
        u = _as_point(u)
        spec.domain_check(u)
    if side in ("V", "joint"):
        if v is None:
            raise ValueError(f"side {side!r} needs the v point")
        v = _as_point(v)
        spec.domain_check(v)

    if spec.variant == "example1":
        if side == "U":
            return IFSInstance(
                _product_maps(spec, _ex1_side_digits(spec, u, "u")))
        if side == "V":
            return IFSInstance(
                _product_maps(spec, _ex1_side_digits(spec, v, "v")))
        if spec.merge == "full":
            return IFSInstance(
                _product_maps(spec, _ex1_full_digits(spec, u, v)))
        maps = _product_maps(spec, _ex1_side_digits(spec, u, "u"))
        seen = {label for label, _ in maps}
        for label, m in _product_maps(spec, _ex1_side_digits(spec, v, "v")):
            if label not in seen:  # all-{0,1} digit vectors are shared
                maps.append((label, m))
        return IFSInstance(maps)

    if side == "U":
        return IFSInstance(_ex2_pair(u[0], ""))
    if side == "V":
        return IFSInstance(_ex2_pair(v[0], ""))
    return IFSInstance(_ex2_pair(u[0], "u") + _ex2_pair(v[0], "v"))


# ---------------------------------------------------------------------------
# closed forms

@lru_cache(maxsize=None)
def _sign_sums(lam: Fraction, n: int):
    """Sums  sum_i s_i lam^i  over sign vectors s in {-1,0,1}^n.

    Returns (first, pairs, nonzero): first maps each sum to the first
    vector producing it in canonical order; pairs lists (sum, vector) for
    every vector; nonzero restricts pairs to s != 0.  Because lam <= 1/2,
    a nonzero vector never sums to zero (the leading term dominates the
    tail), so the nonzero sums are exactly the usable denominators."""
    pows = [lam ** i for i in range(1, n + 1)]
    first = {}
    pairs = []
    for vec in itertools.product(SIGNS, repeat=n):
        s = sum((p * c for p, c in zip(pows, vec)), _ZERO)
        pairs.append((s, vec))
        if s not in first:
            first[s] = vec
    nonzero = tuple(p for p in pairs if any(p[1]))
    return first, tuple(pairs), nonzero


def _h1_representation(lam, x, n):
    """First (kappa, delta) in canonical order with
    x = S(kappa)/S(delta), both vectors nonzero; None if there is none."""
    if isinstance(x, AlgebraicNumber):
        return None  # every representable value is rational
    first, _, nonzero = _sign_sums(lam, n)
    for s, dvec in nonzero:
        target = x * s
        if target == 0:
            continue  # would force kappa = 0
        kvec = first.get(target)
        if kvec is not None:
            return kvec, dvec
    return None


def _h1_member(lam, x, n) -> bool:
    return _h1_representation(lam, x, n) is not None


def _h3_representation(lam, x, uj, n):
    """First (kappa, delta, gamma) in canonical order with
    x = (S(kappa) + uj*S(delta)) / S(gamma), gamma nonzero; None if
    there is none.  kappa and delta may be zero."""
    first, pairs, nonzero = _sign_sums(lam, n)
    for g, gvec in nonzero:
        xg = sc_mul(x, g)
        for dsm, dvec in pairs:
            t = sc_sub(xg, sc_mul(uj, dsm))
            if isinstance(t, AlgebraicNumber):
                continue  # irrational, never a sign sum
            kvec = first.get(t)
            if kvec is not None:
                return kvec, dvec, gvec
    return None


def _h3_member(lam, x, uj, n) -> bool:
    return _h3_representation(lam, x, uj, n) is not None


# ---------------------------------------------------------------------------
# complete digit systems (lam = 1/2 or 1/3)
#
# For these two ratios the sign sums S(s) = sum_i s_i lam^i of length n hit
# exactly the integers of absolute value up to the digit span, divided by
# q^n: base 2 by plain binary digits with an overall sign, base 3 by
# balanced ternary.  Membership, least levels, representations and
# witnesses then follow from integer arithmetic instead of enumeration,
# which is what makes levels in the tens of thousands workable.

_FAST_BASES = {Fraction(1, 2): 2, Fraction(1, 3): 3}
_LOG2Q = {2: 1.0, 3: 1.584962500721156}


def _fast_base(lam):
    """The integer q when lam = 1/q carries a complete digit system."""
    if isinstance(lam, Fraction):
        return _FAST_BASES.get(lam)
    return None


def digit_span(lam, n: int) -> int:
    """Largest |sum_i s_i q^(n-i)| over sign vectors s in {-1,0,1}^n, for
    lam = 1/q with a complete digit system; every integer up to the span
    in absolute value is such a sum."""
    q = _fast_base(lam)
    if q is None:
        raise ValueError(f"no complete digit system for ratio {lam!r}")
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"bad level {n!r}")
    return (q ** n - 1) // (q - 1)


def _least_span_level(q: int, m: int) -> int:
    """Least n >= 1 whose digit span reaches m (m >= 1)."""
    if q == 2:
        return max(1, m.bit_length())
    t = 2 * m + 1  # span(n) >= m  <=>  3^n >= 2m + 1
    n = max(1, int((t.bit_length() - 1) / _LOG2Q[3]))
    while 3 ** n < t:
        n += 1
    while n > 1 and 3 ** (n - 1) >= t:
        n -= 1
    return n


def h1_level_exact(lam, x):
    """Least level at which the coordinate value x admits a one-sided
    overlap, for lam = 1/2 or 1/3; None when no level ever works.

    x = S(kappa)/S(delta) with nonzero length-n sign vectors holds
    exactly when max(|num|, den) of x in lowest terms is at most the
    digit span of n: digits of numerator and denominator give one
    direction, clearing denominators gives the other."""
    q = _fast_base(lam)
    if q is None:
        raise ValueError(f"no complete digit system for ratio {lam!r}")
    if isinstance(x, AlgebraicNumber):
        return None  # sign-sum ratios are rational
    x = Fraction(x)
    if not x:
        return None  # would force kappa = 0
    return _least_span_level(q, max(abs(x.numerator), x.denominator))


def _digits_signed(q: int, m: int, n: int) -> tuple:
    """Length-n digit vector (most significant first) with
    sum_i d_i q^(n-i) = m; requires |m| within the span of n."""
    neg = m < 0
    work = -m if neg else m
    digs = []
    if q == 2:
        digs = [int(c) for c in bin(work)[2:]] if work else []
        digs.reverse()
    else:
        block = 3 ** 64
        carry = 0
        while work or carry:
            work, blk = divmod(work, block)
            blk += carry
            carry = 0
            if blk == block:
                blk = 0
                carry = 1
            for _ in range(64):
                blk, r = divmod(blk, 3)
                if r == 2:  # balanced digit -1 with a carry
                    digs.append(-1)
                    blk += 1
                else:
                    digs.append(r)
            carry += blk
    while digs and digs[-1] == 0:
        digs.pop()
    if len(digs) > n:
        raise ValueError(f"{m} exceeds the digit span of level {n}")
    digs.extend([0] * (n - len(digs)))
    if neg:
        digs = [-d for d in digs]
    digs.reverse()
    return tuple(digs)


def _horner_q(q: int, coeffs) -> int:
    """sum_i coeffs[i] * q^(n-1-i), folded 64 positions at a time."""
    out = 0
    qblock = q ** 64
    for t in range(0, len(coeffs), 64):
        blk = coeffs[t:t + 64]
        acc = 0
        for c in blk:
            acc = acc * q + c
        out = out * (qblock if len(blk) == 64 else q ** len(blk)) + acc
    return out


def _rep_digits(lam, x: Fraction, n: int):
    """(kappa, delta) of length n with x = S(kappa)/S(delta), from the
    signed digits of numerator and denominator."""
    q = _fast_base(lam)
    kvec = _digits_signed(q, x.numerator, n)
    dvec = _digits_signed(q, x.denominator, n)
    if _horner_q(q, kvec) != x.numerator \
            or _horner_q(q, dvec) != x.denominator:
        raise RuntimeError("digit extraction failed to reproduce its "
                           "input")
    return kvec, dvec


# label pieces (a_i, b_i) whose digit values differ by delta_i*x -
# kappa_i; "@" stands for the side letter
_REP_PIECES = {
    (0, 0): ("0", "0"), (1, 0): ("0", "1"), (-1, 0): ("1", "0"),
    (0, 1): ("@", "0"), (0, -1): ("0", "@"), (1, 1): ("@", "1"),
    (-1, -1): ("1", "@"), (-1, 1): ("1@", "0"), (1, -1): ("0", "1@"),
}


def _words_from_rep(spec, side, j, kappa, delta):
    """Witness word pair for coordinate j of a one-sided system, read off
    a representation x_j = S(kappa)/S(delta); the pair comes out
    lexicographically ordered."""
    letter = "u" if side == "U" else "v"
    a = []
    b = []
    for ki, di in zip(kappa, delta):
        pa, pb = _REP_PIECES[(ki, di)]
        pa = pa.replace("@", letter)
        pb = pb.replace("@", letter)
        if spec.dim > 1:
            row_a = ["0"] * spec.dim
            row_b = ["0"] * spec.dim
            row_a[j] = pa
            row_b[j] = pb
            pa = "|".join(row_a)
            pb = "|".join(row_b)
        a.append(pa)
        b.append(pb)
    a, b = tuple(a), tuple(b)
    if a == b:
        raise RuntimeError("zero representation produced equal words")
    return (a, b) if a <= b else (b, a)


def _piece_parts(piece: str, letter: str):
    """Digit label piece -> (c, e) with value c + e*x."""
    if piece == "0":
        return 0, 0
    if piece == "1":
        return 1, 0
    if piece == letter:
        return 0, 1
    if piece == "1" + letter:
        return 1, 1
    raise ValueError(f"unknown digit label {piece!r}")


def witness_gap(spec, side: str, point, wa, wb):
    """Exact distance between the translations named by the same-length
    words wa and wb in the one-sided system at the given point.

    Zero certifies the pair as an overlap witness.  The product family
    with lam = 1/q and rational coordinates reduces to integer Horner
    sums, so words tens of thousands of letters long stay cheap; all
    other cases compose the maps."""
    if side not in ("U", "V"):
        raise ValueError(f"side must be 'U' or 'V', got {side!r}")
    pt = _as_point(point)
    spec.domain_check(pt)
    wa, wb = tuple(wa), tuple(wb)
    if len(wa) != len(wb) or not wa:
        raise ValueError("witness words must share a positive length")
    q = _fast_base(spec.lam) if spec.variant == "example1" else None
    if q is not None and not any(isinstance(c, AlgebraicNumber)
                                 for c in pt):
        letter = "u" if side == "U" else "v"
        n = len(wa)
        best = _ZERO
        for j in range(spec.dim):
            dc = []
            de = []
            for la, lb in zip(wa, wb):
                pa = la.split("|")[j] if spec.dim > 1 else la
                pb = lb.split("|")[j] if spec.dim > 1 else lb
                ca, ea = _piece_parts(pa, letter)
                cb, eb = _piece_parts(pb, letter)
                dc.append(ca - cb)
                de.append(ea - eb)
            ic = _horner_q(q, dc)
            ie = _horner_q(q, de)
            xj = Fraction(pt[j])
            num = abs(ic * xj.denominator + ie * xj.numerator)
            if num:
                gap = Fraction(num, xj.denominator * q ** n)
                if gap > best:
                    best = gap
        return best
    kwargs = {"u": pt} if side == "U" else {"v": pt}
    phi = instantiate(spec, side, **kwargs)
    dist = pair_distance(phi, wa, wb)
    if not dist.is_finite:
        raise ValueError("words name maps with different linear parts")
    return dist.value


def _val_q(q: int, m: int) -> int:
    """q-adic valuation of a nonzero integer, blockwise."""
    v = 0
    qblock = q ** 64
    while m % qblock == 0:
        m //= qblock
        v += 64
    while m % q == 0:
        m //= q
        v += 1
    return v


def trilinear_gap(lam, a, b, L: int):
    """Lower bound for |K + a*D + b*G| over nonzero integer triples
    bounded by the level-L digit span, or None when the valuation test
    cannot separate the terms.

    With a = na/da and b = nb/db in lowest terms, clearing denominators
    turns the combination into K*da*db + D*na*db + G*nb*da.  A bounded
    coefficient c satisfies val_q(c) <= L - 1, so when the q-adic
    valuations of the three products are pairwise at least L apart, any
    combination with some nonzero coefficient keeps a unique term of
    minimal valuation and cannot vanish; its absolute value is then at
    least 1/(da*db)."""
    q = _fast_base(lam)
    if q is None or isinstance(a, AlgebraicNumber) \
            or isinstance(b, AlgebraicNumber):
        return None
    if not isinstance(L, int) or L < 1:
        raise ValueError(f"bad level bound {L!r}")
    a, b = Fraction(a), Fraction(b)
    if not a or not b:
        return None
    c1 = a.denominator * b.denominator
    c2 = a.numerator * b.denominator
    c3 = b.numerator * a.denominator
    v1, v2, v3 = _val_q(q, c1), _val_q(q, c2), _val_q(q, c3)
    if abs(v1 - v2) >= L and abs(v1 - v3) >= L and abs(v2 - v3) >= L:
        return Fraction(1, c1)
    return None


def joint_gap(spec, u, v, L: int):
    """Certified lower bound on every level-<=L joint overlap defect at
    the pair (u, v), or None when the valuation test does not apply.

    Two distinct joint words disagree in some coordinate, where the
    defect is a bounded combination K + u_j*D + v_j*G with not all of
    K, D, G zero; a positive bound therefore proves absence of joint
    overlaps up to level L."""
    if spec.variant != "example1":
        return None
    u, v = _as_point(u), _as_point(v)
    gaps = []
    for j in range(spec.dim):
        g = trilinear_gap(spec.lam, u[j], v[j], L)
        if g is None:
            return None
        gaps.append(g)
    return min(gaps)


_H3_ENUM_MAX = 6  # largest level the mixed-form enumeration may fall to


def _h3_clear(lam, x, uj, n) -> bool:
    """True certifies that x is not a level-<=n mixed value against uj;
    False means membership or an unsettled test."""
    if trilinear_gap(lam, uj, x, n) is not None:
        return True
    if n <= _H3_ENUM_MAX:
        return not _h3_member(lam, x, uj, n)
    return False


def _ex2_sign_polys(n):
    """Coefficient tuples of sum_{i=1..n} kappa_i x^i, kappa nonzero, in
    canonical order (constant term first)."""
    for vec in itertools.product(SIGNS, repeat=n):
        if any(vec):
            yield (0,) + vec


def _poly_zero_interval(coeffs, x: AlgebraicNumber):
    """Outward-rounded Horner evaluation; None means "cannot tell"."""
    fx = float_enclosure(x)
    acc = FloatInterval.point(0.0)
    for c in reversed(coeffs):
        acc = acc * fx + FloatInterval.point(float(c))
    return None if acc.contains_zero() else False


def _refined(x):
    """Tighten the isolator once so the interval prefilter has teeth."""
    if isinstance(x, AlgebraicNumber):
        return refine(x, Fraction(1, 2 ** 60))
    return x


def _poly_zero_at(coeffs, x) -> bool:
    # algebraic x should come pre-refined via _refined
    if isinstance(x, AlgebraicNumber):
        quick = _poly_zero_interval(coeffs, x)
        if quick is False:
            return False
        return sign_at(coeffs, x) == 0
    acc = _ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc == 0


def _ex2_h1_member(x, n) -> bool:
    x = _refined(x)
    return any(_poly_zero_at(p, x) for p in _ex2_sign_polys(n))


def _ex2_excluded(x, bound) -> bool:
    """Is x a root of a nonzero polynomial of degree <= bound with
    coefficients in {-2,...,2}?"""
    x = _refined(x)
    for coeffs in itertools.product((0, 1, -1, 2, -2), repeat=bound + 1):
        if any(coeffs) and _poly_zero_at(coeffs, x):
            return True
    return False


# ---------------------------------------------------------------------------
# overlap level search

def _coord_h1_level(spec, x, n_max):
    """Least level <= n_max at which coordinate x satisfies the closed
    form, or None."""
    for n in range(1, n_max + 1):
        if spec.variant == "example1":
            if _h1_member(spec.lam, x, n):
                return n
        else:
            if _ex2_h1_member(x, n):
                return n
    return None


_CROSSCHECK_MAX = {"example1": 8, "example2": 6}


def h_level(spec: FamilySpec, side: str, point, L_max: int, *,
            budget: int = DEFAULT_BUDGET) -> OverlapLevel | None:
    """Least overlap level of the instantiated system up to L_max.

    Returns None when absence up to L_max is certified.  Raises
    SearchIndeterminate if the search budget runs out first.  For the
    one-sided searches the outcome is cross-checked against the closed
    form whenever the level is small enough to enumerate."""
    if side == "joint":
        u, v = point
        phi = instantiate(spec, side, u=_as_point(u), v=_as_point(v))
    elif side == "U":
        phi = instantiate(spec, side, u=_as_point(point))
    else:
        phi = instantiate(spec, side, v=_as_point(point))
    outcome = has_exact_overlap_upto(phi, L_max, budget=budget)
    if outcome.status == "indeterminate":
        raise SearchIndeterminate(
            f"budget exhausted; overlap-free up to level "
            f"{outcome.certified_upto}")

    if side != "joint" and L_max <= _CROSSCHECK_MAX[spec.variant]:
        pt = _as_point(point)
        levels = [_coord_h1_level(spec, c, L_max) for c in pt]
        closed = min((l for l in levels if l is not None), default=None)
        found = outcome.witness.level if outcome.status == "witness" \
            else None
        if closed != found:
            raise RuntimeError(
                f"closed form disagrees with search: {closed} vs {found}")

    if outcome.status == "absent":
        return None
    return OverlapLevel(outcome.witness.level, outcome.witness, True)


# ---------------------------------------------------------------------------
# enumeration of level-n parameter values

def enumerate_h1(spec: FamilySpec, n: int, window=None, *,
                 budget: int = DEFAULT_BUDGET,
                 pair_cap: int = 10 ** 7) -> list:
    """All parameter coordinate values admitting an overlap at level <= n,
    sorted increasingly, restricted to the open window (lo, hi).

    Every returned value is re-certified by the level search before it is
    reported."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"bad level {n!r}")
    if window is not None:
        wlo, whi = Fraction(window[0]), Fraction(window[1])
        if wlo >= whi:
            raise ValueError("empty window")

    if spec.variant == "example1":
        if 9 ** n > pair_cap:
            raise ValueError(f"level {n} needs {9 ** n} ratio pairs, "
                             f"above the cap {pair_cap}")
        _, _, nonzero = _sign_sums(spec.lam, n)
        vals = set()
        for num, _ in nonzero:
            for den, _ in nonzero:
                vals.add(num / den)
        vals -= {_ZERO, _ONE}
        if window is not None:
            vals = {x for x in vals if wlo < x < whi}
        out = sorted(vals)
    else:
        lo, hi = _HALF, _ONE
        if window is not None:
            lo, hi = max(lo, wlo), min(hi, whi)
        out = []
        if lo < hi:
            for poly in _ex2_sign_polys(n):
                for r in isolate_real_roots(poly, lo, hi):
                    r = sc_norm(r)
                    if sc_cmp(r, lo) <= 0 or sc_cmp(r, hi) >= 0:
                        continue  # the isolation window is closed
                    if not any(sc_eq(r, s) for s in out):
                        out.append(r)
            out.sort(key=_SortKey)

    for x in out:  # cross-validate against the search
        pt = ParamPoint((x,) * spec.arity)
        lvl = h_level(spec, "U", pt, n, budget=budget)
        if lvl is None or lvl.level > n:
            raise RuntimeError(f"enumerated value {x!r} fails its level")
    return out


class _SortKey:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __lt__(self, other):
        return sc_cmp(self.x, other.x) < 0


# ---------------------------------------------------------------------------
# perturbations

_SHIFT_CAP = 400
_DEGREE_CAP = 8


def _coord_level_any(spec, x, n_max):
    """Least coordinate level <= n_max, by the exact formula when one
    applies and by enumeration otherwise."""
    if spec.variant == "example1" and _fast_base(spec.lam) is not None:
        lvl = h1_level_exact(spec.lam, x)
        return lvl if lvl is not None and lvl <= n_max else None
    return _coord_h1_level(spec, x, n_max)


def _require_level(spec, side, point, n, what):
    """Cheap closed-form check that the point admits a level-<=n overlap."""
    member = any(_coord_level_any(spec, c, n) is not None for c in point)
    if not member:
        raise ValueError(f"{what} admits no overlap at level <= {n}")


def perturb_primary(spec: FamilySpec, u, n0: int, v, m0: int, eps, *,
                    budget: int = DEFAULT_BUDGET):
    """Nudge u past the threshold L0 = max(n0, m0).

    Requires u with an overlap at level <= n0 and v with one at level
    <= m0.  Returns (u1, level) where u1 differs from u by less than eps
    in every coordinate, its least overlap level lies strictly above L0,
    and the level comes with a verified witness."""
    u, v = _as_point(u), _as_point(v)
    spec.domain_check(u)
    spec.domain_check(v)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    L0 = max(n0, m0)
    _require_level(spec, "U", u, n0, "u")
    _require_level(spec, "V", v, m0, "v")

    if spec.variant == "example1":
        return _ex1_shift(spec, u, L0, eps, budget, uj_for=None)
    return _ex2_root_search(spec, u[0], L0, eps, budget, u1=None)


def perturb_secondary(spec: FamilySpec, u1, v, m0: int, eps, L0: int, *,
                      budget: int = DEFAULT_BUDGET):
    """Nudge v past L0 while keeping the joint system overlap-free up to
    L0 against the already-perturbed u1.

    Returns (v1, level) with the same guarantees as perturb_primary plus
    a certified absence of joint overlaps at levels <= L0."""
    u1, v = _as_point(u1), _as_point(v)
    spec.domain_check(u1)
    spec.domain_check(v)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    _require_level(spec, "V", v, m0, "v")

    if spec.variant == "example1":
        return _ex1_shift(spec, v, L0, eps, budget, uj_for=u1)
    return _ex2_root_search(spec, v[0], L0, eps, budget, u1=u1[0])


def _least_shift_exponent(q: int, bound) -> int:
    """Least N >= 1 with q^(-N) < bound, by exact comparison."""
    bound = Fraction(bound)
    if bound > 1:
        return 1
    num, den = bound.denominator, bound.numerator  # q^N > num/den
    n = max(1, int((num.bit_length() - den.bit_length())
                   / _LOG2Q[q]) - 2)
    while q ** n * den <= num:
        n += 1
    while n > 1 and q ** (n - 1) * den > num:
        n -= 1
    return n


def _joint_clear(spec, u_pt, v_pt, L0, budget) -> bool:
    """True certifies joint overlap absence up to L0; the valuation bound
    first, then the search while L0 is small enough for it."""
    if joint_gap(spec, u_pt, v_pt, L0) is not None:
        return True
    if L0 <= _CROSSCHECK_MAX["example1"]:
        return h_level(spec, "joint", (u_pt, v_pt), L0,
                       budget=budget) is None
    return False


def _fast_level_witness(spec, side, point, L0):
    """Overlap level of a one-sided system from the exact formula, with a
    digit-built witness re-checked against the translation sums."""
    lam = spec.lam
    best = None
    for j, x in enumerate(point):
        lvl = h1_level_exact(lam, x)
        if lvl is not None and (best is None or lvl < best[0]):
            best = (lvl, j)
    if best is None:
        return None
    lvl, j = best
    kvec, dvec = _rep_digits(lam, Fraction(point[j]), lvl)
    wa, wb = _words_from_rep(spec, side, j, kvec, dvec)
    if witness_gap(spec, side, point, wa, wb):
        raise RuntimeError("digit witness fails to overlap")
    wit = WitnessPair(wa, wb, lvl, StrictDistance.finite(_ZERO))
    return OverlapLevel(lvl, wit, True)


def _ex1_shift(spec, pt, L0, eps, budget, uj_for):
    """Shared shift step for the product family.

    Each coordinate with a level-L0 representation gets lam^N added to the
    numerator of its first representation; N is the least exponent above
    L0 for which every shifted coordinate avoids the level-L0 value sets,
    stays inside the domain, and moves by less than eps.  On the
    secondary side (uj_for set) the mixed forms against u1 are avoided as
    well, and the joint system is verified overlap-free up to L0.

    With lam = 1/2 or 1/3 and rational coordinates the representations
    come from signed digits, the value-set tests use the exact level
    formula and the valuation bound, the exponent scan starts at the
    first N small enough for eps, and the witness is written down instead
    of searched for; levels in the tens of thousands stay exact."""
    lam = spec.lam
    fast = _fast_base(lam) is not None \
        and not any(isinstance(c, AlgebraicNumber) for c in pt) \
        and (uj_for is None
             or not any(isinstance(c, AlgebraicNumber) for c in uj_for))

    reps = {}
    for j, x in enumerate(pt):
        if fast:
            lvl = h1_level_exact(lam, x)
            r = _rep_digits(lam, Fraction(x), lvl) \
                if lvl is not None and lvl <= L0 else None
        else:
            r = _h1_representation(lam, x, L0)
        if r is not None:
            reps[j] = ("plain", r)
            continue
        if uj_for is not None and (not fast or L0 <= _H3_ENUM_MAX):
            r = _h3_representation(lam, x, uj_for[j], L0)
            if r is not None:
                reps[j] = ("mixed", r)
    if not any(kind == "plain" for kind, _ in reps.values()):
        raise ValueError("no coordinate carries a level-%d overlap" % L0)

    def sign_sum(vec):
        return sum((c * lam ** (i + 1) for i, c in enumerate(vec)), _ZERO)

    start = L0 + 1
    if fast:
        # every N below this fails the eps test on some coordinate
        scale = min(abs(sign_sum(rep[-1])) for _, rep in reps.values())
        start = max(start, _least_shift_exponent(_fast_base(lam),
                                                 eps * scale))
    side = "U" if uj_for is None else "V"
    for N in range(start, start + _SHIFT_CAP):
        shift = lam ** N
        coords = list(pt.coords)
        ok = True
        for j, (kind, rep) in reps.items():
            if kind == "plain":
                kvec, dvec = rep
                val = (sign_sum(kvec) + shift) / sign_sum(dvec)
            else:
                kvec, dvec, gvec = rep
                val = (sign_sum(kvec) + shift
                       + uj_for[j] * sign_sum(dvec)) / sign_sum(gvec)
            if val in (_ZERO, _ONE) or abs(val - pt[j]) >= eps:
                ok = False
                break
            if fast:
                vlvl = h1_level_exact(lam, val)
                if (vlvl is not None and vlvl <= L0) \
                        or (uj_for is not None
                            and not _h3_clear(lam, val, uj_for[j], L0)):
                    ok = False
                    break
            elif _h1_member(lam, val, L0) \
                    or (uj_for is not None
                        and _h3_member(lam, val, uj_for[j], L0)):
                ok = False
                break
            coords[j] = val
        if not ok:
            continue
        new = ParamPoint(tuple(coords))
        if uj_for is not None:
            if fast:
                if not _joint_clear(spec, uj_for, new, L0, budget):
                    continue
            elif h_level(spec, "joint", (uj_for, new), L0,
                         budget=budget) is not None:
                continue
        if fast:
            lvl = _fast_level_witness(spec, side, new, L0)
        else:
            lvl = h_level(spec, side, new, N, budget=budget)
        if lvl is None or lvl.level <= L0:
            raise RuntimeError("shifted point missed its target level")
        return new, lvl
    raise RuntimeError(f"no admissible shift exponent within {_SHIFT_CAP} "
                       f"steps")


def _ex2_root_search(spec, x, L0, eps, budget, u1):
    """Shared root search for the two-map family.

    Candidates are roots of sign polynomials of degree above L0 inside
    the eps-ball around x (clipped to the domain), taken in canonical
    order.  A candidate survives if it is not a root of any {-2..2}
    polynomial of degree <= L0; on the secondary side (u1 set) the joint
    system against u1 must also stay overlap-free up to L0."""
    if isinstance(x, AlgebraicNumber):
        xlo, xhi = fraction_enclosure(x, Fraction(1, 2 ** 80))
    else:
        xlo = xhi = x
    lo = max(_HALF, xhi - eps)
    hi = min(_ONE, xlo + eps)
    if lo >= hi:
        raise ValueError("eps ball misses the domain")

    for deg in range(L0 + 1, L0 + 1 + _DEGREE_CAP):
        for poly in _ex2_sign_polys(deg):
            for r in isolate_real_roots(poly, lo, hi):
                r = sc_norm(r)
                if sc_cmp(r, lo) <= 0 or sc_cmp(r, hi) >= 0:
                    continue
                if sc_cmp(sc_abs(sc_sub(r, x)), eps) >= 0:
                    continue
                if _ex2_excluded(r, L0):
                    continue
                cand = ParamPoint((r,))
                if u1 is not None:
                    joint = h_level(spec, "joint",
                                    (ParamPoint((u1,)), cand), L0,
                                    budget=budget)
                    if joint is not None:
                        continue
                side = "U" if u1 is None else "V"
                lvl = h_level(spec, side, cand, deg, budget=budget)
                if lvl is None or lvl.level <= L0:
                    raise RuntimeError("candidate root missed its target "
                                       "level")
                return cand, lvl
    raise RuntimeError(f"no admissible root up to degree {L0 + _DEGREE_CAP}")
