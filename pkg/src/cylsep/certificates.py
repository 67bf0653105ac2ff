"""Stage certificates for the nested-ball construction, with an
independent verifier.

A certificate freezes one full run of the construction: the seed pair
with its overlap witnesses, every accepted stage with the transition
radii that admitted it, and the guarantees the run claims.  verify()
re-derives each claim from the serialized data alone, sharing no state
with the code that produced it: witnesses are recomposed, least levels
recomputed, radii re-certified, nesting checked exactly, and the final
separation claims re-established.

Radius semantics: stage k stores eps and eps_prime, the transition
radii around the previous points u_{k-1} and v_{k-1} whose balls keep
the previous witnesses below the omega targets, and delta, the
exclusion radius of the closed ball around (u_k, v_k) that avoids every
joint overlap locus up to the previous stage's top level.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .exactnum import (
    AlgebraicNumber,
    RatInterval,
    eval_poly2,
    fraction_enclosure,
    scalar_from_json,
    scalar_to_json,
)
from .families import (
    FamilySpec,
    ParamPoint,
    SearchIndeterminate,
    digit_span,
    h1_level_exact,
    instantiate,
    joint_gap,
    witness_gap,
)
from .families import _as_point, _fast_base, _piece_parts
from .separation import (
    DEFAULT_BUDGET,
    WitnessPair,
    delta_n,
    has_exact_overlap_upto,
)
from .similarity import (
    StrictDistance,
    sc_abs,
    sc_add,
    sc_cmp,
    sc_mul,
    sc_norm,
    sc_sign,
    sc_sub,
)

__all__ = [
    "BaseRecord",
    "Certificate",
    "CheckResult",
    "Guarantees",
    "OmegaSpec",
    "SchemaError",
    "Stage",
    "VerificationReport",
    "ball_avoids_h3",
    "certificate_from_json",
    "certificate_to_json",
    "epsilon_covers",
    "load_certificate",
    "save_certificate",
    "verify",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class SchemaError(ValueError):
    """Certificate JSON that does not match the schema."""


# ------------------------------------------------------------- scalars

def _ensure_digits(digits: int) -> None:
    """Lift the interpreter's int<->str conversion guard when a value
    needs more digits than it currently allows."""
    try:
        cur = sys.get_int_max_str_digits()
    except AttributeError:
        return
    if cur != 0 and cur < digits + 16:
        sys.set_int_max_str_digits(digits + 16)


def _frac_str(x: Fraction) -> str:
    bits = max(x.numerator.bit_length(), x.denominator.bit_length())
    _ensure_digits(bits // 3 + 2)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _scalar_json(x):
    if isinstance(x, Fraction):
        return _frac_str(x)
    ends = [x.lo, x.hi]
    if x.is_rational:
        ends.append(Fraction(x.value))
    for f in ends:
        f = Fraction(f)
        bits = max(f.numerator.bit_length(), f.denominator.bit_length())
        _ensure_digits(bits // 3 + 2)
    return scalar_to_json(x)


def _parse_scalar(obj, where: str):
    if isinstance(obj, str):
        _ensure_digits(len(obj))
    elif isinstance(obj, dict):
        iso = obj.get("isolator")
        if isinstance(iso, list):
            for s in iso:
                if isinstance(s, str):
                    _ensure_digits(len(s))
    else:
        raise SchemaError(f"{where}: expected a scalar encoding")
    try:
        return sc_norm(scalar_from_json(obj))
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _parse_frac(obj, where: str) -> Fraction:
    if not isinstance(obj, str):
        raise SchemaError(f"{where}: expected a rational string")
    _ensure_digits(len(obj))
    try:
        return Fraction(obj)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _parse_positive_frac(obj, where: str) -> Fraction:
    val = _parse_frac(obj, where)
    if val <= 0:
        raise SchemaError(f"{where}: must be positive")
    return val


def _parse_int(obj, where: str, minimum: int = 1) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise SchemaError(f"{where}: expected an integer")
    if obj < minimum:
        raise SchemaError(f"{where}: must be at least {minimum}")
    return obj


def _expect_keys(obj, required, where, optional=frozenset()):
    keys = set(obj)
    missing = set(required) - keys
    if missing:
        raise SchemaError(f"{where}: missing field(s) {sorted(missing)}")
    extra = keys - set(required) - set(optional)
    if extra:
        raise SchemaError(f"{where}: unknown field(s) {sorted(extra)}")


# --------------------------------------------------------------- omega

@dataclass(frozen=True)
class OmegaSpec:
    """Target sequence omega_n, positive at every level n >= 1.

    kind "superexp" is c * rho**(n*n), strictly decreasing; "table"
    reads a finite 1-indexed list; "custom" wraps a callable and cannot
    be serialized."""

    kind: str
    c: Fraction | None = None
    rho: Fraction | None = None
    values: tuple | None = None
    fn: object = None

    @classmethod
    def superexp(cls, c, rho) -> "OmegaSpec":
        c, rho = Fraction(c), Fraction(rho)
        if c <= 0:
            raise ValueError("superexp omega needs c > 0")
        if not 0 < rho < 1:
            raise ValueError("superexp omega needs 0 < rho < 1")
        return cls("superexp", c=c, rho=rho)

    @classmethod
    def table(cls, values) -> "OmegaSpec":
        vals = tuple(Fraction(v) for v in values)
        if not vals:
            raise ValueError("omega table must not be empty")
        if any(v <= 0 for v in vals):
            raise ValueError("omega values must be positive")
        return cls("table", values=vals)

    @classmethod
    def custom(cls, fn) -> "OmegaSpec":
        return cls("custom", fn=fn)

    def value(self, n: int) -> Fraction:
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ValueError(f"omega levels start at 1, got {n!r}")
        if self.kind == "superexp":
            return self.c * self.rho ** (n * n)
        if self.kind == "table":
            if n > len(self.values):
                raise ValueError(
                    f"omega table of length {len(self.values)} has no "
                    f"entry for level {n}")
            return self.values[n - 1]
        val = Fraction(self.fn(n))
        if val <= 0:
            raise ValueError(f"custom omega is not positive at level {n}")
        return val

    def min_over(self, a: int, b: int) -> Fraction:
        """Minimum of omega over the integer range [a, b]."""
        if a > b:
            raise ValueError(f"empty level range [{a}, {b}]")
        if self.kind == "superexp":
            return self.value(b)
        return min(self.value(n) for n in range(a, b + 1))

    def to_json(self) -> dict:
        if self.kind == "superexp":
            return {"kind": "superexp", "c": _frac_str(self.c),
                    "rho": _frac_str(self.rho)}
        if self.kind == "table":
            return {"kind": "table",
                    "values": [_frac_str(v) for v in self.values]}
        raise ValueError("custom omega sequences cannot be serialized")

    @classmethod
    def from_json(cls, obj) -> "OmegaSpec":
        if not isinstance(obj, dict):
            raise SchemaError("omega: expected an object")
        kind = obj.get("kind")
        try:
            if kind == "superexp":
                _expect_keys(obj, {"kind", "c", "rho"}, "omega")
                return cls.superexp(_parse_frac(obj["c"], "omega.c"),
                                    _parse_frac(obj["rho"], "omega.rho"))
            if kind == "table":
                _expect_keys(obj, {"kind", "values"}, "omega")
                vals = obj["values"]
                if not isinstance(vals, list):
                    raise SchemaError("omega.values: expected a list")
                return cls.table([_parse_frac(v, "omega.values")
                                  for v in vals])
        except SchemaError:
            raise
        except ValueError as exc:
            raise SchemaError(f"omega: {exc}") from exc
        raise SchemaError(f"omega: unknown kind {kind!r}")


# ------------------------------------------------------------- records

@dataclass(frozen=True)
class BaseRecord:
    """Seed pair with the witnesses that place u in H1(n) of the u-side
    system and v in H1(m) of the v-side system."""

    u: ParamPoint
    v: ParamPoint
    n: int
    m: int
    witness_u: WitnessPair
    witness_v: WitnessPair


@dataclass(frozen=True)
class Stage:
    """One accepted round of the construction."""

    k: int
    u: ParamPoint
    v: ParamPoint
    n: int
    m: int
    eps: Fraction
    eps_prime: Fraction
    delta: Fraction
    witness_u: WitnessPair
    witness_v: WitnessPair


@dataclass(frozen=True)
class Guarantees:
    """Claims about the final pair: delta_n <= omega_n for every level
    in [delta_lo, delta_hi], and no joint overlap up to
    no_overlap_upto."""

    delta_lo: int
    delta_hi: int
    no_overlap_upto: int


@dataclass(frozen=True)
class Certificate:
    family: FamilySpec
    omega: OmegaSpec
    base: BaseRecord
    stages: tuple
    guarantees: Guarantees


# ---------------------------------------------------------------- json

def _family_to_json(spec: FamilySpec) -> dict:
    if spec.variant == "example1":
        return {"variant": "example1", "lambda": _scalar_json(spec.lam),
                "dim": spec.dim, "merge": spec.merge}
    return {"variant": "example2"}


def _family_from_json(obj) -> FamilySpec:
    if not isinstance(obj, dict):
        raise SchemaError("family: expected an object")
    variant = obj.get("variant")
    if variant == "example1":
        _expect_keys(obj, {"variant", "lambda"}, "family",
                     optional={"dim", "merge"})
        lam = _parse_scalar(obj["lambda"], "family.lambda")
        dim = _parse_int(obj.get("dim", 1), "family.dim")
        merge = obj.get("merge", "union")
        if not isinstance(merge, str):
            raise SchemaError("family.merge: expected a string")
        try:
            return FamilySpec.example1(lam, dim, merge)
        except ValueError as exc:
            raise SchemaError(f"family: {exc}") from exc
    if variant == "example2":
        _expect_keys(obj, {"variant"}, "family")
        return FamilySpec.example2()
    raise SchemaError(f"family: unknown variant {variant!r}")


def _point_to_json(pt: ParamPoint) -> list:
    return [_scalar_json(c) for c in pt]


def _point_from_json(obj, dim: int, where: str) -> ParamPoint:
    if not isinstance(obj, list) or len(obj) != dim:
        raise SchemaError(f"{where}: expected {dim} coordinate(s)")
    return ParamPoint(tuple(_parse_scalar(c, where) for c in obj))


def _witness_to_json(wit: WitnessPair) -> dict:
    return {"a": list(wit.a), "b": list(wit.b)}


def _witness_from_json(obj, level: int, where: str) -> WitnessPair:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    _expect_keys(obj, {"a", "b"}, where)
    words = []
    for key in ("a", "b"):
        w = obj[key]
        if (not isinstance(w, list) or not w
                or not all(isinstance(s, str) and s for s in w)):
            raise SchemaError(f"{where}.{key}: expected a list of labels")
        words.append(tuple(w))
    try:
        return WitnessPair(words[0], words[1], level,
                           StrictDistance.finite(_ZERO))
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _base_from_json(obj, family: FamilySpec) -> BaseRecord:
    if not isinstance(obj, dict):
        raise SchemaError("base: expected an object")
    _expect_keys(obj, {"u", "v", "n", "m", "witness_u", "witness_v"},
                 "base")
    n = _parse_int(obj["n"], "base.n")
    m = _parse_int(obj["m"], "base.m")
    return BaseRecord(
        u=_point_from_json(obj["u"], family.dim, "base.u"),
        v=_point_from_json(obj["v"], family.dim, "base.v"),
        n=n, m=m,
        witness_u=_witness_from_json(obj["witness_u"], n, "base.witness_u"),
        witness_v=_witness_from_json(obj["witness_v"], m, "base.witness_v"))


def _base_to_json(rec: BaseRecord) -> dict:
    return {"u": _point_to_json(rec.u), "v": _point_to_json(rec.v),
            "n": rec.n, "m": rec.m,
            "witness_u": _witness_to_json(rec.witness_u),
            "witness_v": _witness_to_json(rec.witness_v)}


def _stage_from_json(obj, k: int, family: FamilySpec) -> Stage:
    where = f"stages[{k - 1}]"
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    _expect_keys(obj, {"k", "u", "v", "n", "m", "eps", "eps_prime",
                       "delta", "witness_u", "witness_v"}, where)
    if isinstance(obj["k"], bool) or obj["k"] != k:
        raise SchemaError(f"{where}: stages must be numbered 1..K in order")
    n = _parse_int(obj["n"], f"{where}.n")
    m = _parse_int(obj["m"], f"{where}.m")
    return Stage(
        k=k,
        u=_point_from_json(obj["u"], family.dim, f"{where}.u"),
        v=_point_from_json(obj["v"], family.dim, f"{where}.v"),
        n=n, m=m,
        eps=_parse_positive_frac(obj["eps"], f"{where}.eps"),
        eps_prime=_parse_positive_frac(obj["eps_prime"],
                                       f"{where}.eps_prime"),
        delta=_parse_positive_frac(obj["delta"], f"{where}.delta"),
        witness_u=_witness_from_json(obj["witness_u"], n,
                                     f"{where}.witness_u"),
        witness_v=_witness_from_json(obj["witness_v"], m,
                                     f"{where}.witness_v"))


def _stage_to_json(s: Stage) -> dict:
    return {"k": s.k, "u": _point_to_json(s.u), "v": _point_to_json(s.v),
            "n": s.n, "m": s.m, "eps": _frac_str(s.eps),
            "eps_prime": _frac_str(s.eps_prime),
            "delta": _frac_str(s.delta),
            "witness_u": _witness_to_json(s.witness_u),
            "witness_v": _witness_to_json(s.witness_v)}


def _guarantees_from_json(obj) -> Guarantees:
    if not isinstance(obj, dict):
        raise SchemaError("guarantees: expected an object")
    _expect_keys(obj, {"delta_range", "no_overlap_upto"}, "guarantees")
    rng = obj["delta_range"]
    if not isinstance(rng, list) or len(rng) != 2:
        raise SchemaError("guarantees.delta_range: expected [lo, hi]")
    lo = _parse_int(rng[0], "guarantees.delta_range")
    hi = _parse_int(rng[1], "guarantees.delta_range")
    if lo > hi:
        raise SchemaError("guarantees.delta_range: lo exceeds hi")
    return Guarantees(lo, hi,
                      _parse_int(obj["no_overlap_upto"],
                                 "guarantees.no_overlap_upto"))


def certificate_from_json(obj) -> Certificate:
    if not isinstance(obj, dict):
        raise SchemaError("certificate: expected an object")
    _expect_keys(obj, {"family", "omega", "base", "stages", "guarantees"},
                 "certificate")
    family = _family_from_json(obj["family"])
    omega = OmegaSpec.from_json(obj["omega"])
    base = _base_from_json(obj["base"], family)
    stages_obj = obj["stages"]
    if not isinstance(stages_obj, list) or not stages_obj:
        raise SchemaError("stages: expected a non-empty list")
    stages = tuple(_stage_from_json(s, i + 1, family)
                   for i, s in enumerate(stages_obj))
    return Certificate(family, omega, base, stages,
                       _guarantees_from_json(obj["guarantees"]))


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "family": _family_to_json(cert.family),
        "omega": cert.omega.to_json(),
        "base": _base_to_json(cert.base),
        "stages": [_stage_to_json(s) for s in cert.stages],
        "guarantees": {
            "delta_range": [cert.guarantees.delta_lo,
                            cert.guarantees.delta_hi],
            "no_overlap_upto": cert.guarantees.no_overlap_upto,
        },
    }


def save_certificate(cert: Certificate, path) -> None:
    text = json.dumps(certificate_to_json(cert),
                      separators=(",", ":")) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_certificate(path) -> Certificate:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    return certificate_from_json(obj)


# --------------------------------------------- certification predicates

def _sup_dist(p: ParamPoint, q: ParamPoint):
    best = _ZERO
    for a, b in zip(p, q):
        d = sc_abs(sc_sub(a, b))
        if sc_cmp(d, best) > 0:
            best = d
    return best


def _ex2_prefix_coeffs(word) -> list:
    """Coefficient list (constant term first) of the translation
    polynomial sum_i x^{E_i}, E_i the prefix exponent sums."""
    exps = {"1": 1, "2": 2}
    coeffs = [0]
    e = 0
    for letter in word:
        if letter not in exps:
            raise ValueError(f"unknown digit label {letter!r}")
        e += exps[letter]
        while len(coeffs) <= e:
            coeffs.append(0)
        coeffs[e] += 1
    return coeffs


def _interval_abs_max(coeffs, box: RatInterval) -> Fraction:
    acc = RatInterval.point(_ZERO)
    for c in reversed(coeffs):
        acc = acc * box + RatInterval.point(c)
    return acc.abs_upper()


def epsilon_covers(spec: FamilySpec, side: str, center, witness, eps,
                   bound) -> bool:
    """Certified: every parameter of the side within eps of center
    (sup-norm, closed ball, meeting the parameter domain) keeps the
    witness pair's translation mismatch at or below bound.

    The product family's mismatch is affine per coordinate, so the test
    is the exact inequality |value at center| + |coefficient|*eps <=
    bound.  The two-map family's mismatch is an integer polynomial in
    the parameter, bounded over the ball by exact interval Horner."""
    if side not in ("U", "V"):
        raise ValueError(f"side must be 'U' or 'V', got {side!r}")
    wa, wb = (tuple(w) for w in witness)
    if len(wa) != len(wb) or not wa:
        raise ValueError("witness words must share a positive length")
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    bound = Fraction(bound)
    pt = _as_point(center)
    spec.domain_check(pt)
    if spec.variant == "example1":
        letter = "u" if side == "U" else "v"
        lam = spec.lam
        for j in range(spec.dim):
            const = _ZERO
            coef = _ZERO
            for la, lb in zip(reversed(wa), reversed(wb)):
                pa = la.split("|")[j] if spec.dim > 1 else la
                pb = lb.split("|")[j] if spec.dim > 1 else lb
                ca, ea = _piece_parts(pa, letter)
                cb, eb = _piece_parts(pb, letter)
                const = sc_mul(lam, sc_add(const, ca - cb))
                coef = sc_mul(lam, sc_add(coef, ea - eb))
            val = sc_add(const, sc_mul(coef, pt[j]))
            lhs = sc_add(sc_abs(val), sc_mul(sc_abs(coef), eps))
            if sc_cmp(lhs, bound) > 0:
                return False
        return True
    ca = _ex2_prefix_coeffs(wa)
    cb = _ex2_prefix_coeffs(wb)
    # prefix sums are increasing, so the top index is the word's total
    # exponent, hence the composed ratio
    if len(ca) != len(cb):
        raise ValueError("words name maps with different linear parts")
    diff = [x - y for x, y in zip(ca, cb)]
    c0 = pt[0]
    if isinstance(c0, Fraction):
        lo = hi = c0
    else:
        lo, hi = fraction_enclosure(c0, eps / 8)
    lo, hi = max(lo - eps, Fraction(1, 2)), min(hi + eps, _ONE)
    if lo > hi:
        return True
    return _interval_abs_max(diff, RatInterval(lo, hi)) <= bound


def ball_avoids_h3(spec: FamilySpec, u, v, L: int, delta, *,
                   budget: int = DEFAULT_BUDGET) -> bool:
    """Certified: no parameter pair in the closed delta-ball (sup-norm,
    both points moving) around (u, v) admits a joint overlap at any
    level <= L.  False when the ball cannot be certified clear;
    SearchIndeterminate when the budget gives out first.

    The product family tries the valuation bound first: the joint gap g
    lower-bounds every level-<=L defect at the center in the cleared
    scale, while moving both points by delta shifts a defect by less
    than 2*span(L)*delta there, so 2*span(L)*delta < g keeps every
    defect nonzero.  Failing that, exact level minima at the center
    against a Lipschitz bound decide.  The two-map family enumerates
    level words and certifies each translation difference away from
    zero over the ball by exact interval arithmetic."""
    if isinstance(L, bool) or not isinstance(L, int) or L < 1:
        raise ValueError(f"bad level bound {L!r}")
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    u = _as_point(u)
    v = _as_point(v)
    if spec.variant == "example1":
        g = joint_gap(spec, u, v, L)
        if g is not None and 2 * digit_span(spec.lam, L) * delta < g:
            return True
        return _ex1_ball_search(spec, u, v, L, delta, budget)
    return _ex2_ball_enum(spec, u, v, L, delta, budget)


def _ex1_ball_search(spec, u, v, L, delta, budget) -> bool:
    """Separation/Lipschitz certificate: the smallest level-<=L defect
    at the center exceeds the largest movement 2*delta*sum(lam^i) any
    defect can undergo across the ball.  Sound for the product family
    because every word pair stays comparable at every parameter."""
    phi = instantiate(spec, "joint", u=u, v=v)
    out = has_exact_overlap_upto(phi, L, budget=budget)
    if out.status == "witness":
        return False
    if out.status == "indeterminate":
        raise SearchIndeterminate(
            f"joint overlap search up to level {L} ran out of budget")
    sep = None
    for n in range(1, L + 1):
        res = delta_n(phi, n, budget=budget)
        if not res.certified:
            raise SearchIndeterminate(
                f"delta search at level {n} ran out of budget")
        val = res.delta
        if val.is_finite and (sep is None or sc_cmp(val.value, sep) < 0):
            sep = val.value
    if sep is None:
        return False
    acc = _ZERO
    for _ in range(L):
        acc = sc_mul(spec.lam, sc_add(acc, _ONE))
    lip = sc_mul(Fraction(2), acc)
    return sc_cmp(sc_mul(lip, delta), sep) < 0


# two-map family enumeration: letters append their exponent to the
# running ratio monomial u^a v^b, and each prefix monomial contributes
# one term to the translation
_EX2_LETTERS = (("u", 1), ("u", 2), ("v", 1), ("v", 2))


class _NodeBudget:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def spend(self, n: int, what: str) -> None:
        self.left -= n
        if self.left < 0:
            raise SearchIndeterminate(f"{what} exceeded the node budget")


def _ex2_eval(poly: dict, U: RatInterval, V: RatInterval) -> RatInterval:
    du = max(a for a, _ in poly)
    dv = max(b for _, b in poly)
    pu = _interval_powers(U, du)
    pv = _interval_powers(V, dv)
    acc = RatInterval.point(_ZERO)
    for (a, b), c in sorted(poly.items()):
        acc = acc + pu[a] * pv[b] * RatInterval.point(c)
    return acc


def _interval_powers(box: RatInterval, top: int) -> list:
    pows = [RatInterval.point(_ONE)]
    for _ in range(top):
        pows.append(pows[-1] * box)
    return pows


def _ex2_exact_sign(poly: dict, u0, v0) -> int:
    du = max(a for a, _ in poly)
    dv = max(b for _, b in poly)
    w = [[0] * (dv + 1) for _ in range(du + 1)]
    for (a, b), c in poly.items():
        w[a][b] = c
    return sc_sign(eval_poly2(w, u0, v0))


def _ex2_ratio_clear(mono_a, mono_b, U, V) -> bool:
    """Certified: u^mono_a != v-side of mono_b everywhere on the box,
    i.e. the two ratio monomials never coincide there."""
    p = mono_a[0] - mono_b[0]
    q = mono_b[1] - mono_a[1]
    if p == 0 or q == 0:
        # one side of u^p = v^q is constant 1, the other strictly
        # below it on (0, 1)
        return True
    if (p > 0) != (q > 0):
        return True
    p, q = abs(p), abs(q)
    iv = _interval_powers(U, p)[p] - _interval_powers(V, q)[q]
    return iv.lo > 0 or iv.hi < 0


def _ex2_box_clear(poly, U, V, depth, budget) -> bool:
    iv = _ex2_eval(poly, U, V)
    if iv.lo > 0 or iv.hi < 0:
        return True
    if depth == 0:
        return False
    budget.spend(4, "ball subdivision")
    um, vm = U.midpoint(), V.midpoint()
    for uh in (RatInterval(U.lo, um), RatInterval(um, U.hi)):
        for vh in (RatInterval(V.lo, vm), RatInterval(vm, V.hi)):
            if not _ex2_box_clear(poly, uh, vh, depth - 1, budget):
                return False
    return True


def _ex2_pair_clear(ea, eb, U, V, u0, v0, budget) -> bool:
    mono_a, trans_a = ea[1], ea[2]
    mono_b, trans_b = eb[1], eb[2]
    diff = dict(trans_a)
    for mono, c in trans_b.items():
        nc = diff.get(mono, 0) - c
        if nc:
            diff[mono] = nc
        else:
            diff.pop(mono, None)
    if not diff:
        # identical translation functions
        if mono_a == mono_b:
            return False  # identical maps: an overlap at the center
        return _ex2_ratio_clear(mono_a, mono_b, U, V)
    if _ex2_exact_sign(diff, u0, v0) == 0:
        # the center sits on the difference locus; only a ratio-class
        # obstruction over the whole ball can save the pair
        if mono_a == mono_b:
            return False
        return _ex2_ratio_clear(mono_a, mono_b, U, V)
    return _ex2_box_clear(diff, U, V, 10, budget)


def _ex2_ball_enum(spec, u, v, L, delta, budget) -> bool:
    u0, v0 = u[0], v[0]
    if sc_cmp(sc_abs(sc_sub(u0, v0)), 2 * delta) <= 0:
        return False  # the ball touches the diagonal u' = v'
    boxes = []
    for x in (u0, v0):
        if isinstance(x, Fraction):
            lo = hi = x
        else:
            lo, hi = fraction_enclosure(x, delta / 4)
        boxes.append(RatInterval(lo - delta, hi + delta))
    U, V = boxes
    if min(U.lo, V.lo) <= 0 or max(U.hi, V.hi) >= 1:
        return False  # contraction bound fails somewhere on the ball
    nodes = _NodeBudget(budget)
    frontier = [((0, 0), {})]
    for n in range(1, L + 1):
        nxt = []
        for mono, trans in frontier:
            for var, e in _EX2_LETTERS:
                nm = ((mono[0] + e, mono[1]) if var == "u"
                      else (mono[0], mono[1] + e))
                nt = dict(trans)
                nt[nm] = nt.get(nm, 0) + 1
                nxt.append((nm, nt))
        nodes.spend(len(nxt), f"level-{n} word enumeration")
        frontier = nxt
        entries = []
        for mono, trans in frontier:
            entries.append((_ex2_eval(trans, U, V), mono, trans))
        entries.sort(key=lambda t: (t[0].lo, t[0].hi))
        for i, cur in enumerate(entries):
            for j in range(i + 1, len(entries)):
                if entries[j][0].lo > cur[0].hi:
                    break
                nodes.spend(1, f"level-{n} pair certification")
                if not _ex2_pair_clear(cur, entries[j], U, V, u0, v0,
                                       nodes):
                    return False
    return True


# ------------------------------------------------------------ verifier

@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one verification run; overall is "pass" only when
    every check passes, "fail" when any check fails, and
    "indeterminate" when budget exhaustion blocked a verdict."""

    overall: str
    checks: tuple

    def format_text(self) -> str:
        lines = []
        for c in self.checks:
            line = f"{c.name}: {c.status}"
            if c.detail:
                line += f" ({c.detail})"
            lines.append(line)
        lines.append(f"overall: {self.overall}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"overall": self.overall,
                "checks": [{"name": c.name, "status": c.status,
                            "detail": c.detail} for c in self.checks]}


def _records(cert: Certificate) -> tuple:
    return (cert.base,) + cert.stages


def _check_witnesses(cert, budget):
    for idx, rec in enumerate(_records(cert)):
        tag = "base" if idx == 0 else f"stage {idx}"
        for side, wit, pt in (("U", rec.witness_u, rec.u),
                              ("V", rec.witness_v, rec.v)):
            gap = witness_gap(cert.family, side, pt, wit.a, wit.b)
            if sc_sign(gap) != 0:
                return ("fail", f"{tag} side {side}: witness does not "
                                f"compose to an overlap at its point")
    return ("pass", "")


def _least_level_status(spec, side, point, claimed, budget):
    fast = (spec.variant == "example1"
            and _fast_base(spec.lam) is not None
            and not any(isinstance(c, AlgebraicNumber) for c in point))
    if fast:
        levels = [h1_level_exact(spec.lam, c) for c in point]
        levels = [lvl for lvl in levels if lvl is not None]
        least = min(levels) if levels else None
        if least != claimed:
            return ("fail",
                    f"least overlap level is {least}, claimed {claimed}")
        return ("pass", "")
    if claimed > 1:
        kwargs = {"u": point} if side == "U" else {"v": point}
        phi = instantiate(spec, side, **kwargs)
        out = has_exact_overlap_upto(phi, claimed - 1, budget=budget)
        if out.status == "witness":
            return ("fail", f"an overlap exists below the claimed "
                            f"level {claimed}")
        if out.status == "indeterminate":
            return ("indeterminate", "least-level search ran out of budget")
    return ("pass", "")


def _check_levels(cert, budget):
    recs = _records(cert)
    worst = ("pass", "")
    for i, s in enumerate(cert.stages):
        prev = recs[i]
        top = max(prev.n, prev.m)
        if s.n <= top or s.m <= top:
            return ("fail", f"stage {s.k}: levels {s.n}/{s.m} do not "
                            f"exceed the previous top level {top}")
        for side, pt, claimed in (("U", s.u, s.n), ("V", s.v, s.m)):
            status, detail = _least_level_status(cert.family, side, pt,
                                                 claimed, budget)
            if status == "fail":
                return ("fail", f"stage {s.k} side {side}: {detail}")
            if status == "indeterminate":
                worst = (status, f"stage {s.k} side {side}: {detail}")
    return worst


def _check_radii(cert, budget):
    recs = _records(cert)
    for i, s in enumerate(cert.stages):
        prev = recs[i]
        top = max(prev.n, prev.m)
        bound_u = cert.omega.min_over(prev.n, top)
        if not epsilon_covers(cert.family, "U", prev.u,
                              (prev.witness_u.a, prev.witness_u.b),
                              s.eps, bound_u):
            return ("fail", f"stage {s.k}: eps ball escapes the u-side "
                            f"omega bound on [{prev.n}, {top}]")
        bound_v = cert.omega.min_over(prev.m, s.n)
        if not epsilon_covers(cert.family, "V", prev.v,
                              (prev.witness_v.a, prev.witness_v.b),
                              s.eps_prime, bound_v):
            return ("fail", f"stage {s.k}: eps' ball escapes the v-side "
                            f"omega bound on [{prev.m}, {s.n}]")
        if i > 0:
            outer = cert.stages[i - 1].delta
            if s.eps > outer or s.eps_prime > outer:
                return ("fail", f"stage {s.k}: transition radius escapes "
                                f"the previous exclusion ball")
        if not ball_avoids_h3(cert.family, s.u, s.v, top, s.delta,
                              budget=budget):
            return ("fail", f"stage {s.k}: the delta ball cannot be "
                            f"certified clear of joint overlaps up to "
                            f"level {top}")
    return ("pass", "")


def _check_nesting(cert, budget):
    recs = _records(cert)
    for i, s in enumerate(cert.stages):
        prev = recs[i]
        for label, new, old, rad in (("u", s.u, prev.u, s.eps),
                                     ("v", s.v, prev.v, s.eps_prime)):
            d = _sup_dist(new, old)
            if sc_cmp(sc_add(d, s.delta), rad) >= 0:
                return ("fail", f"stage {s.k}: closed delta ball is not "
                                f"inside the {label}-side transition ball")
    return ("pass", "")


def _check_delta_bound(cert, budget):
    recs = _records(cert)
    last = recs[-1]
    lo_claim = cert.guarantees.delta_lo
    hi_claim = cert.guarantees.delta_hi
    pieces = []
    for i, rec in enumerate(recs):
        top = max(rec.n, rec.m)
        gap = witness_gap(cert.family, "U", last.u,
                          rec.witness_u.a, rec.witness_u.b)
        if sc_cmp(gap, cert.omega.min_over(rec.n, top)) > 0:
            return ("fail", f"record {i}: u-witness value at the final "
                            f"pair exceeds omega on [{rec.n}, {top}]")
        pieces.append((rec.n, top))
        hi_v = recs[i + 1].n if i + 1 < len(recs) else rec.m
        gap = witness_gap(cert.family, "V", last.v,
                          rec.witness_v.a, rec.witness_v.b)
        if sc_cmp(gap, cert.omega.min_over(rec.m, hi_v)) > 0:
            return ("fail", f"record {i}: v-witness value at the final "
                            f"pair exceeds omega on [{rec.m}, {hi_v}]")
        pieces.append((rec.m, hi_v))
    cur = lo_claim
    for lo, hi in sorted(pieces):
        if cur > hi_claim:
            break
        if lo <= cur:
            cur = max(cur, hi + 1)
    if cur <= hi_claim:
        return ("fail", f"witness coverage gap at level {cur}")
    # stronger mode within budget: recompute the exact minima at the
    # smallest claimed levels and compare against omega directly
    phi = instantiate(cert.family, "joint", u=last.u, v=last.v)
    checked = 0
    for n in range(lo_claim, hi_claim + 1):
        if checked >= 2:
            break
        res = delta_n(phi, n, budget=budget)
        if not res.certified:
            break
        checked += 1
        val = res.delta
        if not val.is_finite or sc_cmp(val.value, cert.omega.value(n)) > 0:
            return ("fail", f"delta at level {n} of the final pair "
                            f"exceeds omega")
    return ("pass", "")


def _check_absence(cert, budget):
    last = _records(cert)[-1]
    upto = cert.guarantees.no_overlap_upto
    if joint_gap(cert.family, last.u, last.v, upto) is not None:
        return ("pass", "")
    phi = instantiate(cert.family, "joint", u=last.u, v=last.v)
    out = has_exact_overlap_upto(phi, upto, budget=budget)
    if out.status == "witness":
        return ("fail", f"the final pair has a joint overlap at level "
                        f"<= {upto}")
    if out.status == "indeterminate":
        return ("indeterminate", "absence search ran out of budget")
    return ("pass", "")


_CHECKS = (
    ("witnesses", _check_witnesses),
    ("levels", _check_levels),
    ("radii", _check_radii),
    ("nesting", _check_nesting),
    ("delta-bound", _check_delta_bound),
    ("absence", _check_absence),
)


def verify(cert: Certificate, *, budget: int = DEFAULT_BUDGET
           ) -> VerificationReport:
    """Re-derive every claim of the certificate from its serialized
    content alone.

    Checks, in order: recorded witnesses compose to exact overlaps at
    their own points; stage levels exceed the previous top level and
    are least; transition radii keep the previous witnesses below the
    omega targets and the exclusion balls clear of joint overlap loci;
    closed balls nest strictly; the claimed delta range is covered by
    witness values at the final pair; and the final pair is overlap
    free up to the claimed level.  Budget exhaustion marks the affected
    check indeterminate rather than failing it."""
    checks = []
    for name, fn in _CHECKS:
        try:
            status, detail = fn(cert, budget)
        except SearchIndeterminate as exc:
            status, detail = "indeterminate", str(exc)
        except ValueError as exc:
            status, detail = "fail", str(exc)
        checks.append(CheckResult(name, status, detail))
    overall = "pass"
    if any(c.status == "fail" for c in checks):
        overall = "fail"
    elif any(c.status == "indeterminate" for c in checks):
        overall = "indeterminate"
    return VerificationReport(overall, tuple(checks))
