"""Minimum distance between equal-length cylinder maps, exactly.

delta_n computes the minimum of dist_strict(phi_a, phi_b) over distinct
same-length words a != b and returns an attaining witness pair,
lexicographically least in the instance's map order. The search is
branch-and-bound in one of three lanes:

* integer lane: all maps share one rational ratio and one orthogonal part
  and translate by rationals. Pair differences collapse to difference
  sequences; after clearing denominators the whole search runs on integer
  vectors with exact tail-bound pruning.
* single-generator lane (dimension 1): one common algebraic ratio g, every
  translation of the form q or q*g with q rational. Difference sums are
  rational polynomials in g, pruned through certified enclosures of the
  powers of g and confirmed by exact modular evaluation at g.
* generic lane: words are materialized and grouped by exact
  (ratio, orthogonal) class; pairs are scanned with float-interval
  prefiltering and exact confirmation. Ratio classes that cannot be
  certified distinct are merged; the per-pair exact check re-verifies
  class membership, so merging too much is sound.

delta_n_bruteforce is an independent oracle that shares none of the
search code: full enumeration, exact arithmetic only.

A node budget caps every search; exhausting it is a typed, non-certified
outcome (DeltaResult.certified False, or an "indeterminate" overlap
status), never a silent success.
"""

from __future__ import annotations

import itertools
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .exactnum import (
    AlgebraicNumber,
    RatInterval,
    dyadic_outward,
    eval_int_poly,
    fraction_enclosure,
    refine,
    scalar_to_json,
    sign_at,
)
from .exactnum.algebraic import _simplest_in
from .exactnum.intervals import FloatInterval
from .exactnum.polys import clear_denominators, poly_trim
from .similarity import (
    IFSInstance,
    SignedPermutation,
    StrictDistance,
    compose_word,
    dist_strict,
    sc_abs,
    sc_cmp,
    sc_enclosure,
    sc_eq,
    sc_sub,
)

__all__ = [
    "WitnessPair", "DeltaResult", "OverlapOutcome", "ExactnessError",
    "DEFAULT_BUDGET", "BRUTEFORCE_CAP", "delta_n", "delta_profile",
    "has_exact_overlap_upto", "delta_n_bruteforce", "pair_distance",
    "profile_to_csv", "profile_to_json",
]

DEFAULT_BUDGET = 10 ** 8
BRUTEFORCE_CAP = 10 ** 5


class ExactnessError(RuntimeError):
    """A comparison could not be certified at the configured precision."""


class _BudgetStop(Exception):
    pass


class _Budget:
    __slots__ = ("limit", "nodes", "exact")

    def __init__(self, limit: int):
        self.limit = int(limit)
        self.nodes = 0
        self.exact = 0

    def spend(self, k: int = 1):
        self.nodes += k
        if self.nodes > self.limit:
            raise _BudgetStop


# ---------------------------------------------------------------------------
# result types

@dataclass(frozen=True)
class WitnessPair:
    """Two distinct same-length words realizing a claimed distance."""

    a: tuple
    b: tuple
    level: int
    value: StrictDistance

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if self.a == self.b:
            raise ValueError("witness words must differ")
        if len(self.a) != self.level or len(self.b) != self.level:
            raise ValueError("witness words must have the stated level")


@dataclass(frozen=True)
class DeltaResult:
    level: int
    delta: StrictDistance
    witness: WitnessPair | None
    nodes_explored: int
    exact_confirmations: int
    certified: bool = True

    def __post_init__(self):
        if self.delta.is_infinite:
            if self.witness is not None:
                raise ValueError("infinite delta cannot carry a witness")
        else:
            if self.witness is None:
                raise ValueError("finite delta requires a witness")
            if self.witness.value.cmp(self.delta) != 0:
                raise ValueError("witness value disagrees with delta")


@dataclass(frozen=True)
class OverlapOutcome:
    """Tri-state overlap search result.

    status is "witness" (overlap found, least level, value Finite(0)),
    "absent" (certified: every zero-test resolved exactly), or
    "indeterminate" (node budget exhausted). certified_upto is the largest
    level known overlap-free.
    """

    status: str
    witness: WitnessPair | None
    nodes_explored: int
    certified_upto: int


def _check_level(n):
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"level must be a positive integer, got {n!r}")


def _plain(x):
    if isinstance(x, AlgebraicNumber) and x.is_rational:
        return x.value
    return x


def pair_distance(phi: IFSInstance, a, b) -> StrictDistance:
    """dist_strict of the two composed words; the witness re-check."""
    return dist_strict(compose_word(phi, a), compose_word(phi, b))


def _apply_int(sp: SignedPermutation, vec):
    out = [0] * len(vec)
    for i, v in enumerate(vec):
        out[sp.perm[i]] = v if sp.signs[i] == 1 else -v
    return tuple(out)


def _enc_pair(x, bits=80):
    if isinstance(x, Fraction):
        return x, x
    return fraction_enclosure(x, Fraction(1, 1 << bits))


# ---------------------------------------------------------------------------
# lane detection

def _common_rational_lane(phi: IFSInstance):
    """(lam, orth, translations) when one rational ratio and one orthogonal
    part are shared by every map and translations are rational; else None."""
    first = phi.maps[0][1]
    lam, orth = first.ratio, first.orthogonal
    if not isinstance(lam, Fraction):
        return None
    trans = []
    for _, m in phi.maps:
        if not isinstance(m.ratio, Fraction) or m.ratio != lam \
                or m.orthogonal != orth:
            return None
        if not all(isinstance(t, Fraction) for t in m.translation):
            return None
        trans.append(m.translation)
    return lam, orth, trans


def _rational_multiple_of(t, g: AlgebraicNumber):
    """q with t = q*g exactly, or None. Avoids resultant arithmetic: a
    candidate q is read off interval quotients, then certified by checking
    that g roots p_t(q*x) and that q*g lands in t's isolator."""
    for bits in (64, 128, 256):
        w = Fraction(1, 1 << bits)
        tr = refine(t, w)
        gr = refine(g, w)
        if gr.lo <= 0:
            return None
        qlo = min(tr.lo / gr.lo, tr.lo / gr.hi, tr.hi / gr.lo, tr.hi / gr.hi)
        qhi = max(tr.lo / gr.lo, tr.lo / gr.hi, tr.hi / gr.lo, tr.hi / gr.hi)
        q = _simplest_in(qlo, qhi)
        if q == 0:
            continue
        scaled = poly_trim(tuple(
            c * q.numerator ** k * q.denominator ** (len(t.poly) - 1 - k)
            for k, c in enumerate(t.poly)))
        if sign_at(scaled, g) != 0:
            continue
        # q*g roots p_t; confirm it is the root isolated by t itself
        while True:
            cand = RatInterval(gr.lo, gr.hi) * q
            lo, hi = min(cand.lo, cand.hi), max(cand.lo, cand.hi)
            if t.lo <= lo and hi <= t.hi:
                return q
            if hi < t.lo or lo > t.hi:
                break
            gr = refine(gr, (gr.hi - gr.lo) / 4)
    return None


def _single_generator_lane(phi: IFSInstance):
    """(g, sign, coeff pairs) for dimension-1 instances with one common
    algebraic ratio g whose translations are rho or sigma*g, rho and sigma
    rational; else None."""
    if phi.dim != 1:
        return None
    first = phi.maps[0][1]
    g = first.ratio
    if not isinstance(g, AlgebraicNumber):
        return None
    sign = first.orthogonal.signs[0]
    coeffs = []
    for _, m in phi.maps:
        if m.orthogonal != first.orthogonal:
            return None
        if not (isinstance(m.ratio, AlgebraicNumber) and sc_eq(m.ratio, g)):
            return None
        t = m.translation[0]
        if isinstance(t, Fraction):
            coeffs.append((t, Fraction(0)))
            continue
        q = _rational_multiple_of(t, g)
        if q is None:
            return None
        coeffs.append((Fraction(0), q))
    return g, sign, coeffs


# ---------------------------------------------------------------------------
# integer lane

class _IntLane:
    def __init__(self, phi, n, lam, orth, trans, bud: _Budget):
        self.phi, self.n, self.bud = phi, n, bud
        self.labels = phi.labels
        self.m, self.d = len(trans), phi.dim
        T = math.lcm(*(t.denominator for vec in trans for t in vec))
        ints = [tuple(int(t * T) for t in vec) for vec in trans]
        self.dup = any(ints[x] == ints[y]
                       for x in range(self.m) for y in range(x + 1, self.m))
        p, q = lam.numerator, lam.denominator
        self.scale = Fraction(q ** (n - 1) * T)
        pows = [SignedPermutation.identity(self.d)]
        for _ in range(n - 1):
            pows.append(orth @ pows[-1])
        w = [p ** i * q ** (n - 1 - i) for i in range(n)]
        self.R = [[tuple(w[i] * v for v in _apply_int(pows[i], ints[x]))
                   for x in range(self.m)] for i in range(n)]
        self.Dvals = []
        self.Dsets = []
        for i in range(n):
            seen = {tuple(a - b for a, b in zip(self.R[i][x], self.R[i][y]))
                    for x in range(self.m) for y in range(self.m)}
            self.Dvals.append(sorted(seen))
            self.Dsets.append(frozenset(seen))
        d = self.d
        maxc = [[max(abs(v[j]) for v in self.Dvals[i]) for j in range(d)]
                for i in range(n)]
        self.TAIL = [[0] * d for _ in range(n + 1)]
        for i in range(n - 1, -1, -1):
            self.TAIL[i] = [self.TAIL[i + 1][j] + maxc[i][j]
                            for j in range(d)]
        lo = [[min(self.R[i][x][j] for x in range(self.m)) for j in range(d)]
              for i in range(n)]
        hi = [[max(self.R[i][x][j] for x in range(self.m)) for j in range(d)]
              for i in range(n)]
        self.SLO = [[0] * d for _ in range(n + 1)]
        self.SHI = [[0] * d for _ in range(n + 1)]
        for i in range(n - 1, -1, -1):
            self.SLO[i] = [self.SLO[i + 1][j] + lo[i][j] for j in range(d)]
            self.SHI[i] = [self.SHI[i + 1][j] + hi[i][j] for j in range(d)]

    # -- phase 1: exact minimum over difference sequences
    def _phase1(self, prune):
        n, d = self.n, self.d
        best = None
        best_assign = None
        assign = [None] * n
        spend = self.bud.spend

        def rec(i, S, anynz):
            nonlocal best, best_assign
            spend()
            if i == n:
                if anynz:
                    val = max(abs(s) for s in S)
                    if best is None or val < best:
                        best, best_assign = val, tuple(assign)
                        self.bud.exact += 1
                return
            if prune and best is not None:
                t = self.TAIL[i]
                if max(abs(S[j]) - t[j] for j in range(d)) >= best:
                    return
            cands = self.Dvals[i]
            if best is not None and len(cands) > 2:
                cands = sorted(cands, key=lambda dv: max(
                    abs(S[j] + dv[j]) for j in range(d)))
            for dv in cands:
                assign[i] = dv
                rec(i + 1, tuple(S[j] + dv[j] for j in range(d)),
                    anynz or any(dv))

        try:
            rec(0, (0,) * d, False)
            return best, best_assign, True
        except _BudgetStop:
            return best, best_assign, False

    def _exists_zero(self):
        n, d = self.n, self.d
        spend = self.bud.spend

        def rec(i, S, anynz):
            spend()
            t = self.TAIL[i]
            if any(abs(S[j]) > t[j] for j in range(d)):
                return False
            if i == n:
                return anynz and all(s == 0 for s in S)
            if i == n - 1:
                # only -S can complete a zero sum; hash instead of looping
                need = tuple(-s for s in S)
                return need in self.Dsets[i] and (anynz or any(need))
            cands = sorted(self.Dvals[i], key=lambda dv: max(
                abs(S[j] + dv[j]) for j in range(d)))
            return any(rec(i + 1, tuple(S[j] + dv[j] for j in range(d)),
                           anynz or any(dv)) for dv in cands)

        return rec(0, (0,) * d, False)

    # -- phase 2: lexicographically least witness attaining the target
    def _phase2(self, mu):
        n, d, m = self.n, self.d, self.m
        R, SLO, SHI = self.R, self.SLO, self.SHI
        BLO, BHI = SLO[0], SHI[0]
        a_idx = [0] * n
        b_idx = [0] * n
        spend = self.bud.spend

        def feasible(lo, hi):
            mm = mx = 0
            for j in range(d):
                l, h = lo[j], hi[j]
                d0 = l if l > 0 else (-h if h < 0 else 0)
                if d0 > mm:
                    mm = d0
                a = -l if l < 0 else l
                bb = -h if h < 0 else h
                big = a if a > bb else bb
                if big > mx:
                    mx = big
            return mm <= mu <= mx

        def rec_b(k, Sb, saf, differs):
            spend()
            if k == n:
                if differs and max(abs(saf[j] - Sb[j])
                                   for j in range(d)) == mu:
                    return True
                return False
            nxt_lo, nxt_hi = SLO[k + 1], SHI[k + 1]
            for y in range(m):
                S2 = tuple(Sb[j] + R[k][y][j] for j in range(d))
                lo = tuple(saf[j] - S2[j] - nxt_hi[j] for j in range(d))
                hi = tuple(saf[j] - S2[j] - nxt_lo[j] for j in range(d))
                if not feasible(lo, hi):
                    continue
                b_idx[k] = y
                if rec_b(k + 1, S2, saf, differs or y != a_idx[k]):
                    return True
            return False

        def rec_a(i, Sa):
            spend()
            if i == n:
                return rec_b(0, (0,) * d, Sa, False)
            nxt_lo, nxt_hi = SLO[i + 1], SHI[i + 1]
            for x in range(m):
                S2 = tuple(Sa[j] + R[i][x][j] for j in range(d))
                lo = tuple(S2[j] + nxt_lo[j] - BHI[j] for j in range(d))
                hi = tuple(S2[j] + nxt_hi[j] - BLO[j] for j in range(d))
                if not feasible(lo, hi):
                    continue
                a_idx[i] = x
                if rec_a(i + 1, S2):
                    return True
            return False

        if not rec_a(0, (0,) * d):
            raise RuntimeError("witness search failed for an attained value")
        labels = self.labels
        return (tuple(labels[i] for i in a_idx),
                tuple(labels[i] for i in b_idx))

    def _realize(self, assign):
        """Some pair realizing a recorded difference assignment."""
        n, m = self.n, self.m
        if assign is None:  # duplicate-translation shortcut
            x, y = next((x, y) for x in range(m) for y in range(x + 1, m)
                        if self.R[0][x] == self.R[0][y])
            a = (self.labels[x],) + (self.labels[0],) * (n - 1)
            b = (self.labels[y],) + (self.labels[0],) * (n - 1)
            return a, b
        a, b = [], []
        for i, dv in enumerate(assign):
            x, y = next((x, y) for x in range(m) for y in range(m)
                        if tuple(p - q for p, q in
                                 zip(self.R[i][x], self.R[i][y])) == dv)
            a.append(self.labels[x])
            b.append(self.labels[y])
        return tuple(a), tuple(b)

    def minimize(self, prune) -> DeltaResult:
        if self.dup:
            mu, assign, complete = 0, None, True
        else:
            mu, assign, complete = self._phase1(prune)
        n, bud = self.n, self.bud
        if complete and mu is not None:
            try:
                a, b = self._phase2(mu)
                val = StrictDistance.finite(Fraction(mu) / self.scale)
                wp = WitnessPair(a, b, n, val)
                return DeltaResult(n, val, wp, bud.nodes, bud.exact, True)
            except _BudgetStop:
                pass
        if mu is None:
            return DeltaResult(n, StrictDistance.infinite(), None,
                               bud.nodes, bud.exact, False)
        a, b = self._realize(assign)
        val = StrictDistance.finite(Fraction(mu) / self.scale)
        wp = WitnessPair(a, b, n, val)
        return DeltaResult(n, val, wp, bud.nodes, bud.exact, False)

    _ZERO_ENUM_CAP = 500_000

    def _zero_pair_enum(self):
        """Lex-least equal-translation pair by hashing every word sum.

        Far cheaper than the two-sided slot search when m^n is moderate:
        the least pair of a value class is its first two words in lex
        order, so one pass suffices."""
        n, d, m = self.n, self.d, self.m
        R = self.R
        spend = self.bud.spend
        first = {}
        best = None
        word = [0] * n

        def rec(i, S):
            nonlocal best
            spend()
            if i == n:
                prev = first.get(S)
                if prev is None:
                    first[S] = tuple(word)
                elif prev is not False:
                    cand = (prev, tuple(word))
                    if best is None or cand < best:
                        best = cand
                    first[S] = False  # later words only worsen the pair
                return
            for x in range(m):
                word[i] = x
                rec(i + 1, tuple(S[j] + R[i][x][j] for j in range(d)))

        rec(0, (0,) * d)
        if best is None:
            raise RuntimeError("witness search failed for an attained value")
        labels = self.labels
        return (tuple(labels[i] for i in best[0]),
                tuple(labels[i] for i in best[1]))

    def find_zero(self):
        if self.dup or self._exists_zero():
            if self.m ** self.n <= self._ZERO_ENUM_CAP:
                return self._zero_pair_enum()
            return self._phase2(0)
        return None


# ---------------------------------------------------------------------------
# single-generator lane

class _PolyLane:
    def __init__(self, phi, n, g, sign, coeffs, bud: _Budget):
        self.phi, self.n, self.bud = phi, n, bud
        self.g, self.sign = g, sign
        self.labels = phi.labels
        self.m = len(coeffs)
        self.coeffs = coeffs
        base = refine(g, Fraction(1, 1 << 80))
        giv = RatInterval(base.lo, base.hi)
        self.G = [RatInterval.point(Fraction(1))]
        for _ in range(n + 1):
            self.G.append(dyadic_outward(self.G[-1] * giv, 160))
        # per-position per-label contribution intervals
        self.LV = [[self._contrib_iv(i, rho, sig)
                    for rho, sig in coeffs] for i in range(n)]
        # per-position candidate differences (drho, dsigma)
        self.D = []
        self.DIV = []
        for i in range(n):
            seen = sorted({(coeffs[x][0] - coeffs[y][0],
                            coeffs[x][1] - coeffs[y][1])
                           for x in range(self.m) for y in range(self.m)})
            self.D.append(seen)
            self.DIV.append([self._contrib_iv(i, dr, ds) for dr, ds in seen])
        self.tau = [Fraction(0)] * (n + 1)
        for i in range(n - 1, -1, -1):
            self.tau[i] = self.tau[i + 1] + max(
                iv.abs_upper() for iv in self.DIV[i])
        self.SH = [RatInterval.point(Fraction(0))] * (n + 1)
        for i in range(n - 1, -1, -1):
            hull = RatInterval(min(iv.lo for iv in self.LV[i]),
                               max(iv.hi for iv in self.LV[i]))
            self.SH[i] = self.SH[i + 1] + hull
        self.dup = any(coeffs[x] == coeffs[y]
                       for x in range(self.m) for y in range(x + 1, self.m))

    def _contrib_iv(self, i, rho, sig) -> RatInterval:
        s = self.sign ** i
        return self.G[i] * (s * rho) + self.G[i + 1] * (s * sig)

    def _poly_of(self, picks):
        """Little-endian Fraction coefficients of sum_i s^i picks_i(g)."""
        out = [Fraction(0)] * (self.n + 2)
        for i, (rho, sig) in enumerate(picks):
            s = self.sign ** i
            out[i] += s * rho
            out[i + 1] += s * sig
        return tuple(out)

    def _exact_abs(self, picks):
        ints, den = clear_denominators(self._poly_of(picks))
        self.bud.exact += 1
        if not ints:
            return Fraction(0)
        return _plain(sc_abs(_plain(eval_int_poly(ints, self.g, den))))

    def _is_zero(self, picks) -> bool:
        ints, _den = clear_denominators(self._poly_of(picks))
        self.bud.exact += 1
        return (not ints) or sign_at(ints, self.g) == 0

    def _phase1(self, prune):
        n = self.n
        best = best_lo = best_hi = None
        best_assign = None
        assign = [None] * n
        spend = self.bud.spend

        def rec(i, iv: RatInterval, anynz):
            nonlocal best, best_lo, best_hi, best_assign
            spend()
            if i == n:
                if not anynz:
                    return
                if best is not None and iv.abs_lower() >= best_hi:
                    return
                val = self._exact_abs(assign)
                if best is None or sc_cmp(val, best) < 0:
                    best, best_assign = val, tuple(assign)
                    best_lo, best_hi = _enc_pair(val)
                return
            if prune and best is not None \
                    and iv.abs_lower() - self.tau[i] >= best_hi:
                return
            order = sorted(range(len(self.D[i])),
                           key=lambda c: abs((iv + self.DIV[i][c]).midpoint()))
            for c in order:
                dr, ds = self.D[i][c]
                assign[i] = (dr, ds)
                rec(i + 1, iv + self.DIV[i][c],
                    anynz or dr != 0 or ds != 0)

        try:
            rec(0, RatInterval.point(Fraction(0)), False)
            return best, best_assign, True
        except _BudgetStop:
            return best, best_assign, False

    def _exists_zero(self):
        n = self.n
        spend = self.bud.spend
        assign = [None] * n

        def rec(i, iv: RatInterval, anynz):
            spend()
            if iv.abs_lower() > self.tau[i]:
                return False
            if i == n:
                return anynz and self._is_zero(assign)
            order = sorted(range(len(self.D[i])),
                           key=lambda c: abs((iv + self.DIV[i][c]).midpoint()))
            for c in order:
                dr, ds = self.D[i][c]
                assign[i] = (dr, ds)
                if rec(i + 1, iv + self.DIV[i][c],
                       anynz or dr != 0 or ds != 0):
                    return True
            return False

        return rec(0, RatInterval.point(Fraction(0)), False)

    def _phase2(self, mu_abs):
        n, m = self.n, self.m
        mu_lo, mu_hi = _enc_pair(mu_abs)
        a_idx = [0] * n
        b_idx = [0] * n
        spend = self.bud.spend
        SH, LV = self.SH, self.LV

        def feasible(box: RatInterval) -> bool:
            return box.abs_lower() <= mu_hi and box.abs_upper() >= mu_lo

        def leaf() -> bool:
            if all(a_idx[t] == b_idx[t] for t in range(n)):
                return False
            picks = [(self.coeffs[a_idx[i]][0] - self.coeffs[b_idx[i]][0],
                      self.coeffs[a_idx[i]][1] - self.coeffs[b_idx[i]][1])
                     for i in range(n)]
            return sc_cmp(self._exact_abs(picks), mu_abs) == 0

        def rec_b(k, ivb, iva):
            spend()
            if k == n:
                return leaf()
            for y in range(m):
                iv2 = ivb + LV[k][y]
                if not feasible(iva - iv2 - SH[k + 1]):
                    continue
                b_idx[k] = y
                if rec_b(k + 1, iv2, iva):
                    return True
            return False

        def rec_a(i, iva):
            spend()
            if i == n:
                return rec_b(0, RatInterval.point(Fraction(0)), iva)
            for x in range(m):
                iv2 = iva + LV[i][x]
                if not feasible(iv2 + SH[i + 1] - SH[0]):
                    continue
                a_idx[i] = x
                if rec_a(i + 1, iv2):
                    return True
            return False

        if not rec_a(0, RatInterval.point(Fraction(0))):
            raise RuntimeError("witness search failed for an attained value")
        labels = self.labels
        return (tuple(labels[i] for i in a_idx),
                tuple(labels[i] for i in b_idx))

    def _realize(self, assign):
        n, m = self.n, self.m
        if assign is None:
            x, y = next((x, y) for x in range(m) for y in range(x + 1, m)
                        if self.coeffs[x] == self.coeffs[y])
            a = (self.labels[x],) + (self.labels[0],) * (n - 1)
            b = (self.labels[y],) + (self.labels[0],) * (n - 1)
            return a, b
        a, b = [], []
        for i, dv in enumerate(assign):
            x, y = next(
                (x, y) for x in range(m) for y in range(m)
                if (self.coeffs[x][0] - self.coeffs[y][0],
                    self.coeffs[x][1] - self.coeffs[y][1]) == dv)
            a.append(self.labels[x])
            b.append(self.labels[y])
        return tuple(a), tuple(b)

    def minimize(self, prune) -> DeltaResult:
        if self.dup:
            mu, assign, complete = Fraction(0), None, True
        else:
            mu, assign, complete = self._phase1(prune)
        n, bud = self.n, self.bud
        if complete and mu is not None:
            try:
                a, b = self._phase2(mu)
                val = StrictDistance.finite(mu)
                wp = WitnessPair(a, b, n, val)
                return DeltaResult(n, val, wp, bud.nodes, bud.exact, True)
            except _BudgetStop:
                pass
        if mu is None:
            return DeltaResult(n, StrictDistance.infinite(), None,
                               bud.nodes, bud.exact, False)
        a, b = self._realize(assign)
        val = StrictDistance.finite(mu)
        wp = WitnessPair(a, b, n, val)
        return DeltaResult(n, val, wp, bud.nodes, bud.exact, False)

    def find_zero(self):
        if self.dup or self._exists_zero():
            return self._phase2(Fraction(0))
        return None


# ---------------------------------------------------------------------------
# generic lane

def _all_rational(phi) -> bool:
    return all(isinstance(m.ratio, Fraction)
               and all(isinstance(t, Fraction) for t in m.translation)
               for _, m in phi.maps)


def _fiv(x) -> FloatInterval:
    if isinstance(x, Fraction):
        return FloatInterval.from_fraction(x)
    r = refine(x, Fraction(1, 1 << 70))
    return FloatInterval(FloatInterval.from_fraction(r.lo).lo,
                         FloatInterval.from_fraction(r.hi).hi)


def _apply_fiv(sp: SignedPermutation, vec):
    out = [None] * len(vec)
    for i, v in enumerate(vec):
        out[sp.perm[i]] = v if sp.signs[i] == 1 else -v
    return tuple(out)


def _enumerate_rational(phi, n, bud: _Budget):
    """dict (ratio, orth) -> list of (word, exact translation), lex order."""
    d = phi.dim
    items = [(lab, m.ratio, m.orthogonal, m.translation)
             for lab, m in phi.maps]
    classes = {}

    def rec(depth, word, r, o, t):
        bud.spend()
        if depth == n:
            classes.setdefault((r, o), []).append((word, t))
            return
        for lab, rl, ol, tl in items:
            rot = o.apply(tl)
            tv = tuple(t[j] + r * rot[j] for j in range(d))
            rec(depth + 1, word + (lab,), r * rl, o @ ol, tv)

    rec(0, (), Fraction(1), SignedPermutation.identity(d),
        (Fraction(0),) * d)
    return list(classes.values())


def _ratio_reps(phi):
    """Exact distinct ratio values and a per-label id into them."""
    reps, ids = [], []
    for _, m in phi.maps:
        for k, r in enumerate(reps):
            if sc_eq(r, m.ratio):
                ids.append(k)
                break
        else:
            ids.append(len(reps))
            reps.append(m.ratio)
    return reps, ids


def _sig_product_iv(reps, sig, bits) -> RatInterval:
    acc = RatInterval.point(Fraction(1))
    for rep, c in zip(reps, sig):
        if not c:
            continue
        e = sc_enclosure(rep, Fraction(1, 1 << bits))
        for _ in range(c):
            acc = dyadic_outward(acc * e, 2 * bits)
    return acc


def _certainly_distinct(reps, siga, sigb) -> bool:
    for bits in (120, 480, 1920):
        if not _sig_product_iv(reps, siga, bits).intersects(
                _sig_product_iv(reps, sigb, bits)):
            return True
    return False


def _enumerate_algebraic(phi, n, bud: _Budget):
    """Class groups for instances with algebraic scalars: words carry
    float-interval translations; classes keyed by orthogonal part and
    ratio-multiset signature, then merged unless certainly distinct."""
    d = phi.dim
    reps, ids = _ratio_reps(phi)
    k = len(reps)
    items = [(lab, ids[j], m.orthogonal, tuple(_fiv(t) for t in m.translation))
             for j, (lab, m) in enumerate(phi.maps)]
    rfiv = [_fiv(r) for r in reps]
    pre = {}

    def rec(depth, word, sig, o, r, t):
        bud.spend()
        if depth == n:
            pre.setdefault((o, sig), []).append((word, t))
            return
        for lab, rid, ol, tl in items:
            rot = _apply_fiv(o, tl)
            tv = tuple(t[j] + r * rot[j] for j in range(d))
            sig2 = sig[:rid] + (sig[rid] + 1,) + sig[rid + 1:]
            rec(depth + 1, word + (lab,), sig2, o @ ol, r * rfiv[rid], tv)

    one = FloatInterval.point(1.0)
    rec(0, (), (0,) * k, SignedPermutation.identity(d), one,
        (FloatInterval.point(0.0),) * d)

    # merge signature groups that might share the exact ratio product
    by_orth = {}
    for (o, sig), entries in pre.items():
        by_orth.setdefault(o, []).append((sig, entries))
    groups = []
    for o, lst in by_orth.items():
        merged = []  # list of ([sigs], entries)
        for sig, entries in lst:
            for grp in merged:
                if not _certainly_distinct(reps, grp[0][0], sig):
                    grp[0].append(sig)
                    grp[1].extend(entries)
                    break
            else:
                merged.append(([sig], list(entries)))
        groups.extend(entries for _sigs, entries in merged)
    return groups


def _word_keyer(phi):
    ix = {lab: i for i, (lab, _) in enumerate(phi.maps)}
    return lambda w: tuple(ix[x] for x in w)


def _scan_rational(entries, key, bud: _Budget, prune):
    """(best value, best pair) within one exact-translation class."""
    best = None
    pair = None
    for i in range(len(entries)):
        wa, ta = entries[i]
        for j in range(i + 1, len(entries)):
            bud.spend()
            wb, tb = entries[j]
            gap = max(abs(x - y) for x, y in zip(ta, tb))
            bud.exact += 1
            if best is None or gap < best:
                best, pair = gap, (wa, wb)
            elif gap == best and (key(wa), key(wb)) < (key(pair[0]),
                                                       key(pair[1])):
                pair = (wa, wb)
    return best, pair


def _scan_algebraic(phi, entries, key, bud: _Budget, prune):
    best = None
    best_hif = None
    pair = None
    cache = {}

    def exact_map(w):
        if w not in cache:
            cache[w] = compose_word(phi, w)
        return cache[w]

    for i in range(len(entries)):
        wa, ta = entries[i]
        for j in range(i + 1, len(entries)):
            bud.spend()
            wb, tb = entries[j]
            if prune and best_hif is not None:
                lo = 0.0
                for x, y in zip(ta, tb):
                    l = (x - y).abs_lower()
                    if l > lo:
                        lo = l
                if lo > best_hif:
                    continue
            d = dist_strict(exact_map(wa), exact_map(wb))
            bud.exact += 1
            if d.is_infinite:
                continue  # over-merged ratio class; not actually equal
            gap = d.value
            c = -1 if best is None else sc_cmp(gap, best)
            if c < 0:
                best, pair = gap, (wa, wb)
                best_hif = FloatInterval.from_fraction(
                    _enc_pair(best, 70)[1]).hi
            elif c == 0 and (key(wa), key(wb)) < (key(pair[0]),
                                                  key(pair[1])):
                pair = (wa, wb)
    return best, pair


def _generic_delta(phi, n, bud: _Budget, prune, threads) -> DeltaResult:
    rational = _all_rational(phi)
    key = _word_keyer(phi)
    try:
        if rational:
            groups = _enumerate_rational(phi, n, bud)
        else:
            groups = _enumerate_algebraic(phi, n, bud)
    except _BudgetStop:
        return DeltaResult(n, StrictDistance.infinite(), None,
                           bud.nodes, bud.exact, False)
    groups = [g for g in groups if len(g) >= 2]
    for g in groups:
        g.sort(key=lambda e: key(e[0]))
    scan = _scan_rational if rational else _scan_algebraic

    def scan_group(g):
        if rational:
            return scan(g, key, bud, prune)
        return scan(phi, g, key, bud, prune)

    try:
        if threads > 1 and len(groups) > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(scan_group, groups))
        else:
            results = [scan_group(g) for g in groups]
    except _BudgetStop:
        return DeltaResult(n, StrictDistance.infinite(), None,
                           bud.nodes, bud.exact, False)

    best = None
    pair = None
    for val, pr in results:
        if val is None:
            continue
        c = -1 if best is None else sc_cmp(val, best)
        if c < 0:
            best, pair = val, pr
        elif c == 0 and (key(pr[0]), key(pr[1])) < (key(pair[0]),
                                                    key(pair[1])):
            pair = pr
    if best is None:
        return DeltaResult(n, StrictDistance.infinite(), None,
                           bud.nodes, bud.exact, True)
    val = StrictDistance.finite(best)
    wp = WitnessPair(pair[0], pair[1], n, val)
    return DeltaResult(n, val, wp, bud.nodes, bud.exact, True)


def _generic_zero(phi, n, bud: _Budget):
    rational = _all_rational(phi)
    key = _word_keyer(phi)
    groups = (_enumerate_rational if rational else _enumerate_algebraic)(
        phi, n, bud)
    zeros = []
    for entries in groups:
        if len(entries) < 2:
            continue
        entries.sort(key=lambda e: key(e[0]))
        found = None
        for i in range(len(entries)):
            wa, ta = entries[i]
            for j in range(i + 1, len(entries)):
                bud.spend()
                wb, tb = entries[j]
                if rational:
                    if all(x == y for x, y in zip(ta, tb)):
                        found = (wa, wb)
                elif all((x - y).contains_zero() for x, y in zip(ta, tb)):
                    d = dist_strict(compose_word(phi, wa),
                                    compose_word(phi, wb))
                    bud.exact += 1
                    if d.is_finite and sc_cmp(d.value, Fraction(0)) == 0:
                        found = (wa, wb)
                if found:
                    break
            if found:
                break
        if found:
            zeros.append(found)
    if not zeros:
        return None
    return min(zeros, key=lambda pr: (key(pr[0]), key(pr[1])))


# ---------------------------------------------------------------------------
# public operations

def _make_lane(phi, n, bud):
    lane = _common_rational_lane(phi)
    if lane is not None:
        return _IntLane(phi, n, *lane, bud)
    laneb = _single_generator_lane(phi)
    if laneb is not None:
        return _PolyLane(phi, n, *laneb, bud)
    return None


def delta_n(phi: IFSInstance, n: int, *, budget: int = DEFAULT_BUDGET,
            prune: bool = True, threads: int = 1) -> DeltaResult:
    """Exact minimum strict distance over distinct length-n word pairs."""
    _check_level(n)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * n + 200))
    bud = _Budget(budget)
    lane = _make_lane(phi, n, bud)
    if lane is not None:
        return lane.minimize(prune)
    return _generic_delta(phi, n, bud, prune, threads)


def delta_profile(phi: IFSInstance, n_max: int, *,
                  budget: int = DEFAULT_BUDGET, prune: bool = True,
                  threads: int = 1):
    """DeltaResults for n = 1..n_max; asserts monotone nonincrease.

    A budget-exhausted level is included flagged non-certified and
    truncates the profile.
    """
    _check_level(n_max)
    out = []
    prev = None
    for n in range(1, n_max + 1):
        r = delta_n(phi, n, budget=budget, prune=prune, threads=threads)
        if r.certified and prev is not None and r.delta.cmp(prev) > 0:
            raise AssertionError(
                f"monotonicity violated at level {n}: "
                f"{r.delta!r} > {prev!r}")
        out.append(r)
        if not r.certified:
            break
        prev = r.delta
    return out


def has_exact_overlap_upto(phi: IFSInstance, L: int, *,
                           budget: int = DEFAULT_BUDGET) -> OverlapOutcome:
    """Least-level exact overlap at level <= L, certified absence, or an
    indeterminate outcome on budget exhaustion."""
    _check_level(L)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * L + 200))
    bud = _Budget(budget)
    for n in range(1, L + 1):
        try:
            lane = _make_lane(phi, n, bud)
            if lane is not None:
                pair = lane.find_zero()
            else:
                pair = _generic_zero(phi, n, bud)
        except _BudgetStop:
            return OverlapOutcome("indeterminate", None, bud.nodes, n - 1)
        if pair is not None:
            wp = WitnessPair(pair[0], pair[1], n,
                             StrictDistance.finite(Fraction(0)))
            return OverlapOutcome("witness", wp, bud.nodes, n - 1)
    return OverlapOutcome("absent", None, bud.nodes, L)


def delta_n_bruteforce(phi: IFSInstance, n: int,
                       cap: int = BRUTEFORCE_CAP) -> DeltaResult:
    """Independent oracle: full enumeration, exact arithmetic only."""
    _check_level(n)
    m = len(phi)
    if m ** n > cap:
        raise ValueError(f"{m}^{n} words exceed the cap of {cap}")
    key = _word_keyer(phi)
    words = list(itertools.product(phi.labels, repeat=n))
    nodes = len(words)
    exact = 0

    # group by exact (orthogonal, ratio) class
    groups = []
    for w in words:
        f = compose_word(phi, w)
        for grec in groups:
            if grec[0] == f.orthogonal and sc_eq(grec[1], f.ratio):
                grec[2].append((w, f.translation))
                break
        else:
            groups.append((f.orthogonal, f.ratio, [(w, f.translation)]))

    best = None
    candidates = []

    def consider(val, wa, wb):
        nonlocal best, candidates
        c = -1 if best is None else sc_cmp(val, best)
        if c < 0:
            best = val
            candidates = [(wa, wb)]
        elif c == 0:
            candidates.append((wa, wb))

    for _orth, _ratio, entries in groups:
        if len(entries) < 2:
            continue
        rational = phi.dim >= 1 and all(
            isinstance(t, Fraction) for _w, tv in entries for t in tv)
        if phi.dim == 1 and rational:
            entries.sort(key=lambda e: (e[1][0], key(e[0])))
            for (wa, ta), (wb, tb) in zip(entries, entries[1:]):
                nodes += 1
                exact += 1
                consider(abs(tb[0] - ta[0]), wa, wb)
            # equal-translation runs: every adjacent pair already covered
        else:
            for i in range(len(entries)):
                wa, ta = entries[i]
                for j in range(i + 1, len(entries)):
                    nodes += 1
                    exact += 1
                    wb, tb = entries[j]
                    gap = None
                    for x, y in zip(ta, tb):
                        g = _plain(sc_abs(sc_sub(x, y)))
                        if gap is None or sc_cmp(g, gap) > 0:
                            gap = g
                    consider(gap, wa, wb)

    if best is None:
        return DeltaResult(n, StrictDistance.infinite(), None, nodes,
                           exact, True)
    pair = min((tuple(sorted((wa, wb), key=key)) for wa, wb in candidates),
               key=lambda pr: (key(pr[0]), key(pr[1])))
    val = StrictDistance.finite(best)
    wp = WitnessPair(pair[0], pair[1], n, val)
    return DeltaResult(n, val, wp, nodes, exact, True)


# ---------------------------------------------------------------------------
# profile export

def profile_to_csv(results) -> str:
    """CSV with columns n, delta_num, delta_den_or_inf, witness_a, witness_b.

    Algebraic (irrational) minima have no num/den pair; their den column
    reads "algebraic" and the JSON export carries the exact value.
    """
    lines = ["n,delta_num,delta_den_or_inf,witness_a,witness_b"]
    for r in results:
        if r.delta.is_infinite:
            num, den = "", "inf"
        elif isinstance(r.delta.value, Fraction):
            num = str(r.delta.value.numerator)
            den = str(r.delta.value.denominator)
        else:
            num, den = "", "algebraic"
        wa = wb = ""
        if r.witness is not None:
            wa = ".".join(str(x) for x in r.witness.a)
            wb = ".".join(str(x) for x in r.witness.b)
        lines.append(f"{r.level},{num},{den},{wa},{wb}")
    return "\n".join(lines) + "\n"


def profile_to_json(results) -> list:
    out = []
    for r in results:
        wit = None
        if r.witness is not None:
            wit = {"a": [str(x) for x in r.witness.a],
                   "b": [str(x) for x in r.witness.b]}
        out.append({
            "n": r.level,
            "delta": None if r.delta.is_infinite
            else scalar_to_json(r.delta.value),
            "witness": wit,
            "nodes_explored": r.nodes_explored,
            "exact_confirmations": r.exact_confirmations,
            "certified": r.certified,
        })
    return out
