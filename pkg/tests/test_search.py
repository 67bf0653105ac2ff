"""Minimum cylinder distances and exact-overlap search.

Expected values are hand-derived:

* {x/2, (x+1)/2}: word translations are the n-bit dyadics k/2^n, all
  distinct, so the minimum gap is exactly 2^-n.
* {x/3, (x+1)/3}: translations are base-3 numbers with digits {0,1};
  adjacent values differ in the last digit only, giving 3^-n.
* golden g with g^2 = 1 - g, maps {g(x+1), g(x+2)}: translation of a
  word w is sum w_i g^i, so pair differences are sum k_i g^i with
  k in {-1,0,1}^n.  Level 1: k1*g != 0.  Level 2: |k1*g + k2*g^2|
  has minimum |g - g^2| = 2g - 1 over nonzero k.  Level 3:
  -g + g^2 + g^3 = -g + (1-g) + (2g-1) = 0, the first exact overlap.
* {x/2, x/3} commute, so the two order-swapped 2-letter words coincide
  exactly; adding +1 to the second map separates them by 1/2.
"""

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from cylsep.exactnum import eval_int_poly, make_algebraic
from cylsep.separation import (
    DeltaResult,
    OverlapOutcome,
    WitnessPair,
    delta_n,
    delta_n_bruteforce,
    delta_profile,
    has_exact_overlap_upto,
    profile_to_csv,
    profile_to_json,
)
from cylsep.similarity import (
    IFSInstance,
    SignedPermutation,
    SimilarityMap,
    StrictDistance,
    compose_word,
    dist_strict,
    sc_cmp,
    sc_eq,
    sc_mul,
    sc_sub,
)


def line_map(r, t):
    return SimilarityMap(F(r), SignedPermutation.identity(1), (F(t),))


def line_ifs(*pairs):
    return IFSInstance([(str(i), line_map(r, t))
                        for i, (r, t) in enumerate(pairs)])


def dyadic():
    return line_ifs((F(1, 2), 0), (F(1, 2), F(1, 2)))


def triadic():
    return line_ifs((F(1, 3), 0), (F(1, 3), F(1, 3)))


def golden_scalar():
    return make_algebraic((-1, 1, 1), F(0), F(1))


def golden_ifs():
    g = golden_scalar()
    m1 = SimilarityMap(g, SignedPermutation.identity(1), (g,))
    m2 = SimilarityMap(g, SignedPermutation.identity(1),
                       (sc_mul(F(2), g),))
    return IFSInstance([("1", m1), ("2", m2)])


def recheck(phi, res: DeltaResult):
    """The witness re-check invariant: value recomputes exactly."""
    w = res.witness
    assert w is not None
    d = dist_strict(compose_word(phi, w.a), compose_word(phi, w.b))
    assert d.cmp(w.value) == 0
    assert res.delta.cmp(w.value) == 0
    assert w.a != w.b
    assert len(w.a) == len(w.b) == w.level == res.level


class TestWitnessPair:
    def test_rejects_equal_words(self):
        with pytest.raises(ValueError):
            WitnessPair(("0",), ("0",), 1, StrictDistance.finite(0))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            WitnessPair(("0", "0"), ("0",), 2, StrictDistance.finite(0))

    def test_result_requires_witness_unless_infinite(self):
        with pytest.raises(ValueError):
            DeltaResult(1, StrictDistance.finite(F(1)), None, 3, 1)
        with pytest.raises(ValueError):
            wp = WitnessPair(("0",), ("1",), 1, StrictDistance.infinite())
            DeltaResult(1, StrictDistance.infinite(), wp, 3, 1)


class TestDyadicTriadic:
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 7])
    def test_dyadic_delta(self, n):
        res = delta_n(dyadic(), n)
        assert res.certified
        assert res.delta.cmp(StrictDistance.finite(F(1, 2 ** n))) == 0
        recheck(dyadic(), res)

    def test_dyadic_witness_lex_least(self):
        res = delta_n(dyadic(), 5)
        assert res.witness.a == ("0",) * 5
        assert res.witness.b == ("0", "0", "0", "0", "1")

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_triadic_delta(self, n):
        res = delta_n(triadic(), n)
        assert res.delta.cmp(StrictDistance.finite(F(1, 3 ** n))) == 0
        recheck(triadic(), res)

    def test_dyadic_profile(self):
        prof = delta_profile(dyadic(), 3)
        vals = [r.delta.value for r in prof]
        assert vals == [F(1, 2), F(1, 4), F(1, 8)]
        assert [r.level for r in prof] == [1, 2, 3]

    def test_dyadic_no_overlap_to_8(self):
        out = has_exact_overlap_upto(dyadic(), 8)
        assert out.status == "absent"
        assert out.witness is None
        assert out.certified_upto == 8

    def test_bruteforce_agrees_small(self):
        for n in range(1, 7):
            a = delta_n(dyadic(), n)
            b = delta_n_bruteforce(dyadic(), n)
            assert a.delta.cmp(b.delta) == 0


class TestGolden:
    def test_level1(self):
        g = golden_scalar()
        res = delta_n(golden_ifs(), 1)
        assert res.delta.is_finite
        assert sc_cmp(res.delta.value, g) == 0
        recheck(golden_ifs(), res)

    def test_level2(self):
        res = delta_n(golden_ifs(), 2)
        expect = eval_int_poly((-1, 2), golden_scalar())  # 2g - 1
        assert sc_cmp(res.delta.value, expect) == 0

    def test_level3_overlap(self):
        res = delta_n(golden_ifs(), 3)
        assert res.delta.cmp(StrictDistance.finite(0)) == 0
        assert res.witness.a == ("1", "2", "2")
        assert res.witness.b == ("2", "1", "1")
        recheck(golden_ifs(), res)

    def test_level4_still_zero(self):
        res = delta_n(golden_ifs(), 4)
        assert res.delta.cmp(StrictDistance.finite(0)) == 0

    def test_profile(self):
        prof = delta_profile(golden_ifs(), 3)
        assert sc_cmp(prof[0].delta.value, golden_scalar()) == 0
        assert prof[1].delta.is_finite
        assert prof[2].delta.cmp(StrictDistance.finite(0)) == 0

    def test_overlap_levels(self):
        phi = golden_ifs()
        assert has_exact_overlap_upto(phi, 2).status == "absent"
        out = has_exact_overlap_upto(phi, 3)
        assert out.status == "witness"
        assert out.witness.level == 3
        assert out.witness.value.cmp(StrictDistance.finite(0)) == 0
        assert out.certified_upto == 2

    def test_bruteforce_agrees(self):
        a = delta_n(golden_ifs(), 3)
        b = delta_n_bruteforce(golden_ifs(), 3)
        assert a.delta.cmp(b.delta) == 0 == b.delta.cmp(
            StrictDistance.finite(0))


class TestMixedClasses:
    def test_distinct_ratios_level1_infinite(self):
        phi = line_ifs((F(1, 2), 0), (F(1, 3), 1))
        res = delta_n(phi, 1)
        assert res.delta.is_infinite
        assert res.witness is None

    def test_commuting_maps_overlap_level2(self):
        phi = line_ifs((F(1, 2), 0), (F(1, 3), 0))
        res = delta_n(phi, 2)
        assert res.delta.cmp(StrictDistance.finite(0)) == 0
        assert res.witness.a == ("0", "1")
        assert res.witness.b == ("1", "0")

    def test_noncommuting_same_ratio_class(self):
        phi = line_ifs((F(1, 2), 0), (F(1, 3), 1))
        res = delta_n(phi, 2)
        assert res.delta.cmp(StrictDistance.finite(F(1, 2))) == 0
        assert res.witness.a == ("0", "1")
        assert res.witness.b == ("1", "0")
        recheck(phi, res)

    def test_identical_maps_level1(self):
        phi = IFSInstance([("p", line_map(F(1, 2), 0)),
                           ("q", line_map(F(1, 2), 0))])
        out = has_exact_overlap_upto(phi, 1)
        assert out.status == "witness"
        assert out.witness.level == 1
        assert out.witness.a == ("p",)
        assert out.witness.b == ("q",)
        res = delta_n(phi, 1)
        assert res.delta.cmp(StrictDistance.finite(0)) == 0

    def test_mixed_algebraic_rational_ratio(self):
        g = golden_scalar()
        phi = IFSInstance([
            ("0", SimilarityMap(g, SignedPermutation.identity(1), (F(0),))),
            ("1", line_map(F(1, 2), 1)),
        ])
        res = delta_n(phi, 2)
        # words 01 and 10 share ratio g/2; gap |g - 1| = 1 - g
        expect = sc_sub(F(1), g)
        assert sc_cmp(res.delta.value, expect) == 0
        b = delta_n_bruteforce(phi, 2)
        assert b.delta.cmp(res.delta) == 0


class TestTwoDimensional:
    def rotated_ifs(self):
        o = SignedPermutation((1, 0), (1, -1))  # quarter turn
        m0 = SimilarityMap(F(1, 2), o, (F(0), F(0)))
        m1 = SimilarityMap(F(1, 2), o, (F(1), F(0)))
        return IFSInstance([("0", m0), ("1", m1)])

    def test_delta2(self):
        phi = self.rotated_ifs()
        res = delta_n(phi, 2)
        assert res.delta.cmp(StrictDistance.finite(F(1, 2))) == 0
        assert res.witness.a == ("0", "0")
        assert res.witness.b == ("0", "1")
        recheck(phi, res)

    def test_bruteforce_agrees(self):
        phi = self.rotated_ifs()
        for n in (1, 2, 3):
            assert delta_n(phi, n).delta.cmp(
                delta_n_bruteforce(phi, n).delta) == 0


RATIO = st.sampled_from([F(1, 2), F(1, 3), F(2, 5)])
TRANS = st.fractions(min_value=F(-2), max_value=F(2), max_denominator=12)


@st.composite
def random_ifs(draw, min_maps=2, max_maps=3):
    k = draw(st.integers(min_maps, max_maps))
    pairs = [(draw(RATIO), draw(TRANS)) for _ in range(k)]
    return line_ifs(*pairs)


class TestProperties:
    @settings(deadline=None, max_examples=30)
    @given(random_ifs(), st.integers(1, 3))
    def test_oracle_equivalence(self, phi, n):
        a = delta_n(phi, n)
        b = delta_n_bruteforce(phi, n)
        assert a.delta.cmp(b.delta) == 0
        if a.delta.is_finite:
            recheck(phi, a)
            recheck(phi, b)

    @settings(deadline=None, max_examples=20)
    @given(random_ifs())
    def test_monotone_profile(self, phi):
        prof = delta_profile(phi, 3)
        for lo, hi in zip(prof[1:], prof):
            assert lo.delta.cmp(hi.delta) <= 0

    @settings(deadline=None, max_examples=20)
    @given(random_ifs(), random_ifs(), st.integers(1, 3))
    def test_sub_ifs_bound(self, p1, p2, n):
        joint = IFSInstance(
            [("a" + lab, m) for lab, m in p1.maps]
            + [("b" + lab, m) for lab, m in p2.maps])
        d3 = delta_n(joint, n).delta
        assert d3.cmp(delta_n(p1, n).delta) <= 0
        assert d3.cmp(delta_n(p2, n).delta) <= 0

    @settings(deadline=None, max_examples=15)
    @given(random_ifs(), st.integers(1, 3))
    def test_pruning_soundness(self, phi, n):
        pruned = delta_n(phi, n)
        unpruned = delta_n(phi, n, prune=False)
        assert pruned.delta.cmp(unpruned.delta) == 0
        if pruned.witness is not None:
            assert pruned.witness == unpruned.witness

    def test_threads_deterministic(self):
        phi = line_ifs((F(1, 2), 0), (F(1, 3), 1), (F(1, 2), F(1, 5)))
        a = delta_n(phi, 3, threads=1)
        b = delta_n(phi, 3, threads=2)
        assert a.delta.cmp(b.delta) == 0
        assert a.witness == b.witness


class TestBudget:
    def test_delta_budget_flagged(self):
        res = delta_n(dyadic(), 8, budget=2)
        assert not res.certified
        true = delta_n_bruteforce(dyadic(), 8).delta
        # best-so-far is an upper bound for the true minimum
        assert res.delta.cmp(true) >= 0

    def test_profile_truncates(self):
        prof = delta_profile(dyadic(), 6, budget=2)
        assert len(prof) <= 6
        assert not prof[-1].certified

    def test_overlap_indeterminate(self):
        out = has_exact_overlap_upto(dyadic(), 8, budget=2)
        assert out.status == "indeterminate"
        assert out.witness is None
        assert out.certified_upto < 8

    def test_bruteforce_cap(self):
        with pytest.raises(ValueError):
            delta_n_bruteforce(dyadic(), 5, cap=10)

    def test_bad_level(self):
        with pytest.raises(ValueError):
            delta_n(dyadic(), 0)
        with pytest.raises(ValueError):
            has_exact_overlap_upto(dyadic(), 0)


class TestExports:
    def test_csv(self):
        prof = delta_profile(dyadic(), 2)
        lines = profile_to_csv(prof).splitlines()
        assert lines[0] == "n,delta_num,delta_den_or_inf,witness_a,witness_b"
        assert lines[1] == "1,1,2,0,1"
        assert lines[2] == "2,1,4,0.0,0.1"

    def test_csv_infinite(self):
        phi = line_ifs((F(1, 2), 0), (F(1, 3), 1))
        row = profile_to_csv(delta_profile(phi, 1)).splitlines()[1]
        assert row == "1,,inf,,"

    def test_json(self):
        prof = delta_profile(dyadic(), 2)
        obj = profile_to_json(prof)
        assert obj[0]["n"] == 1
        assert obj[0]["delta"] == "1/2"
        assert obj[0]["witness"] == {"a": ["0"], "b": ["1"]}
        assert obj[0]["certified"] is True
        assert obj[0]["nodes_explored"] >= 1

    def test_json_infinite_delta(self):
        phi = line_ifs((F(1, 2), 0), (F(1, 3), 1))
        obj = profile_to_json(delta_profile(phi, 1))
        assert obj[0]["delta"] is None
        assert obj[0]["witness"] is None

    def test_json_algebraic_delta(self):
        obj = profile_to_json(delta_profile(golden_ifs(), 1))
        assert isinstance(obj[0]["delta"], dict)
        assert "poly" in obj[0]["delta"]
