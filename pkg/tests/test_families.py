"""Tests for the parametrised families: instantiation, overlap levels,
closed-form enumeration and the two perturbation steps.

Expected values were derived by hand from the defining relations.  For the
product-digit family with ratio lam, a parameter coordinate x admits a
level-n overlap iff x = (sum_i kappa_i lam^i) / (sum_i delta_i lam^i) for
sign vectors kappa, delta in {-1,0,1}^n, both nonzero.  For the two-map
family, x admits a level-n overlap iff sum_{i=1..n} kappa_i x^i = 0 for a
nonzero sign vector.  Each oracle below records its derivation.
"""

from fractions import Fraction as F

import pytest

from cylsep.exactnum import make_algebraic
from cylsep import families
from cylsep.families import (
    FamilySpec,
    OverlapLevel,
    ParamPoint,
    SearchIndeterminate,
    digit_span,
    enumerate_h1,
    h1_level_exact,
    h_level,
    instantiate,
    joint_gap,
    perturb_primary,
    perturb_secondary,
    trilinear_gap,
    witness_gap,
)
from cylsep.separation import delta_n, pair_distance
from cylsep.similarity import sc_abs, sc_cmp, sc_eq, sc_sub


GOLDEN = make_algebraic((-1, 1, 1), F(0), F(1))  # positive root of x^2+x-1


def ex1(lam, dim=1, merge="union"):
    return FamilySpec.example1(lam, dim=dim, merge=merge)


EX2 = FamilySpec.example2()


# ---------------------------------------------------------------------------
# family specifications


class TestFamilySpec:
    def test_example1_basic(self):
        spec = ex1(F(1, 2))
        assert spec.variant == "example1"
        assert spec.lam == F(1, 2)
        assert spec.arity == 1

    def test_example1_rejects_bad_ratio(self):
        with pytest.raises(ValueError):
            FamilySpec.example1(F(0))
        with pytest.raises(ValueError):
            FamilySpec.example1(F(2, 3))  # above 1/2
        with pytest.raises(ValueError):
            FamilySpec.example1(F(-1, 3))

    def test_example1_rejects_bad_dim_and_merge(self):
        with pytest.raises(ValueError):
            FamilySpec.example1(F(1, 2), dim=0)
        with pytest.raises(ValueError):
            FamilySpec.example1(F(1, 2), merge="sandwich")

    def test_example2_basic(self):
        assert EX2.variant == "example2"
        assert EX2.arity == 1

    def test_config_round_trip(self):
        cfg = {"variant": "example1", "lambda": "1/3", "dim": 1,
               "merge": "union"}
        spec = FamilySpec.from_config(cfg)
        assert spec == FamilySpec.example1(F(1, 3))
        assert FamilySpec.from_config(spec.to_config()) == spec
        spec2 = FamilySpec.from_config({"variant": "example2"})
        assert spec2 == EX2
        assert FamilySpec.from_config(spec2.to_config()) == spec2

    def test_config_rejects_unknown_fields(self):
        with pytest.raises(ValueError):
            FamilySpec.from_config({"variant": "example2", "zeta": 1})
        with pytest.raises(ValueError):
            FamilySpec.from_config({"variant": "example9"})
        with pytest.raises(ValueError):
            FamilySpec.from_config({"variant": "example1", "lambda": "2/3"})


class TestDomain:
    def test_product_family_excludes_zero_and_one(self):
        spec = ex1(F(1, 2))
        for bad in (F(0), F(1)):
            with pytest.raises(ValueError):
                instantiate(spec, "U", u=ParamPoint((bad,)))

    def test_two_map_family_needs_open_interval(self):
        for bad in (F(1, 2), F(1), F(2), F(1, 3)):
            with pytest.raises(ValueError):
                instantiate(EX2, "U", u=ParamPoint((bad,)))
        instantiate(EX2, "U", u=ParamPoint((F(3, 5),)))  # fine

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            instantiate(ex1(F(1, 2), dim=2), "U", u=ParamPoint((F(3),)))

    def test_param_point_is_normalised(self):
        pt = ParamPoint((3, F(1, 2)))
        assert pt.coords == (F(3), F(1, 2))
        with pytest.raises(ValueError):
            ParamPoint(())


# ---------------------------------------------------------------------------
# instantiation


class TestInstantiate:
    def test_product_family_dim1(self):
        # digits {0, 1, u, 1+u} = {0, 1, 3, 4}; maps x -> lam(x + a)
        phi = instantiate(ex1(F(1, 2)), "U", u=ParamPoint((F(3),)))
        assert phi.labels == ("0", "1", "u", "1u")
        for lbl, t in zip(phi.labels, (F(0), F(1, 2), F(3, 2), F(2))):
            m = phi.map_for(lbl)
            assert m.ratio == F(1, 2)
            assert m.translation == (t,)

    def test_two_map_family(self):
        phi = instantiate(EX2, "U", u=ParamPoint((F(3, 5),)))
        assert phi.labels == ("1", "2")
        assert phi.map_for("1").ratio == F(3, 5)
        assert phi.map_for("1").translation == (F(3, 5),)
        assert phi.map_for("2").translation == (F(6, 5),)

    def test_product_family_dim2(self):
        # digit vectors {0,1,3,4} x {0,1,5,6}
        phi = instantiate(ex1(F(1, 2), dim=2), "U",
                          u=ParamPoint((F(3), F(5))))
        assert len(phi) == 16
        assert phi.labels[0] == "0|0"
        assert phi.map_for("0|u").translation == (F(0), F(5, 2))
        assert phi.map_for("1u|1").translation == (F(2), F(1, 2))

    def test_v_side_uses_v_labels(self):
        phi = instantiate(ex1(F(1, 2)), "V", v=ParamPoint((F(1, 4),)))
        assert phi.labels == ("0", "1", "v", "1v")
        assert phi.map_for("v").translation == (F(1, 8),)

    def test_joint_union_dim1(self):
        phi = instantiate(ex1(F(1, 2)), "joint",
                          u=ParamPoint((F(3),)), v=ParamPoint((F(1, 4),)))
        assert phi.labels == ("0", "1", "u", "1u", "v", "1v")
        assert phi.map_for("v").translation == (F(1, 8),)

    def test_joint_union_dim2_count(self):
        phi = instantiate(ex1(F(1, 2), dim=2), "joint",
                          u=ParamPoint((F(3), F(5))),
                          v=ParamPoint((F(1, 4), F(1, 5))))
        # 16 + 16 minus the 4 shared all-{0,1} digit vectors
        assert len(phi) == 28

    def test_joint_full_merge(self):
        phi = instantiate(ex1(F(1, 2), merge="full"), "joint",
                          u=ParamPoint((F(3),)), v=ParamPoint((F(1, 4),)))
        assert phi.labels == ("0", "1", "u", "1u", "v", "1v", "uv", "1uv")
        assert phi.map_for("uv").translation == (F(13, 8),)

    def test_joint_two_map_family(self):
        phi = instantiate(EX2, "joint", u=ParamPoint((F(3, 5),)),
                          v=ParamPoint((F(2, 3),)))
        assert phi.labels == ("u1", "u2", "v1", "v2")
        assert phi.map_for("v2").ratio == F(2, 3)

    def test_formal_labels_survive_equal_maps(self):
        # u = -1 makes digits "0" and "1u" carry the same map; the labels
        # must stay distinct so the coincidence is visible as an overlap
        phi = instantiate(ex1(F(1, 2)), "U", u=ParamPoint((F(-1),)))
        assert len(phi) == 4
        assert phi.map_for("0") == phi.map_for("1u")


# ---------------------------------------------------------------------------
# overlap levels


class TestHLevel:
    def test_level_one(self):
        # u = -1: digit 1+u collides with digit 0
        lvl = h_level(ex1(F(1, 2)), "U", ParamPoint((F(-1),)), 3)
        assert lvl is not None
        assert lvl.level == 1
        assert lvl.starred
        assert (lvl.witness.a, lvl.witness.b) == (("0",), ("1u",))

    def test_level_two(self):
        # u = 1/2 = lam^2/lam: words 0.1 and u.0 share the point 1/4
        lvl = h_level(ex1(F(1, 2)), "U", ParamPoint((F(1, 2),)), 4)
        assert lvl is not None
        assert lvl.level == 2
        assert lvl.starred
        assert (lvl.witness.a, lvl.witness.b) == (("0", "1"), ("u", "0"))

    def test_absent_below_found_level(self):
        assert h_level(ex1(F(1, 2)), "U", ParamPoint((F(1, 2),)), 1) is None

    def test_witness_maps_agree(self):
        spec = ex1(F(1, 2))
        pt = ParamPoint((F(1, 2),))
        lvl = h_level(spec, "U", pt, 3)
        phi = instantiate(spec, "U", u=pt)
        dist = pair_distance(phi, lvl.witness.a, lvl.witness.b)
        assert dist.is_finite and sc_eq(dist.value, F(0))

    def test_sides_share_one_implementation(self):
        spec = ex1(F(1, 2))
        pt = ParamPoint((F(1, 2),))
        lu = h_level(spec, "U", pt, 3)
        lv = h_level(spec, "V", pt, 3)
        assert lu.level == lv.level == 2
        # labels differ by side naming only
        assert lv.witness.a == ("0", "1")
        assert lv.witness.b == ("v", "0")

    def test_two_map_family_golden(self):
        # golden ratio: u + u^2 = 1 forces the words 122 and 211 to agree
        lvl = h_level(EX2, "U", ParamPoint((GOLDEN,)), 4)
        assert lvl is not None
        assert lvl.level == 3
        assert lvl.starred
        assert (lvl.witness.a, lvl.witness.b) == (("1", "2", "2"),
                                                  ("2", "1", "1"))

    def test_two_map_family_absent_for_generic_rational(self):
        assert h_level(EX2, "U", ParamPoint((F(3, 5),)), 3) is None

    def test_joint_level(self):
        lvl = h_level(ex1(F(1, 2)), "joint",
                      (ParamPoint((F(1, 2),)), ParamPoint((F(1, 3),))), 3)
        assert lvl is not None
        assert lvl.level == 2
        assert (lvl.witness.a, lvl.witness.b) == (("0", "1"), ("u", "0"))

    def test_joint_duplicate_parameter_is_level_one(self):
        lvl = h_level(ex1(F(1, 2)), "joint",
                      (ParamPoint((F(3),)), ParamPoint((F(3),))), 2)
        assert lvl.level == 1
        assert (lvl.witness.a, lvl.witness.b) == (("u",), ("v",))

    def test_budget_exhaustion_raises(self):
        with pytest.raises(SearchIndeterminate):
            h_level(ex1(F(1, 2)), "U", ParamPoint((F(1, 2),)), 3, budget=2)

    def test_overlap_level_validates(self):
        lvl = h_level(ex1(F(1, 2)), "U", ParamPoint((F(-1),)), 2)
        with pytest.raises(ValueError):
            OverlapLevel(2, lvl.witness, True)  # level disagrees with witness


# ---------------------------------------------------------------------------
# closed-form enumeration of level-one parameters


class TestEnumerateH1:
    def test_product_family_n1(self):
        # kappa, delta in {-1,1}: ratios +-1, and 1 is outside the domain
        assert enumerate_h1(ex1(F(1, 2)), 1) == [F(-1)]

    def test_product_family_n2(self):
        # sums (2k1+k2)/4 give numerators {+-1,+-2,+-3}; ratios m/k
        want = [F(-3), F(-2), F(-3, 2), F(-1), F(-2, 3), F(-1, 2), F(-1, 3),
                F(1, 3), F(1, 2), F(2, 3), F(3, 2), F(2), F(3)]
        assert enumerate_h1(ex1(F(1, 2)), 2) == want

    def test_window(self):
        got = enumerate_h1(ex1(F(1, 2)), 2, window=(F(0), F(1)))
        assert got == [F(1, 3), F(1, 2), F(2, 3)]

    def test_enumerated_values_reach_their_level(self):
        spec = ex1(F(1, 2))
        for val in (F(-1), F(1, 2), F(3)):
            lvl = h_level(spec, "U", ParamPoint((val,)), 2)
            assert lvl is not None and lvl.level <= 2

    def test_non_members_stay_absent(self):
        spec = ex1(F(1, 2))
        for val in (F(2, 5), F(3, 7), F(5, 4)):
            assert h_level(spec, "U", ParamPoint((val,)), 2) is None

    def test_grid_agreement_with_search(self):
        # exhaustive two-sided check on a rational grid
        spec = ex1(F(1, 2))
        members = set(enumerate_h1(spec, 2))
        for q in range(1, 7):
            for p in range(-3 * q, 3 * q + 1):
                x = F(p, q)
                if x in (F(0), F(1)):
                    continue
                found = h_level(spec, "U", ParamPoint((x,)), 2) is not None
                assert found == (x in members), x

    def test_grid_agreement_other_ratio(self):
        spec = ex1(F(1, 3))
        members = set(enumerate_h1(spec, 3))
        for q in range(1, 5):
            for p in range(-2 * q, 2 * q + 1):
                x = F(p, q)
                if x in (F(0), F(1)):
                    continue
                found = h_level(spec, "U", ParamPoint((x,)), 3) is not None
                assert found == (x in members), x

    def test_two_map_family_n2_empty(self):
        assert enumerate_h1(EX2, 2) == []

    def test_two_map_family_n3_is_golden(self):
        # the only sign polynomial with a root in (1/2,1) at n=3 is
        # x - x^2 - x^3, whose interior root is the golden ratio point
        vals = enumerate_h1(EX2, 3)
        assert len(vals) == 1
        assert sc_eq(vals[0], GOLDEN)

    def test_pair_cap(self):
        with pytest.raises(ValueError):
            enumerate_h1(ex1(F(1, 2)), 30)


# ---------------------------------------------------------------------------
# perturbation, primary side


class TestPerturbPrimary:
    def test_product_family_least_shift(self):
        # u = 1/2 = lam^2/lam; u_N = 1/2 + 2^(1-N); 2^(1-N) < 1/10 forces
        # N = 5, and 9/16 meets no level-2 relation
        spec = ex1(F(1, 2))
        u1, lvl = perturb_primary(spec, ParamPoint((F(1, 2),)), 2,
                                  ParamPoint((F(1, 3),)), 2, F(1, 10))
        assert u1.coords == (F(9, 16),)
        assert lvl.level == 5
        assert lvl.starred
        assert abs(F(9, 16) - F(1, 2)) < F(1, 10)

    def test_untouched_coordinate(self):
        # second coordinate 2/5 has no level-2 relation, so it stays put,
        # but numerators 2 and 5 are reachable at level 3
        spec = ex1(F(1, 2), dim=2)
        u1, lvl = perturb_primary(spec, ParamPoint((F(1, 2), F(2, 5))), 2,
                                  ParamPoint((F(1, 2), F(2, 5))), 2,
                                  F(1, 10))
        assert u1.coords == (F(9, 16), F(2, 5))
        assert lvl.level == 3
        assert lvl.starred

    def test_requires_overlap(self):
        spec = ex1(F(1, 2))
        with pytest.raises(ValueError):
            perturb_primary(spec, ParamPoint((F(2, 5),)), 2,
                            ParamPoint((F(1, 3),)), 2, F(1, 10))

    def test_third_ratio(self):
        # u = 1/3 = lam^2/lam at lam = 1/3; u_N = 1/3 + 3^(1-N); N = 3
        # fails the eps bound (1/9 > 1/10), N = 4 gives 10/27
        spec = ex1(F(1, 3))
        u1, lvl = perturb_primary(spec, ParamPoint((F(1, 3),)), 2,
                                  ParamPoint((F(1, 3),)), 2, F(1, 10))
        assert u1.coords == (F(10, 27),)
        assert lvl.level == 4
        assert lvl.starred

    def test_two_map_family(self):
        spec = EX2
        u = ParamPoint((GOLDEN,))
        u1, lvl = perturb_primary(spec, u, 3, u, 3, F(1, 20))
        gap = sc_abs(sc_sub(u1.coords[0], GOLDEN))
        assert sc_cmp(gap, F(1, 20)) < 0
        assert sc_cmp(gap, F(0)) > 0
        assert lvl.level > 3
        assert lvl.starred
        # deterministic: a second run lands on the same parameter
        u1b, lvlb = perturb_primary(spec, u, 3, u, 3, F(1, 20))
        assert sc_eq(u1.coords[0], u1b.coords[0])
        assert lvlb.level == lvl.level


# ---------------------------------------------------------------------------
# perturbation, secondary side


class TestPerturbSecondary:
    def test_product_family_full_run(self):
        # lam = 1/3, u = v = 1/3.  Primary gives u1 = 10/27 at level 4.
        # Secondary: v_N = 1/3 + 3^(1-N); N = 3 fails eps, N = 4 collides
        # with u1 itself, N = 5 gives 28/81 at level 5.
        spec = ex1(F(1, 3))
        u = ParamPoint((F(1, 3),))
        u1, nlvl = perturb_primary(spec, u, 2, u, 2, F(1, 10))
        assert u1.coords == (F(10, 27),)
        v1, mlvl = perturb_secondary(spec, u1, u, 2, F(1, 10), 2)
        assert v1.coords == (F(28, 81),)
        assert mlvl.level == 5
        assert mlvl.starred
        assert h_level(spec, "joint", (u1, v1), 2) is None

    def test_product_family_three_cases(self):
        # d = 3, lam = 1/3, u = (1/3, 1/5, 2/7), v = (1/3, 1/5, 7/11).
        # coordinate 1: level-2 form, shifted to 28/81
        # coordinate 2: equals u1's coordinate, shifted to 1/5 + 3^(2-N)
        # coordinate 3: no relation against u1's 2/7, left alone
        spec = ex1(F(1, 3), dim=3)
        u = ParamPoint((F(1, 3), F(1, 5), F(2, 7)))
        v = ParamPoint((F(1, 3), F(1, 5), F(7, 11)))
        u1, nlvl = perturb_primary(spec, u, 2, v, 2, F(1, 10))
        assert u1.coords == (F(10, 27), F(1, 5), F(2, 7))
        assert nlvl.level == 3  # 1/5 and 2/7 admit level-3 relations
        v1, mlvl = perturb_secondary(spec, u1, v, 2, F(1, 10), 2)
        assert v1.coords == (F(28, 81), F(32, 135), F(7, 11))
        # 7 = 9-3+1 and 11 = 9+3-1, so 7/11 has a level-3 relation and the
        # least level of the perturbed point drops to 3
        assert mlvl.level == 3
        assert mlvl.starred
        assert h_level(spec, "joint", (u1, v1), 2) is None

    def test_two_map_family(self):
        spec = EX2
        u = ParamPoint((GOLDEN,))
        u1, _ = perturb_primary(spec, u, 3, u, 3, F(1, 20))
        v1, mlvl = perturb_secondary(spec, u1, u, 3, F(1, 20), 3)
        gap = sc_abs(sc_sub(v1.coords[0], GOLDEN))
        assert sc_cmp(gap, F(1, 20)) < 0
        assert mlvl.level > 3
        assert mlvl.starred
        assert not sc_eq(v1.coords[0], u1.coords[0])
        assert h_level(spec, "joint", (u1, v1), 3) is None

    def test_perturbed_pair_separates(self):
        # after both steps the joint family has a positive strict distance
        # at every level up to L0
        spec = ex1(F(1, 3))
        u = ParamPoint((F(1, 3),))
        u1, _ = perturb_primary(spec, u, 2, u, 2, F(1, 10))
        v1, _ = perturb_secondary(spec, u1, u, 2, F(1, 10), 2)
        phi = instantiate(spec, "joint", u=u1, v=v1)
        for n in (1, 2):
            res = delta_n(phi, n)
            assert res.delta.is_finite and sc_cmp(res.delta.value, F(0)) > 0


class TestDigitSystems:
    """Closed forms for lam = 1/2 and 1/3: exact least levels, digit
    representations, written-down witnesses and the valuation bound."""

    # least level of p/q is the least n whose digit span (2^n - 1 for
    # base 2, (3^n - 1)/2 for base 3) reaches max(|p|, q)
    LEVELS_THIRD = [
        (F(1, 3), 2), (F(-1), 1), (F(-2, 3), 2), (F(-8, 9), 3),
        (F(7, 11), 3), (F(10, 27), 4), (F(28, 81), 5), (F(32, 135), 6),
        (F(1, 5), 3), (F(2, 7), 3), (F(82, 243), 6), (F(-161, 243), 6),
    ]
    LEVELS_HALF = [
        (F(1, 2), 2), (F(9, 16), 5), (F(2, 5), 3), (F(3), 2), (F(-1), 1),
    ]

    def test_level_formula_oracles(self):
        for x, want in self.LEVELS_THIRD:
            assert h1_level_exact(F(1, 3), x) == want
        for x, want in self.LEVELS_HALF:
            assert h1_level_exact(F(1, 2), x) == want

    def test_level_formula_never_and_unsupported(self):
        assert h1_level_exact(F(1, 3), F(0)) is None
        assert h1_level_exact(F(1, 2), GOLDEN) is None
        with pytest.raises(ValueError):
            h1_level_exact(F(2, 5), F(1, 3))

    def test_level_formula_matches_enumeration(self):
        # the formula against the sign-sum search on a value grid
        for lam in (F(1, 2), F(1, 3)):
            spec = ex1(lam)
            for p in range(-8, 9):
                for q in range(1, 8):
                    x = F(p, q)
                    if x == 0:
                        continue
                    closed = h1_level_exact(lam, x)
                    if closed is not None and closed > 5:
                        closed = None
                    found = families._coord_h1_level(spec, x, 5)
                    assert closed == found, (lam, x)

    def test_digit_span_values(self):
        assert digit_span(F(1, 2), 5) == 31
        assert digit_span(F(1, 3), 3) == 13
        assert digit_span(F(1, 3), 23) == 47071589413
        with pytest.raises(ValueError):
            digit_span(F(2, 5), 3)

    def test_digit_roundtrip(self):
        # extraction must reproduce its input through the Horner sum,
        # incl. values needing the full span and block-boundary sizes
        for q in (2, 3):
            span200 = digit_span(F(1, q), 200)
            for m in (1, -1, q ** 64, q ** 64 + 1, -q ** 65,
                      span200, -span200, 123456789, -987654321):
                digs = families._digits_signed(q, m, 200)
                assert len(digs) == 200
                assert set(digs) <= {-1, 0, 1}
                assert families._horner_q(q, list(digs)) == m

    def test_witness_words_from_representation(self):
        # x = 1/3: numerator digits (0,1), denominator digits (1,0);
        # the pieces read ("u","0") and ("0","1"), ordered
        spec = ex1(F(1, 3))
        kvec, dvec = families._rep_digits(F(1, 3), F(1, 3), 2)
        assert (kvec, dvec) == ((0, 1), (1, 0))
        wa, wb = families._words_from_rep(spec, "U", 0, kvec, dvec)
        assert (wa, wb) == (("0", "1"), ("u", "0"))
        assert witness_gap(spec, "U", (F(1, 3),), wa, wb) == 0
        # at a shifted parameter the defect is |S(delta)| * |x' - x|
        assert witness_gap(spec, "U", (F(4, 9),), wa, wb) == F(1, 27)

    def test_witness_gap_matches_composition(self):
        # integer fast path against the generic composed distance
        wa, wb = ("0", "1u"), ("u", "1")
        for lam in (F(1, 3), F(2, 5)):
            spec = ex1(lam)
            pt = ParamPoint((F(5, 7),))
            gap = witness_gap(spec, "U", pt, wa, wb)
            phi = instantiate(spec, "U", u=pt)
            assert sc_eq(gap, pair_distance(phi, wa, wb).value)

    def test_witness_gap_multidim(self):
        # per-coordinate labels; the gap is the sup over coordinates
        spec = ex1(F(1, 3), dim=2)
        pt = ParamPoint((F(1, 3), F(8, 9)))
        wa = ("0|u", "1|0")
        wb = ("u|0", "0|1")
        # coordinate 0: words realize 1/9 - u/3 = 0 at u = 1/3;
        # coordinate 1: u/3 - 1/9 = 8/27 - 3/27 = 5/27
        assert witness_gap(spec, "U", pt, wa, wb) == F(5, 27)

    def test_witness_gap_rejects_bad_words(self):
        spec = ex1(F(1, 3))
        with pytest.raises(ValueError):
            witness_gap(spec, "U", (F(1, 3),), ("0",), ("0", "1"))
        with pytest.raises(ValueError):
            witness_gap(spec, "U", (F(1, 3),), ("2",), ("0",))

    def test_trilinear_gap_oracles(self):
        # u = 4/9, v = 82/243: the products 9*243, 4*243, 82*9 carry
        # 3-adic valuations 7, 5, 2, pairwise >= 2 apart
        g = trilinear_gap(F(1, 3), F(4, 9), F(82, 243), 2)
        assert g == F(1, 9 * 243)
        # equal points admit the relation K=0, D=1, G=-1
        assert trilinear_gap(F(1, 3), F(1, 3), F(1, 3), 1) is None
        assert trilinear_gap(F(2, 5), F(1, 3), F(1, 2), 1) is None

    def test_trilinear_gap_sound_against_search(self):
        # whenever the valuation test certifies, the joint search agrees;
        # certification needs denominator valuations >= 2 and >= 2 apart,
        # the shape the nested construction produces
        spec = ex1(F(1, 3))
        vals = [F(p, q) for p in (-2, -1, 1, 2)
                for q in (9, 27, 81, 243)]
        hits = 0
        for a in vals:
            for b in vals:
                g = trilinear_gap(F(1, 3), a, b, 2)
                if g is None:
                    continue
                hits += 1
                assert h_level(spec, "joint",
                               (ParamPoint((a,)), ParamPoint((b,))),
                               2) is None
        assert hits > 10

    def test_joint_gap(self):
        spec = ex1(F(1, 3))
        v2 = F(-8, 9) + F(1, 3 ** 22)
        g = joint_gap(spec, (F(-161, 243),), (v2,), 3)
        assert g == F(1, 243 * 3 ** 22)
        assert joint_gap(spec, (F(1, 3),), (F(1, 3),), 1) is None
        assert joint_gap(EX2, (GOLDEN,), (GOLDEN,), 1) is None

    def test_fast_shift_beyond_enumeration(self):
        # u0 = 2188/6561 sits at level 9, beyond the enumeration range;
        # the shift 3^(1-N) first satisfies eps = 10^-6 at N = 14
        spec = ex1(F(1, 3))
        x = F(2188, 6561)
        u1, lvl = perturb_primary(spec, (x,), 9, (x,), 9, F(1, 10 ** 6))
        assert u1.coords[0] == F(531685, 1594323)
        assert lvl.level == 14 and lvl.starred
        assert witness_gap(spec, "U", u1, lvl.witness.a, lvl.witness.b) == 0
        # the secondary shift must run to N = 23 before the valuation
        # bound separates it from u1 (denominator gap below 9 until then)
        v1, mlvl = perturb_secondary(spec, u1, (x,), 9, F(1, 10 ** 6), 9)
        assert v1.coords[0] == x + F(1, 3 ** 22)
        assert mlvl.level == 23
        assert joint_gap(spec, u1, v1, 9) is not None

    def test_fast_shift_large_levels(self):
        # the stage geometry of the nested-ball construction: radii fall
        # super-exponentially, so the shift exponent jumps far ahead
        spec = ex1(F(1, 3))
        u2 = ParamPoint((F(-161, 243),))
        v1 = ParamPoint((F(-8, 9),))
        v2, m2 = perturb_secondary(spec, u2, v1, 3, F(3, 2 ** 36), 3)
        assert v2.coords[0] == F(-8, 9) + F(1, 3 ** 22)
        assert m2.level == 23
        u3, l3 = perturb_primary(spec, u2, 6, v2, 23, F(3, 2 ** 529))
        assert u3.coords[0] == F(-161, 243) + F(1, 3 ** 333)
        assert l3.level == 334
        assert len(l3.witness.a) == 334
        assert witness_gap(spec, "U", u3, l3.witness.a, l3.witness.b) == 0
        # the old stage-2 witness misses u3 by |S(delta)| * |u3 - u2|
        k2, d2 = families._rep_digits(F(1, 3), F(-161, 243), 6)
        wa, wb = families._words_from_rep(spec, "U", 0, k2, d2)
        assert witness_gap(spec, "U", u3, wa, wb) == F(1, 3 ** 334)

    def test_least_shift_exponent(self):
        lse = families._least_shift_exponent
        assert lse(3, F(2)) == 1
        assert lse(3, F(1, 3)) == 2
        assert lse(3, F(1, 59049)) == 11
        assert lse(3, F(1, 59048)) == 10
        assert lse(2, F(1, 1024)) == 11
        # eps * |S(delta)| for the deep stage: 3^70384 > 2^111556 holds
        # by a margin of only 2^0.0007
        assert lse(3, F(1, 2 ** 111556)) == 70384
