import math
from fractions import Fraction

import pytest

from liefields import algebra as A, mobility as M


V3 = ["x", "y", "z"]
V2 = ["x", "y"]


def pres(name, gens, vars=V3, params=()):
    return A.presentation(name, vars, gens, params)


class TestClassification:
    def test_rotation_periodic(self):
        cls = M.classify_linear_one_param([[0, -1], [1, 0]])
        assert cls.tag == "Periodic"
        assert abs(cls.omega - 1.0) < 1e-9

    def test_shift_rotation_periodic_up_to_scale(self):
        # a rotation plus a uniform dilation never returns in position but is
        # proportional to its start at the rotation period; the recorded
        # factor is the common real part
        cls = M.classify_linear_one_param([[Fraction(1, 2), -1], [1, Fraction(1, 2)]])
        assert cls.tag == "ProjectivelyPeriodic"
        assert cls.shift == pytest.approx(0.5)
        assert cls.omega == pytest.approx(1.0)
        # the homogeneous projective matrix of the same family has a third,
        # differently-shifted eigenvalue and genuinely spirals
        cls2 = M.classify_linear_one_param(
            [[Fraction(1, 2), 1, 0], [-1, Fraction(1, 2), 0], [0, 0, 0]])
        assert cls2.tag == "Spiral"

    def test_spiral_with_distinct_real_parts(self):
        cls = M.classify_linear_one_param([[1, -1], [1, -2]])
        assert cls.tag in ("Spiral", "RealHyperbolic")
        cls2 = M.classify_linear_one_param([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
        assert cls2.tag == "Spiral"

    def test_nilpotent_jordan_block(self):
        cls = M.classify_linear_one_param([[0, 1], [0, 0]])
        assert cls.tag == "Nilpotent"

    def test_zero_and_hyperbolic(self):
        assert M.classify_linear_one_param([[0, 0], [0, 0]]).tag == "Zero"
        assert M.classify_linear_one_param([[2, 0], [0, -1]]).tag == "RealHyperbolic"

    def test_commensurable_pairs_share_period(self):
        cls = M.classify_linear_one_param(
            [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -2], [0, 0, 2, 0]])
        assert cls.tag == "Periodic"
        assert abs(cls.omega - 1.0) < 1e-9  # common period 2*pi

    def test_incommensurable_pairs_rejected(self):
        root2 = math.sqrt(2)
        cls = M.classify_linear_one_param(
            [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -root2], [0, 0, root2, 0]])
        assert cls.tag != "Periodic"

    def test_nondiagonalizable_zero_block_not_periodic(self):
        cls = M.classify_linear_one_param(
            [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]])
        assert cls.tag != "Periodic"


class TestSevenForms:
    def test_exactly_one_periodic(self):
        rows = M.classify_seven_forms()
        periodic = [r for r in rows if r.classification.tag == "Periodic"]
        assert len(periodic) == 1
        assert periodic[0].index == 7

    def test_rejection_witnesses(self):
        rows = {r.index: r for r in M.classify_seven_forms()}
        assert rows[1].witness == "eta = 0"
        assert rows[2].witness == "line at infinity"
        assert rows[3].witness is not None
        assert rows[4].witness == "xi = 0"
        assert rows[5].witness == "eta = 0"

    def test_sixth_form_spirals(self):
        rows = {r.index: r for r in M.classify_seven_forms()}
        assert rows[6].classification.tag == "Spiral"
        assert rows[6].witness is None

    def test_classification_stable_across_samples(self):
        for c in (Fraction(-2), Fraction(1, 2), Fraction(3)):
            rows = M.classify_seven_forms(c_samples=(c,) if c not in (0, 1) else (Fraction(2),))
            tags = [r.classification.tag for r in rows]
            assert tags[6] == "Periodic"
            assert tags[5] == "Spiral"
            assert all(t in ("RealHyperbolic", "Nilpotent") for t in tags[:5])


EUCLID = ["p", "q", "r", "x*q - y*p", "y*r - z*q", "z*p - x*r"]


class TestFreeMobility:
    def test_euclid_true(self):
        verdict = M.free_mobility_infinitesimal(pres("euclid", EUCLID))
        assert verdict.free_mobility is True

    def test_planar_family_true_at_samples(self):
        fam = pres("fam", ["p", "q", "y*p - x*q + c*(x*p + y*q)"], vars=V2, params=["c"])
        for c in (Fraction(0), Fraction(1, 2)):
            verdict = M.free_mobility_infinitesimal(fam, param_values={0: c})
            assert verdict.free_mobility is True, c

    def test_group_45_fails_on_fixed_direction(self):
        g45 = pres("g45", ["p - y*r", "q + x*r", "r", "x*q", "x*p - y*q", "y*p"])
        verdict = M.free_mobility_infinitesimal(g45)
        assert verdict.free_mobility is False
        assert "direction" in verdict.failing_stage
        # the fixed class is the z'-axis
        assert verdict.witness in ((0, 0, 1), (Fraction(0), Fraction(0), Fraction(1)))

    def test_full_planar_affine_fails(self):
        aff = pres("aff", ["p", "q", "x*p", "x*q", "y*p", "y*q"], vars=V2)
        verdict = M.free_mobility_infinitesimal(aff)
        assert verdict.free_mobility is False

    def test_curvature_groups_true_entries_8_to_11_false(self):
        from liefields import catalog as CAT
        for eid, expected in [("thm37-1", True), ("thm37-3", True), ("thm37-4", True),
                              ("thm37-8", False), ("thm37-9", False),
                              ("thm37-10", False), ("thm37-11", False)]:
            entry = CAT.entry_by_id(eid)
            L = entry.presentation()
            pv = entry.param_value_maps()[0]
            verdict = M.free_mobility_infinitesimal(L, param_values=pv or None)
            assert verdict.free_mobility is expected, eid
            if not expected:
                assert verdict.failing_stage

    def test_unsupported_dimension(self):
        L = pres("line", ["d1"], vars=["x"])
        with pytest.raises(M.UnsupportedDimension):
            M.free_mobility_infinitesimal(L)


class TestKillingForm:
    def test_rotation_algebra_negative_definite(self):
        C = A.check_closure(pres("so3", ["x*q - y*p", "y*r - z*q", "z*p - x*r"]))
        assert M.killing_form_signature(C) == (0, 0, 3)

    def test_abelian_totally_degenerate(self):
        C = A.check_closure(pres("tr", ["p", "q", "r"]))
        assert M.killing_form_signature(C) == (0, 3, 0)

    def test_reduced_isotropy_degenerate(self):
        C = A.check_closure(pres("iso", ["y*p - x*q", "x*r", "y*r"]))
        pos, zero, neg = M.killing_form_signature(C)
        assert zero >= 1

    def test_parameter_dependent_constants_at_caller_values(self):
        g38 = pres("g38", ["p", "q", "x*p + r", "y*q + c*r",
                           "x^2*p + 2*x*r", "y^2*q + 2*c*y*r"], params=["c"])
        C = A.check_closure(g38)
        sig = M.killing_form_signature(C, param_values={0: Fraction(1, 2)})
        assert sum(sig) == 6
        assert sig == M.killing_form_signature(C, param_values={0: Fraction(3)})
