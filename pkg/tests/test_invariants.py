import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from liefields import algebra as A, expr as E, invariants as I
from liefields import fields as F
from liefields import flows as FL


V3 = ["x", "y", "z"]
V2 = ["x", "y"]
PV2 = F.point_var_names(V3, 2)


def pres(name, gens, vars=V3, params=()):
    return A.presentation(name, vars, gens, params)


@pytest.fixture(scope="module")
def euclid():
    return pres("euclid", ["p", "q", "r", "x*q - y*p", "y*r - z*q", "z*p - x*r"])


def cand(text, vars=V3, s=2, params=()):
    names = F.point_var_names(vars, s)
    return I.InvariantCandidate(s, E.parse_expression(text, names, params))


class TestVerifyJointInvariant:
    def test_euclid_distance_proven(self, euclid):
        out = I.verify_joint_invariant(euclid, cand("(x1-x2)^2 + (y1-y2)^2 + (z1-z2)^2"))
        assert out.verdict is I.Verdict.PROVEN

    def test_group_11_parabolic_invariant(self):
        g11 = pres("g11", ["p", "q", "r", "x*q + y*r", "2*x*p + y*q",
                           "x^2*p + x*y*q + 1/2*y^2*r"])
        out = I.verify_joint_invariant(g11, cand("z2 - z1 - 1/2*(y2-y1)^2*(x2-x1)^-1"))
        assert out.verdict is I.Verdict.PROVEN

    def test_refuted_with_rotation_witness(self, euclid):
        out = I.verify_joint_invariant(euclid, cand("x2 - x1"))
        assert out.verdict is I.Verdict.REFUTED
        assert out.witness_generator == 3  # the x-y rotation
        residual = out.witness_residual
        target = E.parse_expression("-(y2 - y1)", PV2)
        assert E.is_identically_zero(E.add(residual, E.neg(target))) is E.Zeroness.YES

    def test_numeric_mode(self, euclid):
        out = I.verify_joint_invariant(
            euclid, cand("(x1-x2)^2 + (y1-y2)^2 + (z1-z2)^2"), mode="numeric")
        assert out.verdict is I.Verdict.NUMERICALLY_SUPPORTED

    def test_domain_exhaustion_reported(self, euclid):
        # the sqrt survives differentiation and its argument is negative
        # everywhere, so no configuration is ever in-domain
        out_of_domain = cand("sqrt(-1 - (x1-x2)^2)")
        with pytest.raises(I.DomainExhausted):
            I.verify_joint_invariant(euclid, out_of_domain, mode="numeric")

    def test_flow_conservation_of_proven_invariant(self, euclid):
        # Proven invariants drift < 1e-6 along prolonged flows over t in [0,1]
        J = cand("(x1-x2)^2 + (y1-y2)^2 + (z1-z2)^2")
        rng = random.Random(5)
        for g in euclid.generators:
            prolonged = F.prolong_points(g, 2)
            start = tuple(rng.uniform(-1, 1) for _ in range(6))
            traj = FL.numeric_flow(prolonged, F.Point(start), 1.0, 10000,
                                   tracked={"J": J.body})
            assert traj.drift["J"] < 1e-6

    def test_group_11_invariant_equal_along_flow_step(self):
        # two random point pairs related by a flow of a group generator agree
        g11 = pres("g11", ["p", "q", "r", "x*q + y*r", "2*x*p + y*q",
                           "x^2*p + x*y*q + 1/2*y^2*r"])
        J = cand("z2 - z1 - 1/2*(y2-y1)^2*(x2-x1)^-1")
        rng = random.Random(11)
        for gen in (g11.generators[4], g11.generators[5]):
            prolonged = F.prolong_points(gen, 2)
            start = tuple(rng.uniform(0.2, 1.0) for _ in range(6))
            before = E.evaluate_numeric(J.body, list(start))
            end = FL.numeric_flow(prolonged, F.Point(start), 0.08, 4000).endpoint
            after = E.evaluate_numeric(J.body, list(end))
            assert abs(after - before) < 1e-9


class TestInfinitesimalInvariants:
    def test_group_22_has_differential_invariant(self):
        g22 = pres("g22", ["q", "x*q + r", "x^2*q + 2*x*r", "x^3*q + 3*x^2*r",
                           "p", "x*p - z*r"])
        assert I.infinitesimal_invariant_exists(g22) is True
        assert A.joint_invariant_count(g22, 2) == 0
        names = F.differential_var_names(V3)
        body = E.parse_expression("dy - z*dx", names)
        for g in g22.generators:
            res = F.apply_to_function(F.prolong_differentials(g), body)
            assert E.is_identically_zero(res) is E.Zeroness.YES

    def test_planar_similarity_group(self):
        sim = pres("sim", ["p", "q", "x*p + y*q"], vars=V2)
        assert I.infinitesimal_invariant_exists(sim) is True

    def test_full_planar_affine_has_none(self):
        aff = pres("aff", ["p", "q", "x*p", "x*q", "y*p", "y*q"], vars=V2)
        assert I.infinitesimal_invariant_exists(aff) is False

    def test_intransitive_shortcut(self):
        line = pres("line", ["q", "x*q", "x^2*q"])
        assert I.infinitesimal_invariant_exists(line) is True

    def test_agreement_with_prolongation_route_across_catalog(self):
        from liefields import catalog as CAT
        for entry in CAT.builtin_entries():
            if entry.expected.infinitesimal_invariant is None:
                continue
            L = entry.presentation()
            for pv in entry.param_value_maps()[:1]:
                a = I.infinitesimal_invariant_exists(L, param_values=pv or None)
                b = I.infinitesimal_invariant_exists_by_prolongation(L, param_values=pv or None)
                assert a == b == entry.expected.infinitesimal_invariant, entry.id

    def test_theorem_44_direction_across_catalog(self):
        # a pair invariant forces an invariant of infinitely-near points
        from liefields import catalog as CAT
        for entry in CAT.builtin_entries():
            if (entry.expected.pair_invariant_count or 0) < 1:
                continue
            L = entry.presentation()
            for pv in entry.param_value_maps()[:1]:
                assert I.infinitesimal_invariant_exists(L, param_values=pv or None), entry.id


class TestArcLength:
    def test_similarity_group_fails(self):
        sim = pres("sim", ["p", "q", "x*p + y*q"], vars=V2)
        assert I.arc_length_invariant_exists(sim) is False

    def test_euclid_passes(self, euclid):
        assert I.arc_length_invariant_exists(euclid) is True

    def test_rotation_with_dilation_passes(self):
        rotc = pres("rotc", ["p", "q", "y*p - x*q + c*(x*p + y*q)"], vars=V2,
                    params=["c"])
        assert I.arc_length_invariant_exists(rotc, param_values={0: Fraction(1, 2)}) is True


class TestLieDerivative:
    def test_translation_kills_identity(self):
        out = I.lie_derivative_quadratic_form(F.parse_field("p", V3), I.identity_form(3))
        assert all(c.is_zero for row in out.entries for c in row)

    def test_rotation_kills_identity(self):
        out = I.lie_derivative_quadratic_form(
            F.parse_field("x*q - y*p", V3), I.identity_form(3))
        assert all(c.is_zero for row in out.entries for c in row)

    def test_dilation_doubles_identity(self):
        out = I.lie_derivative_quadratic_form(
            F.parse_field("x*p + y*q", V2), I.identity_form(2))
        assert out.entries[0][0] == E.const(2)
        assert out.entries[1][1] == E.const(2)
        assert out.entries[0][1].is_zero

    @given(st.integers(-3, 3), st.integers(-3, 3))
    @settings(max_examples=20, deadline=None)
    def test_bilinear_in_g(self, a, b):
        X = F.parse_field("x*q - y*p + x*p", V2)
        g1 = I.identity_form(2)
        g2 = I.QuadraticForm(2, ((E.var(0), E.ONE), (E.ONE, E.var(1))))
        combo = I.QuadraticForm(2, tuple(
            tuple(E.add(E.mul(E.const(a), g1.entries[i][j]),
                        E.mul(E.const(b), g2.entries[i][j])) for j in range(2))
            for i in range(2)))
        lhs = I.lie_derivative_quadratic_form(X, combo)
        l1 = I.lie_derivative_quadratic_form(X, g1)
        l2 = I.lie_derivative_quadratic_form(X, g2)
        for i in range(2):
            for j in range(2):
                rhs = E.add(E.mul(E.const(a), l1.entries[i][j]),
                            E.mul(E.const(b), l2.entries[i][j]))
                assert lhs.entries[i][j] == rhs

    def test_commutator_identity(self):
        X = F.parse_field("x*q", V2)
        Y = F.parse_field("y*p", V2)
        g = I.QuadraticForm(2, ((E.var(1), E.var(0)), (E.var(0), E.ONE)))
        lhs = I.lie_derivative_quadratic_form(F.bracket(X, Y), g)
        fwd = I.lie_derivative_quadratic_form(X, I.lie_derivative_quadratic_form(Y, g))
        bwd = I.lie_derivative_quadratic_form(Y, I.lie_derivative_quadratic_form(X, g))
        for i in range(2):
            for j in range(2):
                assert lhs.entries[i][j] == E.add(fwd.entries[i][j], E.neg(bwd.entries[i][j]))


class TestEssential:
    def test_euclid_three_points_not_essential(self, euclid):
        J = cand("(x1-x2)^2 + (y1-y2)^2 + (z1-z2)^2")
        assert I.essential_invariant_check(euclid, 3, pair_invariants=[J]) is False

    def test_group_11_not_essential(self):
        g11 = pres("g11", ["p", "q", "r", "x*q + y*r", "2*x*p + y*q",
                           "x^2*p + x*y*q + 1/2*y^2*r"])
        J = cand("z2 - z1 - 1/2*(y2-y1)^2*(x2-x1)^-1")
        assert I.essential_invariant_check(g11, 3, pair_invariants=[J]) is False

    def test_translation_family_is_essential(self):
        # 6 generators leave 3 = 9 - 6 three-point invariants but only two
        # independent pullbacks of x_j - x_i: an essential invariant remains
        g21 = pres("g21", ["q", "x*q + r", "x^2*q + 2*x*r", "x^3*q + 3*x^2*r",
                           "x^4*q + 4*x^3*r", "p"])
        J = cand("x2 - x1")
        assert A.joint_invariant_count(g21, 3) == 3
        assert I.essential_invariant_check(g21, 3, pair_invariants=[J]) is True

    def test_missing_pair_invariant_raises(self, euclid):
        with pytest.raises(I.MissingPairInvariant):
            I.essential_invariant_check(euclid, 3)


class TestPseudospheres:
    def test_euclid_sphere_sampling(self, euclid):
        J = cand("(x1-x2)^2 + (y1-y2)^2 + (z1-z2)^2")
        pts = I.sample_pseudosphere_points(J, [0.0, 0.0, 0.0], 1.0, 3, seed=2, count=8)
        assert len(pts) == 8
        for pt in pts:
            assert abs(sum(v * v for v in pt) - 1.0) < 1e-9

    def test_three_centers_cut_to_points(self, euclid):
        # triple pseudosphere intersections are generically finite: the
        # gradients of the three level functions are independent
        J = cand("(x1-x2)^2 + (y1-y2)^2 + (z1-z2)^2")
        centers = [(0, 0, 0), (1, 0, 0), (0, 1, 0)]
        bodies = []
        for cx, cy, cz in centers:
            mapping = {0: E.const(cx), 1: E.const(cy), 2: E.const(cz),
                       3: E.var(0), 4: E.var(1), 5: E.var(2)}
            bodies.append(E.substitute_vars(J.body, mapping))
        rank = I._gradient_rank(bodies, 3, seed=1)
        assert rank == 3
