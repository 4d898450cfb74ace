import math
import random
from fractions import Fraction

import pytest

from liefields import expr as E, flows as FL
from liefields import fields as F


V3 = ["x", "y", "z"]
V2 = ["x", "y"]


def fld(text, vars=V3, params=()):
    return F.parse_field(text, vars, params)


class TestLieSeriesFlow:
    def test_translation_exact(self):
        pt, est = FL.lie_series_flow(fld("p"), F.Point((1.0, 2.0, 3.0)), 0.7)
        assert pt == (1.7, 2.0, 3.0)
        assert est == 0.0

    def test_exponential_closed_form(self):
        pt, _ = FL.lie_series_flow(fld("x*d1", ["x"]), F.Point((1.0,)), 0.5, order=30)
        assert abs(pt[0] - math.exp(0.5)) < 1e-12

    def test_rotation_closed_form(self):
        pt, _ = FL.lie_series_flow(fld("y*p - x*q", V2), F.Point((1.0, 0.0)),
                                   math.pi / 3, order=40)
        assert abs(pt[0] - math.cos(math.pi / 3)) < 1e-10
        assert abs(pt[1] + math.sin(math.pi / 3)) < 1e-10

    def test_divergence_flagged(self):
        with pytest.raises(FL.DivergenceSuspected):
            FL.lie_series_flow(fld("x^2*d1", ["x"]), F.Point((1.0,)), 2.0, order=16)

    def test_non_polynomial_rejected(self):
        with pytest.raises(E.NonPolynomialError):
            FL.lie_series_flow(fld("log(x)*d1", ["x"]), F.Point((1.0,)), 0.1)


class TestNumericFlow:
    def test_translation_machine_precision(self):
        traj = FL.numeric_flow(fld("p"), F.Point((0.0, 0.0, 0.0)), 1.0, 100)
        assert max(abs(a - b) for a, b in zip(traj.endpoint, (1.0, 0.0, 0.0))) < 1e-13

    def test_cross_method_agreement(self):
        X = fld("x^2*p + 2*x*r")
        start = F.Point((0.3, 0.1, -0.2))
        series, _ = FL.lie_series_flow(X, start, 0.15)
        rk4 = FL.numeric_flow(X, start, 0.15, 4000).endpoint
        assert max(abs(a - b) for a, b in zip(series, rk4)) < 1e-8

    def test_step_halving_ratio_near_16(self):
        X = fld("y*p - x*q", V2)
        exact = (math.cos(1.0), -math.sin(1.0))
        e1 = FL.numeric_flow(X, F.Point((1.0, 0.0)), 1.0, 50).endpoint
        e2 = FL.numeric_flow(X, F.Point((1.0, 0.0)), 1.0, 100).endpoint
        r1 = max(abs(a - b) for a, b in zip(e1, exact))
        r2 = max(abs(a - b) for a, b in zip(e2, exact))
        assert 12 < r1 / r2 < 20

    def test_domain_error_bubbles(self):
        X = fld("x^-1*d1", ["x"])
        with pytest.raises(E.DomainError):
            FL.numeric_flow(X, F.Point((0.0,)), 1.0, 10)


class TestGroupLaw:
    def test_translation_zero_deviation(self):
        dev = FL.one_param_group_law_check(fld("p"), F.Point((0.0, 0.0, 0.0)), 0.3, 0.4)
        assert dev < 1e-13

    def test_rotation_composition(self):
        dev = FL.one_param_group_law_check(fld("y*p - x*q", V2), F.Point((1.0, 0.0)), 0.7, 0.7)
        assert dev < 1e-9

    def test_parabolic_generator(self):
        X = fld("x^2*p + x*y*q + 1/2*y^2*r")
        dev = FL.one_param_group_law_check(X, F.Point((0.2, -0.3, 0.1)), 0.1, 0.2)
        assert dev < 1e-8


class TestCompleteSystems:
    def test_bracket_adjoined(self):
        f1 = F.parse_field("d1", ["x1", "x2", "x3"])
        f2 = F.parse_field("d2 + x1*d3", ["x1", "x2", "x3"])
        done, log = FL.complete_system_complete([f1, f2])
        assert len(done) == 3
        assert done[2] == F.parse_field("d3", ["x1", "x2", "x3"])
        assert any("adjoined" in entry for entry in log)
        assert FL.completion_certificate(done)

    def test_commuting_pair_unchanged(self):
        done, log = FL.complete_system_complete([fld("p"), fld("q")])
        assert len(done) == 2 and not log

    def test_closed_algebra_prolonged_unchanged(self):
        gens = ["p", "q", "r", "x*q - y*p", "y*r - z*q", "z*p - x*r"]
        prolonged = [F.prolong_points(fld(s), 2) for s in gens]
        done, _ = FL.complete_system_complete(prolonged)
        assert FL.completion_certificate(done)
        assert len(done) <= 6

    def test_dependent_input_pruned(self):
        done, log = FL.complete_system_complete([fld("p"), fld("x*p")])
        assert len(done) == 1
        assert any("pruned" in s for s in log)

    def test_output_never_exceeds_dimension(self):
        done, _ = FL.complete_system_complete(
            [fld("p"), fld("q"), fld("x*r"), fld("y*r"), fld("r")])
        assert len(done) <= 3


class TestCompleteSystemSolve:
    def test_pure_translation(self):
        sols, info = FL.complete_system_solve_single(F.parse_field("p", V2), 0)
        assert sols == [E.var(1)]
        assert info["exact"] == [True]

    def test_quadratic_drift(self):
        sols, info = FL.complete_system_solve_single(fld("p + x*r"), 0)
        assert sols[0] == E.var(1)
        expected = E.parse_expression("z - 1/2*x^2", V3)
        assert sols[1] == expected
        # X(w) = 0 exactly
        X = fld("p + x*r")
        for w in sols:
            assert E.is_identically_zero(F.apply_to_function(X, w)) is E.Zeroness.YES

    def test_shear_drift(self):
        sols, _ = FL.complete_system_solve_single(fld("p + y*r"), 0)
        assert sols[1] == E.parse_expression("z - x*y", V3)

    def test_normalization_impossible(self):
        with pytest.raises(FL.NormalizationImpossible):
            FL.complete_system_solve_single(fld("q"), 0)

    def test_exact_division_recorded(self):
        sols, info = FL.complete_system_solve_single(fld("2*p + 2*x*r"), 0)
        assert info["divided"] is True
        assert sols[1] == E.parse_expression("z - 1/2*x^2", V3)


class TestMonodromy:
    def test_circle_period(self):
        period, _ = FL.monodromy_period(fld("y*p - x*q", V2), F.Point((1.0, 0.5)),
                                        t_max=10.0, steps=20000, seed=3)
        assert period is not None
        assert abs(period - 2 * math.pi) < 1e-6

    def test_shear_never_returns(self):
        X = fld("(y - x)*r")
        period, diag = FL.monodromy_period(X, F.Point((0.3, 0.8, 0.0)),
                                           t_max=100.0, steps=20000, seed=3)
        assert period is None
        assert diag  # min-distance diagnostics recorded

    def test_spiral_never_returns(self):
        X = fld("y*p - x*q + 1/2*(x*p + y*q)", V2)
        period, _ = FL.monodromy_period(X, F.Point((0.5, 0.1)), t_max=50.0,
                                        steps=20000, seed=5)
        assert period is None

    def test_classification_agreement_on_linear_fields(self):
        # cross-module soundness on the three example matrices plus 20 random
        # rational ones: Periodic matrices return at 2*pi/omega within 1e-5,
        # Spiral/Nilpotent/RealHyperbolic ones never return up to t_max = 50
        from liefields import mobility as M
        rng = random.Random(9)
        cases = [
            [[0, -1], [1, 0]],
            [[Fraction(1, 2), -1], [1, Fraction(1, 2)]],
            [[0, 1], [0, 0]],
            [[0, -4], [1, 0]],
            [[0, -2, 0], [2, 0, 0], [0, 0, 0]],
        ]
        for _ in range(10):
            cases.append([[Fraction(rng.randint(-3, 3)) for _ in range(2)]
                          for _ in range(2)])
        for _ in range(10):
            cases.append([[Fraction(rng.randint(-2, 2)) for _ in range(3)]
                          for _ in range(3)])
        for M2 in cases:
            n = len(M2)
            cls = M.classify_linear_one_param(M2)
            coeffs = []
            for i in range(n):
                acc = E.ZERO
                for j in range(n):
                    acc = E.add(acc, E.mul(E.const(Fraction(M2[i][j])), E.var(j)))
                coeffs.append(acc)
            X = F.VectorField(n, tuple(coeffs))
            start = F.Point(tuple(0.4 + 0.15 * k for k in range(n)))
            period, _ = FL.monodromy_period(X, start, t_max=50.0, steps=12000, seed=4)
            if cls.tag == "Periodic":
                assert period is not None
                assert abs(period - 2 * math.pi / cls.omega) < 1e-5
            elif cls.tag in ("Spiral", "Nilpotent", "RealHyperbolic"):
                assert period is None, (M2, cls)
