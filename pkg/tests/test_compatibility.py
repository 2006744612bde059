"""Admissibility condition: exact criterion, closed forms, constraint subspace."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from cavitystream.geometry import TriangleDomain
from cavitystream.polyalg import BivariatePoly, poly_vars, wave_operator
from cavitystream.quadrature import QuadratureSpec
from cavitystream.compatibility import (
    CosineStress,
    OpaqueStress,
    PolynomialStress,
    compat_check,
    compat_constraints,
    compat_residual,
    cosine_admissible_wavenumbers,
    cosine_from_harmonic,
    exact_residual_poly,
)
from cavitystream.verify import boundary_vanishing_poly, random_poly

X, Y, A = poly_vars()
D1 = TriangleDomain(1.0)
LINEAR_STRESS = 16 * Y - 8 * A


class TestExactResidual:
    def test_linear_stress_is_admissible_symbolically(self):
        assert exact_residual_poly(LINEAR_STRESS, None).is_zero

    def test_linear_stress_residual_zero_numerically(self):
        f = PolynomialStress(LINEAR_STRESS.subs_a(1))
        assert compat_residual(f, D1, 0.0) == 0.0

    def test_constant_stress_residual_is_rectangle_area(self):
        f = PolynomialStress(BivariatePoly.const(1))
        assert compat_residual(f, D1, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_residual_vanishes_at_right_endpoint(self):
        for f in (
            PolynomialStress(BivariatePoly.const(3)),
            CosineStress(2.0, 4.0),
            OpaqueStress(lambda x, y: x * 0 + y * 0 + 1.0),
        ):
            assert abs(compat_residual(f, D1, 2.0)) <= 1e-13

    def test_residual_vanishes_at_left_endpoint(self):
        for f in (
            PolynomialStress(Y**2 - X),
            CosineStress(2.0, 4.0),
        ):
            assert abs(compat_residual(f, D1, 0.0)) <= 1e-13

    def test_rejects_x_outside_range(self):
        f = PolynomialStress(BivariatePoly.const(1))
        with pytest.raises(ValueError):
            compat_residual(f, D1, -0.5)
        with pytest.raises(ValueError):
            compat_residual(f, D1, 2.5)

    @settings(max_examples=25, deadline=None)
    @given(
        st.fractions(min_value=-3, max_value=3, max_denominator=8),
        st.fractions(min_value=-3, max_value=3, max_denominator=8),
        st.floats(0.05, 1.95),
    )
    def test_residual_is_linear_in_stress(self, alpha, beta, x_val):
        f1, f2 = Y**2 - X, 3 * X * Y + 1
        combo = PolynomialStress(alpha * f1 + beta * f2)
        r = compat_residual(combo, D1, x_val)
        r1 = compat_residual(PolynomialStress(f1), D1, x_val)
        r2 = compat_residual(PolynomialStress(f2), D1, x_val)
        assert r == pytest.approx(float(alpha) * r1 + float(beta) * r2, abs=1e-11)

    def test_quadrature_agrees_with_exact_path(self):
        poly = 2 * X**2 * Y - Y**3 + X - 1
        exact = PolynomialStress(poly)
        ev = exact.evaluator(1.0)
        opaque = OpaqueStress(ev)
        spec = QuadratureSpec(order=6, subdivision=1)
        for xv in (0.3, 0.9, 1.7):
            re = compat_residual(exact, D1, xv)
            rq = compat_residual(opaque, D1, xv, quad=spec)
            scale = max(1.0, abs(re))
            assert abs(re - rq) <= 1e-12 * scale


class TestCompatCheck:
    def test_linear_family_exact_verdict(self):
        report = compat_check(PolynomialStress(LINEAR_STRESS), D1)
        assert report.is_compatible
        assert report.exact_constraints == "0"

    def test_broken_linear_family_is_incompatible(self):
        # c1 = 16 with c2 = -7 violates the admissible ray
        f = PolynomialStress(16 * Y - BivariatePoly.const(7))
        report = compat_check(f, D1)
        assert not report.is_compatible
        assert report.exact_constraints != "0"

    def test_cosine_odd_harmonic_compatible(self):
        report = compat_check(CosineStress(5.0, math.pi), D1, tol=1e-10)
        assert report.is_compatible
        assert report.max_abs_residual <= 1e-12

    def test_cosine_even_harmonic_incompatible(self):
        report = compat_check(CosineStress(5.0, 2 * math.pi), D1, tol=1e-10)
        assert not report.is_compatible
        assert report.max_abs_residual >= 1e-2 * report.normalization

    def test_sweep_shape_and_max(self):
        report = compat_check(CosineStress(1.0, 2.0), D1, n_sweep=33)
        assert len(report.sweep) == 33
        assert report.sweep[0][0] == 0.0
        assert report.sweep[-1][0] == pytest.approx(2.0)
        assert report.max_abs_residual == max(abs(r) for _, r in report.sweep)

    def test_json_round_trip(self):
        import json

        report = compat_check(PolynomialStress(LINEAR_STRESS), D1)
        doc = json.loads(report.to_json())
        assert doc["verdict"] == "compatible"
        assert len(doc["sweep"]) == 65


class TestConstraints:
    def test_linear_family_admissible_ray(self):
        cs = compat_constraints([Y, BivariatePoly.const(1)], None)
        assert cs.rank == 1
        assert len(cs.nullspace) == 1
        c1, c2 = cs.nullspace[0]
        # the ray 2*c2 = -a*c1, normalized to integer-coprime entries
        assert c1 == BivariatePoly.const(2)
        assert c2 == -BivariatePoly.sym_a()

    def test_linear_family_numeric_domain(self):
        cs = compat_constraints([Y, BivariatePoly.const(1)], TriangleDomain(2.0))
        (c1, c2), = cs.nullspace
        assert c1 == BivariatePoly.const(1)
        assert c2 == BivariatePoly.const(-1)

    def test_constant_alone_has_trivial_nullspace(self):
        cs = compat_constraints([BivariatePoly.const(1)], None)
        assert cs.rank == 1
        assert cs.nullspace == ()

    def test_induced_stress_row_is_zero(self):
        rng = random.Random(7)
        for _ in range(5):
            q = random_poly(rng, max_degree=3)
            f = wave_operator(boundary_vanishing_poly(q))
            cs = compat_constraints([f], None)
            assert cs.rank == 0
            assert len(cs.nullspace) == 1

    def test_mixed_basis(self):
        # {y, 1, x*y} : x*y alone is not admissible, so the nullspace stays 1-D
        cs = compat_constraints([Y, BivariatePoly.const(1), X * Y], None)
        assert cs.rank == 2
        assert len(cs.nullspace) == 1

    def test_rejects_empty_basis(self):
        with pytest.raises(ValueError):
            compat_constraints([], None)


class TestCosineFamily:
    def test_odd_wavenumbers_a1(self):
        ks = cosine_admissible_wavenumbers(D1, 2)
        assert ks == pytest.approx([math.pi, 3 * math.pi, 5 * math.pi])

    def test_first_wavenumber_a2(self):
        ks = cosine_admissible_wavenumbers(TriangleDomain(2.0), 0)
        assert ks == pytest.approx([math.pi / 2])

    def test_even_wavenumber_fails(self):
        report = compat_check(CosineStress(1.0, 2 * math.pi / 1.0), D1)
        assert not report.is_compatible

    def test_harmonic_constructor(self):
        f = cosine_from_harmonic(5.0, 3, D1)
        assert f.wavenumber == pytest.approx(3 * math.pi)
        with pytest.raises(ValueError):
            cosine_from_harmonic(1.0, 0, D1)
