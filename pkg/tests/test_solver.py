"""Solution formula: exact polynomial path, quadrature path, builtins."""

import math
import random

import pytest

from cavitystream.geometry import TriangleDomain, PhysicalPoint, boundary_sample, interior_lattice
from cavitystream.polyalg import BivariatePoly, poly_vars, wave_operator
from cavitystream.quadrature import QuadratureSpec
from cavitystream.compatibility import CosineStress, OpaqueStress, PolynomialStress, compat_check
from cavitystream.solver import (
    IncompatibleStress,
    grid_rows,
    linear_example,
    realistic_example,
    residual,
    sinusoidal_closed_form,
    solve_exact_poly,
    solve_quadrature,
    write_grid_csv,
)
from cavitystream.verify import boundary_vanishing_poly, random_poly, riemann_psi

X, Y, A = poly_vars()
D1 = TriangleDomain(1.0)
LINEAR_CASE_PSI = 2 * Y**3 - 2 * X**2 * Y - 4 * A * Y**2 + 4 * A * X * Y


class TestExactSolve:
    def test_linear_stress_symbolic_recovery(self):
        psi = solve_exact_poly(16 * Y - 8 * A, None)
        assert psi.poly == LINEAR_CASE_PSI

    def test_zero_stress_gives_zero_field(self):
        psi = solve_exact_poly(BivariatePoly.zero(), D1)
        assert psi.poly.is_zero

    def test_round_trip_through_operator(self):
        psi0 = 2 * Y * (Y - X) * (X + Y - 2 * A) * (X + 3 * Y)
        f = wave_operator(psi0)
        assert solve_exact_poly(f, None).poly == psi0

    def test_incompatible_constant_stress_raises(self):
        with pytest.raises(IncompatibleStress):
            solve_exact_poly(BivariatePoly.const(1), D1)

    def test_incompatible_pure_linear_raises(self):
        with pytest.raises(IncompatibleStress):
            solve_exact_poly(16 * Y, D1)

    def test_numeric_binding(self):
        psi = solve_exact_poly((16 * Y - 8 * A).subs_a(1), D1)
        assert psi.poly == LINEAR_CASE_PSI.subs_a(1)
        assert psi.evaluate(1.0, 0.5) == pytest.approx(0.25, abs=1e-15)

    def test_exposed_stress_matches_input(self):
        f = (16 * Y - 8 * A).subs_a(1)
        psi = solve_exact_poly(f, D1)
        assert psi.source_stress.poly == f

    def test_operator_identity_for_random_admissible_stresses(self):
        rng = random.Random(11)
        for _ in range(5):
            psi0 = boundary_vanishing_poly(random_poly(rng, max_degree=3))
            f = wave_operator(psi0)
            psi = solve_exact_poly(f, None)
            assert wave_operator(psi.poly) == f


class TestQuadratureSolve:
    def test_matches_exact_at_interior_point(self):
        f = PolynomialStress((16 * Y - 8 * A).subs_a(1))
        psi = solve_quadrature(f, D1)
        assert psi.evaluate(1.0, 0.5) == pytest.approx(0.25, abs=1e-12)

    def test_vertex_value_is_zero(self):
        f = PolynomialStress((16 * Y - 8 * A).subs_a(1))
        psi = solve_quadrature(f, D1)
        assert psi.evaluate(0.0, 0.0) == 0.0

    def test_cosine_against_riemann_oracle(self):
        # low-order midpoint oracle at >= 1e6 cells per rectangle
        stress = CosineStress(5.0, math.pi)
        psi = solve_quadrature(stress, D1)
        got = psi.evaluate(1.0, 0.5)
        ref = riemann_psi(stress, D1, PhysicalPoint(1.0, 0.5), cells_per_axis=2000)
        assert got == pytest.approx(ref, abs=1e-8)

    def test_incompatible_stress_raises(self):
        with pytest.raises(IncompatibleStress):
            solve_quadrature(CosineStress(1.0, 2 * math.pi), D1)
        with pytest.raises(IncompatibleStress):
            solve_quadrature(PolynomialStress(BivariatePoly.const(2)), D1)

    def test_two_path_agreement_random_stresses(self):
        rng = random.Random(23)
        spec = QuadratureSpec(order=10, subdivision=1)
        for trial in range(3):
            psi0 = boundary_vanishing_poly(random_poly(rng, max_degree=2)).subs_a(1)
            f = PolynomialStress(wave_operator(psi0))
            exact = solve_exact_poly(f, D1)
            quad = solve_quadrature(f, D1, spec)
            scale = max(exact.scale(), 1e-12)
            for _ in range(40):
                x = rng.uniform(0, 2)
                y = rng.uniform(0, 1)
                if not (0 < y < x and x + y < 2):
                    continue
                assert abs(exact.evaluate(x, y) - quad.evaluate(x, y)) <= 1e-10 * scale

    def test_linearity_of_solve(self):
        psi0a = boundary_vanishing_poly(BivariatePoly.const(1)).subs_a(1)
        psi0b = boundary_vanishing_poly((X + 3 * Y)).subs_a(1)
        fa, fb = wave_operator(psi0a), wave_operator(psi0b)
        combo = solve_exact_poly(2 * fa - 3 * fb, D1)
        assert combo.poly == 2 * psi0a - 3 * psi0b


class TestOpaqueStress:
    def test_solve_and_strong_form_residual(self):
        # admissible mixture known only through a numpy-vectorized evaluator
        import numpy as np

        def f(x, y):
            return 16.0 * y - 8.0 + 5.0 * np.cos(3 * math.pi * y)

        stress = OpaqueStress(f)
        psi = solve_quadrature(stress, D1, QuadratureSpec(order=12, subdivision=8))
        reference = linear_example(D1)
        closed = sinusoidal_closed_form(2.5, D1)
        for x, y in [(1.0, 0.5), (0.8, 0.3), (1.4, 0.4)]:
            expected = reference.evaluate(x, y) + closed.evaluate(x, y)
            assert psi.evaluate(x, y) == pytest.approx(expected, abs=1e-9)
        assert residual(psi, stress, PhysicalPoint(1.0, 0.5), 1e-3) <= 5e-3


class TestExactRationalDomain:
    def test_fraction_length_parameter(self):
        from fractions import Fraction

        d = TriangleDomain(Fraction(1, 3))
        psi = solve_exact_poly((16 * Y - 8 * A).subs_a(Fraction(1, 3)), d)
        expected = (2 * Y**3 - 2 * X**2 * Y - 4 * A * Y**2 + 4 * A * X * Y).subs_a(Fraction(1, 3))
        assert psi.poly == expected


class TestSinusoidal:
    def test_vertex_value(self):
        psi = sinusoidal_closed_form(5.0, D1)
        assert abs(psi.evaluate(1.0, 1.0)) < 1e-15

    def test_boundary_vanishing(self):
        psi = sinusoidal_closed_form(5.0, D1)
        c = 2 * 5.0 / (9 * math.pi**2)
        worst = max(abs(psi.evaluate(p.x, p.y)) for p in boundary_sample(D1, 100))
        assert worst <= 1e-13 * c

    def test_zero_amplitude(self):
        psi = sinusoidal_closed_form(0.0, D1)
        assert psi.evaluate(0.7, 0.3) == 0.0

    def test_source_stress_is_doubled_cosine(self):
        psi = sinusoidal_closed_form(5.0, D1)
        src = psi.source_stress
        assert isinstance(src, CosineStress)
        assert src.amplitude == pytest.approx(10.0)
        assert src.wavenumber == pytest.approx(3 * math.pi)

    def test_finite_difference_residual_against_source(self):
        psi = sinusoidal_closed_form(5.0, D1)
        assert residual(psi, psi.source_stress, PhysicalPoint(1.0, 0.5), 1e-4) <= 2e-3

    def test_quadrature_solution_of_cosine_matches_closed_form(self):
        # solving 5*cos(3*pi*y) must reproduce the closed form at half amplitude
        stress = CosineStress(5.0, 3 * math.pi)
        quad = solve_quadrature(stress, D1)
        closed = sinusoidal_closed_form(2.5, D1)
        for x, y in [(1.0, 0.5), (0.6, 0.2), (1.5, 0.3)]:
            assert quad.evaluate(x, y) == pytest.approx(closed.evaluate(x, y), abs=5e-11)


class TestRealistic:
    def test_edge_restrictions_vanish(self):
        psi = realistic_example(None)
        assert psi.poly.restrict_to_segment((0, 0), (2 * A, 0)).is_zero
        assert psi.poly.restrict_to_segment((0, 0), (A, A)).is_zero
        assert psi.poly.restrict_to_segment((2 * A, 0), (-A, A)).is_zero

    def test_base_shear_is_positive(self):
        psi = realistic_example(D1)
        u = psi.poly.diff(2).float_evaluator()
        for i in range(1, 1000):
            x = 2.0 * i / 1000
            assert u(x, 0.0) > 0.0

    def test_induced_stress_is_admissible(self):
        psi = realistic_example(None)
        report_poly = compat_check(PolynomialStress(wave_operator(psi.poly).subs_a(1)), D1)
        assert report_poly.is_compatible
        assert report_poly.exact_constraints == "0"

    def test_solve_recovers_the_product_form(self):
        psi = realistic_example(None)
        f = wave_operator(psi.poly)
        assert solve_exact_poly(f, None).poly == psi.poly


class TestResidualOperator:
    def test_linear_case_tiny_residual(self):
        psi = linear_example(D1)
        r = residual(psi, psi.source_stress, PhysicalPoint(1.0, 0.5), 1e-3)
        assert r <= 1e-9

    def test_zero_field(self):
        psi = solve_exact_poly(BivariatePoly.zero(), D1)
        assert residual(psi, psi.source_stress, PhysicalPoint(0.8, 0.3), 1e-4) == 0.0

    def test_rejects_non_interior_point(self):
        psi = linear_example(D1)
        with pytest.raises(ValueError):
            residual(psi, psi.source_stress, PhysicalPoint(1.0, 0.0), 1e-4)

    def test_quadrature_backing_needs_stencil_margin(self):
        f = PolynomialStress((16 * Y - 8 * A).subs_a(1))
        psi = solve_quadrature(f, D1, QuadratureSpec(order=8, subdivision=1))
        with pytest.raises(ValueError):
            residual(psi, f, PhysicalPoint(1.0, 1e-5), 1e-3)
        assert residual(psi, f, PhysicalPoint(1.0, 0.5), 1e-3) <= 1e-6


class TestGridExport:
    def test_rows_match_polynomial(self):
        psi = linear_example(D1)
        ev = psi.poly.float_evaluator()
        rows = grid_rows(psi, D1, 21)
        assert rows, "clipped grid must not be empty"
        for x, y, v in rows:
            assert v == ev(x, y)

    def test_clipping(self):
        rows = grid_rows(linear_example(D1), D1, 21)
        for x, y, _ in rows:
            assert y <= x + 1e-9 and x + y <= 2 + 1e-9 and y >= -1e-9

    def test_csv_format(self, tmp_path):
        path = tmp_path / "psi.csv"
        write_grid_csv(linear_example(D1), D1, 11, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,y,psi"
        assert lines[1] == "0,0,0"
        # deterministic rewrite
        again = tmp_path / "psi2.csv"
        write_grid_csv(linear_example(D1), D1, 11, again)
        assert path.read_bytes() == again.read_bytes()


class TestBoundaryGuard:
    def test_construction_rejects_non_vanishing_field(self):
        from cavitystream.solver import PolyStreamFunction

        bad = PolyStreamFunction((X * Y).subs_a(1), D1)
        with pytest.raises(ValueError):
            bad.check_boundary(100, 1e-9)
