"""Exact polynomial engine: ring behavior, calculus, substitution."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cavitystream.polyalg import BivariatePoly, poly_vars, wave_operator

X, Y, A = poly_vars()


def small_polys(max_degree=4, max_terms=6, coeff=6):
    keys = st.tuples(
        st.integers(min_value=0, max_value=max_degree),
        st.integers(min_value=0, max_value=max_degree),
        st.integers(min_value=0, max_value=2),
    )
    coeffs = st.fractions(min_value=-coeff, max_value=coeff, max_denominator=4)
    return st.dictionaries(keys, coeffs, max_size=max_terms).map(BivariatePoly)


class TestRing:
    def test_eval_simple_cube(self):
        p = Y**3
        assert p.eval(2, 3) == 27

    def test_linear_case_stream_function_vanishes_at_apex(self):
        psi = 2 * Y**3 - 2 * X**2 * Y - 4 * Y**2 + 4 * X * Y
        assert psi.eval(1, 1) == 0

    def test_linear_stress_sign_change(self):
        f = 16 * Y - 8
        assert f.eval(Fraction(1, 2), Fraction(1, 2)) == 0

    def test_difference_of_squares(self):
        assert (X + Y) * (X - Y) == X**2 - Y**2

    def test_cancellation_to_zero(self):
        p = 3 * X**2 * Y - Y + 7
        assert (p + (-1) * p).is_zero

    def test_factored_stream_function_expands(self):
        expanded = 2 * Y**3 - 2 * X**2 * Y - 4 * A * Y**2 + 4 * A * X * Y
        factored = 2 * Y * (Y - X) * (X + Y - 2 * A)
        assert factored == expanded

    @settings(max_examples=40, deadline=None)
    @given(small_polys(), small_polys(), small_polys())
    def test_ring_axioms(self, p, q, r):
        assert (p * q) * r == p * (q * r)
        assert p * (q + r) == p * q + p * r
        assert p + q == q + p
        assert p * q == q * p

    def test_pow_matches_repeated_mul(self):
        p = X + 2 * Y - 1
        assert p**3 == p * p * p
        assert p**0 == BivariatePoly.const(1)


class TestCalculus:
    def test_second_derivative(self):
        p = X**2 * Y
        assert p.diff(1, 2) == 2 * Y

    def test_wave_operator_reproduces_linear_stress(self):
        psi = 2 * Y**3 - 2 * X**2 * Y - 4 * Y**2 + 4 * X * Y
        assert wave_operator(psi) == 16 * Y - 8

    def test_velocity_component(self):
        psi = 2 * Y**3 - 2 * X**2 * Y - 4 * Y**2 + 4 * X * Y
        assert psi.diff(2) == -2 * X**2 + 6 * Y**2 + 4 * X - 8 * Y

    def test_antideriv_basic(self):
        assert X.antideriv(1) == X**2 * Fraction(1, 2)
        assert BivariatePoly.zero().antideriv(1).is_zero

    @settings(max_examples=40, deadline=None)
    @given(small_polys(), st.sampled_from([1, 2]))
    def test_diff_inverts_antideriv(self, p, var):
        assert p.antideriv(var).diff(var) == p


class TestSubstitution:
    def test_char_substitution_of_x(self):
        # x composed with ((t-s)/2, (t+s)/2)
        half = Fraction(1, 2)
        assert X.compose((X - Y) * half, (X + Y) * half) == (X - Y) * half

    def test_identity_map(self):
        p = 3 * X**2 - Y + 5
        assert p.compose(X, Y) == p

    def test_linear_stress_in_characteristic_coordinates(self):
        f = 16 * Y - 8
        half = Fraction(1, 2)
        g = f.compose((X - Y) * half, (X + Y) * half)
        assert g == 8 * X + 8 * Y - 8

    @settings(max_examples=40, deadline=None)
    @given(small_polys())
    def test_coordinate_change_round_trip(self, p):
        half = Fraction(1, 2)
        forward = p.compose(X + Y, -X + Y)
        back = forward.compose((X - Y) * half, (X + Y) * half)
        assert back == p

    def test_subs_a(self):
        p = 4 * A * X * Y - 8 * A**2
        assert p.subs_a(1) == 4 * X * Y - 8
        assert p.subs_a(Fraction(1, 2)) == 2 * X * Y - 2


class TestSegmentRestriction:
    def test_stream_function_vanishes_on_base(self):
        psi = 2 * Y**3 - 2 * X**2 * Y - 4 * Y**2 + 4 * X * Y
        assert psi.restrict_to_segment((0, 0), (2, 0)).is_zero

    def test_stream_function_vanishes_on_diagonal(self):
        psi = 2 * Y * (Y - X) * (X + Y - 2 * A)
        assert psi.restrict_to_segment((0, 0), (A, A)).is_zero

    def test_nonvanishing_restriction(self):
        r = X.restrict_to_segment((0, 0), (2 * A, 0))
        assert r == 2 * A * X  # 2a * tau in slot v1


class TestFormatting:
    def test_text_form(self):
        psi = 2 * Y**3 - 2 * X**2 * Y - 4 * A * Y**2 + 4 * A * X * Y
        assert psi.to_text() == "4*a*x*y - 4*a*y^2 - 2*x^2*y + 2*y^3"

    def test_zero_text(self):
        assert BivariatePoly.zero().to_text() == "0"

    def test_fraction_coefficients(self):
        p = X * Fraction(1, 2)
        assert p.to_text() == "1/2*x"


class TestEvaluation:
    def test_exact_fraction_eval(self):
        p = X**2 - Y * Fraction(1, 3)
        assert p.eval(Fraction(1, 2), Fraction(3)) == Fraction(1, 4) - 1

    def test_symbolic_requires_a(self):
        p = A * X
        with pytest.raises(ValueError):
            p.eval(1.0, 2.0)
        assert p.eval(1, 2, a=3) == 3

    def test_float_evaluator_matches_exact(self):
        p = 2 * Y**3 - 2 * X**2 * Y - 4 * Y**2 + 4 * X * Y
        ev = p.float_evaluator()
        for x, y in [(0.3, 0.1), (1.5, 0.2), (1.0, 1.0)]:
            assert ev(x, y) == pytest.approx(float(p.eval(Fraction(x), Fraction(y))), abs=1e-14)
