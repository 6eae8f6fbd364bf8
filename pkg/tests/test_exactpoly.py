import unittest
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from src.curve_pi1.exactpoly import (CHARTS, CurveParams, CurveParamsError, PolynomialError, SparsePolynomial,
                                     ZeroPolynomialError, blowup_chart, build_curve, chart_substitute, dehomogenize,
                                     homogenize, parse_polynomial, shift, swap_variables, torus_decomposition,
                                     translate)

XY = ('x', 'y')


def poly(text):
    return parse_polynomial(text, XY)


def test_parse_and_render_cusp():
    """
    Parsing keeps exact coefficients and the text codec prints highest terms first.
    """
    cusp = poly("y^2 - x^3")

    assert cusp.as_dict() == {(0, 2): Fraction(1), (3, 0): Fraction(-1)}
    assert cusp.to_text() == "-x^3 + y^2"
    assert poly(cusp.to_text()) == cusp


def test_parse_rejects_unknown_symbols_and_garbage():
    with pytest.raises(PolynomialError):
        poly("y^2 - z^3")
    with pytest.raises(PolynomialError):
        poly("y^2 ; x")


@pytest.mark.parametrize("text", ["sin(x) + y", "E*x + y", "pi*y", "Integer", "exp(x)", "x + 2j"])
def test_parse_resolves_only_the_variables(text):
    with pytest.raises(PolynomialError):
        poly(text)


def test_rational_coefficients_stay_exact():
    p = poly("y/3 - 2*x/7")
    assert p.coefficient((0, 1)) == Fraction(1, 3)
    assert p.coefficient((1, 0)) == Fraction(-2, 7)
    assert p.to_dict()['terms'] == [[[0, 1], "1/3"], [[1, 0], "-2/7"]]


def test_from_terms_merges_and_drops_zeros():
    p = SparsePolynomial.from_terms(XY, [((1, 0), 1), ((1, 0), -1), ((0, 1), 2)])
    assert p.support() == ((0, 1),)
    assert SparsePolynomial.from_terms(XY, {(1, 0): 0}).is_zero


def test_arithmetic_matches_expansion():
    x = SparsePolynomial.gen(XY, 'x')
    y = SparsePolynomial.gen(XY, 'y')

    assert (x + y) ** 2 == poly("x^2 + 2*x*y + y^2")
    assert (x - y) * (x + y) == poly("x^2 - y^2")
    assert (x + 1) - 1 == x
    assert (x ** 0) == SparsePolynomial.constant(XY, 1)


def test_lowest_degree_of_zero_raises():
    with pytest.raises(ZeroPolynomialError):
        SparsePolynomial.zero(XY).lowest_degree()


def test_substitute_is_simultaneous():
    p = poly("x + 2*y")
    swapped = p.substitute({'x': SparsePolynomial.gen(XY, 'y'), 'y': SparsePolynomial.gen(XY, 'x')})
    assert swapped == poly("y + 2*x")


class TestCurveParams(unittest.TestCase):

    def test_derived_quantities(self):
        params = CurveParams(3, 1, 1)
        self.assertEqual(params.m, 1)
        self.assertEqual(params.d, 2)
        self.assertEqual(params.degree, 6)
        self.assertEqual(params.multiplicity_at_p, 4)
        self.assertEqual(params.generic_fiber_points, 2)

    def test_invalid_parameters(self):
        for args in [(4, 1, 1), (1, 1, 1), (3, 2, 2), (3, 1, 2), (5, 0, 1), (5, -1, 2)]:
            with self.subTest(args=args):
                with self.assertRaises(CurveParamsError):
                    CurveParams(*args)

    def test_booleans_are_not_integers(self):
        with self.assertRaises(CurveParamsError):
            CurveParams(3, True, 1)


class TestCurveFamily(unittest.TestCase):

    def setUp(self):
        self.params = CurveParams(3, 1, 1)
        self.curve = build_curve(self.params)

    def test_curve_is_homogeneous_of_degree_dn(self):
        self.assertTrue(self.curve.is_homogeneous())
        self.assertEqual(self.curve.degree(), 6)

    def test_local_equation_has_multiplicity_four(self):
        local = dehomogenize(self.curve, 'z')
        self.assertEqual(local.lowest_degree(), 4)
        self.assertEqual(local.homogeneous_part(4), poly("x^2*y^2"))

    def test_homogenize_inverts_dehomogenize(self):
        local = dehomogenize(self.curve, 'z')
        self.assertEqual(homogenize(local, 6, 'z'), self.curve)

    def test_homogenize_rejects_low_target_degree(self):
        with self.assertRaises(PolynomialError):
            homogenize(poly("x^3"), 2)

    def test_torus_decomposition_reproduces_curve(self):
        for args in [(3, 1, 1), (5, 1, 2), (7, 2, 1)]:
            with self.subTest(args=args):
                params = CurveParams(*args)
                decomposition = torus_decomposition(params)
                self.assertEqual((decomposition.p, decomposition.q), (params.d, params.N))
                self.assertTrue(decomposition.verify(build_curve(params)))


def test_blowup_chart_strict_transform_of_cusp():
    """
    Chart A of y^2 = x^3 gives x^2 (y^2 - x): strict transform y^2 - x, E with multiplicity 2.
    """
    strict, power = blowup_chart(poly("y^2 - x^3"), 'A')
    assert strict == poly("y^2 - x")
    assert power == 2

    strict_b, power_b = blowup_chart(poly("y^2 - x^3"), 'B')
    assert strict_b == poly("1 - x^3*y")
    assert power_b == 2


def test_chart_substitute_is_total_transform():
    assert chart_substitute(poly("y^2 - x^3"), 'A') == poly("x^2*y^2 - x^3")


def test_blowup_requires_point_on_curve():
    with pytest.raises(PolynomialError):
        blowup_chart(poly("1 + x"), 'A')
    with pytest.raises(ZeroPolynomialError):
        blowup_chart(SparsePolynomial.zero(XY), 'A')
    with pytest.raises(PolynomialError):
        blowup_chart(poly("y - x"), 'C')


def test_translate_round_trip():
    p = poly("y^2 - x^5")
    moved = translate(p, 3, 2)
    assert moved == poly("(y - 3*x^2)^2 - x^5")
    assert translate(moved, -3, 2) == p


def test_translate_with_constant_shift():
    assert translate(poly("y"), Fraction(1, 2), 0) == poly("y - 1/2")


def test_shift_needs_positive_exponent():
    with pytest.raises(PolynomialError):
        shift(poly("y"), 1, 0)
    assert shift(poly("y"), 1, 1) == poly("y - x")


def test_swap_variables():
    assert swap_variables(poly("x^2 + y^3")) == poly("y^2 + x^3")


def test_shift_turns_strict_transform_into_shifted_equation():
    """
    The chart with exceptional divisor {y=0} takes F at P to
    x^(aN) y^d + (x^N y + y + x^m)^d; y <- y - x^m then gives
    x^(aN) (y - x^m)^d + (y + x^N y - x^(N+m))^d.
    """
    for args in [(3, 1, 1), (5, 1, 2)]:
        params = CurveParams(*args)
        N, a, m, d = params.N, params.a, params.m, params.d
        local = dehomogenize(build_curve(params), 'z')

        strict, power = blowup_chart(local, 'B')

        assert power == params.multiplicity_at_p
        assert strict == poly(f"x^{a * N}*y^{d} + (x^{N}*y + y + x^{m})^{d}")
        assert shift(strict, 1, m) == poly(f"x^{a * N}*(y - x^{m})^{d} + (y + x^{N}*y - x^{N + m})^{d}")


def test_larger_member_matches_multinomial_expansion():
    params = CurveParams(5, 1, 2)
    N, a, b, m, d = params.N, params.a, params.b, params.m, params.d
    expected = {(a * N, b * N, 0): Fraction(1)}
    for i in range(d + 1):
        for j in range(d + 1 - i):
            k = d - i - j
            exponent = (N * i + m * k, N * j + m * k, k)
            weight = factorial(d) // (factorial(i) * factorial(j) * factorial(k))
            expected[exponent] = expected.get(exponent, Fraction(0)) + weight

    curve = build_curve(params)

    assert curve.as_dict() == expected
    assert curve.coefficient((5, 10, 0)) == 4


exponents = st.tuples(st.integers(min_value=0, max_value=4), st.integers(min_value=0, max_value=4))
coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)
polynomials = st.dictionaries(exponents, coefficients, max_size=5).map(lambda t: SparsePolynomial.from_terms(XY, t))
germs = st.dictionaries(exponents.filter(any), st.integers(min_value=-4, max_value=4).filter(bool),
                        min_size=1, max_size=5).map(lambda t: SparsePolynomial.from_terms(XY, t))


@st.composite
def homogeneous_polynomials(draw):
    degree = draw(st.integers(min_value=0, max_value=5))
    terms = draw(st.dictionaries(st.integers(min_value=0, max_value=degree),
                                 st.integers(min_value=-4, max_value=4).filter(bool), min_size=1, max_size=4))
    return SparsePolynomial.from_terms(XY, {(i, degree - i): c for i, c in terms.items()})


class TestRingProperties(unittest.TestCase):

    @settings(max_examples=60, deadline=None)
    @given(polynomials, polynomials, polynomials)
    def test_ring_axioms(self, p, q, r):
        self.assertEqual(p + q, q + p)
        self.assertEqual(p * q, q * p)
        self.assertEqual((p + q) + r, p + (q + r))
        self.assertEqual((p * q) * r, p * (q * r))
        self.assertEqual(p * (q + r), p * q + p * r)
        self.assertTrue((p - p).is_zero)

    @settings(max_examples=60, deadline=None)
    @given(homogeneous_polynomials(), homogeneous_polynomials())
    def test_products_of_forms_are_forms(self, p, q):
        product = p * q
        self.assertTrue(product.is_homogeneous())
        self.assertEqual(product.degree(), p.degree() + q.degree())

    @settings(max_examples=60, deadline=None)
    @given(germs, st.sampled_from(CHARTS))
    def test_strict_transform_times_exceptional_power(self, p, chart):
        strict, power = blowup_chart(p, chart)
        exceptional = (power, 0) if chart == 'A' else (0, power)

        self.assertEqual(strict * SparsePolynomial.monomial(XY, exceptional), chart_substitute(p, chart))
        self.assertEqual(power, p.lowest_degree())
