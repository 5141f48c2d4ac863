from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lozenge.qpoly import HalfQPolynomial, macmahon_series

from oracles import MACMAHON_HEAD, macmahon_coefficients, macmahon_coefficients_reversed

coeff_maps = st.dictionaries(st.integers(-6, 12), st.fractions(max_denominator=7), max_size=5)


def test_zero_coefficients_not_stored():
    p = HalfQPolynomial({0: 1, 2: 0, 3: Fraction(0)})
    assert p.coeffs == {0: Fraction(1)}
    assert (p - p).is_zero()


def test_coefficient_by_power():
    p = HalfQPolynomial({1: 3, 4: 5})
    assert p.coefficient(Fraction(1, 2)) == 3
    assert p.coefficient(2) == 5
    assert p.coefficient(Fraction(1, 3)) == 0


def test_exact_evaluation_half_powers():
    p = HalfQPolynomial({1: 1, 2: 1})
    assert p.evaluate(Fraction(1, 4)) == Fraction(1, 2) + Fraction(1, 4)
    with pytest.raises(ValueError):
        p.evaluate(Fraction(1, 3))
    assert HalfQPolynomial({2: 1, 4: 1})(Fraction(1, 3)) == Fraction(4, 9)


def test_float_evaluation_matches():
    p = HalfQPolynomial({0: 1, 3: 2, -2: 1})
    assert p.evaluate_float(0.25) == pytest.approx(float(p.evaluate(Fraction(1, 4))))


@given(coeff_maps, coeff_maps, coeff_maps)
def test_ring_axioms(a, b, c):
    x, y, z = HalfQPolynomial(a), HalfQPolynomial(b), HalfQPolynomial(c)
    assert x + y == y + x
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == HalfQPolynomial()


@given(coeff_maps, st.integers(-4, 4))
def test_shift_is_monomial_product(a, k):
    x = HalfQPolynomial(a)
    assert x.shift(k) == x * HalfQPolynomial.monomial(k)


@given(coeff_maps, coeff_maps)
def test_evaluation_is_a_homomorphism(a, b):
    x, y = HalfQPolynomial(a), HalfQPolynomial(b)
    q = Fraction(4, 9)
    assert (x * y).evaluate(q) == x.evaluate(q) * y.evaluate(q)
    assert (x + y).evaluate(q) == x.evaluate(q) + y.evaluate(q)


def test_macmahon_head():
    assert macmahon_series(4) == HalfQPolynomial.from_integer_powers([1, 1, 3, 6, 13])
    assert macmahon_series(0) == HalfQPolynomial({0: 1})
    with pytest.raises(ValueError):
        macmahon_series(-1)


def test_macmahon_against_two_orderings():
    ref = macmahon_coefficients(10)
    assert ref == macmahon_coefficients_reversed(10)
    assert ref[:7] == MACMAHON_HEAD
    got = macmahon_series(10)
    assert [got.coefficient(k) for k in range(11)] == ref
