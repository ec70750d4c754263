from __future__ import annotations

from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorgv.exactarith import (
    NumberField,
    Polynomial,
    RationalFunction,
    format_rational,
    parse_rational,
    polynomial,
    rational,
)

DIS = polynomial(1, -57, -289, 1)

rationals = st.builds(
    mpq, st.integers(-(10**6), 10**6), st.integers(1, 10**4)
)


def test_rational_add_reduces():
    assert rational(1, 2) + rational(1, 3) == mpq(5, 6)


def test_rational_mul_reduces():
    assert rational(2, 4) * rational(2, 1) == mpq(1, 1)


def test_rational_zero_divisor():
    with pytest.raises(ZeroDivisionError):
        rational(1, 0)
    with pytest.raises(ZeroDivisionError):
        mpq(1) / mpq(0)


def test_rational_serialization_roundtrip():
    assert format_rational(mpq(35105, 3)) == "35105/3"
    assert format_rational(mpq(5)) == "5"
    assert parse_rational("2669975/6") == mpq(2669975, 6)


@given(rationals, rationals, rationals)
@settings(max_examples=60, deadline=None)
def test_rational_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a


# -- polynomials and rational functions -------------------------------------

def test_discriminant_evaluation():
    assert DIS(mpq(0)) == 1
    # substituting x = 3 into 1 - 57x - 289x^2 + x^3
    assert DIS(mpq(3)) == 1 - 57 * 3 - 289 * 9 + 27 == -2744


def test_polynomial_derivative_theta():
    x = Polynomial.x()
    assert (x**3).derivative() == 3 * x**2
    assert (x**3).theta() == Polynomial([0, 0, 0, 3])


def test_ratfunc_pole_evaluation():
    rf = RationalFunction(Polynomial.one(), polynomial(-3, 1))
    with pytest.raises(ZeroDivisionError):
        rf(mpq(3))
    assert rf(mpq(0)) == mpq(-1, 3)
    with pytest.raises(ZeroDivisionError):
        rf / RationalFunction(Polynomial.zero())


def test_ratfunc_reduction_invariant():
    x = Polynomial.x()
    num = (x - 2) * (x + 1) * (x + 1)
    den = (x - 2) * (x + 5)
    rf = RationalFunction(num, den)
    assert rf.num.gcd(rf.den).degree == 0
    assert rf.num == (x + 1) * (x + 1)
    assert rf.den == x + 5


@given(st.lists(rationals, min_size=1, max_size=4), st.lists(rationals, min_size=1, max_size=4))
@settings(max_examples=40, deadline=None)
def test_ratfunc_always_reduced(nc, dc):
    den = Polynomial(dc)
    if den.is_zero():
        den = Polynomial.one()
    rf = RationalFunction(Polynomial(nc), den)
    g = rf.num.gcd(rf.den)
    assert g.degree <= 0


def test_ratfunc_arithmetic_identities():
    x = Polynomial.x()
    f = RationalFunction(x * x + 1, DIS)
    g = RationalFunction(x, polynomial(-3, 1))
    assert (f + g) - g == f
    assert (f * g) / g == f
    assert f.theta() == f.derivative() * RationalFunction(x)


def test_ratfunc_no_floats_anywhere():
    f = RationalFunction(polynomial(1, 2, 3), DIS)
    out = f * f + f.derivative()
    for c in list(out.num.coeffs()) + list(out.den.coeffs()):
        assert isinstance(c, mpq)


# -- number field ------------------------------------------------------------

@pytest.fixture(scope="module")
def field():
    return NumberField([1, -57, -289, 1])


def test_alg_mul_reduction(field):
    a = field.gen
    # alpha^3 = 289 alpha^2 + 57 alpha - 1 for m = a^3 - 289 a^2 - 57 a + 1
    assert a * (a * a) == field.element([-1, 57, 289])
    # oracle: polynomial long division of x^3 by m over Fraction arithmetic
    m = [Fraction(1), Fraction(-57), Fraction(-289), Fraction(1)]
    x3 = [Fraction(0)] * 3 + [Fraction(1)]
    q = x3[3] / m[3]
    rem = [x3[i] - q * m[i] for i in range(3)]
    assert field.element([mpq(r.numerator, r.denominator) for r in rem]) == a**3


def test_alg_inverse(field):
    a = field.gen
    inv = a.inverse()
    assert a * inv == field.one
    assert inv == field.element([57, 289, -1])  # -a^2 + 289 a + 57


def test_alg_identity(field):
    a = field.element([3, mpq(1, 2), 7])
    assert a + field.zero == a
    assert a * field.one == a


def test_alg_mixed_fields_error(field):
    other = NumberField([1, 0, 1])
    with pytest.raises(ValueError):
        field.gen + other.gen


def test_alg_zero_inverse(field):
    with pytest.raises(ZeroDivisionError):
        field.zero.inverse()


@given(
    st.lists(rationals, min_size=3, max_size=3),
    st.lists(rationals, min_size=3, max_size=3),
    st.lists(rationals, min_size=3, max_size=3),
)
@settings(max_examples=40, deadline=None)
def test_alg_field_axioms(ca, cb, cc):
    field = NumberField([1, -57, -289, 1])
    a, b, c = field.element(ca), field.element(cb), field.element(cc)
    assert (a + b) + c == a + (b + c)
    assert a * (b * c) == (a * b) * c
    assert a * (b + c) == a * b + a * c
    if not a.is_zero():
        assert a * a.inverse() == field.one


def test_alg_serialization(field):
    a = field.element([1, mpq(-1, 2), 3])
    data = a.serialize()
    assert data["coeffs"] == ["1", "-1/2", "3"]
    assert data["minpoly"] == ["1", "-57", "-289", "1"]
