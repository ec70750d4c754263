from __future__ import annotations

from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorgv.exactarith import QQ, NumberField, Polynomial, RationalFunction, polynomial
from mirrorgv.series import (
    LogSeries,
    SeriesError,
    TruncatedSeries,
    TruncationError,
    series_of_ratfunc,
)

N = 12


def ts(coeffs, offset=0, order=N, var="x"):
    return TruncatedSeries(QQ, var, offset, [mpq(c) for c in coeffs] + [mpq(0)] * (order - offset - len(coeffs)), order)


def one():
    return TruncatedSeries.one(QQ, "x", N)


def x():
    return TruncatedSeries.x_power(QQ, "x", 1, N)


def test_mul_examples():
    p = (one() + x()) * (one() - x())
    assert [p.coefficient(k) for k in range(3)] == [1, 0, -1]


def test_div_offset_shift():
    q = (x() + x() * x()) / x()
    assert q.offset == 0 and q.coefficient(0) == 1 and q.coefficient(1) == 1


def test_mul_identity():
    w = ts([1, 5, 109, 3317])
    assert (w * one()).same_to_order(w)


def test_truncation_honesty():
    p = one() + x()
    with pytest.raises(TruncationError):
        p.coefficient(N)
    # product of short series cannot claim long validity
    a = ts([1, 1], order=4)
    b = ts([1, 2], order=9)
    assert (a * b).order == 4


def test_laurent_inverse():
    inv = (x() + x() * x()).inverse()
    assert inv.offset == -1
    assert [inv.coefficient(k) for k in range(-1, 3)] == [1, -1, 1, -1]
    assert inv.order == N - 2


def test_division_by_zero_leading():
    with pytest.raises(SeriesError):
        TruncatedSeries.zero(QQ, "x", N).inverse()


def test_compose_functional_identity():
    # exp(log(1+x)) = 1 + x through composition of the two series
    l = (one() + x()).log()
    e = x().exp()  # e^x
    assert e.compose(l).same_to_order(one() + x())


def test_compose_simple():
    f = ts([0, 0, 1])  # x^2
    g = ts([0, 1, 1])  # x + x^2
    h = f.compose(g)
    assert [h.coefficient(k) for k in range(5)] == [0, 0, 1, 2, 1]


def test_compose_laurent():
    # 1/x at x = q + 14 q^2 + 189 q^3 reproduces a unit Laurent adjustment
    g = ts([0, 1, 14, 189], var="q")
    h = x().inverse().compose(g)
    assert h.coefficient(-1) == 1
    assert h.coefficient(0) == -14


def test_revert_identity():
    assert x().revert().same_to_order(TruncatedSeries.x_power(QQ, "x", 1, N))


def test_revert_against_lagrange_inversion():
    # oracle: [q^n] g = (1/n) [x^(n-1)] (x / f)^n with Fraction arithmetic
    coeffs = [Fraction(0), Fraction(1), Fraction(1)]  # f = x + x^2

    def lagrange(n):
        # (x/f)^n = (1 + x)^(-n); coefficient of x^(n-1) = C(-n, n-1)
        num = Fraction(1)
        val = Fraction(0)
        # expand (1+x)^(-n) via binomial series
        term = Fraction(1)
        for k in range(0, n):
            if k == n - 1:
                val = term
            term = term * Fraction(-n - k, k + 1)
        return val / n

    g = (x() + x() * x()).revert()
    for n in range(1, 8):
        expect = lagrange(n)
        assert g.coefficient(n) == mpq(expect.numerator, expect.denominator)
    assert [g.coefficient(k) for k in range(1, 5)] == [1, -1, 2, -5]


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=5))
@settings(max_examples=40, deadline=None)
def test_revert_round_trip(tail):
    f = ts([0, 1] + tail, order=10)
    g = f.revert()
    assert f.compose(g).same_to_order(TruncatedSeries.x_power(QQ, "x", 1, 10))
    assert g.compose(f).same_to_order(TruncatedSeries.x_power(QQ, "x", 1, 10))


def test_revert_zero_linear_term():
    with pytest.raises(SeriesError):
        ts([0, 0, 1]).revert()


def test_explog_examples():
    assert TruncatedSeries.zero(QQ, "x", N).exp().same_to_order(one())
    l = (one() + x()).log()
    assert [l.coefficient(k) for k in range(1, 4)] == [mpq(1), mpq(-1, 2), mpq(1, 3)]
    assert l.exp().same_to_order(one() + x())


def test_exp_requires_no_constant():
    with pytest.raises(SeriesError):
        (one() + x()).exp()
    with pytest.raises(SeriesError):
        (x() + 2).log()


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=6), st.lists(st.integers(-9, 9), min_size=1, max_size=6))
@settings(max_examples=40, deadline=None)
def test_mul_div_round_trip(ac, bc):
    f = ts(ac, order=10)
    g = ts([1] + bc, order=10)
    assert ((f * g) / g).same_to_order(f, upto=8)


def test_theta_is_derivation():
    a = ts([1, 2, 0, 5])
    b = ts([3, 0, 7])
    assert (a * b).theta().same_to_order(a.theta() * b + a * b.theta())


def test_theta_frames():
    # theta_x(x^n) = n x^n at c = 0
    f = ts([0, 0, 0, 1])
    assert f.theta().same_to_order(f.scale(3))
    # (s+3) d/ds applied to s
    s = TruncatedSeries.x_power(QQ, "s", 1, N)
    t = s.theta(mpq(3))
    assert t.coefficient(0) == 3 and t.coefficient(1) == 1
    # theta log s = 1 at c = 0
    ls = LogSeries([TruncatedSeries.zero(QQ, "s", N), TruncatedSeries.one(QQ, "s", N)])
    th = ls.theta()
    assert th.part(0).coefficient(0) == 1
    assert th.part(1).is_zero()


def test_log_series_div_rejects_log_divisor():
    ls = LogSeries([one(), one()])
    with pytest.raises(SeriesError):
        ls / ls


def test_series_over_number_field():
    field = NumberField([1, -57, -289, 1])
    a = field.gen
    s = TruncatedSeries(field, "s", 0, [field.one, a, a * a] + [field.zero] * 5, 8)
    inv = s.inverse()
    assert (s * inv).same_to_order(TruncatedSeries.one(field, "s", 8))


def test_ratfunc_expansion_with_pole():
    dis = polynomial(1, -57, -289, 1)
    C = RationalFunction(polynomial(42, -14), Polynomial([0, 0, 0, 1]) * dis)
    s = series_of_ratfunc(C, QQ, "x", 6)
    assert s.offset == -3 and s.coefficient(-3) == 42


def test_serialization_shape():
    s = ts([1, 0, mpq(-1, 2)], offset=0, order=5)
    data = s.serialize()
    assert data == {
        "variable": "x",
        "offset": 0,
        "truncation_order": 5,
        "coefficients": ["1", "0", "-1/2", "0", "0"],
    }
