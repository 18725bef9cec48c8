from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from parabolic_euler import laurent as L
from parabolic_euler.laurent import JetScalar, NestedLaurent

small = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def test_delta_squares_to_zero():
    d = JetScalar.delta(0)
    assert d * d == JetScalar.scalar(0)
    assert (1 + d) * (1 + d) == JetScalar({0: 1, 1: 2})
    assert JetScalar.delta(0) * JetScalar.delta(1) == JetScalar({3: 1})


def test_bernoulli_numbers():
    assert [L.bernoulli(n) for n in range(5)] == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30)]


@given(small, small)
def test_residue_of_simple_pole_times_exponential(a, b):
    prec = (4, 4)
    f = NestedLaurent.monomial_y((-1, -1), 1, prec) * L.exp_linear([a, b], prec)
    assert L.iterated_residue(f) == JetScalar.scalar(1)


@given(small, st.integers(1, 4))
def test_higher_pole_picks_taylor_coefficient(a, m):
    prec = (m + 3,)
    f = NestedLaurent.monomial_y((-m - 1,), 1, prec) * L.exp_linear([a], prec)
    assert L.iterated_residue(f)[0] == a ** m / factorial(m)


@given(small, st.integers(1, 5))
def test_q_factor_residue(a, k):
    # Res y^{-1} e^{ay} / (1 - e^{ky}) = 1/2 - a/k
    prec = (6,)
    f = NestedLaurent.monomial_y((-1,), 1, prec) * L.q_factor(0, k, prec, n=1) * L.exp_linear([a], prec)
    assert L.iterated_residue(f)[0] == Fraction(1, 2) - a / k


@given(small, small)
def test_residue_of_product_matches_full_product(a, b):
    prec = (5, 5)
    left = NestedLaurent.monomial_y((-2, -1), 1, prec) * L.exp_linear([a, 0], prec)
    right = L.exp_linear([b, a], prec)
    assert L.residue_of_product(left, right) == L.iterated_residue(left * right)


def test_nested_order_matters():
    # y_2 is innermost: Res_{y_1} Res_{y_2} 1/(y_2 (y_1 + y_2)) expands in y_2/y_1
    prec = (6, 6)
    f = NestedLaurent.monomial_y((0, -1), 1, prec) * L.linear_form_power([1, 1], -1, prec)
    assert L.iterated_residue(f)[0] == 1


def test_window_too_small_is_detected():
    a = NestedLaurent.monomial_y((-3,), 1, (0,))
    with pytest.raises(L.InsufficientWindow):
        L.residue_of_product(a, L.exp_linear([1], (0,)))


def test_chart_round_trip():
    e = (2, -1, 3)
    assert L.t_to_y(L.y_to_t(e)) == e
