from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from parabolic_euler.root_system import (CoVector, InvalidRank, Root, RootSystemError, WallSpec, bracket,
                                         classify_chamber, combine, expand_in_basis, in_simplex, is_regular,
                                         lattice_point, permute, perm_sign, rho, transposition, v_det)
from parabolic_euler.diagonal_trees import enumerate_diagonal

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=12)


@st.composite
def covectors(draw, r=None):
    r = r or draw(st.integers(2, 5))
    return CoVector.project(draw(st.lists(fractions, min_size=r, max_size=r)))


@given(covectors(r=3), covectors(r=3), fractions)
def test_linear_operations_stay_sum_zero(a, b, s):
    for v in (a + b, a - b, -a, a * s):
        assert sum(v) == 0
    assert (a + b) - b == a


@given(st.lists(fractions, min_size=2, max_size=5))
def test_project_is_idempotent(values):
    p = CoVector.project(values)
    assert CoVector.project(p.coords) == p


def test_rank_and_sum_validation():
    with pytest.raises(InvalidRank):
        CoVector([0])
    with pytest.raises(RootSystemError):
        CoVector([1, 0])
    with pytest.raises(RootSystemError):
        lattice_point([Fraction(1, 2), Fraction(-1, 2)])


@st.composite
def basis_and_point(draw):
    r = draw(st.integers(2, 4))
    D = enumerate_diagonal(r)
    B = D[draw(st.integers(0, len(D) - 1))]
    return B, draw(covectors(r=r))


@given(basis_and_point())
def test_bracket_splits_into_lattice_and_fractional_part(case):
    B, a = case
    integral, frac = bracket(a, B)
    assert integral + frac == a
    assert all(x.denominator == 1 for x in expand_in_basis(integral, B))
    assert all(0 <= x < 1 for x in expand_in_basis(frac, B))


@given(basis_and_point())
def test_expand_then_combine_round_trips(case):
    B, a = case
    assert combine(B, expand_in_basis(a, B), a.r) == a


def test_root_covector_and_flip():
    a = Root(1, 3).covector(3)
    assert a.coords == (1, 0, -1)
    assert Root(3, 1).covector(3) == -a
    with pytest.raises(RootSystemError):
        Root(2, 2)


def test_rho_and_vdet():
    assert rho(3).coords == (1, 0, -1)
    assert rho(2).coords == (Fraction(1, 2), Fraction(-1, 2))
    assert sum(v_det(3, 2)) == 0


def test_regularity_and_simplex():
    c = CoVector([Fraction(1, 5), Fraction(1, 10), Fraction(-3, 10)])
    assert is_regular(c) and in_simplex(c)
    assert not is_regular(CoVector([Fraction(1, 2), Fraction(1, 2), -1]))
    assert not in_simplex(CoVector([Fraction(-1, 5), Fraction(1, 5)]))


def test_wall_spec_validation():
    WallSpec(frozenset({2}), frozenset({1, 3}), 0)
    with pytest.raises(RootSystemError):
        WallSpec(frozenset({3}), frozenset({1, 2}), 0)
    with pytest.raises(RootSystemError):
        WallSpec(frozenset({1}), frozenset({3}), 0)


def test_classify_chamber_finds_single_wall():
    gt = CoVector([Fraction(1, 5), Fraction(1, 10), Fraction(-3, 10)])
    lt = CoVector([Fraction(2, 5), Fraction(-1, 10), Fraction(-3, 10)])
    assert classify_chamber(gt, gt) == []
    assert classify_chamber(gt, lt) == [WallSpec(frozenset({2}), frozenset({1, 3}), 0)]
    assert classify_chamber(lt, gt) == classify_chamber(gt, lt)


@given(st.permutations(range(4)), covectors(r=4))
def test_permutation_preserves_norm(perm, a):
    b = permute(perm, a)
    assert sorted(b.coords) == sorted(a.coords)
    assert perm_sign(transposition(4, 1, 3)) == -1
