import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from parabolic_euler import characters as ch
from parabolic_euler.characters import (InvalidWeight, adams_twist, branch, character, hessian_trace,
                                        weight_table, weight_table_freudenthal, weight_table_gt, weyl_dimension)
from parabolic_euler.root_system import CoVector, WallSpec, permute


@st.composite
def dominant(draw, max_r=4, max_part=3):
    r = draw(st.integers(2, max_r))
    parts = sorted(draw(st.lists(st.integers(0, max_part), min_size=r, max_size=r)), reverse=True)
    shift = draw(st.integers(-1, 1))
    return tuple(p + shift for p in parts)


@given(dominant())
def test_gt_matches_freudenthal(nu):
    assert weight_table_gt(nu) == weight_table_freudenthal(nu)


@given(dominant())
def test_character_at_zero_is_weyl_dimension(nu):
    assert character(nu).value_at_zero() == weyl_dimension(nu)
    assert sum(weight_table(nu).values()) == weyl_dimension(nu)


@given(dominant())
def test_weights_are_permutation_invariant(nu):
    table = weight_table(nu)
    for mu, m in table.items():
        for perm in itertools.permutations(mu):
            assert table[perm] == m
        assert sum(mu) == sum(nu)


@given(dominant(max_r=3), st.permutations(range(3)))
def test_character_sum_is_weyl_symmetric(nu, perm):
    if len(nu) != 3:
        return
    phi = character(nu)
    moved = ch.CharacterSum.from_pairs((c, permute(perm, mu)) for c, mu in phi.terms)
    assert moved == phi


@given(dominant(max_r=3))
def test_adams_twist_keeps_dimension(nu):
    assert adams_twist(character(nu), 2).value_at_zero() == weyl_dimension(nu)


def test_standard_representation():
    phi = character((1, 0, 0))
    assert len(phi) == 3
    assert hessian_trace(phi).value_at_zero() == 2


def test_two_form_example_trace_hessian():
    phi = character((1, 0, 0))
    # trHess φ = (2/3) φ for the standard representation of SL_3
    assert hessian_trace(phi) == phi.scale(Fraction(2, 3))


def test_non_dominant_weight_rejected():
    with pytest.raises(InvalidWeight):
        character((0, 1))


@given(dominant(max_r=4, max_part=2))
def test_branching_dimensions_add_up(nu):
    r = len(nu)
    wall = WallSpec(frozenset({1}), frozenset(range(2, r + 1)), 0)
    total = sum(b.multiplicity * weyl_dimension(b.nu_prime) * weyl_dimension(b.nu_dprime) for b in branch(nu, wall))
    assert total == weyl_dimension(nu)


def test_disk_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv(ch.CACHE_ENV, str(tmp_path))
    monkeypatch.setattr(ch, "_memo", {})
    first = weight_table((3, 1, 0))
    assert (tmp_path / "weight_tables.json").exists()
    monkeypatch.setattr(ch, "_memo", {})
    assert weight_table((3, 1, 0)) == first


def test_corrupt_cache_is_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv(ch.CACHE_ENV, str(tmp_path))
    (tmp_path / "weight_tables.json").write_text("{not json")
    monkeypatch.setattr(ch, "_memo", {})
    assert sum(weight_table((2, 0, 0)).values()) == 6
