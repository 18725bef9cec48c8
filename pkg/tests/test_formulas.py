from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from parabolic_euler import formulas as fm
from parabolic_euler.oracles import verlinde_su2
from parabolic_euler.root_system import CoVector, WallSpec, in_simplex, is_regular, lattice_point

C2 = CoVector([Fraction(3, 10), Fraction(-3, 10)])
C3_GT = CoVector([Fraction(1, 5), Fraction(1, 10), Fraction(-3, 10)])
C3_LT = CoVector([Fraction(2, 5), Fraction(-1, 10), Fraction(-3, 10)])
WALL = WallSpec(frozenset({2}), frozenset({1, 3}), 0)
RANK2_NUS = [(1, 0), (2, 0), (2, 1), (3, 1)]


def q2(g, k, lam, nu=None):
    return fm.EulerQuery(g, k, lattice_point([lam, -lam]), C2, nu)


@given(st.integers(2, 3), st.integers(1, 4), st.integers(-3, 5), st.sampled_from(RANK2_NUS))
def test_rank2_jet_path_matches_closed_form(g, k, lam, nu):
    value = fm.chi_vector(q2(g, k, lam, nu)).value
    assert isinstance(value, int)
    assert value == fm.rank2_closed(g, k, lam, nu)


def test_rank2_displayed_exponent_disagrees():
    assert fm.chi_vector(q2(2, 1, 0, (1, 0))).value != fm.rank2_closed(2, 1, 0, (1, 0), literal_exponent=True)


@given(st.integers(2, 3), st.integers(1, 4), st.integers(0, 4))
def test_line_bundle_matches_verlinde_oracle(g, k, lam):
    assume(lam <= k)
    assert fm.chi_line(q2(g, k, lam)).value == verlinde_su2(g, k, 2 * lam)


@given(st.integers(2, 3), st.integers(1, 3), st.integers(-2, 2))
def test_trivial_weight_vanishes(g, k, lam):
    assert fm.chi_vector(q2(g, k, lam, (0, 0))).value == 0


@given(st.integers(1, 3), st.integers(-2, 3), st.sampled_from(RANK2_NUS), st.sampled_from(RANK2_NUS))
def test_multi_is_symmetric_in_weights(k, lam, a, b):
    q = q2(2, k, lam)
    assert fm.chi_multi(q, [a, b]).value == fm.chi_multi(q, [b, a]).value


@given(st.integers(1, 3), st.integers(-2, 3), st.sampled_from(RANK2_NUS))
def test_multi_with_trivial_factor_vanishes(k, lam, a):
    assert fm.chi_multi(q2(2, k, lam), [a, (0, 0)]).value == 0


@given(st.integers(1, 3), st.integers(-2, 3), st.sampled_from(RANK2_NUS))
def test_single_multi_equals_vector(k, lam, nu):
    assert fm.chi_multi(q2(2, k, lam), [nu]).value == fm.chi_vector(q2(2, k, lam, nu)).value


@given(st.integers(1, 3), st.integers(-2, 3), st.sampled_from([(1, 0), (2, 0), (2, 1)]))
def test_wedge_square_is_integral(k, lam, nu):
    assert isinstance(fm.chi_wedge2(q2(2, k, lam, nu)), int)


@settings(max_examples=8)
@given(st.fractions(min_value=Fraction(-1, 30), max_value=Fraction(1, 30), max_denominator=97),
       st.fractions(min_value=Fraction(-1, 30), max_value=Fraction(1, 30), max_denominator=97))
def test_chi_is_constant_on_chambers(a, b):
    c = C3_GT + CoVector.project([a, b, 0])
    assume(is_regular(c) and in_simplex(c) and fm.chamber_key(c) == fm.chamber_key(C3_GT))
    lam = lattice_point([1, -2, 1])
    assert fm.chi_vector(fm.EulerQuery(2, 1, lam, c, (1, 0, 0))).value == \
        fm.chi_vector(fm.EulerQuery(2, 1, lam, C3_GT, (1, 0, 0))).value


@pytest.mark.parametrize("lam", [(-3, 2, 1), (0, 3, -3), (0, 0, 0)])
def test_wall_crossing_from_either_side(lam):
    L = lattice_point(lam)
    nu = (1, 0, 0)
    gt = fm.chi_vector(fm.EulerQuery(2, 1, L, C3_GT, nu)).value
    lt = fm.chi_vector(fm.EulerQuery(2, 1, L, C3_LT, nu)).value
    assert fm.wallcross_residue(2, 1, L, nu, WALL, C3_GT) == gt - lt
    assert fm.wallcross_residue(2, 1, L, nu, WALL, C3_LT) == lt - gt
    assert fm.example_rank3(2, 1, L, "diff") == lt - gt


def test_wall_crossing_tree_sets_agree():
    L = lattice_point((-2, 3, -1))
    nu = (1, 0, 0)
    restricted = fm.wallcross_residue(2, 1, L, nu, WALL, C3_GT)
    assert fm.wallcross_residue(2, 1, L, nu, WALL, C3_GT, trees="product") == restricted
    assert fm.wallcross_corollary(2, 1, L, nu, WALL, C3_GT, prefactor="plain") == restricted
    assert fm.wallcross_corollary(2, 1, L, nu, WALL, C3_GT, prefactor="literal") == 4 * restricted


def test_non_adjacent_point_rejected():
    far = WallSpec(frozenset({2}), frozenset({1, 3}), 1)
    with pytest.raises(fm.InconsistentWall):
        fm.wallcross_residue(2, 1, lattice_point((0, 0, 0)), (1, 0, 0), far, C3_GT)


def test_across_wall_lands_in_neighbouring_chamber():
    other = fm.across_wall(C3_GT, WALL)
    assert fm.chamber_key(other) == fm.chamber_key(C3_LT)


@given(st.integers(2, 3), st.integers(1, 3), st.integers(-2, 2), st.integers(-2, 2), st.sampled_from([(1, 0), (2, 1)]))
def test_two_point_chamber_difference(g, k, lam, mu, nu):
    lhs = fm.rank2_two_point(g, k, lam, mu, nu, ">") - fm.rank2_two_point(g, k, lam, mu, nu, "<")
    assert lhs == fm.chamber_difference_rhs(g, k, lam, mu, nu)


def test_antisymmetry_minus_sign_fails_somewhere():
    g, k, lam, mu, nu = 2, 1, 0, 1, (1, 0)
    lhs = fm.rank2_two_point(g, k, lam, mu, nu, "<")
    rest = -fm.rank2_two_point(g, k, lam, -mu + k + 1, nu, "<")
    assert lhs == rest - fm.antisymmetry_correction(g, k, lam, mu, nu, "<", plus=True)
    assert lhs != rest - fm.antisymmetry_correction(g, k, lam, mu, nu, "<")


def test_basis_pairing_matches_jet_path():
    q = fm.EulerQuery(2, 1, lattice_point((1, -3, 2)), C3_GT, (1, 0, 0))
    assert fm.chi_vector_explicit(q, "basis").value == fm.chi_vector(q).value


def test_example_displays_match_chambers():
    L = lattice_point((1, -3, 2))
    assert fm.example_rank3(2, 1, L, "<") == fm.chi_vector(fm.EulerQuery(2, 1, L, C3_LT, (1, 0, 0))).value
    assert fm.example_rank3(2, 1, L, ">") == fm.chi_vector(fm.EulerQuery(2, 1, L, C3_GT, (1, 0, 0))).value


@pytest.mark.parametrize("kwargs", [{"g": 0}, {"k": 0}, {"c": CoVector([0, 0])},
                                    {"lam": CoVector([Fraction(1, 2), Fraction(-1, 2)])}])
def test_invalid_queries(kwargs):
    base = {"g": 2, "k": 1, "lam": lattice_point([0, 0]), "c": C2}
    base.update(kwargs)
    with pytest.raises(fm.InvalidQuery):
        fm.EulerQuery(**base)


def test_window_enlargement_is_checked():
    before = fm.COUNTERS["stability_checks"]
    fm.chi_vector(q2(2, 1, 0, (1, 0)))
    assert fm.COUNTERS["stability_checks"] > before
