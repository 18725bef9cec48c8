import itertools

import pytest

from parabolic_euler.diagonal_trees import (crossing_edges, enumerate_diagonal, is_diagonal, is_tree,
                                            own_sequence, restrict_to_wall)
from parabolic_euler.root_system import Root, WallSpec

EXAMPLE = ((Root(2, 3), Root(1, 2)), (Root(3, 2), Root(1, 3)))


@pytest.mark.parametrize("r,size", [(2, 1), (3, 2), (4, 6)])
def test_enumerated_basis_size_and_certificate(r, size):
    D = enumerate_diagonal(r)
    assert len(D) == size
    assert all(is_tree(t, r) for t in D)
    assert is_diagonal(D, r)


def test_example_basis_is_diagonal():
    assert is_diagonal(EXAMPLE, 3)


def test_enumeration_is_deterministic():
    assert enumerate_diagonal(4) == enumerate_diagonal(4)


def test_duplicate_tree_breaks_diagonality():
    D = enumerate_diagonal(3)
    assert not is_diagonal((D[0], D[0]), 3)


def test_wrong_count_is_not_diagonal():
    assert not is_diagonal(enumerate_diagonal(3)[:1], 3)


def test_is_tree_rejects_cycles():
    assert not is_tree((Root(1, 2), Root(2, 1)), 3)
    assert is_tree((Root(1, 2), Root(2, 3)), 3)


def test_flags_are_distinct():
    D = enumerate_diagonal(4)
    flags = [own_sequence(t, 4) for t in D]
    assert len(set(flags)) == len(flags)


def test_every_tree_crosses_a_wall_exactly_once_after_restriction():
    wall = WallSpec(frozenset({2}), frozenset({1, 3}), 0)
    items = restrict_to_wall(EXAMPLE, wall)
    assert items
    for tree, link in items:
        assert crossing_edges(tree, wall) == [link]


def test_all_orientations_of_a_diagonal_basis_stay_diagonal():
    D = enumerate_diagonal(3)
    for flips in itertools.product((False, True), repeat=4):
        trees = []
        it = iter(flips)
        for t in D:
            trees.append(tuple(Root(e.j, e.i) if next(it) else e for e in t))
        assert is_diagonal(tuple(trees), 3)
