"""Ordered spanning trees of K_r and diagonal bases."""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Sequence

from .root_system import Root, RootSystemError, WallSpec

OrderedTree = tuple  # tuple[Root, ...]
Partition = frozenset  # frozenset[frozenset[int]]


class NotATree(RootSystemError):
    pass


class SearchExhausted(RuntimeError):
    pass


def _find(parent: dict, x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def is_tree(edges: Sequence[Root], r: int) -> bool:
    if len(edges) != r - 1:
        return False
    parent = {v: v for v in range(1, r + 1)}
    for e in edges:
        if max(e.i, e.j) > r:
            return False
        a, b = _find(parent, e.i), _find(parent, e.j)
        if a == b:
            return False
        parent[a] = b
    return True


def _blocks(r: int, edges: Iterable[Root]) -> Partition:
    parent = {v: v for v in range(1, r + 1)}
    for e in edges:
        a, b = _find(parent, e.i), _find(parent, e.j)
        parent[a] = b
    groups: dict[int, set[int]] = {}
    for v in range(1, r + 1):
        groups.setdefault(_find(parent, v), set()).add(v)
    return frozenset(frozenset(g) for g in groups.values())


def partition_sequence(t: Sequence[Root], ordering: Sequence[int] | None = None,
                       r: int | None = None) -> tuple[Partition, ...]:
    """The j-th partition is generated by the first j−1 edges in the given order."""
    r = r if r is not None else len(t) + 1
    if not is_tree(t, r):
        raise NotATree(f"{t} is not a spanning tree of K_{r}")
    order = list(ordering) if ordering is not None else list(range(len(t)))
    edges = [t[p] for p in order]
    return tuple(_blocks(r, edges[:j]) for j in range(r))


def reordered_sequences(t: Sequence[Root], r: int | None = None) -> frozenset:
    r = r if r is not None else len(t) + 1
    return frozenset(partition_sequence(t, p, r) for p in itertools.permutations(range(len(t))))


def own_sequence(t: Sequence[Root], r: int | None = None) -> tuple[Partition, ...]:
    """Flag attached to an ordered tree, read from the innermost residue variable outward."""
    return partition_sequence(t, list(reversed(range(len(t)))), r)


def is_diagonal(candidate: Iterable[Sequence[Root]], r: int | None = None) -> bool:
    """Each member's own flag avoids every reordering of every other member."""
    trees = [tuple(t) for t in candidate]
    if not trees:
        return False
    r = r if r is not None else len(trees[0]) + 1
    if len(set(trees)) != len(trees) or len(trees) != _factorial(r - 1):
        return False
    if not all(is_tree(t, r) for t in trees):
        return False
    flags = [own_sequence(t, r) for t in trees]
    sets = [reordered_sequences(t, r) for t in trees]
    for a in range(len(trees)):
        for b in range(len(trees)):
            if a != b and flags[b] in sets[a]:
                return False
    return True


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _undirected_trees(r: int) -> list[tuple[Root, ...]]:
    edges = [Root(i, j) for i in range(1, r + 1) for j in range(i + 1, r + 1)]
    return [c for c in itertools.combinations(edges, r - 1) if is_tree(c, r)]


@lru_cache(maxsize=None)
def enumerate_diagonal(r: int) -> tuple[tuple[Root, ...], ...]:
    """Deterministic backtracking search for one diagonal basis.

    Orientation does not affect diagonality, so every edge is taken as α^{ij}
    with i < j; the search runs over (tree, edge order) in lexicographic order.
    """
    if not 2 <= r <= 5:
        raise ValueError("enumerate_diagonal supports 2 <= r <= 5")
    need = _factorial(r - 1)
    candidates = []
    for tree in _undirected_trees(r):
        for perm in itertools.permutations(tree):
            candidates.append(perm)
    flag = {c: own_sequence(c, r) for c in candidates}
    reord: dict = {}
    for c in candidates:
        key = frozenset(e.edge for e in c)
        if key not in reord:
            reord[key] = reordered_sequences(c, r)

    def members(c):
        return reord[frozenset(e.edge for e in c)]

    chosen: list = []

    def compatible(c) -> bool:
        for d in chosen:
            if flag[c] in members(d) or flag[d] in members(c):
                return False
        return True

    def search(start: int) -> bool:
        if len(chosen) == need:
            return True
        for idx in range(start, len(candidates)):
            c = candidates[idx]
            if compatible(c):
                chosen.append(c)
                if search(idx + 1):
                    return True
                chosen.pop()
        return False

    if not search(0):
        raise SearchExhausted(f"no diagonal basis found for r={r}")
    return tuple(chosen)


def crossing_edges(t: Sequence[Root], wall: WallSpec) -> list[int]:
    return [p for p, e in enumerate(t) if (e.i in wall.prime) != (e.j in wall.prime)]


def restrict_to_wall(D: Iterable[Sequence[Root]], wall: WallSpec) -> list[tuple[tuple[Root, ...], int]]:
    """Trees with exactly one edge crossing (Π′, Π″), paired with that link position.

    A spanning tree with a single crossing edge automatically restricts to
    spanning trees of both blocks.
    """
    out = []
    for t in D:
        cross = crossing_edges(t, wall)
        if len(cross) == 1:
            out.append((tuple(t), cross[0]))
    return out
