"""Exact linear algebra of type A_{r-1}.

Covectors live in V* (sum-zero rational r-tuples), vectors in V = R^r / R(1,...,1)
represented by their sum-zero lift.  The Killing form K is ½Σx_i² on that lift,
so the Killing dual of a covector has the same coordinates.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


class RootSystemError(ValueError):
    pass


class InvalidRank(RootSystemError):
    pass


class SingularBasis(RootSystemError):
    pass


class IrregularWeight(RootSystemError):
    pass


class ConventionError(RootSystemError):
    pass


def _frac_tuple(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class CoVector:
    coords: tuple[Fraction, ...]

    def __init__(self, coords: Iterable):
        c = _frac_tuple(coords)
        if len(c) < 2:
            raise InvalidRank(f"rank must be at least 2, got {len(c)}")
        if sum(c) != 0:
            raise RootSystemError(f"coordinates must sum to zero: {c}")
        object.__setattr__(self, "coords", c)

    @classmethod
    def project(cls, values: Sequence) -> "CoVector":
        """Sum-zero projection of an arbitrary r-tuple."""
        v = _frac_tuple(values)
        mean = sum(v) / len(v)
        return cls(x - mean for x in v)

    @classmethod
    def zero(cls, r: int) -> "CoVector":
        return cls([0] * r)

    @property
    def r(self) -> int:
        return len(self.coords)

    def __add__(self, other: "CoVector") -> "CoVector":
        return CoVector(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "CoVector") -> "CoVector":
        return CoVector(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "CoVector":
        return CoVector(-a for a in self.coords)

    def __mul__(self, s) -> "CoVector":
        s = Fraction(s)
        return CoVector(s * a for a in self.coords)

    __rmul__ = __mul__

    def pair(self, v: "Vector | CoVector") -> Fraction:
        return sum((a * b for a, b in zip(self.coords, v.coords)), Fraction(0))

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.coords)

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self) -> str:
        return "CoVector(" + ", ".join(str(a) for a in self.coords) + ")"


@dataclass(frozen=True)
class Vector:
    coords: tuple[Fraction, ...]

    def __init__(self, coords: Iterable):
        c = _frac_tuple(coords)
        mean = sum(c) / len(c)
        object.__setattr__(self, "coords", tuple(x - mean for x in c))

    @property
    def r(self) -> int:
        return len(self.coords)


LatticePoint = CoVector


def lattice_point(coords: Iterable[int]) -> CoVector:
    c = CoVector(coords)
    if not c.is_integral():
        raise RootSystemError(f"lattice point must be integral: {c}")
    return c


@dataclass(frozen=True, order=True)
class Root:
    """α^{ij} = x_i − x_j with 1-based indices."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j or self.i < 1 or self.j < 1:
            raise RootSystemError(f"invalid root indices ({self.i}, {self.j})")

    def covector(self, r: int) -> CoVector:
        if max(self.i, self.j) > r:
            raise RootSystemError(f"root {self} out of range for r={r}")
        c = [0] * r
        c[self.i - 1] = 1
        c[self.j - 1] = -1
        return CoVector(c)

    def flipped(self) -> "Root":
        return Root(self.j, self.i)

    @property
    def edge(self) -> frozenset[int]:
        return frozenset((self.i, self.j))

    def __repr__(self) -> str:
        return f"a{self.i}{self.j}"


OrderedBasis = tuple  # tuple[Root, ...] of length r - 1


@dataclass(frozen=True)
class WallSpec:
    prime: frozenset[int]
    dprime: frozenset[int]
    level: int

    def __post_init__(self):
        if not self.prime or not self.dprime or self.prime & self.dprime:
            raise RootSystemError("wall partition must be two disjoint nonempty sets")
        r = len(self.prime) + len(self.dprime)
        if self.prime | self.dprime != frozenset(range(1, r + 1)):
            raise RootSystemError("wall partition must cover 1..r")
        if r not in self.dprime:
            raise RootSystemError("r must lie in the second block")

    @property
    def r(self) -> int:
        return len(self.prime) + len(self.dprime)

    def side_value(self, c: CoVector) -> Fraction:
        return sum((c[i - 1] for i in self.prime), Fraction(0))


def rho(r: int) -> CoVector:
    if r < 2:
        raise InvalidRank(f"rank must be at least 2, got {r}")
    return CoVector(Fraction(r - 1 - 2 * i, 2) for i in range(r))


def positive_roots(r: int) -> list[Root]:
    return [Root(i, j) for i in range(1, r + 1) for j in range(i + 1, r + 1)]


def killing_dual(a: CoVector) -> Vector:
    return Vector(a.coords)


def killing_norm2(a: CoVector) -> Fraction:
    return sum((x * x for x in a.coords), Fraction(0))


def v_det(r: int, size: int) -> CoVector:
    """(1,…,1,1−r)·|ν|/r."""
    return CoVector([Fraction(size, r)] * (r - 1) + [Fraction(size * (1 - r), r)])


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(matrix)
    m = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            raise SingularBasis("basis is singular")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [m[i][n] for i in range(n)]


@lru_cache(maxsize=None)
def _basis_inverse(B: tuple[Root, ...], r: int) -> tuple[tuple[Fraction, ...], ...]:
    # columns are basis covectors restricted to the first r-1 coordinates
    n = r - 1
    if len(B) != n:
        raise SingularBasis(f"need {n} roots, got {len(B)}")
    cols = [b.covector(r).coords[:n] for b in B]
    mat = [[cols[j][i] for j in range(n)] for i in range(n)]
    inv_cols = []
    for e in range(n):
        unit = [Fraction(int(i == e)) for i in range(n)]
        inv_cols.append(_solve(mat, unit))
    return tuple(tuple(inv_cols[e][j] for e in range(n)) for j in range(n))


def expand_in_basis(a: CoVector, B: Sequence[Root]) -> tuple[Fraction, ...]:
    """Coefficients t with a = Σ t_j β^[j]."""
    r = a.r
    inv = _basis_inverse(tuple(B), r)
    head = a.coords[: r - 1]
    return tuple(sum((row[i] * head[i] for i in range(r - 1)), Fraction(0)) for row in inv)


def combine(B: Sequence[Root], t: Sequence, r: int) -> CoVector:
    out = CoVector.zero(r)
    for b, s in zip(B, t):
        if s:
            out = out + Fraction(s) * b.covector(r)
    return out


def basis_determinant(B: Sequence[Root], r: int) -> Fraction:
    n = r - 1
    m = [[b.covector(r).coords[i] for b in B] for i in range(n)]
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for i in range(col + 1, n):
            f = m[i][col] / m[col][col]
            m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return det


def bracket(a: CoVector, B: Sequence[Root]) -> tuple[CoVector, CoVector]:
    t = expand_in_basis(a, B)
    fl = [math.floor(x) for x in t]
    integral = combine(B, fl, a.r)
    return integral, a - integral


def is_regular(c: CoVector) -> bool:
    r = c.r
    for size in range(1, r):
        for sub in itertools.combinations(range(r), size):
            if sum(c[i] for i in sub).denominator == 1:
                return False
    return True


def in_simplex(c: CoVector) -> bool:
    return all(c[i] > c[i + 1] for i in range(c.r - 1)) and c[0] - c[-1] < 1


def permute(perm: Sequence[int], a: CoVector) -> CoVector:
    """Move coordinate i to position perm[i] (0-based)."""
    out = [Fraction(0)] * a.r
    for i, p in enumerate(perm):
        out[p] = a[i]
    return CoVector(out)


def transposition(r: int, i: int, j: int) -> tuple[int, ...]:
    """s_{ij} with 1-based indices."""
    p = list(range(r))
    p[i - 1], p[j - 1] = p[j - 1], p[i - 1]
    return tuple(p)


def perm_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, set()
    for start in range(len(perm)):
        if start in seen:
            continue
        length, x = 0, start
        while x not in seen:
            seen.add(x)
            x = perm[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def affine_weyl_act(element, k: int, lam: CoVector, vdet: CoVector) -> CoVector:
    """Permutations act by σ(λ+ρ+v_det) − ρ − v_det, lattice points by λ + (k+r)γ."""
    r = lam.r
    if isinstance(element, CoVector):
        return lam + (k + r) * element
    shift = rho(r) + vdet
    out = permute(element, lam + shift) - shift
    if not out.is_integral():
        raise ConventionError(f"non-integral affine Weyl image {out}")
    return out


def theta_points(k: int, r: int) -> tuple[CoVector, CoVector, CoVector, CoVector]:
    """(θ_1[k], θ_{-1}[k], θ_1, θ_{-1})."""
    e_last = [Fraction(0)] * r
    e_last[-1] = Fraction(1)
    e_first = [Fraction(0)] * r
    e_first[0] = Fraction(1)
    th1 = CoVector(Fraction(1, r) - x for x in e_last)
    thm1 = CoVector(x - Fraction(1, r) for x in e_first)
    kh = k + r
    return kh * th1 - rho(r), kh * thm1 - rho(r), th1, thm1


def nontrivial_partitions(r: int) -> list[tuple[frozenset[int], frozenset[int]]]:
    out = []
    rest = list(range(1, r))
    for size in range(1, r):
        for sub in itertools.combinations(rest, size):
            p = frozenset(sub)
            out.append((p, frozenset(range(1, r + 1)) - p))
    return out


def classify_chamber(c1: CoVector, c2: CoVector) -> list[WallSpec]:
    """Walls separating two regular weights; an empty list means the same chamber."""
    if not (is_regular(c1) and is_regular(c2)):
        raise IrregularWeight("classify_chamber needs regular weights")
    walls = []
    for p, q in nontrivial_partitions(c1.r):
        s1 = sum(c1[i - 1] for i in p)
        s2 = sum(c2[i - 1] for i in p)
        lo, hi = sorted((s1, s2))
        for level in range(math.floor(lo) + 1, math.floor(hi) + 1):
            walls.append(WallSpec(p, q, level))
    return walls
