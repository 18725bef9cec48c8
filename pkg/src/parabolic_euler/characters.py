"""Weight multiplicities and characters of GL_r irreducibles.

Gelfand–Tsetlin pattern counting is the primary algorithm; Freudenthal's
recursion is kept as an independent cross-check.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .root_system import CoVector, Vector, WallSpec, killing_norm2

CACHE_ENV = "PARABOLIC_EULER_CACHE"
CACHE_VERSION = 1


class InvalidWeight(ValueError):
    pass


def check_dominant(nu: Sequence[int]) -> tuple[int, ...]:
    nu = tuple(int(x) for x in nu)
    if len(nu) < 1 or any(nu[i] < nu[i + 1] for i in range(len(nu) - 1)):
        raise InvalidWeight(f"highest weight must be weakly decreasing: {nu}")
    return nu


def weyl_dimension(nu: Sequence[int]) -> int:
    r = len(nu)
    num, den = 1, 1
    for i in range(r):
        for j in range(i + 1, r):
            num *= nu[i] - nu[j] + j - i
            den *= j - i
    return num // den


# ---------------------------------------------------------------- Gelfand–Tsetlin


def _gt_rows(top: tuple[int, ...]):
    """All rows of length len(top)-1 interlacing top."""
    if len(top) == 1:
        yield ()
        return

    def rec(i, acc):
        if i == len(top) - 1:
            yield tuple(acc)
            return
        for x in range(top[i + 1], top[i] + 1):
            acc.append(x)
            yield from rec(i + 1, acc)
            acc.pop()

    yield from rec(0, [])


def weight_table_gt(nu: Sequence[int]) -> dict[tuple[int, ...], int]:
    nu = check_dominant(nu)
    table: dict[tuple[int, ...], int] = {}

    def rec(row, sums):
        # sums lists row sums from the current row upward
        if len(row) == 0:
            rs = list(reversed(sums))  # rs[k] = sum of row of length k (rs[0] = 0)
            mu = tuple(rs[k + 1] - rs[k] for k in range(len(nu)))
            table[mu] = table.get(mu, 0) + 1
            return
        for nxt in _gt_rows(row):
            rec(nxt, sums + [sum(nxt)])

    rec(nu, [sum(nu)])
    return table


# ---------------------------------------------------------------- Freudenthal


def _dominant_weights(nu: tuple[int, ...]) -> list[tuple[int, ...]]:
    r, total = len(nu), sum(nu)
    prefix = [sum(nu[: i + 1]) for i in range(r)]
    out = []

    def rec(i, acc, s):
        if i == r:
            if s == total:
                out.append(tuple(acc))
            return
        hi = acc[-1] if acc else nu[0]
        for x in range(hi, nu[-1] - 1, -1):
            if s + x > prefix[i]:
                continue
            acc.append(x)
            rec(i + 1, acc, s + x)
            acc.pop()

    rec(0, [], 0)
    return out


def weight_table_freudenthal(nu: Sequence[int]) -> dict[tuple[int, ...], int]:
    nu = check_dominant(nu)
    r = len(nu)
    rho2 = [r - 1 - 2 * i for i in range(r)]  # 2ρ keeps everything integral

    def ip(a, b):
        return sum(x * y for x, y in zip(a, b))

    dom = _dominant_weights(nu)
    dom.sort(key=lambda m: [-x for x in _partial(m)])
    mult: dict[tuple[int, ...], int] = {}
    top = tuple(nu)
    roots = [(i, j) for i in range(r) for j in range(i + 1, r)]

    def m_of(mu):
        return mult.get(tuple(sorted(mu, reverse=True)), 0)

    lam_rho = [2 * x + y for x, y in zip(nu, rho2)]
    for mu in dom:
        if mu == top:
            mult[mu] = 1
            continue
        mu_rho = [2 * x + y for x, y in zip(mu, rho2)]
        den = ip(lam_rho, lam_rho) - ip(mu_rho, mu_rho)
        acc = 0
        for i, j in roots:
            step = 1
            while True:
                w = list(mu)
                w[i] += step
                w[j] -= step
                if max(w) > nu[0] or min(w) < nu[-1]:
                    break
                mw = m_of(w)
                acc += mw * (w[i] - w[j])
                step += 1
        # |λ+ρ|²−|μ+ρ|² was scaled by 4 through the doubling
        value = Fraction(8 * acc, den)
        if value.denominator != 1:
            raise ArithmeticError(f"non-integral Freudenthal multiplicity at {mu}")
        if value:
            mult[mu] = int(value)
    table = {}
    for mu, m in mult.items():
        for w in set(_permutations(mu)):
            table[w] = m
    return table


def _partial(m):
    out, s = [], 0
    for x in m:
        s += x
        out.append(s)
    return out


def _permutations(mu):
    import itertools

    return itertools.permutations(mu)


# ---------------------------------------------------------------- cache


_lock = threading.Lock()
_memo: dict[tuple[int, ...], dict[tuple[int, ...], int]] = {}


def _cache_file() -> Path | None:
    d = os.environ.get(CACHE_ENV)
    return Path(d) / "weight_tables.json" if d else None


def _load_disk() -> dict:
    path = _cache_file()
    if path is None or not path.exists():
        return {}
    try:
        doc = json.loads(path.read_text())
        if doc.get("version") != CACHE_VERSION:
            return {}
        return doc.get("tables", {})
    except (OSError, ValueError, AttributeError):
        return {}


def _store_disk(key: tuple[int, ...], table: dict) -> None:
    path = _cache_file()
    if path is None:
        return
    try:
        tables = _load_disk()
        tables[json.dumps(list(key))] = [[list(mu), m] for mu, m in sorted(table.items())]
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"version": CACHE_VERSION, "tables": tables}))
        tmp.replace(path)
    except OSError:
        pass


def weight_table(nu: Sequence[int]) -> dict[tuple[int, ...], int]:
    nu = check_dominant(nu)
    hit = _memo.get(nu)
    if hit is not None:
        return hit
    with _lock:
        if nu in _memo:
            return _memo[nu]
        disk = _load_disk().get(json.dumps(list(nu)))
        table = None
        if disk is not None:
            try:
                table = {tuple(mu): int(m) for mu, m in disk}
                if sum(table.values()) != weyl_dimension(nu):
                    table = None
            except (TypeError, ValueError):
                table = None
        if table is None:
            table = weight_table_gt(nu)
            _store_disk(nu, table)
        _memo[nu] = table
        return table


# ---------------------------------------------------------------- character sums


@dataclass(frozen=True)
class CharacterSum:
    """Σ coeff · e^{⟨μ, x⟩} over sum-zero exponents μ."""

    terms: tuple[tuple[Fraction, CoVector], ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Fraction, CoVector]]) -> "CharacterSum":
        acc: dict[CoVector, Fraction] = {}
        for c, mu in pairs:
            acc[mu] = acc.get(mu, Fraction(0)) + Fraction(c)
        items = sorted(((c, mu) for mu, c in acc.items() if c), key=lambda t: t[1].coords, reverse=True)
        return cls(tuple(items))

    def map(self, f) -> "CharacterSum":
        return CharacterSum.from_pairs((c * f(mu), mu) for c, mu in self.terms)

    def __add__(self, other: "CharacterSum") -> "CharacterSum":
        return CharacterSum.from_pairs(self.terms + other.terms)

    def __mul__(self, other: "CharacterSum") -> "CharacterSum":
        return CharacterSum.from_pairs((a * b, m + n) for a, m in self.terms for b, n in other.terms)

    def scale(self, s) -> "CharacterSum":
        return CharacterSum.from_pairs((Fraction(s) * c, mu) for c, mu in self.terms)

    def value_at_zero(self) -> Fraction:
        return sum((c for c, _ in self.terms), Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(mu.coords) for _, mu in self.terms)

    def __len__(self) -> int:
        return len(self.terms)


def character(nu: Sequence[int]) -> CharacterSum:
    nu = check_dominant(nu)
    return CharacterSum.from_pairs((Fraction(m), CoVector.project(mu)) for mu, m in weight_table(nu).items())


def directional_derivative(phi: CharacterSum, v: Vector | CoVector) -> CharacterSum:
    return phi.map(lambda mu: mu.pair(v))


def hessian_trace(phi: CharacterSum) -> CharacterSum:
    return phi.map(killing_norm2)


def adams_twist(phi: CharacterSum, n: int) -> CharacterSum:
    if n < 1:
        raise ValueError("Adams twist needs n >= 1")
    return CharacterSum.from_pairs((c, n * mu) for c, mu in phi.terms)


def exponential(w: CoVector) -> CharacterSum:
    return CharacterSum(((Fraction(1), w),))


@dataclass(frozen=True)
class Branch:
    nu_prime: tuple[int, ...]
    nu_dprime: tuple[int, ...]
    multiplicity: int
    s: Fraction


def branch(nu: Sequence[int], wall: WallSpec) -> list[Branch]:
    """Restriction to GL_{r'} × GL_{r''} by peeling lexicographically top weights."""
    nu = check_dominant(nu)
    p = sorted(wall.prime)
    q = sorted(wall.dprime)
    r = len(nu)
    size = sum(nu)
    remaining: dict[tuple, int] = {}
    for mu, m in weight_table(nu).items():
        key = (tuple(mu[i - 1] for i in p), tuple(mu[i - 1] for i in q))
        remaining[key] = remaining.get(key, 0) + m
    out = []
    while remaining:
        a, b = max(remaining)
        mult = remaining[(a, b)]
        if mult < 0:
            raise ArithmeticError("negative multiplicity while branching")
        ta = weight_table(a)
        tb = weight_table(b)
        for wa, ma in ta.items():
            for wb, mb in tb.items():
                key = (wa, wb)
                remaining[key] = remaining.get(key, 0) - mult * ma * mb
                if remaining[key] == 0:
                    del remaining[key]
                elif remaining[key] < 0:
                    raise ArithmeticError("negative multiplicity while branching")
        s = sum((Fraction(x) - Fraction(size, r) for x in a), Fraction(0))
        out.append(Branch(a, b, mult, s))
    return out


def embed(phi_sub: CharacterSum, block: Sequence[int], r: int) -> CharacterSum:
    """Embed a character of a block subgroup (exponents indexed by sorted block) into V*."""
    block = sorted(block)

    def lift(mu: CoVector) -> CoVector:
        c = [Fraction(0)] * r
        for pos, i in enumerate(block):
            c[i - 1] = mu[pos]
        return CoVector(c)

    return CharacterSum.from_pairs((c, lift(mu)) for c, mu in phi_sub.terms)


def block_character(nu_block: Sequence[int], block: Sequence[int], r: int) -> CharacterSum:
    if len(nu_block) == 1:
        return CharacterSum(((Fraction(1), CoVector.zero(r)),))
    return embed(character(nu_block), block, r)


def central_twist(s: Fraction, wall: WallSpec) -> CoVector:
    """w = (s/r′)Σ_{Π′}x_i − (s/r″)Σ_{Π″}x_i."""
    r1, r2 = len(wall.prime), len(wall.dprime)
    c = [Fraction(0)] * wall.r
    for i in wall.prime:
        c[i - 1] = s / r1
    for i in wall.dprime:
        c[i - 1] = -s / r2
    return CoVector(c)


def hecke_shift_coefficients(nu: Sequence[int], side: str) -> list[tuple[CoVector, int]]:
    """Line-bundle shifts (μ_1,…,μ_{r−1},μ_r−|ν|) with weights m_μ μ_1 (minus) or m_μ μ_r (plus)."""
    nu = check_dominant(nu)
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    size = sum(nu)
    acc: dict[tuple[int, ...], int] = {}
    for mu, m in weight_table(nu).items():
        coeff = m * (mu[0] if side == "minus" else mu[-1])
        if coeff:
            shift = tuple(mu[:-1]) + (mu[-1] - size,)
            acc[shift] = acc.get(shift, 0) + coeff
    return [(CoVector(s), c) for s, c in sorted(acc.items(), reverse=True) if c]
