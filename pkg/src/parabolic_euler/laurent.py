"""Exact truncated Laurent series in residue coordinates y_1..y_n over jet scalars.

The expansion region is |y_1| >> |y_2| >> ... >> |y_n|.  Internally every series
is stored in the chart y_j = t_1 t_2 ... t_j, where a linear form with leading
variable y_q becomes the monomial t_1...t_q times a unit.  In that chart the
region is a polydisc, so ordinary power-series truncation is exact: a series
carries a valuation bound ``lo`` and an exactness bound ``hi`` (componentwise,
in t-exponents) and every coefficient with exponent <= hi is correct.

Nilpotent parameters δ_1..δ_m are encoded as bits of an integer mask.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class InsufficientWindow(ArithmeticError):
    pass


class DegenerateRoot(ValueError):
    pass


# ---------------------------------------------------------------- jet scalars


class JetScalar:
    """Rational extended by square-free monomials in δ_1..δ_m (δ_i² = 0)."""

    __slots__ = ("c",)

    def __init__(self, components: Mapping[int, Fraction] | None = None):
        self.c = {m: Fraction(v) for m, v in (components or {}).items() if v}

    @classmethod
    def scalar(cls, v) -> "JetScalar":
        return cls({0: Fraction(v)})

    @classmethod
    def delta(cls, i: int) -> "JetScalar":
        return cls({1 << i: ONE})

    def __getitem__(self, mask: int) -> Fraction:
        return self.c.get(mask, ZERO)

    def __add__(self, other) -> "JetScalar":
        other = _as_jet(other)
        out = dict(self.c)
        for m, v in other.c.items():
            out[m] = out.get(m, ZERO) + v
        return JetScalar(out)

    __radd__ = __add__

    def __neg__(self) -> "JetScalar":
        return JetScalar({m: -v for m, v in self.c.items()})

    def __sub__(self, other) -> "JetScalar":
        return self + (-_as_jet(other))

    def __rsub__(self, other) -> "JetScalar":
        return _as_jet(other) - self

    def __mul__(self, other) -> "JetScalar":
        other = _as_jet(other)
        out: dict[int, Fraction] = {}
        for m1, v1 in self.c.items():
            for m2, v2 in other.c.items():
                if m1 & m2:
                    continue
                m = m1 | m2
                out[m] = out.get(m, ZERO) + v1 * v2
        return JetScalar(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return self.c == _as_jet(other).c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __repr__(self) -> str:
        if not self.c:
            return "JetScalar(0)"
        parts = []
        for m in sorted(self.c):
            names = "".join(f"d{i + 1}" for i in range(m.bit_length()) if m >> i & 1)
            parts.append(f"{self.c[m]}{'*' + names if names else ''}")
        return "JetScalar(" + " + ".join(parts) + ")"

    def to_json(self) -> dict[str, str]:
        return {str(m): str(v) for m, v in sorted(self.c.items())}


def _as_jet(x) -> JetScalar:
    return x if isinstance(x, JetScalar) else JetScalar.scalar(x)


# ---------------------------------------------------------------- series


Key = tuple  # (exponent tuple in t-chart, jet mask)


def y_to_t(e: Sequence[int]) -> tuple[int, ...]:
    """t-exponent of the monomial y^e."""
    out, acc = [], 0
    for x in reversed(e):
        acc += x
        out.append(acc)
    return tuple(reversed(out))


def t_to_y(f: Sequence[int]) -> tuple[int, ...]:
    n = len(f)
    return tuple(f[j] - (f[j + 1] if j + 1 < n else 0) for j in range(n))


def val_of_leading(q: int, n: int) -> tuple[int, ...]:
    """t-valuation of a linear form whose leading variable is y_q (0-based)."""
    return tuple(1 if i <= q else 0 for i in range(n))


def leading_index(coeffs: Sequence) -> int:
    for i, c in enumerate(coeffs):
        if c:
            return i
    raise DegenerateRoot("zero linear form")


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vmin(a, b):
    return tuple(min(x, y) for x, y in zip(a, b))


def _le(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


class NestedLaurent:
    __slots__ = ("n", "lo", "hi", "data")

    def __init__(self, n: int, lo: Sequence[int], hi: Sequence[int],
                 data: Mapping[Key, Fraction] | None = None, _trusted: bool = False):
        self.n = n
        self.lo = tuple(lo)
        self.hi = tuple(hi)
        if _trusted:
            self.data = data
        else:
            self.data = {}
            for (e, m), v in (data or {}).items():
                if v and _le(e, self.hi):
                    if not _le(self.lo, e):
                        raise ValueError(f"exponent {e} below declared valuation {self.lo}")
                    self.data[(tuple(e), m)] = Fraction(v)

    # construction helpers
    @classmethod
    def constant(cls, n: int, value, prec: Sequence[int]) -> "NestedLaurent":
        value = _as_jet(value)
        z = (0,) * n
        return cls(n, z, tuple(prec), {(z, m): v for m, v in value.c.items()})

    @classmethod
    def monomial_y(cls, e: Sequence[int], coeff, prec: Sequence[int], mask: int = 0) -> "NestedLaurent":
        f = y_to_t(e)
        return cls(len(e), f, _vadd(f, prec), {(f, mask): Fraction(coeff)})

    def with_hi(self, hi: Sequence[int]) -> "NestedLaurent":
        hi = _vmin(self.hi, hi)
        return NestedLaurent(self.n, self.lo, hi,
                             {k: v for k, v in self.data.items() if _le(k[0], hi)}, _trusted=True)

    @property
    def prec(self) -> tuple[int, ...]:
        return tuple(h - l for h, l in zip(self.hi, self.lo))

    def is_zero(self) -> bool:
        return not self.data

    # arithmetic
    def __add__(self, other) -> "NestedLaurent":
        if not isinstance(other, NestedLaurent):
            other = NestedLaurent.constant(self.n, other, self.hi)
        hi = _vmin(self.hi, other.hi)
        lo = _vmin(self.lo, other.lo)
        out = {k: v for k, v in self.data.items() if _le(k[0], hi)}
        for k, v in other.data.items():
            if _le(k[0], hi):
                s = out.get(k, ZERO) + v
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return NestedLaurent(self.n, lo, hi, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "NestedLaurent":
        return NestedLaurent(self.n, self.lo, self.hi, {k: -v for k, v in self.data.items()}, _trusted=True)

    def __sub__(self, other) -> "NestedLaurent":
        return self + (-other if isinstance(other, NestedLaurent) else -_as_jet(other))

    def __rsub__(self, other) -> "NestedLaurent":
        return (-self) + other

    def scale(self, s) -> "NestedLaurent":
        if isinstance(s, JetScalar):
            return self * NestedLaurent.constant(self.n, s, self.prec)
        s = Fraction(s)
        if not s:
            return NestedLaurent(self.n, self.lo, self.hi, {}, _trusted=True)
        return NestedLaurent(self.n, self.lo, self.hi, {k: s * v for k, v in self.data.items()}, _trusted=True)

    def __mul__(self, other) -> "NestedLaurent":
        if not isinstance(other, NestedLaurent):
            return self.scale(other)
        lo = _vadd(self.lo, other.lo)
        hi = _vmin(_vadd(self.hi, other.lo), _vadd(other.hi, self.lo))
        out: dict = {}
        b_items = sorted(other.data.items(), key=lambda kv: kv[0][0])
        n = self.n
        for (ea, ma), va in self.data.items():
            bound = tuple(h - x for h, x in zip(hi, ea))
            for (eb, mb), vb in b_items:
                if eb[0] > bound[0]:
                    break
                if ma & mb:
                    continue
                ok = True
                for i in range(1, n):
                    if eb[i] > bound[i]:
                        ok = False
                        break
                if not ok:
                    continue
                key = (tuple(x + y for x, y in zip(ea, eb)), ma | mb)
                out[key] = out.get(key, ZERO) + va * vb
        out = {k: v for k, v in out.items() if v}
        return NestedLaurent(n, lo, hi, out, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, p: int) -> "NestedLaurent":
        if p < 0:
            raise ValueError("use dedicated inverse constructors for negative powers")
        result = NestedLaurent.constant(self.n, 1, _vadd(self.hi, tuple(-x for x in self.lo)))
        base = self
        while p:
            if p & 1:
                result = result * base
            p >>= 1
            if p:
                base = base * base
        return result

    # inspection
    def coeff_t(self, f: Sequence[int]) -> JetScalar:
        f = tuple(f)
        if not _le(f, self.hi):
            raise InsufficientWindow(f"t-exponent {f} outside exact window {self.hi}")
        return JetScalar({m: v for (e, m), v in self.data.items() if e == f})

    def coeff_y(self, e: Sequence[int]) -> JetScalar:
        return self.coeff_t(y_to_t(e))

    def jet_component(self, mask: int) -> "NestedLaurent":
        return NestedLaurent(self.n, self.lo, self.hi,
                             {(e, 0): v for (e, m), v in self.data.items() if m == mask}, _trusted=True)

    def nilpotent_part(self) -> "NestedLaurent":
        return NestedLaurent(self.n, self.lo, self.hi,
                             {k: v for k, v in self.data.items() if k[1]}, _trusted=True)

    def masks(self) -> int:
        acc = 0
        for _, m in self.data:
            acc |= m
        return acc

    def to_json(self) -> list[dict]:
        return [{"exponents": list(t_to_y(e)), "jet": m, "value": str(v)}
                for (e, m), v in sorted(self.data.items())]

    def __repr__(self) -> str:
        return f"NestedLaurent(n={self.n}, lo={self.lo}, hi={self.hi}, terms={len(self.data)})"


def residue_target(n: int) -> tuple[int, ...]:
    return y_to_t((-1,) * n)


def iterated_residue(f: NestedLaurent) -> JetScalar:
    """Coefficient of y_1^{-1}...y_n^{-1}, i.e. Res_{y_1} ... Res_{y_n}."""
    return f.coeff_t(residue_target(f.n))


def residue_of_product(a: NestedLaurent, b: NestedLaurent) -> JetScalar:
    """iterated_residue(a*b) without forming the full product."""
    target = residue_target(a.n)
    hi = _vmin(_vadd(a.hi, b.lo), _vadd(b.hi, a.lo))
    if not _le(target, hi):
        raise InsufficientWindow(f"target {target} outside exact window {hi}")
    out: dict[int, Fraction] = {}
    bd = b.data
    b_masks = sorted({m for _, m in bd})
    for (ea, ma), va in a.data.items():
        eb = tuple(t - x for t, x in zip(target, ea))
        for mb in b_masks:
            if ma & mb:
                continue
            vb = bd.get((eb, mb))
            if vb:
                m = ma | mb
                out[m] = out.get(m, ZERO) + va * vb
    return JetScalar(out)


# ---------------------------------------------------------------- constructors


def linear_form(coeffs: Sequence, prec: Sequence[int]) -> NestedLaurent:
    """ℓ = Σ c_j y_j, exact polynomial in the t-chart; hi = val(ℓ) + prec."""
    n = len(coeffs)
    q = leading_index(coeffs)
    lo = val_of_leading(q, n)
    data = {}
    for j, c in enumerate(coeffs):
        if c:
            data[(val_of_leading(j, n), 0)] = Fraction(c)
    return NestedLaurent(n, lo, _vadd(lo, prec), data)


def exp_linear(coeffs: Sequence, prec: Sequence[int]) -> NestedLaurent:
    """exp(Σ c_j y_j) as a power series, exact up to t-exponent prec."""
    return _exp_linear_cached(tuple(Fraction(c) for c in coeffs), tuple(prec))


@lru_cache(maxsize=4096)
def _exp_linear_cached(coeffs: tuple[Fraction, ...], prec: tuple[int, ...]) -> NestedLaurent:
    n = len(coeffs)
    zero = (0,) * n
    result = NestedLaurent.constant(n, 1, prec)
    for j, c in enumerate(coeffs):
        if not c:
            continue
        top = min(prec[: j + 1])
        data = {}
        term = ONE
        for m in range(top + 1):
            data[(tuple(m if i <= j else 0 for i in range(n)), 0)] = term
            term = term * c / (m + 1)
        result = result * NestedLaurent(n, zero, prec, data)
    return result


def jet_exp(nil: NestedLaurent) -> NestedLaurent:
    """exp(N) for a purely nilpotent series N (every term carries a δ)."""
    if any(m == 0 for _, m in nil.data):
        raise ValueError("jet_exp needs a nilpotent argument")
    n = nil.n
    total = NestedLaurent.constant(n, 1, nil.hi)
    power = NestedLaurent.constant(n, 1, nil.hi)
    d = 1
    while True:
        power = (power * nil).scale(Fraction(1, d))
        if power.is_zero():
            break
        total = total + power
        d += 1
    return total


def exp_series(coeffs: Sequence, prec: Sequence[int], nilpotent: NestedLaurent | None = None) -> NestedLaurent:
    base = exp_linear(coeffs, prec)
    if nilpotent is None or nilpotent.is_zero():
        return base
    return base * jet_exp(nilpotent.with_hi(prec))


def compose_power_series(coeffs: Sequence[Fraction], s: NestedLaurent, prec: Sequence[int]) -> NestedLaurent:
    """Σ a_i s^i for s with no constant term; result exact up to prec."""
    n = s.n
    if any(e == (0,) * n and m == 0 for e, m in s.data):
        raise ValueError("composition needs an argument without constant term")
    s = s.with_hi(prec)
    total = NestedLaurent.constant(n, coeffs[0] if coeffs else 0, prec)
    power = NestedLaurent.constant(n, 1, prec)
    for a in coeffs[1:]:
        power = (power * s).with_hi(prec)
        if power.is_zero():
            break
        if a:
            total = total + power.scale(a)
    return total


def binomial(p: int, k: int) -> Fraction:
    out = ONE
    for i in range(k):
        out = out * (p - i) / (i + 1)
    return out


def _series_power(coeffs: list[Fraction], p: int, degree: int) -> list[Fraction]:
    """(Σ a_i z^i)^p for a_0 = 1, truncated at degree, p any integer."""
    base = [ZERO] + coeffs[1: degree + 1]
    base += [ZERO] * (degree + 1 - len(base))
    out = [ZERO] * (degree + 1)
    out[0] = ONE
    power = [ONE] + [ZERO] * degree
    for k in range(1, degree + 1):
        nxt = [ZERO] * (degree + 1)
        for i, x in enumerate(power):
            if x:
                for j in range(1, degree + 1 - i):
                    if base[j]:
                        nxt[i + j] += x * base[j]
        power = nxt
        b = binomial(p, k)
        if b:
            out = [o + b * q for o, q in zip(out, power)]
    return out


def linear_form_power(coeffs: Sequence, p: int, prec: Sequence[int]) -> NestedLaurent:
    """ℓ^p with negative exponents only on the leading variable of ℓ."""
    n = len(coeffs)
    coeffs = [Fraction(c) for c in coeffs]
    q = leading_index(coeffs)
    lo = tuple(p * x for x in val_of_leading(q, n))
    zero = (0,) * n
    cq = coeffs[q]
    # ℓ = c_q y_q (1 + v) with v = Σ_{j>q} (c_j/c_q) t_{q+1}...t_j
    vdata = {}
    for j in range(q + 1, n):
        if coeffs[j]:
            vdata[(tuple(1 if q < i <= j else 0 for i in range(n)), 0)] = coeffs[j] / cq
    v = NestedLaurent(n, zero, prec, vdata)
    unit = NestedLaurent.constant(n, 1, prec)
    if vdata:
        power = NestedLaurent.constant(n, 1, prec)
        k = 1
        while True:
            power = power * v
            if power.is_zero():
                break
            b = binomial(p, k)
            if not b:
                break
            unit = unit + power.scale(b)
            k += 1
    mono = NestedLaurent(n, lo, _vadd(lo, prec), {(lo, 0): cq ** p})
    return mono * unit


@lru_cache(maxsize=None)
def _sinh_unit_power(p: int, degree: int) -> tuple[Fraction, ...]:
    # S(z) = sinh(z/2)/(z/2) = Σ z^{2i} / (4^i (2i+1)!)
    s = [ZERO] * (degree + 1)
    for i in range(0, degree // 2 + 1):
        s[2 * i] = Fraction(1, 4 ** i * factorial(2 * i + 1))
    return tuple(_series_power(s, p, degree))


def weyl_factor(coeffs: Sequence, power: int, prec: Sequence[int], scale=1) -> NestedLaurent:
    """(2 sinh(scale·ℓ/2))^power for the linear form ℓ = Σ coeffs_j y_j."""
    n = len(coeffs)
    z = [Fraction(scale) * Fraction(c) for c in coeffs]
    q = leading_index(z)
    if power == 0:
        return NestedLaurent.constant(n, 1, prec)
    head = linear_form_power(z, power, prec)
    degree = max(prec[: q + 1]) if prec else 0
    unit_coeffs = _sinh_unit_power(power, degree)
    zs = linear_form(z, prec)
    unit = compose_power_series(unit_coeffs, zs, prec)
    return head * unit


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = −1/2."""
    b = [ONE]
    for m in range(1, n + 1):
        b.append(-sum(binomial(m + 1, k) * b[k] for k in range(m)) / (m + 1))
    return b[n]


@lru_cache(maxsize=None)
def _inv_one_minus_exp(d: int, top: int) -> tuple[tuple[int, Fraction], ...]:
    """Laurent coefficients of the d-th derivative of 1/(1 − e^z), exponents ≤ top."""
    # 1/(1−e^z) = −Σ_{i≥0} B_i z^{i−1} / i!
    coeffs = {i - 1: -bernoulli(i) / factorial(i) for i in range(0, top + d + 2)}
    for _ in range(d):
        coeffs = {e - 1: e * c for e, c in coeffs.items() if e != 0}
    return tuple((e, c) for e, c in sorted(coeffs.items()) if c and e <= top)


def q_factor(j: int, k_hat, prec: Sequence[int], nilpotent: NestedLaurent | None = None,
             n: int | None = None) -> NestedLaurent:
    """1/(1 − exp(k̂·y_j + N)) for a nilpotent series N (Taylor expansion in N)."""
    if nilpotent is not None:
        n = nilpotent.n
    if n is None:
        raise ValueError("need the number of variables")
    k_hat = Fraction(k_hat)
    vy = val_of_leading(j, n)
    nil_terms: list[NestedLaurent] = []
    if nilpotent is not None and not nilpotent.is_zero():
        if any(m == 0 for _, m in nilpotent.data):
            raise ValueError("q_factor needs a nilpotent correction")
        nil = nilpotent.with_hi(prec)
        power = NestedLaurent.constant(n, 1, prec)
        d = 1
        while True:
            power = (power * nil).scale(Fraction(1, d))
            if power.is_zero():
                break
            nil_terms.append(power)
            d += 1
    dmax = len(nil_terms)
    lo = tuple(-(1 + dmax) * x for x in vy)
    hi = _vadd(lo, prec)
    top = min(hi[: j + 1])
    total = None
    for d in range(dmax + 1):
        lo_d = tuple(-(1 + d) * x for x in vy)
        data = {}
        for e, c in _inv_one_minus_exp(d, top):
            data[(tuple(e * x for x in vy), 0)] = c * k_hat ** e
        term = NestedLaurent(n, lo_d, hi, data)
        if d:
            term = term * nil_terms[d - 1]
        total = term if total is None else total + term
    return NestedLaurent(n, lo, total.hi, total.data, _trusted=True).with_hi(hi)


def determinant(matrix: list[list[NestedLaurent]]) -> NestedLaurent:
    """Leibniz expansion (small sizes only)."""
    import itertools

    size = len(matrix)
    total = None
    for perm in itertools.permutations(range(size)):
        sign = 1
        for a in range(size):
            for b in range(a + 1, size):
                if perm[a] > perm[b]:
                    sign = -sign
        term = matrix[0][perm[0]]
        for i in range(1, size):
            term = term * matrix[i][perm[i]]
        term = term if sign > 0 else -term
        total = term if total is None else total + term
    return total


# ---------------------------------------------------------------- window planning


def window_plan(pole_forms: Iterable[tuple[Sequence, int]], n: int, margin: int = 0) -> tuple[int, ...]:
    """Relative precision making the residue target exact.

    ``pole_forms`` lists (linear form coefficients, pole order); holomorphic
    factors need no entry.  Every factor is then built with the returned
    relative precision, and products stay exact down to the target.
    """
    lo = [0] * n
    for coeffs, order in pole_forms:
        v = val_of_leading(leading_index(coeffs), n)
        for i in range(n):
            lo[i] -= order * v[i]
    target = residue_target(n)
    return tuple(max(0, t - l) + margin for t, l in zip(target, lo))
