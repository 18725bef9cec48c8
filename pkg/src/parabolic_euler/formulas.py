"""Residue formulas for Euler characteristics on moduli of parabolic bundles.

Every χ is assembled from per-tree iterated residues over a diagonal basis.
The vector-bundle formulas work with Q = (k+r)K − Σ δ_j φ_j, where the δ_j are
nilpotent jets, and read off the δ_1⋯δ_m component.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import laurent as L
from .characters import (CharacterSum, adams_twist, character, check_dominant, directional_derivative,
                         hecke_shift_coefficients, hessian_trace)
from .diagonal_trees import enumerate_diagonal, restrict_to_wall
from .laurent import JetScalar, NestedLaurent
from .root_system import (CoVector, Root, RootSystemError, WallSpec, bracket, expand_in_basis, in_simplex,
                          is_regular, killing_dual, positive_roots, rho, theta_points, v_det)

STABILIZE = True
STABILITY_MARGIN = 4

# tallies read by the verification suites
COUNTERS = {"stability_checks": 0, "integrality_checks": 0}


class InvalidQuery(ValueError):
    pass


class WindowInstability(ArithmeticError):
    pass


class NonIntegral(ArithmeticError):
    pass


class InconsistentWall(ValueError):
    pass


# ---------------------------------------------------------------- queries and constants


@dataclass(frozen=True)
class EulerQuery:
    g: int
    k: int
    lam: CoVector
    c: CoVector
    nu: tuple[int, ...] | None = None
    basis: tuple | None = None

    def __post_init__(self):
        if self.g < 1:
            raise InvalidQuery("genus must be positive")
        if self.k < 1:
            raise InvalidQuery("level must be positive")
        if not self.lam.is_integral():
            raise InvalidQuery(f"λ must be a lattice point: {self.lam}")
        if self.c.r != self.lam.r:
            raise InvalidQuery("c and λ have different ranks")
        if not is_regular(self.c) or not in_simplex(self.c):
            raise InvalidQuery(f"parabolic weight must be regular and lie in Δ: {self.c}")
        if self.nu is not None and len(self.nu) != self.r:
            raise InvalidQuery("ν has the wrong length")

    @property
    def r(self) -> int:
        return self.lam.r

    @property
    def trees(self) -> tuple:
        return self.basis if self.basis is not None else enumerate_diagonal(self.r)


@dataclass
class ChiResult:
    value: int
    per_basis: list = field(default_factory=list)
    jet_raw: JetScalar | None = None


def sign_exponent(r: int, g: int) -> int:
    return (-1) ** (math.comb(r, 2) * (g - 1))


def n_rk(r: int, k: int, g: int) -> Fraction:
    """N_{r,k} = (−1)^{C(r,2)(g−1)} r (r(k+r)^{r−1})^{g−1}."""
    return Fraction(sign_exponent(r, g) * r) * Fraction(r * (k + r) ** (r - 1)) ** (g - 1)


def n_r(r: int, g: int) -> Fraction:
    return Fraction(sign_exponent(r, g) * r ** g)


def _integer(x: Fraction, what: str) -> int:
    COUNTERS["integrality_checks"] += 1
    if x.denominator != 1:
        raise NonIntegral(f"{what} is not an integer: {x}")
    return int(x)


def lam_hat(lam: CoVector) -> CoVector:
    return lam + rho(lam.r)


# ---------------------------------------------------------------- series helpers


def _tag(series: NestedLaurent, mask: int) -> NestedLaurent:
    return NestedLaurent(series.n, series.lo, series.hi,
                         {(e, mask): v for (e, m), v in series.data.items() if m == 0}, _trusted=True)


def _char_series(phi: CharacterSum, B: tuple, prec, scale=1) -> NestedLaurent:
    n = len(B)
    total = NestedLaurent.constant(n, 0, prec)
    for c, mu in phi.terms:
        u = expand_in_basis(mu, B)
        total = total + L.exp_linear([scale * x for x in u], prec).scale(c)
    return total


def _weyl_denominator(B: tuple, r: int, power: int, prec, scale=1) -> NestedLaurent:
    out = NestedLaurent.constant(r - 1, 1, prec)
    for a in positive_roots(r):
        out = out * L.weyl_factor(expand_in_basis(a.covector(r), B), power, prec, scale)
    return out


def _pole_plan(B: tuple, r: int, g: int, denominator_order: int, drop=None, margin=0):
    poles = [(expand_in_basis(a.covector(r), B), 2 * g - 1) for a in positive_roots(r)]
    n = r - 1
    for i in range(n):
        if i != drop:
            poles.append(([1 if j == i else 0 for j in range(n)], denominator_order))
    return L.window_plan(poles, n, margin)


def _stable(compute, prec):
    value = compute(prec)
    if STABILIZE:
        wider = compute(tuple(p + STABILITY_MARGIN for p in prec))
        COUNTERS["stability_checks"] += 1
        if wider != value:
            raise WindowInstability(f"residue changed under window enlargement: {value} vs {wider}")
    return value


# ---------------------------------------------------------------- the iBer operator


def q_pieces(B: tuple, r: int, k_hat: int, phis: tuple[CharacterSum, ...], a: CoVector, prec):
    """exp(Q_ǎ), the inverse factors 1/(1 − exp(Q_{β̌_i})) and the matrix ∂Q_{β̌_i}/∂y_l.

    Q = k̂K − Σ δ_j φ_j with β̌ the Killing dual, so Q_{β̌_i} = k̂y_i − Σ δ_j (φ_j)_{β̌_i}.
    """
    n = r - 1
    roots = [b.covector(r) for b in B]
    ua = expand_in_basis(a, B)
    nil_a = NestedLaurent.constant(n, 0, prec)
    nil_dir = [NestedLaurent.constant(n, 0, prec) for _ in range(n)]
    jac = [[NestedLaurent.constant(n, k_hat if i == l else 0, prec) for l in range(n)] for i in range(n)]
    for j, phi in enumerate(phis):
        mask = 1 << j
        for c, mu in phi.terms:
            pa = mu.pair(a)
            pb = [mu.pair(b) for b in roots]
            if not pa and not any(pb):
                continue
            u = expand_in_basis(mu, B)
            e = _tag(L.exp_linear(u, prec), mask)
            if pa:
                nil_a = nil_a - e.scale(c * pa)
            for i in range(n):
                if pb[i]:
                    nil_dir[i] = nil_dir[i] - e.scale(c * pb[i])
                    for l in range(n):
                        if u[l]:
                            jac[i][l] = jac[i][l] - e.scale(c * pb[i] * u[l])
    exp_a = L.exp_series([k_hat * x for x in ua], prec, nil_a)
    dens = [L.q_factor(i, k_hat, prec, nil_dir[i], n=n) for i in range(n)]
    return exp_a, dens, jac


def iber(B: tuple, r: int, k_hat: int, phis: tuple[CharacterSum, ...], f: NestedLaurent, a: CoVector,
         prec, drop: int | None = None) -> JetScalar:
    """iBer_{B,Q}[f](a) with Q = k̂K − Σδ_jφ_j, including the measure dQ_{β̌_1}∧…∧dQ_{β̌_{r−1}}.

    ``drop`` removes one inverse factor, i.e. multiplies the integrand by 1 − exp(Q_{β̌_drop}).
    """
    exp_a, dens, jac = q_pieces(B, r, k_hat, phis, a, prec)
    kernel = exp_a * L.determinant(jac)
    for i, d in enumerate(dens):
        if i != drop:
            kernel = kernel * d
    return L.residue_of_product(kernel, f)


@lru_cache(maxsize=2048)
def _main_kernel(B: tuple, r: int, g: int, k: int, phis: tuple, a: CoVector, prec: tuple, drop) -> NestedLaurent:
    k_hat = k + r
    exp_a, dens, jac = q_pieces(B, r, k_hat, phis, a, prec)
    # The measure determinant det(∂Q_{β̌_i}/∂y_l) and the K-normalized Hessian
    # determinant of Q are the same series, so Hess^{g−1}·measure = det^g.
    hess = L.determinant(jac)
    kernel = exp_a * (hess ** g) * _weyl_denominator(B, r, 1 - 2 * g, prec)
    for i, d in enumerate(dens):
        if i != drop:
            kernel = kernel * d
    return kernel


def main_residue(B: tuple, r: int, g: int, k: int, phis: tuple, a: CoVector, exponent: CoVector,
                 drop=None) -> JetScalar:
    """iBer_{B,Q}[Hess(Q)^{g−1} w_Φ^{1−2g}(x) e^{⟨exponent, x⟩}](a)."""
    m = sum(1 for phi in phis if not phi.is_constant())
    prec0 = _pole_plan(B, r, g, 1 + m, drop)
    ue = expand_in_basis(exponent, B)

    def compute(prec):
        kernel = _main_kernel(B, r, g, k, phis, a, prec, drop)
        return L.residue_of_product(kernel, L.exp_linear(ue, prec))

    return _stable(compute, prec0)


# ---------------------------------------------------------------- line bundles


@lru_cache(maxsize=2048)
def _line_kernel(B: tuple, r: int, g: int, k: int, prec: tuple, drop) -> NestedLaurent:
    k_hat = k + r
    kernel = _weyl_denominator(B, r, 1 - 2 * g, prec, Fraction(1, k_hat))
    for i in range(r - 1):
        if i != drop:
            kernel = kernel * L.q_factor(i, 1, prec, n=r - 1)
    return kernel


def line_residue(B: tuple, r: int, g: int, k: int, lam: CoVector, a: CoVector, drop=None) -> Fraction:
    """iBer_B[w_Φ^{1−2g}(x/k̂) e^{⟨λ̂/k̂, x⟩}](a) with the plain Killing form."""
    k_hat = k + r
    ue = expand_in_basis(lam_hat(lam) * Fraction(1, k_hat) + a, B)
    prec0 = _pole_plan(B, r, g, 1, drop)

    def compute(prec):
        return L.residue_of_product(_line_kernel(B, r, g, k, prec, drop), L.exp_linear(ue, prec))[0]

    return _stable(compute, prec0)


def chi_line(q: EulerQuery) -> ChiResult:
    r = q.r
    total = Fraction(0)
    per = []
    for B in q.trees:
        a = -bracket(q.c, B)[0]
        v = line_residue(tuple(B), r, q.g, q.k, q.lam, a)
        per.append((B, v))
        total += v
    value = n_rk(r, q.k, q.g) * total
    return ChiResult(_integer(value, "χ of a line bundle"), per, JetScalar.scalar(total))


def chi_line_unscaled(B: tuple, r: int, g: int, k: int, exponent: CoVector, a: CoVector) -> Fraction:
    """iBer_{B,(k+r)K}[w_Φ^{1−2g}(x) e^{⟨exponent, x⟩}](a) with no δ terms."""
    return main_residue(B, r, g, k, (), a, exponent)[0] / Fraction(k + r) ** ((r - 1) * (g - 1))


# ---------------------------------------------------------------- vector bundles


def _nu_list(nu) -> list[tuple[int, ...]]:
    if nu and isinstance(nu[0], (list, tuple)):
        return [check_dominant(x) for x in nu]
    return [check_dominant(nu)]


def multi_residue_sum(q: EulerQuery, phis: tuple[CharacterSum, ...], vdet: CoVector, a_of=None):
    r = q.r
    exponent = lam_hat(q.lam) + vdet
    total = JetScalar()
    per = []
    for B in q.trees:
        B = tuple(B)
        a = a_of(B) if a_of else -bracket(q.c, B)[0]
        jet = main_residue(B, r, q.g, q.k, phis, a, exponent)
        per.append((B, jet))
        total = total + jet
    return total, per


def chi_multi(q: EulerQuery, nus: Sequence[Sequence[int]] | None = None, phis=None, vdet=None) -> ChiResult:
    nus = _nu_list(nus if nus is not None else q.nu)
    r = q.r
    if phis is None:
        phis = tuple(character(nu) for nu in nus)
    if vdet is None:
        vdet = CoVector.zero(r)
        for nu in nus:
            vdet = vdet + v_det(r, sum(nu))
    mask = (1 << len(phis)) - 1
    total, per = multi_residue_sum(q, tuple(phis), vdet)
    nr = n_r(r, q.g)
    value = nr * total[mask]
    return ChiResult(_integer(value, "χ of a vector bundle"), [(B, nr * j[mask]) for B, j in per], total)


def chi_vector(q: EulerQuery) -> ChiResult:
    if q.nu is None:
        raise InvalidQuery("chi_vector needs ν")
    return chi_multi(q, [q.nu])


def chi_wedge2(q: EulerQuery) -> int:
    """½χ(V⊗V) − ¼χ(ψ²-twisted V)."""
    nu = check_dominant(q.nu)
    r = q.r
    square = chi_multi(q, [nu, nu]).value
    twisted = chi_multi(q, [nu], phis=(adams_twist(character(nu), 2),), vdet=v_det(r, 2 * sum(nu))).value
    value = Fraction(square, 2) - Fraction(twisted, 4)
    return _integer(value, "χ of the wedge square")


def chi_vector_explicit(q: EulerQuery, pairing: str = "basis") -> ChiResult:
    """Scaled explicit formula with the δ-derivative taken by hand.

    ``pairing`` picks the coefficient of φ_{β̌_i} in the linear term: ``basis``
    uses the coefficient of β^[i] in [c]_B, ``killing`` uses ⟨[c]_B, β^[i]⟩.
    """
    nu = check_dominant(q.nu)
    r, g, k = q.r, q.g, q.k
    k_hat = k + r
    n = r - 1
    phi = character(nu)
    exponent = (lam_hat(q.lam) + v_det(r, sum(nu))) * Fraction(1, k_hat)
    total = Fraction(0)
    per = []
    for B in q.trees:
        B = tuple(B)
        cint = bracket(q.c, B)[0]
        roots = [b.covector(r) for b in B]
        if pairing == "basis":
            coef = expand_in_basis(cint, B)
        elif pairing == "killing":
            coef = tuple(cint.pair(b) for b in roots)
        else:
            raise ValueError("pairing must be 'basis' or 'killing'")
        ue = expand_in_basis(exponent - cint, B)
        scale = Fraction(1, k_hat)

        def compute(prec, B=B, roots=roots, coef=coef, ue=ue):
            base = _weyl_denominator(B, r, 1 - 2 * g, prec, scale)
            dens = [L.q_factor(i, 1, prec, n=n) for i in range(n)]
            bracket_terms = _char_series(hessian_trace(phi), B, prec, scale).scale(Fraction(-g, k_hat))
            for i in range(n):
                d_i = _char_series(directional_derivative(phi, killing_dual(roots[i])), B, prec, scale)
                bracket_terms = bracket_terms - d_i * (dens[i] - 1)
                if coef[i]:
                    bracket_terms = bracket_terms + d_i.scale(coef[i])
            kernel = base * bracket_terms
            for d in dens:
                kernel = kernel * d
            return L.residue_of_product(kernel, L.exp_linear(ue, prec))[0]

        v = _stable(compute, _pole_plan(B, r, g, 2))
        per.append((B, v))
        total += v
    value = n_rk(r, k, g) * total
    return ChiResult(_integer(value, "explicit χ"), per, JetScalar.scalar(total))


# ---------------------------------------------------------------- rank 2


def _rank2_phi(nu: Sequence[int]) -> list[tuple[int, Fraction]]:
    """φ(u) = Σ_i e^{(n−2i)u/2} as (n−2i, exponent) pairs, n = ν_1 − ν_2."""
    n = nu[0] - nu[1]
    return [(n - 2 * i, Fraction(n - 2 * i, 2)) for i in range(n + 1)]


def _u_series(terms, prec) -> NestedLaurent:
    total = NestedLaurent.constant(1, 0, prec)
    for c, e in terms:
        total = total + L.exp_linear([e], prec).scale(c)
    return total


def _phi_dot(nu, prec, order: int) -> NestedLaurent:
    """φ̇ = 2φ' (order 1) or φ̈ = 2φ̇' (order 2)."""
    return _u_series([(Fraction(m) ** order, e) for m, e in _rank2_phi(nu)], prec)


def rank2_closed(g: int, k: int, lam: int, nu: Sequence[int], literal_exponent: bool = False) -> int:
    """(−(2k+4))^g Res e^{u(λ+½+|ν|/2)} / ((2sinh(u/2))^{2g−1}(1−e^{u(k+2)}))
    · (gφ̈/(2k+4) + e^{(k+2)u}φ̇/(1−e^{u(k+2)})) du.

    ``literal_exponent`` uses e^{(2k+4)u} in the second term instead of e^{(k+2)u}.
    """
    nu = check_dominant(nu)
    kh = k + 2
    shift = Fraction(2 * lam + 1 + sum(nu), 2)

    def compute(prec):
        base = L.weyl_factor([1], 1 - 2 * g, prec) * L.q_factor(0, kh, prec, n=1)
        second_exp = 2 * kh if literal_exponent else kh
        br = _phi_dot(nu, prec, 2).scale(Fraction(g, 2 * kh)) + \
            L.exp_linear([second_exp], prec) * _phi_dot(nu, prec, 1) * L.q_factor(0, kh, prec, n=1)
        return L.residue_of_product(base * br, L.exp_linear([shift], prec))[0]

    prec = L.window_plan([([1], 2 * g - 1), ([1], 2)], 1)
    value = Fraction(-2 * kh) ** g * _stable(compute, prec)
    return _integer(value, "rank-2 closed formula")


def rank2_two_point(g: int, k: int, lam: int, mu: int, nu: Sequence[int], chamber: str) -> int:
    """R^ν_≷(k; λ, μ) = (−1)^g ∂_δ Res (e^{u(λ+μ+1)} − N)e^{u|ν|/2}(2k+4+δφ̈)^g
    / ((2sinh(u/2))^{2g}(1 − e^{u(k+2)+δφ̇})), N = e^{u(λ−μ)} or e^{u(λ−μ+k+2)+δφ̇}."""
    nu = check_dominant(nu)
    if chamber not in (">", "<"):
        raise ValueError("chamber must be '>' or '<'")
    kh = k + 2
    half = Fraction(sum(nu), 2)

    def compute(prec):
        dot = _tag(_phi_dot(nu, prec, 1), 1)
        ddot = _tag(_phi_dot(nu, prec, 2), 1)
        hess = (ddot + 2 * kh) ** g
        den = L.q_factor(0, kh, prec, dot, n=1)
        first = L.exp_linear([lam + mu + 1 + half], prec)
        if chamber == ">":
            second = L.exp_linear([lam - mu + half], prec)
        else:
            second = L.exp_linear([lam - mu + kh + half], prec) * L.jet_exp(dot)
        kernel = L.weyl_factor([1], -2 * g, prec) * hess * den
        return L.residue_of_product(kernel, first - second)[1]

    prec = L.window_plan([([1], 2 * g), ([1], 2)], 1)
    value = (-1) ** g * _stable(compute, prec)
    return _integer(value, "two-point rank-2 polynomial")


def chamber_difference_rhs(g: int, k: int, lam: int, mu: int, nu: Sequence[int]) -> Fraction:
    """g(−(2k+4))^{g−1} Res e^{u(λ−μ)}e^{u|ν|/2} φ̈ / (2sinh(u/2))^{2g}."""
    half = Fraction(sum(nu), 2)

    def compute(prec):
        return L.residue_of_product(L.weyl_factor([1], -2 * g, prec) * _phi_dot(nu, prec, 2),
                                    L.exp_linear([lam - mu + half], prec))[0]

    prec = L.window_plan([([1], 2 * g)], 1)
    return g * Fraction(-(2 * k + 4)) ** (g - 1) * _stable(compute, prec)


def antisymmetry_correction(g: int, k: int, lam: int, mu: int, nu: Sequence[int], chamber: str,
                     plus: bool = False) -> Fraction:
    """(−(2k+4))^g Res (e^{u(λ+μ+1)} ∓ N)e^{u|ν|/2}φ̇ / ((2sinh(u/2))^{2g}(1 − e^{u(k+2)}))
    with N = e^{u(λ−μ)} for '>' and e^{u(λ−μ+k+2)} for '<'.

    ``plus`` adds N instead of subtracting it.  For '<' the μ ↦ −μ+k+1
    substitution moves e^{δφ̇} onto the other exponential, so the correction
    it produces carries the sum.
    """
    kh = k + 2
    half = Fraction(sum(nu), 2)
    shift = lam - mu + (kh if chamber == "<" else 0) + half

    def compute(prec):
        kernel = L.weyl_factor([1], -2 * g, prec) * L.q_factor(0, kh, prec, n=1) * _phi_dot(nu, prec, 1)
        second = L.exp_linear([shift], prec)
        num = L.exp_linear([lam + mu + 1 + half], prec) + (second if plus else -second)
        return L.residue_of_product(kernel, num)[0]

    prec = L.window_plan([([1], 2 * g), ([1], 1)], 1)
    return Fraction(-(2 * k + 4)) ** g * _stable(compute, prec)


# ---------------------------------------------------------------- wall-crossing


def _relabel(tree, block: Sequence[int]) -> tuple:
    block = sorted(block)
    return tuple(Root(block[e.i - 1], block[e.j - 1]) for e in tree)


def product_trees(wall: WallSpec) -> list[tuple[tuple, int]]:
    """Trees (β_link, B′, B″) built from diagonal bases of both blocks; link first."""
    p, q = sorted(wall.prime), sorted(wall.dprime)
    d1 = enumerate_diagonal(len(p)) if len(p) > 1 else ((),)
    d2 = enumerate_diagonal(len(q)) if len(q) > 1 else ((),)
    link = Root(p[-1], wall.r)
    return [((link,) + _relabel(t1, p) + _relabel(t2, q), 0) for t1 in d1 for t2 in d2]


def _orient_link(B: tuple, link: int, wall: WallSpec) -> tuple:
    # the link factor cancels against the jump [c⁺]_B − [c⁻]_B only when the
    # link points from Π′ to Π″
    e = B[link]
    if e.i in wall.prime:
        return B
    return B[:link] + (e.flipped(),) + B[link + 1:]


def check_wall_side(wall: WallSpec, c_plus: CoVector) -> int:
    """Orientation of c⁺ against the wall: +1 on the level-l side, −1 just below it."""
    if not is_regular(c_plus) or not in_simplex(c_plus):
        raise InconsistentWall(f"c⁺ must be regular and lie in Δ: {c_plus}")
    side = math.floor(wall.side_value(c_plus))
    if side == wall.level:
        return 1
    if side == wall.level - 1:
        return -1
    raise InconsistentWall(f"c⁺ = {c_plus} is not adjacent to the level-{wall.level} wall")


def across_wall(c: CoVector, wall: WallSpec) -> CoVector:
    """A regular point of Δ just across the wall from c, separated from it by no other wall."""
    from .root_system import classify_chamber

    check_wall_side(wall, c)
    n1, n2 = len(wall.prime), len(wall.dprime)
    normal = CoVector([Fraction(1, n1) if i in wall.prime else Fraction(-1, n2) for i in range(1, wall.r + 1)])
    excess = wall.side_value(c) - wall.level
    for denom in (7, 31, 127, 1021, 8191, 65521):
        step = excess + Fraction(1, denom) if excess >= 0 else excess - Fraction(1, denom)
        other = c - normal * step
        if is_regular(other) and in_simplex(other) and classify_chamber(c, other) == [wall]:
            return other
    raise InconsistentWall(f"no point across the wall from {c}")


def _upper_side(wall: WallSpec, c_plus: CoVector) -> tuple[int, CoVector]:
    sign = check_wall_side(wall, c_plus)
    return sign, (c_plus if sign > 0 else across_wall(c_plus, wall))


def wallcross_residue(g: int, k: int, lam: CoVector, nu: Sequence[int] | None, wall: WallSpec,
                      c_plus: CoVector, basis=None, trees: str = "restricted") -> int:
    """Residue side of χ(c⁺) − χ(c⁻), with the link factor removed.

    The residue formula is normalized with c⁺ on the side where ⌊Σ_{Π′}c⌋
    equals the wall level.  A c⁺ just below the wall sees the same wall from
    the other block, so the value is computed from the point across and negated.

    ``trees`` selects the restricted diagonal basis 𝒟|Π or the product trees
    built from diagonal bases of the two blocks.
    """
    sign, c_plus = _upper_side(wall, c_plus)
    r = lam.r
    if trees == "restricted":
        items = [(_orient_link(B, link, wall), link)
                 for B, link in restrict_to_wall(basis if basis is not None else enumerate_diagonal(r), wall)]
    elif trees == "product":
        items = product_trees(wall)
    else:
        raise ValueError("trees must be 'restricted' or 'product'")
    total = Fraction(0)
    if nu is None or not any(x - nu[-1] for x in nu):
        for B, link in items:
            total += line_residue(B, r, g, k, lam, -bracket(c_plus, B)[0], drop=link)
        value = n_rk(r, k, g) * total
    else:
        phis = (character(nu),)
        exponent = lam_hat(lam) + v_det(r, sum(nu))
        for B, link in items:
            total += main_residue(B, r, g, k, phis, -bracket(c_plus, B)[0], exponent, drop=link)[1]
        value = n_r(r, g) * total
    return sign * _integer(value, "wall-crossing residue")


# ---------------------------------------------------------------- shifted polynomials and symmetries


def chamber_point(side: str, r: int, basis=None) -> CoVector:
    """A regular c in Δ near θ_1 ('>') or θ_{−1} ('<') with [c]_B = [θ]_B on the basis."""
    _, _, th1, thm1 = theta_points(0, r)
    theta = th1 if side == ">" else thm1
    interior = rho(r) * Fraction(1, r)
    D = basis if basis is not None else enumerate_diagonal(r)
    for denom in (97, 197, 397, 797, 1597):
        eps = Fraction(1, denom)
        c = theta * (1 - eps) + interior * eps
        if r > 2:
            c = c + CoVector.project([Fraction(i * i, denom * denom * 101) for i in range(r)])
        if is_regular(c) and in_simplex(c) and all(bracket(c, tuple(B))[0] == bracket(theta, tuple(B))[0]
                                                   for B in D):
            return c
    raise RootSystemError(f"no regular chamber point near the {side} vertex for r={r}")


def _side_name(side: str) -> str:
    return "minus" if side == "<" else "plus"


def f_shifted(g: int, k: int, lam: CoVector, nu: Sequence[int], side: str, basis=None) -> int:
    """f_<: χ_< − Σ m_μ μ_1 χ_line(<, λ+shift); f_>: χ_> + Σ m_μ μ_r χ_line(>, λ+shift)."""
    r = lam.r
    c = chamber_point(side, r, basis)
    value = chi_vector(EulerQuery(g, k, lam, c, tuple(nu), basis)).value
    sgn = -1 if side == "<" else 1
    for shift, coef in hecke_shift_coefficients(nu, _side_name(side)):
        value += sgn * coef * chi_line(EulerQuery(g, k, lam + shift, c, None, basis)).value
    return value


def residue_side(g: int, k: int, lam: CoVector, nu: Sequence[int], side: str, basis=None) -> int:
    """R^ν_≷: main residue evaluated at −[θ_{±1}]_B."""
    r = lam.r
    _, _, th1, thm1 = theta_points(k, r)
    theta = th1 if side == ">" else thm1
    q = EulerQuery(g, k, lam, chamber_point(side, r, basis), tuple(nu), basis)
    total, _ = multi_residue_sum(q, (character(nu),), v_det(r, sum(nu)), lambda B: -bracket(theta, B)[0])
    return _integer(n_r(r, g) * total[1], "R polynomial")


def F_shifted(g: int, k: int, lam: CoVector, nu: Sequence[int], side: str, basis=None) -> int:
    r = lam.r
    _, _, th1, thm1 = theta_points(k, r)
    theta = th1 if side == ">" else thm1
    D = basis if basis is not None else enumerate_diagonal(r)
    value = Fraction(residue_side(g, k, lam, nu, side, basis))
    sgn = -1 if side == "<" else 1
    for shift, coef in hecke_shift_coefficients(nu, _side_name(side)):
        s = Fraction(0)
        for B in D:
            B = tuple(B)
            s += chi_line_unscaled(B, r, g, k, lam_hat(lam + shift), -bracket(theta, B)[0])
        value += sgn * coef * n_rk(r, k, g) * s
    return _integer(value, "F polynomial")


def symmetry_generators(r: int, side: str) -> list[tuple[tuple[int, ...], CoVector | None]]:
    """Generators of Σ_r^+ ('>') or Σ_r^− ('<') as (permutation, translation)."""
    from .root_system import transposition

    zero = None
    if side == ">":
        gens = [(transposition(r, i, i + 1), zero) for i in range(1, r - 1)]
        gens.append((transposition(r, r - 1, r), Root(r - 1, r).covector(r)))
    else:
        gens = [(transposition(r, i, i + 1), zero) for i in range(2, r)]
        gens.append((transposition(r, 1, 2), Root(1, 2).covector(r)))
    return gens


def act(generator, k: int, lam: CoVector, vdet: CoVector) -> CoVector:
    from .root_system import affine_weyl_act

    perm, gamma = generator
    out = affine_weyl_act(perm, k, lam, vdet)
    if gamma is not None:
        out = affine_weyl_act(gamma, k, out, vdet)
    return out


# ---------------------------------------------------------------- the rank-3 worked example


def _xy(cx, cy) -> list[Fraction]:
    # residues are taken in x first, so y is the leading variable of the chart
    return [Fraction(cy), Fraction(cx)]


def _xy_exp(cx, cy, prec, coef=1) -> NestedLaurent:
    return L.exp_linear(_xy(cx, cy), prec).scale(coef)


def _example_pieces(g: int, k: int, lam: CoVector, prec):
    kh = k + 3
    l1, l2, l3 = lam.coords
    third = Fraction(1, 3)
    phi = _xy_exp(2 * third, third, prec) + _xy_exp(-third, third, prec) + _xy_exp(-third, -2 * third, prec)
    phi_x = _xy_exp(2 * third, third, prec) - _xy_exp(-third, third, prec)
    phi_y = _xy_exp(-third, third, prec) - _xy_exp(-third, -2 * third, prec)
    w = L.weyl_factor(_xy(1, 0), 1 - 2 * g, prec) * L.weyl_factor(_xy(0, 1), 1 - 2 * g, prec) \
        * L.weyl_factor(_xy(1, 1), 1 - 2 * g, prec)
    qx = L.q_factor(1, kh, prec, n=2)
    qy = L.q_factor(0, kh, prec, n=2)
    e1 = _xy_exp(l1 + 1 + third, l1 + l2 + 1 + 2 * third, prec)
    e2 = _xy_exp(l1 + 1 + third, l1 + l3 - third, prec)
    shift_y = _xy_exp(0, kh, prec)
    ex = _xy_exp(kh, 0, prec)
    bracket_xy = phi.scale(Fraction(2 * g, 3 * kh)) + ex * phi_x * qx + shift_y * phi_y * qy
    bracket_x = phi.scale(Fraction(2 * g, 3 * kh)) + ex * phi_x * qx
    return dict(phi_y=phi_y, w=w, qx=qx, qy=qy, e1=e1, e2=e2, shift_y=shift_y, bxy=bracket_xy, bx=bracket_x)


def _example_constant(g: int, k: int) -> Fraction:
    return Fraction((-1) ** g * (3 * (k + 3) ** 2) ** g)


def example_rank3(g: int, k: int, lam: CoVector, which: str) -> int:
    """The explicit rank-3 displays for ν = (1,0,0): which ∈ {'<', '>', 'diff'}.

    'diff' is the displayed wall-crossing term; it equals χ(<) − χ(>) of the
    first two displays by direct algebra.
    """
    if lam.r != 3:
        raise InvalidQuery("the worked example is rank 3")
    poles = [(_xy(1, 0), 2 * g - 1), (_xy(0, 1), 2 * g - 1), (_xy(1, 1), 2 * g - 1), (_xy(1, 0), 2), (_xy(0, 1), 2)]
    prec0 = L.window_plan(poles, 2)

    def compute(prec):
        p = _example_pieces(g, k, lam, prec)
        base = p["w"] * p["qx"]
        if which == "<":
            return L.residue_of_product(base * p["qy"] * p["bxy"], p["e1"] - p["e2"])[0]
        if which == ">":
            e2s = p["e2"] * p["shift_y"]
            main = L.residue_of_product(base * p["qy"] * p["bxy"], p["e1"] - e2s)[0]
            return main - L.residue_of_product(base * p["qy"] * p["phi_y"], e2s)[0]
        if which == "diff":
            return -L.residue_of_product(base * p["bx"], p["e2"])[0]
        raise ValueError("which must be '<', '>' or 'diff'")

    return _integer(_example_constant(g, k) * _stable(compute, prec0), "rank-3 example")


# ---------------------------------------------------------------- explicit wall-crossing corollary


def wallcross_corollary(g: int, k: int, lam: CoVector, nu: Sequence[int], wall: WallSpec, c_plus: CoVector,
                        prefactor: str = "literal", pairing: str = "basis") -> Fraction:
    """Scaled explicit wall-crossing sum over product trees (link, B′, B″).

    ``prefactor`` 'literal' uses (k+r)N_{r,k}; 'plain' uses N_{r,k}.  The
    value is returned as an exact rational so that a wrong prefactor is
    visible rather than rejected.
    """
    sign, c_plus = _upper_side(wall, c_plus)
    nu = check_dominant(nu)
    r = lam.r
    k_hat = k + r
    n = r - 1
    phi = character(nu)
    exponent = (lam_hat(lam) + v_det(r, sum(nu))) * Fraction(1, k_hat)
    scale = Fraction(1, k_hat)
    total = Fraction(0)
    for B, link in product_trees(wall):
        cint = bracket(c_plus, B)[0]
        roots = [b.covector(r) for b in B]
        if pairing == "basis":
            coef = expand_in_basis(cint, B)
        elif pairing == "killing":
            coef = tuple(cint.pair(b) for b in roots)
        else:
            raise ValueError("pairing must be 'basis' or 'killing'")
        ue = expand_in_basis(exponent - cint, B)

        def compute(prec, B=B, roots=roots, coef=coef, ue=ue, link=link):
            base = _weyl_denominator(B, r, 1 - 2 * g, prec, scale)
            dens = [L.q_factor(i, 1, prec, n=n) for i in range(n)]
            terms = _char_series(hessian_trace(phi), B, prec, scale).scale(Fraction(-g, k_hat))
            for i in range(n):
                d_i = _char_series(directional_derivative(phi, killing_dual(roots[i])), B, prec, scale)
                if i == link:
                    terms = terms + d_i.scale(wall.level)
                    continue
                terms = terms - d_i * (dens[i] - 1)
                if coef[i]:
                    terms = terms + d_i.scale(coef[i])
            kernel = base * terms
            for i, d in enumerate(dens):
                if i != link:
                    kernel = kernel * d
            return L.residue_of_product(kernel, L.exp_linear(ue, prec))[0]

        total += _stable(compute, _pole_plan(B, r, g, 2, drop=link))
    pre = n_rk(r, k, g) * (k_hat if prefactor == "literal" else 1)
    return sign * pre * total


# ---------------------------------------------------------------- the shift identity


def shift_identity_sides(B: tuple, r: int, g: int, k: int, phi: CharacterSum, psi0: CharacterSum,
                       psi1: CharacterSum, exponent: CoVector, a: CoVector, w: CoVector) -> tuple[Fraction, Fraction]:
    """Both sides of the shift identity for f = w_Φ^{1−2g} e^{⟨exponent, x⟩}(ψ_0 + δψ_1).

    Returns (∂_δ iBer_{B,Q}[f](a+w),
             ∂_δ iBer_{B,Q}[f e^{k̂w}](a) − iBer_{B,k̂K}[f|_{δ=0} e^{k̂w} φ_w̌](a)).
    """
    k_hat = k + r
    ue = expand_in_basis(exponent, B)
    uw = expand_in_basis(w * k_hat, B)
    phis = (phi,)
    prec0 = _pole_plan(B, r, g, 2)

    def compute(prec):
        base = _weyl_denominator(B, r, 1 - 2 * g, prec) * L.exp_linear(ue, prec)
        f = base * (_char_series(psi0, B, prec) + _tag(_char_series(psi1, B, prec), 1))
        lhs = iber(B, r, k_hat, phis, f, a + w, prec)[1]
        shifted = f * L.exp_linear(uw, prec)
        first = iber(B, r, k_hat, phis, shifted, a, prec)[1]
        f0 = base * _char_series(psi0, B, prec) * L.exp_linear(uw, prec) \
            * _char_series(directional_derivative(phi, killing_dual(w)), B, prec)
        second = iber(B, r, k_hat, (), f0, a, prec)[0]
        return lhs, first - second

    return _stable(compute, prec0)


def window_plans(q: EulerQuery, n_deltas: int) -> list[tuple[int, ...]]:
    """Relative precisions used per tree (before the stability enlargement)."""
    return [_pole_plan(tuple(B), q.r, q.g, 1 + n_deltas) for B in q.trees]


def chamber_key(c: CoVector) -> tuple[int, ...]:
    """⌊Σ_{Π′} c⌋ over all nontrivial partitions; equal keys mean the same chamber."""
    from .root_system import nontrivial_partitions

    return tuple(math.floor(sum((c[i - 1] for i in p), Fraction(0))) for p, _ in nontrivial_partitions(c.r))
