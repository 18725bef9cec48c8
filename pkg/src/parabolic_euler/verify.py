"""Identity suites: each check is a record with an echo of its case and a pass flag."""
from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

from . import formulas as fm
from .characters import (CharacterSum, block_character, branch, central_twist, character, directional_derivative,
                         exponential, hessian_trace, weight_table_freudenthal, weight_table_gt, weyl_dimension)
from .diagonal_trees import enumerate_diagonal, is_diagonal
from .oracles import verlinde_su2
from .root_system import CoVector, Root, WallSpec, bracket, killing_dual, lattice_point, rho, v_det

SEED = 20240611

C2 = CoVector([Fraction(3, 10), Fraction(-3, 10)])
C3_GT = CoVector([Fraction(1, 5), Fraction(1, 10), Fraction(-3, 10)])
C3_LT = CoVector([Fraction(2, 5), Fraction(-1, 10), Fraction(-3, 10)])
EXAMPLE_BASIS = ((Root(2, 3), Root(1, 2)), (Root(3, 2), Root(1, 3)))
EXAMPLE_WALL = WallSpec(frozenset({2}), frozenset({1, 3}), 0)
WALL_LAMBDAS = ((-3, 2, 1), (-2, 3, -1), (0, 3, -3), (1, -3, 2), (3, -3, 0))


@dataclass
class Check:
    suite: str
    identity: str
    case: dict
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _s(x) -> str:
    return str(Fraction(x))


def _pmap(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------- rank 2


def _rank2_case(args) -> Check:
    g, k, lam, nu = args
    q = fm.EulerQuery(g, k, lattice_point([lam, -lam]), C2, nu)
    jet = fm.chi_vector(q).value
    closed = fm.rank2_closed(g, k, lam, nu)
    literal = fm.rank2_closed(g, k, lam, nu, literal_exponent=True)
    return Check("rank2", "chi_vector = rank2_closed", {"g": g, "k": k, "lambda1": lam, "nu": list(nu)},
                 jet == closed, {"chi_vector": str(jet), "rank2_closed": str(closed),
                                 "literal_exponent_value": str(literal)})


def rank2_grid():
    return [(g, k, lam, nu) for g in (2, 3) for k in range(1, 5) for lam in range(0, k + 1)
            for nu in ((1, 0), (2, 0), (2, 1))]


def suite_rank2(jobs: int = 1) -> list[Check]:
    return _pmap(_rank2_case, rank2_grid(), jobs)


# ---------------------------------------------------------------- rank-2 two-point identities


def _two_point_case(args) -> list[Check]:
    g, k, lam, mu, nu = args
    s = sum(nu)

    def R(side, a, b):
        return fm.rank2_two_point(g, k, a, b, nu, side)

    case = {"g": g, "k": k, "lambda": lam, "mu": mu, "nu": list(nu)}
    out = []
    lhs = R(">", lam, mu) - R("<", lam, mu)
    rhs = fm.chamber_difference_rhs(g, k, lam, mu, nu)
    out.append(Check("two_point", "chamber difference", case, lhs == rhs, {"lhs": _s(lhs), "rhs": _s(rhs)}))
    base_gt, base_lt = R(">", lam, mu), R("<", lam, mu)
    pairs = {
        "antisymmetry a": (base_gt, -R(">", lam, -mu - 1)),
        "antisymmetry b": (base_gt, -R(">", -lam + k + 1 - s, mu) - fm.antisymmetry_correction(g, k, lam, mu, nu, ">")),
        "antisymmetry c": (base_lt, -R("<", -lam - 1 - s, mu)),
        "antisymmetry d": (base_lt, -R("<", lam, -mu + k + 1) - fm.antisymmetry_correction(g, k, lam, mu, nu, "<", plus=True)),
    }
    literal_d = -R("<", lam, -mu + k + 1) - fm.antisymmetry_correction(g, k, lam, mu, nu, "<")
    for name, (a, b) in pairs.items():
        detail = {"lhs": _s(a), "rhs": _s(b)}
        if name == "antisymmetry d":
            detail["rhs_with_displayed_minus"] = _s(literal_d)
        out.append(Check("two_point", name, case, a == b, detail))
    return out


def two_point_grid():
    return [(g, k, lam, mu, nu) for g in (2, 3) for k in range(1, 4) for lam in range(-2, 3)
            for mu in range(-2, 3) for nu in ((1, 0), (2, 1))]


def suite_two_point(jobs: int = 1) -> list[Check]:
    return [c for group in _pmap(_two_point_case, two_point_grid(), jobs) for c in group]


# ---------------------------------------------------------------- wall-crossing


def _wall_case(args) -> list[Check]:
    g, k, lam = args
    L = lattice_point(lam)
    nu = (1, 0, 0)
    chi_lt = fm.chi_vector(fm.EulerQuery(g, k, L, C3_LT, nu)).value
    chi_gt = fm.chi_vector(fm.EulerQuery(g, k, L, C3_GT, nu)).value
    disp_lt = fm.example_rank3(g, k, L, "<")
    disp_gt = fm.example_rank3(g, k, L, ">")
    displayed_diff = fm.example_rank3(g, k, L, "diff")
    restricted = fm.wallcross_residue(g, k, L, nu, EXAMPLE_WALL, C3_GT, basis=EXAMPLE_BASIS)
    from_lt = fm.wallcross_residue(g, k, L, nu, EXAMPLE_WALL, C3_LT, basis=EXAMPLE_BASIS)
    product = fm.wallcross_residue(g, k, L, nu, EXAMPLE_WALL, C3_GT, trees="product")
    corollary = fm.wallcross_corollary(g, k, L, nu, EXAMPLE_WALL, C3_GT, prefactor="plain")
    line_geo = fm.chi_line(fm.EulerQuery(g, k, L, C3_GT)).value - fm.chi_line(fm.EulerQuery(g, k, L, C3_LT)).value
    line_res = fm.wallcross_residue(g, k, L, None, EXAMPLE_WALL, C3_GT)
    case = {"g": g, "k": k, "lambda": list(lam), "nu": list(nu)}
    values = {"chi_lt": str(chi_lt), "chi_gt": str(chi_gt), "displayed_diff": str(displayed_diff),
              "wallcross_residue": str(restricted), "wallcross_residue_from_lt": str(from_lt)}
    return [
        Check("wallcross", "example displays reproduce chi", case, (disp_lt, disp_gt) == (chi_lt, chi_gt),
              {"display_lt": str(disp_lt), "display_gt": str(disp_gt), **values}),
        Check("wallcross", "chi(<) - chi(>) = displayed_diff display", case, chi_lt - chi_gt == displayed_diff, values),
        Check("wallcross", "chi(c+) - chi(c-) = wallcross_residue", case, chi_gt - chi_lt == restricted, values),
        Check("wallcross", "chi(<) - chi(>) = displayed_diff = wallcross_residue with c+ in P_0(<)", case,
              chi_lt - chi_gt == displayed_diff == from_lt, values),
        Check("wallcross", "restricted basis = product trees = corollary", case,
              restricted == product == corollary,
              {"restricted": str(restricted), "product": str(product), "corollary": _s(corollary)}),
        Check("wallcross", "line bundle wall-crossing", case, line_geo == line_res,
              {"geometric": str(line_geo), "residue": str(line_res)}),
    ]


def wall_grid():
    return [(2, k, lam) for k in (1, 2) for lam in WALL_LAMBDAS]


def suite_wallcross(jobs: int = 1) -> list[Check]:
    return [c for group in _pmap(_wall_case, wall_grid(), jobs) for c in group]


# ---------------------------------------------------------------- symmetry


def symmetry_lambdas(count: int = 10) -> list[tuple[int, int, int]]:
    rnd = random.Random(SEED)
    out = []
    while len(out) < count:
        a, b = rnd.randint(-3, 3), rnd.randint(-3, 3)
        lam = (a, b, -a - b)
        if lam not in out:
            out.append(lam)
    return out


def _symmetry_case(args) -> list[Check]:
    k, side, lam = args
    g, nu = 2, (1, 0, 0)
    L = lattice_point(lam)
    vdet = v_det(3, sum(nu))
    f0 = fm.f_shifted(g, k, L, nu, side)
    F0 = fm.F_shifted(g, k, L, nu, side)
    R0 = fm.residue_side(g, k, L, nu, side)
    chi0 = fm.chi_vector(fm.EulerQuery(g, k, L, fm.chamber_point(side, 3), nu)).value
    case = {"g": g, "k": k, "side": side, "lambda": list(lam)}
    out = [Check("symmetry", "chi - f = R - F", case, chi0 - f0 == R0 - F0,
                 {"chi": str(chi0), "f": str(f0), "R": str(R0), "F": str(F0)})]
    for perm, gamma in fm.symmetry_generators(3, side):
        image = fm.act((perm, gamma), k, L, vdet)
        f1 = fm.f_shifted(g, k, image, nu, side)
        F1 = fm.F_shifted(g, k, image, nu, side)
        gen = {"perm": list(perm), "translation": None if gamma is None else [str(x) for x in gamma]}
        detail = {"generator": gen, "image": [str(x) for x in image], "f": str(f0), "f_image": str(f1)}
        out.append(Check("symmetry", "f anti-invariant", case, f1 == -f0, detail))
        out.append(Check("symmetry", "F anti-invariant", case, F1 == -F0,
                         {**detail, "F": str(F0), "F_image": str(F1)}))
    return out


def symmetry_grid():
    return [(k, side, lam) for k in (1, 2) for side in (">", "<") for lam in symmetry_lambdas()]


def suite_symmetry(jobs: int = 1) -> list[Check]:
    return [c for group in _pmap(_symmetry_case, symmetry_grid(), jobs) for c in group]


# ---------------------------------------------------------------- characters


def dominant_weights(r: int, max_dim: int) -> list[tuple[int, ...]]:
    """Dominant ν with ν_r = 0 and dimension ≤ max_dim."""
    out = []

    def rec(prefix):
        if len(prefix) == r - 1:
            nu = tuple(prefix) + (0,)
            if weyl_dimension(nu) <= max_dim:
                out.append(nu)
            return
        top = prefix[-1] if prefix else max_dim
        for x in range(0, top + 1):
            cand = tuple(prefix) + (x,) + (0,) * (r - 1 - len(prefix))
            if weyl_dimension(cand) > max_dim:
                break
            rec(prefix + [x])

    rec([])
    return sorted(out)


def suite_characters(jobs: int = 1) -> list[Check]:
    out = []
    for r in (2, 3, 4):
        for nu in dominant_weights(r, 500):
            gt = weight_table_gt(nu)
            fr = weight_table_freudenthal(nu)
            dim = weyl_dimension(nu)
            at0 = character(nu).value_at_zero()
            out.append(Check("characters", "GT = Freudenthal, φ(0) = dim", {"nu": list(nu)},
                             gt == fr and at0 == dim == sum(gt.values()),
                             {"dimension": str(dim), "phi_at_zero": _s(at0), "weights": str(len(gt))}))
    out.extend(_example_character_checks())
    out.extend(_restriction_checks())
    return out


def _example_character_checks() -> list[Check]:
    """The rank-3 ν = (1,0,0) example in coordinates x = α_12, y = α_23."""
    third = Fraction(1, 3)

    def exp_xy(cx, cy):
        # e^{cx·x + cy·y} as an exponent on V with ⟨α_12, X⟩ = x, ⟨α_23, X⟩ = y
        return CoVector([cx, cy - cx, -cy])

    phi = character((1, 0, 0))
    expect_phi = CharacterSum.from_pairs([(1, exp_xy(2 * third, third)), (1, exp_xy(-third, third)),
                                          (1, exp_xy(-third, -2 * third))])
    expect_x = CharacterSum.from_pairs([(1, exp_xy(2 * third, third)), (-1, exp_xy(-third, third))])
    expect_y = CharacterSum.from_pairs([(1, exp_xy(-third, third)), (-1, exp_xy(-third, -2 * third))])
    a12 = Root(1, 2).covector(3)
    a23 = Root(2, 3).covector(3)
    checks = {
        "phi": (phi, expect_phi),
        "phi_alpha12": (directional_derivative(phi, killing_dual(a12)), expect_x),
        "phi_alpha23": (directional_derivative(phi, killing_dual(a23)), expect_y),
        "trHess = 2/3 phi": (hessian_trace(phi), phi.scale(Fraction(2, 3))),
    }
    return [Check("characters", f"example {name}", {"nu": [1, 0, 0]}, a == b, {}) for name, (a, b) in checks.items()]


RESTRICTION_CASES = (
    ((1, 0, 0), WallSpec(frozenset({2}), frozenset({1, 3}), 0)),
    ((2, 1, 0), WallSpec(frozenset({1}), frozenset({2, 3}), 0)),
    ((2, 1, 0, 0), WallSpec(frozenset({1, 2}), frozenset({3, 4}), 0)),
    ((3, 1, 0, 0), WallSpec(frozenset({2}), frozenset({1, 3, 4}), 0)),
)


def restricted(nu, wall, fn) -> CharacterSum:
    r = wall.r
    total = CharacterSum(())
    for b in branch(nu, wall):
        p1 = block_character(b.nu_prime, wall.prime, r)
        p2 = block_character(b.nu_dprime, wall.dprime, r)
        total = total + (fn(b, p1, p2) * exponential(central_twist(b.s, wall))).scale(b.multiplicity)
    return total


def _restriction_checks() -> list[Check]:
    out = []
    for nu, wall in RESTRICTION_CASES:
        r, r1, r2 = wall.r, len(wall.prime), len(wall.dprime)
        phi = character(nu)
        case = {"nu": list(nu), "prime": sorted(wall.prime)}
        out.append(Check("characters", "restriction of φ", case, restricted(nu, wall, lambda b, p, q: p * q) == phi))
        # (i): a root inside each block
        inside = []
        for block, own in ((sorted(wall.prime), 0), (sorted(wall.dprime), 1)):
            if len(block) > 1:
                a = Root(block[0], block[1]).covector(r)
                lhs = directional_derivative(phi, killing_dual(a))
                rhs = restricted(nu, wall, lambda b, p, q, a=a, own=own:
                                 directional_derivative(p if own == 0 else q, killing_dual(a)) * (q if own == 0 else p))
                inside.append(lhs == rhs)
        out.append(Check("characters", "character derivative identity (i)", case, all(inside)))
        displayed = CoVector([Fraction(r2, r) if i + 1 in wall.prime else Fraction(-r1, r) for i in range(r)])
        block_mean = CoVector([Fraction(1, r1) if i + 1 in wall.prime else Fraction(-1, r2) for i in range(r)])
        coef = Fraction(r, r1 * r2)
        rhs_ii = restricted(nu, wall, lambda b, p, q: (p * q).scale(b.s * coef))
        out.append(Check("characters", "character derivative identity (ii) coefficient s r/(r'r'') with vector (1/r')Σ' - (1/r'')Σ''",
                         case, directional_derivative(phi, block_mean) == rhs_ii,
                         {"displayed_vector_matches": str(directional_derivative(phi, displayed) == rhs_ii),
                          "displayed_vector_with_coefficient_s": str(directional_derivative(phi, displayed) ==
                                                                     restricted(nu, wall,
                                                                                lambda b, p, q: (p * q).scale(b.s)))}))
        rhs_iii = restricted(nu, wall, lambda b, p, q: hessian_trace(p) * q + hessian_trace(q) * p
                             + (p * q).scale(b.s ** 2 * coef))
        out.append(Check("characters", "character derivative identity (iii)", case, hessian_trace(phi) == rhs_iii))
    return out


# ---------------------------------------------------------------- engine


def vanishing_grid():
    out = []
    for r in (2, 3):
        for g in (2, 3):
            for k in (1, 2, 3):
                if r == 2:
                    lams = [(a, -a) for a in range(-2, 3)]
                    cs = [C2]
                else:
                    lams = [(0, 0, 0), (1, 0, -1), (2, -1, -1), (-1, 2, -1), (1, 1, -2)]
                    cs = [C3_GT, C3_LT]
                for lam in lams:
                    for c in cs:
                        out.append((r, g, k, lam, c))
    return out


def _vanishing_case(args) -> Check:
    r, g, k, lam, c = args
    v = fm.chi_vector(fm.EulerQuery(g, k, lattice_point(lam), c, (0,) * r)).value
    return Check("engine", "chi_vector(ν=0) = 0", {"r": r, "g": g, "k": k, "lambda": list(lam),
                                                  "c": [str(x) for x in c]}, v == 0, {"value": str(v)})


def suite_vanishing(jobs: int = 1) -> list[Check]:
    return _pmap(_vanishing_case, vanishing_grid(), jobs)


def suite_diagonal() -> list[Check]:
    out = [Check("engine", "example basis is diagonal", {"r": 3}, is_diagonal(EXAMPLE_BASIS, 3))]
    for r, size in ((2, 1), (3, 2), (4, 6)):
        D = enumerate_diagonal(r)
        out.append(Check("engine", "enumerate_diagonal size and certification", {"r": r},
                         len(D) == size and is_diagonal(D, r), {"size": str(len(D))}))
    D0 = enumerate_diagonal(3)
    for g, k in ((2, 1), (2, 2), (3, 1)):
        for lam in ((0, 0, 0), (1, -3, 2), (2, 1, -3)):
            L = lattice_point(lam)
            for c in (C3_GT, C3_LT):
                a = [fm.chi_vector(fm.EulerQuery(g, k, L, c, (1, 0, 0), D)).value for D in (EXAMPLE_BASIS, D0)]
                b = [fm.chi_line(fm.EulerQuery(g, k, L, c, None, D)).value for D in (EXAMPLE_BASIS, D0)]
                out.append(Check("engine", "basis independence", {"g": g, "k": k, "lambda": list(lam),
                                                                  "c": [str(x) for x in c]},
                                 a[0] == a[1] and b[0] == b[1],
                                 {"vector": [str(x) for x in a], "line": [str(x) for x in b]}))
    return out


def shift_instances(count: int = 20) -> list[tuple]:
    rnd = random.Random(SEED)
    out = []
    for idx in range(count):
        r = 2 if idx % 2 == 0 else 3
        D = enumerate_diagonal(r)
        B = tuple(D[rnd.randrange(len(D))])
        xs = [rnd.randint(-2, 2) for _ in range(r - 1)]
        ys = [rnd.randint(-2, 2) for _ in range(r - 1)]
        es = [rnd.randint(-2, 2) for _ in range(r - 1)]
        nus = [(1, 0), (2, 0), (2, 1)] if r == 2 else [(1, 0, 0), (1, 1, 0), (2, 0, 0)]
        nu = nus[rnd.randrange(len(nus))]
        nu0 = nus[rnd.randrange(len(nus))]
        nu1 = nus[rnd.randrange(len(nus))]
        g = rnd.choice((2, 3))
        k = rnd.randint(1, 3)
        out.append((r, B, g, k, nu, nu0, nu1, tuple(xs + [-sum(xs)]), tuple(ys + [-sum(ys)]),
                    tuple(es + [-sum(es)])))
    return out


def _shift_case(args) -> Check:
    r, B, g, k, nu, nu0, nu1, w, a, e = args
    phi = character(nu)
    psi0 = character(nu0)
    psi1 = character(nu1) * character(nu)
    exponent = rho(r) + lattice_point(e)
    lhs, rhs = fm.shift_identity_sides(B, r, g, k, phi, psi0, psi1, exponent, lattice_point(a), lattice_point(w))
    case = {"r": r, "tree": [[x.i, x.j] for x in B], "g": g, "k": k, "nu": list(nu), "psi0": list(nu0),
            "psi1": [list(nu1), list(nu)], "w": list(w), "a": list(a), "exponent_shift": list(e)}
    return Check("engine", "shift identity", case, lhs == rhs, {"lhs": _s(lhs), "rhs": _s(rhs)})


def suite_shift(jobs: int = 1) -> list[Check]:
    return _pmap(_shift_case, shift_instances(), jobs)


def suite_explicit() -> list[Check]:
    """Jet path against the hand-differentiated formula under both pairing readings."""
    out = []
    cases = [(2, 2, (l, -l), C2, (1, 0)) for l in range(3)]
    cases += [(2, 1, lam, c, (1, 0, 0)) for lam in ((0, 0, 0), (1, -3, 2), (2, 1, -3)) for c in (C3_GT, C3_LT)]
    for g, k, lam, c, nu in cases:
        q = fm.EulerQuery(g, k, lattice_point(lam), c, nu)
        jet = fm.chi_vector(q).value
        exp_basis = fm.chi_vector_explicit(q, "basis").value
        try:
            killing = str(fm.chi_vector_explicit(q, "killing").value)
        except fm.NonIntegral as err:
            killing = f"non-integral: {err}"
        out.append(Check("engine", "jet path = explicit formula (basis pairing)",
                         {"g": g, "k": k, "lambda": list(lam), "c": [str(x) for x in c], "nu": list(nu)},
                         jet == exp_basis, {"jet": str(jet), "explicit": str(exp_basis), "killing_pairing": killing}))
    return out


def suite_engine(jobs: int = 1) -> list[Check]:
    fm.COUNTERS["stability_checks"] = 0
    out = suite_vanishing(jobs) + suite_diagonal() + suite_shift(jobs) + suite_explicit()
    out.append(Check("engine", "window enlargement stability", {},
                     fm.STABILIZE and (jobs > 1 or fm.COUNTERS["stability_checks"] > 0),
                     {"checks_in_process": str(fm.COUNTERS["stability_checks"])}))
    return out


# ---------------------------------------------------------------- oracle


def _oracle_case(args) -> list[Check]:
    g, k, lam = args
    L = lattice_point([lam, -lam])
    q = fm.EulerQuery(g, k, L, C2)
    line = fm.chi_line(q).value
    oracle = verlinde_su2(g, k, 2 * lam)
    unscaled = fm.n_rk(2, k, g) * sum(fm.chi_line_unscaled(tuple(B), 2, g, k, fm.lam_hat(L), -bracket(C2, tuple(B))[0])
                                      for B in enumerate_diagonal(2))
    case = {"g": g, "k": k, "lambda1": lam}
    return [Check("oracle", "chi_line = trigonometric Verlinde sum", case, line == oracle,
                  {"chi_line": str(line), "oracle": str(oracle)}),
            Check("oracle", "scaled line formula = unscaled jet machinery at ν=0", case, line == unscaled,
                  {"scaled": str(line), "unscaled": _s(unscaled)})]


def oracle_grid():
    return [(g, k, lam) for g in (2, 3) for k in range(1, 6) for lam in range(0, k + 1)]


def rank3_scaling_checks() -> list[Check]:
    out = []
    for g, k in ((2, 1), (2, 2), (3, 1)):
        for lam in ((0, 0, 0), (1, -3, 2), (2, 1, -3)):
            L = lattice_point(lam)
            for c in (C3_GT, C3_LT):
                line = fm.chi_line(fm.EulerQuery(g, k, L, c)).value
                unscaled = fm.n_rk(3, k, g) * sum(fm.chi_line_unscaled(tuple(B), 3, g, k, fm.lam_hat(L),
                                                                       -bracket(c, tuple(B))[0])
                                                  for B in enumerate_diagonal(3))
                out.append(Check("oracle", "scaled line formula = unscaled jet machinery at ν=0",
                                 {"r": 3, "g": g, "k": k, "lambda": list(lam), "c": [str(x) for x in c]},
                                 line == unscaled, {"scaled": str(line), "unscaled": _s(unscaled)}))
    return out


def suite_oracle(jobs: int = 1) -> list[Check]:
    return [c for group in _pmap(_oracle_case, oracle_grid(), jobs) for c in group] + rank3_scaling_checks()


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "rank2": suite_rank2,
    "two_point": suite_two_point,
    "wallcross": suite_wallcross,
    "symmetry": suite_symmetry,
    "characters": suite_characters,
    "engine": suite_engine,
    "oracle": suite_oracle,
}


def run_suite(name: str, jobs: int = 1) -> list[Check]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](jobs)
