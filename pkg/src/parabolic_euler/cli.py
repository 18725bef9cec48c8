"""Command-line interface: JSON in, JSON (or CSV for sweeps) out, exact numbers as strings."""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from . import formulas as fm
from .characters import CACHE_ENV, InvalidWeight
from .diagonal_trees import (NotATree, SearchExhausted, enumerate_diagonal, is_diagonal, own_sequence,
                             reordered_sequences)
from .laurent import InsufficientWindow
from .root_system import (CoVector, Root, RootSystemError, WallSpec, classify_chamber, in_simplex, is_regular,
                          lattice_point)
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_UNSTABLE = 0, 1, 2, 3
MAX_SWEEP_CELLS = 10 ** 5
MODES = ("line", "vector", "multi", "wedge2")


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- parsing


def parse_rational(text) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InputError(f"rationals must be strings like 'p/q' or integers, got {text!r}")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as err:
        raise InputError(f"malformed rational {text!r}: {err}") from None


def parse_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{name} must be an integer, got {value!r}")
    return value


def load_spec(arg: str) -> dict:
    if arg == "-":
        text = sys.stdin.read()
    elif os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = arg
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"spec is not valid JSON: {err}") from None
    if not isinstance(doc, dict):
        raise InputError("spec must be a JSON object")
    return doc


def parse_lambda(values, r: int) -> CoVector:
    if not isinstance(values, list) or len(values) != r:
        raise InputError(f"lambda must be a list of {r} integers")
    lam = [parse_int(v, "lambda entry") for v in values]
    if sum(lam) != 0:
        raise InputError("lambda must have coordinate sum 0")
    return lattice_point(lam)


def parse_c(values, r: int) -> CoVector:
    if not isinstance(values, list) or len(values) != r:
        raise InputError(f"c must be a list of {r} rationals")
    c = [parse_rational(v) for v in values]
    if sum(c) != 0:
        raise InputError("c must have coordinate sum 0")
    c = CoVector(c)
    if not in_simplex(c):
        raise InputError(f"c must lie in the open simplex Δ: {c}")
    if not is_regular(c):
        raise InputError(f"c is not regular: {c}")
    return c


def parse_nu(values, r: int):
    if values is None:
        return None
    if isinstance(values, list) and values and all(isinstance(v, list) for v in values):
        return [tuple(parse_int(x, "nu entry") for x in v) for v in values]
    if not isinstance(values, list):
        raise InputError("nu must be a list of integers or a list of such lists")
    return tuple(parse_int(x, "nu entry") for x in values)


def parse_rank(spec: dict) -> int:
    r = parse_int(spec.get("r"), "r")
    if not 2 <= r <= 5:
        raise InputError("r must satisfy 2 <= r <= 5")
    return r


def load_basis(path: str | None, r: int):
    if path is None:
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise InputError(f"cannot read basis file: {err}") from None
    try:
        basis = tuple(tuple(Root(int(i), int(j)) for i, j in tree) for tree in doc)
    except (TypeError, ValueError) as err:
        raise InputError(f"basis file must list trees as [[i, j], ...]: {err}") from None
    if not is_diagonal(basis, r):
        raise InputError("basis file does not contain a diagonal basis")
    return basis


# ---------------------------------------------------------------- records


def tree_json(tree) -> list[list[int]]:
    return [[e.i, e.j] for e in tree]


def chi_record(spec: dict, mode: str, basis=None, timing: bool = False) -> dict:
    r = parse_rank(spec)
    g = parse_int(spec.get("g"), "g")
    k = parse_int(spec.get("k"), "k")
    lam = parse_lambda(spec.get("lambda"), r)
    c = parse_c(spec.get("c"), r)
    nu = parse_nu(spec.get("nu"), r)
    start = time.perf_counter()
    q_nu = nu if mode in ("vector", "wedge2") else None
    if mode in ("vector", "wedge2") and (nu is None or isinstance(nu, list)):
        raise InputError(f"mode {mode} needs a single weight nu")
    if mode == "multi" and nu is None:
        raise InputError("mode multi needs nu")
    q = fm.EulerQuery(g, k, lam, c, q_nu, basis)
    per_basis: list = []
    if mode == "line":
        res = fm.chi_line(q)
        value, per_basis, deltas = res.value, res.per_basis, 0
    elif mode == "vector":
        res = fm.chi_vector(q)
        value, per_basis, deltas = res.value, res.per_basis, 1
    elif mode == "multi":
        nus = nu if isinstance(nu, list) else [nu]
        res = fm.chi_multi(q, nus)
        value, per_basis, deltas = res.value, res.per_basis, len(nus)
    else:
        value, deltas = fm.chi_wedge2(q), 2
    record = {
        "command": "chi",
        "mode": mode,
        "input": {"r": r, "g": g, "k": k, "lambda": [str(x) for x in lam], "c": [str(x) for x in c],
                  "nu": None if nu is None else ([list(v) for v in nu] if isinstance(nu, list) else list(nu))},
        "chamber": list(fm.chamber_key(c)),
        "value": str(value),
        "per_basis": [{"tree": tree_json(B), "value": str(Fraction(v))} for B, v in per_basis],
        "window_plan": [list(p) for p in fm.window_plans(q, deltas)],
        "stability_margin": fm.STABILITY_MARGIN,
        "engine_version": __version__,
    }
    if timing:
        record["timing_s"] = round(time.perf_counter() - start, 6)
    return record


# ---------------------------------------------------------------- sweep


def _range_values(bounds, env: dict) -> list[int]:
    if isinstance(bounds, int) and not isinstance(bounds, bool):
        return [bounds]
    if not isinstance(bounds, list) or len(bounds) != 2:
        raise InputError(f"ranges are [lo, hi] (inclusive) or a single integer, got {bounds!r}")

    def resolve(x):
        if isinstance(x, str):
            expr = x.strip()
            sign = -1 if expr.startswith("-") else 1
            name = expr.lstrip("-")
            if name not in env:
                raise InputError(f"unknown range symbol {x!r}")
            return sign * env[name]
        return parse_int(x, "range bound")

    lo, hi = resolve(bounds[0]), resolve(bounds[1])
    return list(range(lo, hi + 1))


def sweep_cells(spec: dict) -> list[dict]:
    """Cells in lexicographic order of (g, k, λ_1, …, λ_{r−1}, c index)."""
    r = parse_rank(spec)
    ranges = spec.get("ranges", {})
    if not isinstance(ranges, dict):
        raise InputError("ranges must be an object")
    c_list = spec.get("c_list", [spec.get("c")])
    if not isinstance(c_list, list):
        raise InputError("c_list must be a list")
    gs = _range_values(ranges.get("g", spec.get("g")), {})
    cells = []
    count = 0
    for g in gs:
        for k in _range_values(ranges.get("k", spec.get("k")), {"g": g}):
            lam_ranges = [_range_values(ranges.get(f"lambda{i}", 0), {"g": g, "k": k}) for i in range(1, r)]
            size = len(c_list)
            for vals in lam_ranges:
                size *= len(vals)
            count += size
            if count > MAX_SWEEP_CELLS:
                raise InputError(f"sweep exceeds {MAX_SWEEP_CELLS} cells")
            for lam in itertools.product(*lam_ranges):
                for c in c_list:
                    cell = {key: spec[key] for key in ("r", "nu") if key in spec}
                    cell.update({"g": g, "k": k, "lambda": list(lam) + [-sum(lam)], "c": c})
                    cells.append(cell)
    return cells


def _sweep_worker(args):
    cell, mode, basis = args
    return chi_record(cell, mode, basis)


def run_sweep(spec: dict, mode: str, basis, jobs: int) -> list[dict]:
    cells = sweep_cells(spec)
    for cell in cells:
        parse_c(cell["c"], cell["r"])
    work = [(cell, mode, basis) for cell in cells]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_sweep_worker, work))
    return [_sweep_worker(w) for w in work]


SWEEP_COLUMNS = ("g", "k", "lambda", "c", "nu", "chamber", "value")


def sweep_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for rec in records:
        inp = rec["input"]
        writer.writerow([inp["g"], inp["k"], " ".join(inp["lambda"]), " ".join(inp["c"]),
                         "" if inp["nu"] is None else json.dumps(inp["nu"]),
                         " ".join(str(x) for x in rec["chamber"]), rec["value"]])
    return buf.getvalue()


# ---------------------------------------------------------------- wall-crossing


def parse_wall(doc, r: int) -> WallSpec:
    if not isinstance(doc, dict):
        raise InputError("wall must be an object {prime, dprime, level}")
    try:
        return WallSpec(frozenset(parse_int(i, "wall index") for i in doc["prime"]),
                        frozenset(parse_int(i, "wall index") for i in doc["dprime"]),
                        parse_int(doc.get("level", 0), "level"))
    except KeyError as err:
        raise InputError(f"wall is missing {err}") from None


def wallcross_record(spec: dict, basis=None) -> dict:
    r = parse_rank(spec)
    g = parse_int(spec.get("g"), "g")
    k = parse_int(spec.get("k"), "k")
    lam = parse_lambda(spec.get("lambda"), r)
    c_plus = parse_c(spec.get("c_plus", spec.get("c")), r)
    nu = parse_nu(spec.get("nu"), r)
    if isinstance(nu, list):
        raise InputError("wallcross takes a single weight nu")
    wall = parse_wall(spec.get("wall"), r)
    if wall.r != r:
        raise InputError("wall does not match r")
    fm.check_wall_side(wall, c_plus)
    if "c_minus" in spec:
        c_minus = parse_c(spec["c_minus"], r)
        if classify_chamber(c_plus, c_minus) != [wall]:
            raise fm.InconsistentWall("c_minus is not across exactly this wall from c_plus")
    else:
        c_minus = fm.across_wall(c_plus, wall)
    line = nu is None or not any(x - nu[-1] for x in nu)
    if line:
        geo = fm.chi_line(fm.EulerQuery(g, k, lam, c_plus, None, basis)).value - \
            fm.chi_line(fm.EulerQuery(g, k, lam, c_minus, None, basis)).value
    else:
        geo = fm.chi_vector(fm.EulerQuery(g, k, lam, c_plus, nu, basis)).value - \
            fm.chi_vector(fm.EulerQuery(g, k, lam, c_minus, nu, basis)).value
    residue = fm.wallcross_residue(g, k, lam, None if line else nu, wall, c_plus, basis)
    return {
        "command": "wallcross",
        "input": {"r": r, "g": g, "k": k, "lambda": [str(x) for x in lam], "nu": None if nu is None else list(nu),
                  "wall": {"prime": sorted(wall.prime), "dprime": sorted(wall.dprime), "level": wall.level},
                  "c_plus": [str(x) for x in c_plus], "c_minus": [str(x) for x in c_minus]},
        "chamber_plus": list(fm.chamber_key(c_plus)),
        "chamber_minus": list(fm.chamber_key(c_minus)),
        "geometric_difference": str(geo),
        "residue": str(residue),
        "equal": geo == residue,
        "engine_version": __version__,
    }


# ---------------------------------------------------------------- diagonal


def partition_json(p) -> list[list[int]]:
    return sorted(sorted(b) for b in p)


def diagonal_record(r: int) -> dict:
    D = enumerate_diagonal(r)
    transcript = []
    for a, A in enumerate(D):
        flag = own_sequence(A, r)
        others = [b for b in range(len(D)) if b != a and flag in reordered_sequences(D[b], r)]
        transcript.append({"tree": tree_json(A), "flag": [partition_json(p) for p in flag],
                           "collides_with": others})
    return {"command": "diagonal", "r": r, "trees": [tree_json(t) for t in D],
            "certified": is_diagonal(D, r), "transcript": transcript, "engine_version": __version__}


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, default="vector")
    common.add_argument("--basis-file", help="JSON list of ordered trees [[i, j], ...] forming a diagonal basis")
    common.add_argument("--cache-dir", help=f"weight-table cache directory (overrides ${CACHE_ENV})")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings in records")

    parser = argparse.ArgumentParser(prog="parabolic-euler", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("chi", parents=[common], help="Euler characteristic for one query")
    p.add_argument("spec", help="JSON object, path to a JSON file, or '-' for stdin")
    p = sub.add_parser("sweep", parents=[common], help="table over parameter ranges")
    p.add_argument("spec")
    p = sub.add_parser("wallcross", parents=[common], help="wall-crossing difference and residue side")
    p.add_argument("spec")
    p = sub.add_parser("diagonal", parents=[common], help="certified diagonal basis")
    p.add_argument("r", type=int)
    p = sub.add_parser("verify", parents=[common], help="run an identity suite")
    p.add_argument("suite", choices=sorted(SUITES))
    return parser


def emit(doc, output: str, out) -> None:
    if output == "csv" and isinstance(doc, str):
        out.write(doc)
    else:
        out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_INVALID if err.code else EXIT_OK
    if args.cache_dir:
        os.environ[CACHE_ENV] = args.cache_dir
    jobs = max(1, args.jobs)
    try:
        if args.command == "diagonal":
            if not 2 <= args.r <= 5:
                raise InputError("r must satisfy 2 <= r <= 5")
            emit(diagonal_record(args.r), "json", out)
            return EXIT_OK
        if args.command == "verify":
            checks = run_suite(args.suite, jobs)
            failed = [c for c in checks if not c.passed]
            emit({"suite": args.suite, "total": len(checks), "failed": len(failed),
                  "checks": [c.to_json() for c in checks], "engine_version": __version__}, "json", out)
            return EXIT_FAILED if failed else EXIT_OK
        spec = load_spec(args.spec)
        r = parse_rank(spec)
        basis = load_basis(args.basis_file, r)
        if args.command == "chi":
            emit(chi_record(spec, args.mode, basis, args.timing), "json", out)
            return EXIT_OK
        if args.command == "sweep":
            records = run_sweep(spec, args.mode, basis, jobs)
            if args.output == "csv":
                emit(sweep_csv(records), "csv", out)
            else:
                emit({"command": "sweep", "rows": records, "engine_version": __version__}, "json", out)
            return EXIT_OK
        if args.command == "wallcross":
            record = wallcross_record(spec, basis)
            emit(record, "json", out)
            return EXIT_OK if record["equal"] else EXIT_FAILED
    except (InputError, RootSystemError, InvalidWeight, NotATree, fm.InvalidQuery, fm.InconsistentWall) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (fm.WindowInstability, InsufficientWindow, SearchExhausted) as err:
        print(f"internal instability: {err}", file=sys.stderr)
        return EXIT_UNSTABLE
    return EXIT_INVALID


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
