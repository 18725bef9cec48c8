import csv
import io
import json
import subprocess
import sys

import pytest

from parabolic_euler import cli

C2 = ["3/10", "-3/10"]


def run(argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    out = io.StringIO()
    code = cli.main(argv, out=out)
    return code, out.getvalue()


def spec(**kw):
    base = {"r": 2, "g": 2, "k": 1, "lambda": [0, 0], "c": C2, "nu": [1, 0]}
    base.update(kw)
    return json.dumps(base)


def test_chi_trivial_weight_is_zero():
    code, out = run(["chi", spec(nu=[0, 0])])
    assert code == 0
    assert json.loads(out)["value"] == "0"


def test_chi_line_matches_oracle():
    from parabolic_euler.oracles import verlinde_su2

    code, out = run(["chi", "--mode", "line", spec(nu=None)])
    assert code == 0
    assert json.loads(out)["value"] == str(verlinde_su2(2, 1, 0))


def test_record_fields_and_determinism():
    first = run(["chi", spec()])[1]
    assert first == run(["chi", spec()])[1]
    rec = json.loads(first)
    for key in ("input", "chamber", "value", "per_basis", "window_plan", "engine_version"):
        assert key in rec
    assert "timing_s" not in rec
    assert "timing_s" in json.loads(run(["chi", "--timing", spec()])[1])


def test_spec_from_file_and_stdin(tmp_path, monkeypatch):
    path = tmp_path / "q.json"
    path.write_text(spec())
    assert run(["chi", str(path)])[0] == 0
    code, out = run(["chi", "-"], stdin=spec(), monkeypatch=monkeypatch)
    assert code == 0 and json.loads(out)["value"] == json.loads(run(["chi", spec()])[1])["value"]


@pytest.mark.parametrize("bad", [
    spec(c=["1/0", "-1/4"]),
    spec(c=["1/2", "-1/2"]),
    spec(r=1),
    spec(r=7),
    spec(nu=[0, 1]),
    spec(**{"lambda": [1, 0]}),
    "{not json",
    "[1, 2]",
])
def test_validation_errors_exit_2(bad, capsys):
    assert run(["chi", bad])[0] == 2
    assert capsys.readouterr().err.startswith("error:")


def test_unknown_subcommand_exits_2():
    assert run(["frobnicate"])[0] == 2


def test_sweep_counts_rows_in_order():
    doc = {"r": 2, "g": 2, "c": C2, "nu": [1, 0], "ranges": {"k": [1, 3], "lambda1": [0, "k"]}}
    code, out = run(["sweep", "--output", "csv", json.dumps(doc)])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    keys = [(int(r["k"]), int(r["lambda"].split()[0])) for r in rows]
    assert keys == sorted(keys)


def test_sweep_json_matches_chi():
    doc = {"r": 2, "g": 2, "c": C2, "nu": [1, 0], "ranges": {"k": [1, 1], "lambda1": [0, 1]}}
    rows = json.loads(run(["sweep", json.dumps(doc)])[1])["rows"]
    single = json.loads(run(["chi", spec(**{"lambda": [1, -1]})])[1])
    assert rows[1]["value"] == single["value"]


def test_empty_sweep_is_empty_table():
    doc = {"r": 2, "g": 2, "c": C2, "nu": [1, 0], "ranges": {"k": [3, 1]}}
    code, out = run(["sweep", "--output", "csv", json.dumps(doc)])
    assert code == 0
    assert out.strip().splitlines() == [",".join(cli.SWEEP_COLUMNS)]


def test_oversize_sweep_exits_2():
    doc = {"r": 3, "g": 2, "c": ["1/5", "1/10", "-3/10"], "ranges": {"k": [1, 100], "lambda1": [0, 100],
                                                                    "lambda2": [0, 100]}}
    assert run(["sweep", json.dumps(doc)])[0] == 2


WALL = {"prime": [2], "dprime": [1, 3], "level": 0}


def test_wallcross_example_equality():
    doc = {"r": 3, "g": 2, "k": 1, "lambda": [-3, 2, 1], "nu": [1, 0, 0], "c_plus": ["1/5", "1/10", "-3/10"],
           "wall": WALL}
    code, out = run(["wallcross", json.dumps(doc)])
    rec = json.loads(out)
    assert code == 0 and rec["equal"] is True
    assert rec["geometric_difference"] == rec["residue"] == "-120"


def test_wallcross_line_bundle():
    doc = {"r": 3, "g": 2, "k": 1, "lambda": [1, 0, -1], "c_plus": ["1/5", "1/10", "-3/10"], "wall": WALL}
    assert json.loads(run(["wallcross", json.dumps(doc)])[1])["equal"] is True


def test_wallcross_non_adjacent_exits_2():
    doc = {"r": 3, "g": 2, "k": 1, "lambda": [0, 0, 0], "nu": [1, 0, 0], "c_plus": ["1/5", "1/10", "-3/10"],
           "wall": dict(WALL, level=1)}
    assert run(["wallcross", json.dumps(doc)])[0] == 2


def test_diagonal_transcript():
    code, out = run(["diagonal", "3"])
    rec = json.loads(out)
    assert code == 0 and rec["certified"] and len(rec["trees"]) == 2
    assert all(not t["collides_with"] for t in rec["transcript"])
    assert run(["diagonal", "9"])[0] == 2


def test_basis_file(tmp_path):
    path = tmp_path / "basis.json"
    path.write_text(json.dumps([[[2, 3], [1, 2]], [[3, 2], [1, 3]]]))
    s = json.dumps({"r": 3, "g": 2, "k": 1, "lambda": [1, -3, 2], "c": ["1/5", "1/10", "-3/10"], "nu": [1, 0, 0]})
    with_file = json.loads(run(["chi", "--basis-file", str(path), s])[1])["value"]
    assert with_file == json.loads(run(["chi", s])[1])["value"]
    path.write_text(json.dumps([[[2, 3], [1, 2]], [[2, 3], [1, 2]]]))
    assert run(["chi", "--basis-file", str(path), s])[0] == 2


def test_cache_dir_flag(tmp_path, monkeypatch):
    monkeypatch.delenv("PARABOLIC_EULER_CACHE", raising=False)
    assert run(["chi", "--cache-dir", str(tmp_path), spec()])[0] == 0
    import os
    assert os.environ["PARABOLIC_EULER_CACHE"] == str(tmp_path)


def test_verify_suite_exit_code():
    code, out = run(["verify", "rank2"])
    assert code == 0 and json.loads(out)["failed"] == 0


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "parabolic_euler.cli", "chi", spec(nu=[0, 0])],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == "0"
