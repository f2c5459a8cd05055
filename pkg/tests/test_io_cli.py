import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from framelab.cli import main
from framelab.exceptions import (DimensionMismatchError, InvariantViolation,
                                 KernelNotTrivialError, ParseError)
from framelab.io import dump_problem, dumps_json, load_problem, parse_problem

FIX = Path(__file__).parent / "fixtures"


def _matrix(a, name="m"):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return {"name": name, "rows": a.shape[0], "cols": a.shape[1], "data": a.ravel().tolist()}


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("J, signature", [(np.eye(2), (2, 0)), (np.diag([1.0, -1.0]), (1, 1))])
def test_load_signature(tmp_path, J, signature):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"space": {"J": _matrix(J)}, "frame": _matrix(np.eye(2))}))
    problem = load_problem(path)
    assert problem.space.signature == signature
    assert len(problem.sha256) == 64


def test_load_rejects_non_involution():
    with pytest.raises(InvariantViolation) as info:
        load_problem(FIX / "bad_involution.json")
    assert info.value.invariant == "involution"
    assert info.value.path == "space.J"


@pytest.mark.parametrize("doc, error", [
    ({}, ParseError),
    ({"frame": {"rows": 2, "cols": 2, "data": [1, 2, 3]}}, InvariantViolation),
    ({"frame": {"rows": 1, "cols": 1, "data": ["x"]}}, ParseError),
    ({"frame": {"rows": 2, "cols": 1}}, ParseError),
    ({"frame": _matrix(np.eye(2)), "space": {"J": _matrix(np.eye(3))}}, DimensionMismatchError),
    ({"frame": _matrix(np.eye(2)), "gram": _matrix(np.eye(3))}, DimensionMismatchError),
    ({"frame": _matrix(np.eye(2)), "gram": _matrix(np.zeros((2, 2)))}, KernelNotTrivialError),
    ({"frame": _matrix(np.eye(2)), "gram": _matrix(np.eye(2)),
      "grid": {"points": [0, 1], "mu": [1, 1], "phi": [1, 1]}}, InvariantViolation),
])
def test_parse_errors(doc, error):
    with pytest.raises(error):
        parse_problem(doc)


def test_load_missing_and_malformed(tmp_path):
    with pytest.raises(ParseError):
        load_problem(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_problem(bad)


@pytest.mark.parametrize("name", sorted(p.name for p in FIX.glob("*.json")
                                        if p.name not in {"bad_involution.json",
                                                          "singular_gram.json"}
                                        and not p.name.startswith("golden")))
def test_dump_round_trip(name):
    problem = load_problem(FIX / name)
    again = parse_problem(json.loads(dumps_json(dump_problem(problem))))
    np.testing.assert_array_equal(again.family.synthesis, problem.family.synthesis)
    np.testing.assert_array_equal(again.space.J, problem.space.J)
    assert dump_problem(again) == dump_problem(problem)


def test_dumps_json_is_deterministic():
    text = dumps_json({"b": np.float64(0.1), "a": [np.int64(3), np.bool_(True)]})
    assert text == '{\n  "a": [\n    3,\n    true\n  ],\n  "b": 0.1\n}\n'
    with pytest.raises(ValueError):
        dumps_json({"x": float("nan")})


def test_analyze_orthonormal_basis(capsys):
    code, out, _ = run(["analyze", FIX / "split_basis.json"], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["bounds"] == {"lower": 1.0, "upper": 1.0}
    assert report["flags"]["is_frame"] and report["flags"]["is_jonb"]
    assert report["signature"] == [1, 1]


def test_analyze_rank_deficient(capsys):
    code, out, _ = run(["analyze", FIX / "rank_deficient.json"], capsys)
    assert code == 2
    assert json.loads(out)["flags"]["is_frame"] is False


def test_analyze_mercedes(capsys):
    code, out, _ = run(["analyze", FIX / "mercedes.json"], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["bounds"]["lower"] == pytest.approx(1.5, abs=1e-9)
    assert report["bounds"]["upper"] == pytest.approx(1.5, abs=1e-9)
    assert report["flags"]["is_tight"] and not report["flags"]["is_exact"]
    assert report["reconstruction"]["max_relative_residual"] <= 1e-12
    for variant in report["dual_bounds"].values():
        assert (variant["lower"], variant["upper"]) == pytest.approx((2 / 3, 2 / 3), rel=1e-9)


def test_dual_mercedes(capsys):
    code, out, _ = run(["dual", FIX / "mercedes.json", "--variant", "canonical_krein"], capsys)
    from framelab.generators import mercedes_frame
    assert code == 0
    vectors = np.array(json.loads(out)["vectors"]).T
    np.testing.assert_allclose(vectors, (2 / 3) * mercedes_frame(), atol=1e-15)


def test_dual_unknown_variant(capsys):
    code, _, err = run(["dual", FIX / "mercedes.json", "--variant", "nope"], capsys)
    assert code == 1 and "invalid choice" in err


def test_dual_not_a_frame(capsys):
    code, _, err = run(["dual", FIX / "rank_deficient.json"], capsys)
    assert code == 2 and "not a frame" in err


def test_reconstruct(capsys):
    code, out, _ = run(["reconstruct", FIX / "split_basis.json", "--vector", "0.3,-2"], capsys)
    report = json.loads(out)
    assert code == 0 and report["residual"] <= 1e-12
    np.testing.assert_allclose(report["reconstruction"], [0.3, -2])
    code, _, _ = run(["reconstruct", FIX / "split_basis.json", "--vector", "1,2,3"], capsys)
    assert code == 1


def test_transfer_diag(capsys):
    code, out, _ = run(["transfer", FIX / "transfer_diag.json"], capsys)
    report = json.loads(out)
    assert code == 0
    np.testing.assert_allclose(report["transferred"]["columns"], [[0.5, 0], [0, 1 / 3]],
                               rtol=1e-15)
    assert report["w_metric_bounds"] == pytest.approx({"lower": 1.0, "upper": 1.0})
    assert report["euclidean_bounds"] == {"lower": 1.0, "upper": 1.0}


def test_transfer_identity_gram(tmp_path, capsys):
    path = tmp_path / "id.json"
    k = np.random.default_rng(0).standard_normal((3, 5))
    path.write_text(json.dumps({"frame": _matrix(k), "gram": _matrix(np.eye(3))}))
    code, out, _ = run(["transfer", path], capsys)
    report = json.loads(out)
    assert code == 0
    np.testing.assert_array_equal(np.array(report["transferred"]["columns"]).T, k)
    assert report["w_metric_bounds"] == pytest.approx(report["euclidean_bounds"], rel=1e-12)


def test_transfer_exit_codes(capsys):
    assert run(["transfer", FIX / "singular_gram.json"], capsys)[0] == 3
    assert run(["transfer", FIX / "mercedes.json"], capsys)[0] == 1   # no gram
    assert run(["analyze", FIX / "bad_involution.json"], capsys)[0] == 1
    assert run(["analyze", FIX / "missing.json"], capsys)[0] == 1
    assert run(["frobnicate", FIX / "mercedes.json"], capsys)[0] == 1


def test_transfer_grid_sample_coordinates(capsys):
    code, out, _ = run(["transfer", FIX / "grid_sine.json"], capsys)
    report = json.loads(out)
    assert code == 0 and report["coordinates"] == "samples"
    np.testing.assert_allclose(np.array(report["transferred"]["columns"]).T,
                               np.diag(1 / np.sqrt([1.0, 2, 3, 4])), rtol=1e-15)


def test_sweep_csv_and_summary(tmp_path, capsys):
    csv_path = tmp_path / "curve.csv"
    params = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6"
    code, out, _ = run(["sweep", FIX / "split_basis.json", "--direction", "floor",
                        "--params", params, "--out", csv_path], capsys)
    assert code == 0
    raw = csv_path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "parameter,lower_bound,upper_bound,envelope"
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert rows.shape == (6, 4)
    np.testing.assert_allclose(rows[:, 1], rows[:, 0], rtol=1e-12)
    assert json.loads(out)["all_envelopes_satisfied"] is True

    code, out, err = run(["sweep", FIX / "split_basis.json", "--params", params], capsys)
    assert code == 0 and out.encode() == raw
    assert json.loads(err)["direction"] == "floor"


def test_sweep_non_monotone(capsys):
    code, _, err = run(["sweep", FIX / "mercedes.json", "--params", "1e-1,1e-3,1e-2"], capsys)
    assert code == 1 and "monoton" in err


@pytest.mark.parametrize("argv", [
    ["analyze", "mercedes.json", "--seed", "7"],
    ["transfer", "transfer_diag.json"],
    ["reconstruct", "mercedes.json"],
])
def test_byte_identical_subprocess(argv):
    cmd = [sys.executable, "-m", "framelab", argv[0], str(FIX / argv[1]), *argv[2:]]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first.endswith(b"\n")


def _assert_matches_golden(actual, golden, path="$"):
    if isinstance(golden, dict):
        assert sorted(actual) == sorted(golden), path
        for key in golden:
            _assert_matches_golden(actual[key], golden[key], f"{path}.{key}")
    elif isinstance(golden, list):
        assert len(actual) == len(golden), path
        for i, (a, g) in enumerate(zip(actual, golden)):
            _assert_matches_golden(a, g, f"{path}[{i}]")
    elif isinstance(golden, float) and not isinstance(golden, bool):
        # residual fields are rounding noise; everything else must agree closely
        assert actual == pytest.approx(golden, rel=1e-9, abs=1e-12), path
    else:
        assert actual == golden, path


@pytest.mark.parametrize("golden, argv", [
    ("golden_analyze_mercedes.json", ["analyze", "mercedes.json"]),
    ("golden_transfer_diag.json", ["transfer", "transfer_diag.json"]),
])
def test_golden_files(golden, argv, capsys):
    code, out, _ = run([argv[0], FIX / argv[1], *argv[2:]], capsys)
    assert code == 0
    _assert_matches_golden(json.loads(out), json.loads((FIX / golden).read_text()))
