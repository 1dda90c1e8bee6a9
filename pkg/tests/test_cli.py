"""End-to-end tests of the command-line front end.

Every test drives cli.main in process and inspects the artifact text, so
exit codes, stdout, stderr, and --out files are all covered.  One test
runs the installed module form in a subprocess.
"""

import csv
import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from intrametric.cli import main
from intrametric.errors import SceneError
from intrametric.exception_sets import exception_set_from_json, path_crossings
from intrametric.geometry import Polyline
from intrametric.scene import parse_scene_config

SLIT_SCENE = {
    "dimension": 2,
    "exception_set": {"kind": "slit", "tip": [0.0, 0.0], "direction": [-1.0, 0.0]},
    "points": [[-1.0, 1.0], [-1.0, -1.0]],
}

CIRCLE_SCENE = {
    "dimension": 2,
    "exception_set": {"kind": "circle", "center": [0.0, 0.0], "radius": 1.0},
    "points": [[-2.0, 0.0], [2.0, 0.0]],
}

GRID_SCENE = {
    "dimension": 2,
    "exception_set": {"kind": "rational_grid"},
    "points": [[0.2718281828459045, 0.8414709848078965],
               [1.0471975511965976, 0.1234567891011121]],
}


def write_scene(tmp_path, obj, name="scene.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDist:
    def test_slit_json(self, tmp_path, capsys):
        code, out, err = run(capsys, "dist", write_scene(tmp_path, SLIT_SCENE))
        assert code == 0 and err == ""
        doc = json.loads(out)
        assert doc["command"] == "dist"
        assert not doc["infinite"]
        assert doc["upper"] == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-9)
        assert doc["crossings"]["classification"] == "finite"
        poly = Polyline.from_json_obj(doc["witness"])
        assert poly.length() == pytest.approx(doc["upper"], rel=1e-12)

    def test_slit_csv_witness(self, tmp_path, capsys):
        code, out, err = run(capsys, "dist", write_scene(tmp_path, SLIT_SCENE),
                             "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["x1", "x2"]
        verts = [[float(c) for c in row] for row in rows[1:]]
        assert verts[0] == [-1.0, 1.0] and verts[-1] == [-1.0, -1.0]

    def test_grid_depth_flag(self, tmp_path, capsys):
        scene = dict(SLIT_SCENE, params={"method": "grid"})
        code, out, _ = run(capsys, "dist", write_scene(tmp_path, scene),
                           "--grid-depth", "8")
        assert code == 0
        doc = json.loads(out)
        assert doc["upper"] == pytest.approx(2.0 * math.sqrt(2.0), rel=0.01)

    def test_blocked_pair_reports_infinite(self, tmp_path, capsys):
        scene = {
            "dimension": 2,
            "exception_set": {"kind": "hyperplane", "normal": [0.0, 1.0], "offset": 0.0},
            "points": [[0.0, 1.0], [0.0, -1.0]],
        }
        code, out, _ = run(capsys, "dist", write_scene(tmp_path, scene))
        assert code == 0
        doc = json.loads(out)
        assert doc["infinite"] is True
        assert doc["upper"] is None and doc["witness"] is None

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "result.json"
        code, out, _ = run(capsys, "dist", write_scene(tmp_path, SLIT_SCENE),
                           "--out", str(target))
        assert code == 0 and out == ""
        doc = json.loads(target.read_text())
        assert doc["command"] == "dist"


class TestThetaDist:
    def test_rational_grid_is_finite(self, tmp_path, capsys):
        code, out, _ = run(capsys, "theta-dist", write_scene(tmp_path, GRID_SCENE))
        assert code == 0
        doc = json.loads(out)
        assert not doc["infinite"]
        gap = math.dist(*GRID_SCENE["points"])
        assert gap - 1e-9 <= doc["upper"] <= gap + 1e-6
        assert doc["crossings"]["classification"] == "finite"

    def test_irrational_square_is_infinite(self, tmp_path, capsys):
        scene = {
            "dimension": 2,
            "exception_set": {"kind": "irrational_square"},
            "points": [[0.125, 0.25], [0.75, 0.5]],
        }
        code, out, _ = run(capsys, "theta-dist", write_scene(tmp_path, scene))
        assert code == 0
        doc = json.loads(out)
        assert doc["infinite"] is True


class TestCertify:
    def test_circle_report_and_roundtrip(self, tmp_path, capsys):
        code, out, _ = run(capsys, "certify", write_scene(tmp_path, CIRCLE_SCENE))
        assert code == 0
        doc = json.loads(out)
        assert doc["command"] == "certify"
        assert doc["length"] == pytest.approx(4.0, abs=1e-6)
        report = doc["crossing_report"]
        assert report["classification"] == "finite"
        assert len(report["crossings"]) == 2
        # re-importing the witness must reproduce the shipped report
        theta = exception_set_from_json(CIRCLE_SCENE["exception_set"], 2)
        again = path_crossings(theta, Polyline.from_json_obj(doc["witness"]))
        assert again.classification == report["classification"]
        assert again.count == len(report["crossings"])
        for got, shipped in zip(again.crossings, report["crossings"]):
            assert got[1] == pytest.approx(shipped["point"], abs=1e-9)

    def test_csv_roundtrip_through_file(self, tmp_path, capsys):
        target = tmp_path / "witness.csv"
        code, out, _ = run(capsys, "certify", write_scene(tmp_path, CIRCLE_SCENE),
                           "--format", "csv", "--out", str(target))
        assert code == 0 and out == ""
        poly = Polyline.read_csv(str(target))
        theta = exception_set_from_json(CIRCLE_SCENE["exception_set"], 2)
        report = path_crossings(theta, poly)
        assert report.classification == "finite"
        assert report.count == 2

    def test_refusal_exits_one(self, tmp_path, capsys):
        scene = {
            "dimension": 2,
            "exception_set": {"kind": "irrational_square"},
            "points": [[0.125, 0.25], [0.75, 0.5]],
        }
        code, out, err = run(capsys, "certify", write_scene(tmp_path, scene))
        assert code == 1 and out == ""
        doc = json.loads(err)
        assert doc["error"] == "NotPermeableFamilyError"


class TestCbRank:
    def test_sk_family(self, tmp_path, capsys):
        scene = {"dimension": 1, "cb_set": {"kind": "sk_family", "k": 3}}
        code, out, _ = run(capsys, "cb-rank", write_scene(tmp_path, scene))
        assert code == 0
        assert out == "4\n"

    def test_perfect_core(self, tmp_path, capsys):
        scene = {"dimension": 1, "cb_set": {"kind": "perfect_core"}}
        code, out, _ = run(capsys, "cb-rank", write_scene(tmp_path, scene))
        assert code == 0
        assert out == "perfect_core\n"

    def test_harmonic_limit(self, tmp_path, capsys):
        scene = {"dimension": 1, "cb_set": {
            "kind": "limit", "point": 0.0,
            "rule": {"type": "harmonic", "anchor": 1.0},
            "template": {"kind": "points", "values": [1.0]}}}
        code, out, _ = run(capsys, "cb-rank", write_scene(tmp_path, scene))
        assert code == 0
        assert out == "2\n"


class TestStaircase:
    SCENE = {"dimension": 1, "points": [["1/3"], ["1/9"], [0.5]]}

    def test_json_keeps_fractions_exact(self, tmp_path, capsys):
        code, out, _ = run(capsys, "staircase", write_scene(tmp_path, self.SCENE))
        assert code == 0
        doc = json.loads(out)
        assert doc["values"] == [
            {"x": "1/3", "c": "1/2"},
            {"x": "1/9", "c": "1/4"},
            {"x": "0.5", "c": "0.5"},
        ]

    def test_csv_columns(self, tmp_path, capsys):
        code, out, _ = run(capsys, "staircase", write_scene(tmp_path, self.SCENE),
                           "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows == [["x", "c"], ["1/3", "1/2"], ["1/9", "1/4"], ["0.5", "0.5"]]

    def test_needs_dimension_one(self, tmp_path, capsys):
        scene = {"dimension": 2, "points": [[0.5, 0.5]]}
        code, out, err = run(capsys, "staircase", write_scene(tmp_path, scene))
        assert code == 2
        assert json.loads(err)["field"] == "dimension"


class TestLipschitz:
    SCENE = {"dimension": 2, "function": {"kind": "linear", "v": [3.0, 4.0]},
             "params": {"pairs": 500}}

    def test_json(self, tmp_path, capsys):
        code, out, _ = run(capsys, "lipschitz", write_scene(tmp_path, self.SCENE))
        assert code == 0
        doc = json.loads(out)
        assert doc["command"] == "lipschitz"
        assert doc["kind"] == "linear" and doc["metric"] == "euclidean"
        assert 4.9 <= doc["max_ratio"] <= 5.0 + 1e-12
        assert doc["pairs_used"] >= 400

    def test_csv(self, tmp_path, capsys):
        code, out, _ = run(capsys, "lipschitz", write_scene(tmp_path, self.SCENE),
                           "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["kind", "metric", "pairs_used", "max_ratio"]
        assert rows[1][0] == "linear"
        assert float(rows[1][3]) <= 5.0 + 1e-12

    def test_pairs_flag_overrides_scene(self, tmp_path, capsys):
        code, out, _ = run(capsys, "lipschitz", write_scene(tmp_path, self.SCENE),
                           "--pairs", "50")
        assert code == 0
        assert json.loads(out)["pairs_used"] <= 50


class TestVerify:
    def test_stdout_summary(self, capsys):
        code, out, _ = run(capsys, "verify", "--seed", "5")
        assert code == 0
        summary = json.loads(out)
        assert summary["all_expected"] is True
        assert summary["seed"] == 5

    def test_out_file_and_check_lines(self, tmp_path, capsys):
        target = tmp_path / "suite.json"
        code, out, _ = run(capsys, "verify", "--seed", "5", "--out", str(target))
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 16
        assert all(line.endswith("[ok]") for line in lines)
        summary = json.loads(target.read_text())
        assert summary["all_expected"] is True


class TestErrorPaths:
    def test_missing_file(self, capsys):
        code, out, err = run(capsys, "dist", "/nonexistent/scene.json")
        assert code == 2
        assert json.loads(err)["field"] == "$"

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{\n  bad\n}")
        code, _, err = run(capsys, "dist", str(path))
        assert code == 2
        doc = json.loads(err)
        assert doc["field"] == "$"
        assert "line 2" in doc["detail"]

    def test_unknown_top_key(self, tmp_path, capsys):
        code, _, err = run(capsys, "dist", write_scene(tmp_path, {"dimension": 2, "frobnicate": 1}))
        assert code == 2
        assert json.loads(err)["field"] == "frobnicate"

    def test_certify_needs_exception_set(self, tmp_path, capsys):
        scene = {"dimension": 2, "points": [[0.0, 0.0], [1.0, 1.0]]}
        code, _, err = run(capsys, "certify", write_scene(tmp_path, scene))
        assert code == 2
        assert json.loads(err)["field"] == "exception_set"

    def test_planar_family_rejects_3d(self, tmp_path, capsys):
        scene = {"dimension": 3, "exception_set": {"kind": "rational_grid"},
                 "points": [[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]}
        code, _, err = run(capsys, "theta-dist", write_scene(tmp_path, scene))
        assert code == 2
        assert json.loads(err)["field"] == "exception_set/kind"

    def test_dist_needs_two_points(self, tmp_path, capsys):
        scene = dict(SLIT_SCENE, points=[[0.0, 0.0]])
        code, _, err = run(capsys, "dist", write_scene(tmp_path, scene))
        assert code == 2
        assert json.loads(err)["field"] == "points"

    def test_no_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2


class TestSceneParsing:
    def test_fraction_coordinates(self):
        cfg = parse_scene_config('{"dimension": 1, "points": [["1/3"]]}')
        assert cfg.points == ((Fraction(1, 3),),)

    def test_integer_accepted_for_float_param(self):
        cfg = parse_scene_config('{"dimension": 2, "params": {"eps": 1}}')
        assert cfg.params["eps"] == 1.0

    def test_bool_rejected_for_int_param(self):
        with pytest.raises(SceneError) as exc:
            parse_scene_config('{"dimension": 2, "params": {"depth": true}}')
        assert exc.value.field == "params/depth"

    def test_unknown_method(self):
        with pytest.raises(SceneError) as exc:
            parse_scene_config('{"dimension": 2, "params": {"method": "warp"}}')
        assert exc.value.field == "params/method"

    def test_format_feeds_default_output(self):
        cfg = parse_scene_config('{"dimension": 2, "format": "csv"}')
        assert cfg.out_format == "csv"


def test_module_entry_point(tmp_path):
    scene = tmp_path / "scene.json"
    scene.write_text(json.dumps({"dimension": 1, "cb_set": {"kind": "sk_family", "k": 3}}))
    proc = subprocess.run([sys.executable, "-m", "intrametric", "cb-rank", str(scene)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "4\n"
