"""Batch command-line front end.

Each subcommand reads a JSON scene file (see scene.py for the schema),
runs one computation, and writes a deterministic artifact to stdout or to
--out.  Exit codes: 0 on success (including expected refusal verdicts from
the verify suite), 1 when a computation fails or verification mismatches,
2 on usage or schema errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional

from .cbrank import cantor_staircase, cb_rank
from .errors import IntrametricError, SceneError
from .geometry import Polyline
from .metrics import (
    DEFAULT_DEPTH,
    DEFAULT_EPS,
    intrinsic_distance,
    permeability_certificate,
    theta_intrinsic_distance,
)
from .scene import SceneConfig, parse_scene_config
from .verification import fixture, lipschitz_constant_estimate, run_paper_suite

DEFAULT_PAIRS = 10_000


def _load_scene(path: str) -> SceneConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SceneError("$", f"cannot read scene file {path!r}: {exc}") from exc
    return parse_scene_config(text)


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _witness_csv(witness: Optional[Polyline], dimension: int) -> str:
    header = [f"x{i + 1}" for i in range(dimension)]
    rows = [] if witness is None else [[repr(float(c)) for c in row] for row in witness.vertices]
    return _csv_text(header, rows)


def _floats(point) -> tuple[float, ...]:
    return tuple(float(c) for c in point)


def _two_points(cfg: SceneConfig, command: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    pts = cfg.require("points", command)
    if len(pts) != 2:
        raise SceneError("points", f"the {command!r} command needs exactly 2 points")
    return _floats(pts[0]), _floats(pts[1])


def _pick(flag, scene_value, default):
    if flag is not None:
        return flag
    if scene_value is not None:
        return scene_value
    return default


def _emit_estimate(command: str, est, cfg: SceneConfig, args) -> int:
    fmt = _pick(args.format, None, cfg.out_format)
    if fmt == "csv":
        _write_output(_witness_csv(est.witness, cfg.dimension), args.out)
    else:
        doc = {"command": command}
        doc.update(est.to_json_obj())
        _write_output(_json_text(doc), args.out)
    return 0


def _cmd_dist(args) -> int:
    cfg = _load_scene(args.scene)
    theta = cfg.require("exception_set", "dist")
    x, y = _two_points(cfg, "dist")
    depth = _pick(args.grid_depth, cfg.params.get("depth"), DEFAULT_DEPTH)
    est = intrinsic_distance(theta, x, y, depth=depth, method=cfg.params.get("method", "auto"))
    return _emit_estimate("dist", est, cfg, args)


def _cmd_theta_dist(args) -> int:
    cfg = _load_scene(args.scene)
    theta = cfg.require("exception_set", "theta-dist")
    x, y = _two_points(cfg, "theta-dist")
    eps = _pick(args.eps, cfg.params.get("eps"), DEFAULT_EPS)
    seed = _pick(args.seed, cfg.params.get("seed"), 0)
    est = theta_intrinsic_distance(theta, x, y, eps=eps, seed=seed,
                                   finite_only=cfg.params.get("finite_only", False))
    return _emit_estimate("theta-dist", est, cfg, args)


def _cmd_certify(args) -> int:
    cfg = _load_scene(args.scene)
    theta = cfg.require("exception_set", "certify")
    x, y = _two_points(cfg, "certify")
    eps = _pick(args.eps, cfg.params.get("eps"), DEFAULT_EPS)
    seed = _pick(args.seed, cfg.params.get("seed"), 0)
    witness, report = permeability_certificate(theta, x, y, eps=eps, seed=seed)
    fmt = _pick(args.format, None, cfg.out_format)
    if fmt == "csv":
        _write_output(_witness_csv(witness, cfg.dimension), args.out)
    else:
        doc = {
            "command": "certify",
            "length": witness.length(),
            "witness": witness.to_json_obj(),
            "crossing_report": report.to_json_obj(),
        }
        _write_output(_json_text(doc), args.out)
    return 0


def _cmd_cb_rank(args) -> int:
    cfg = _load_scene(args.scene)
    rank = cb_rank(cfg.require("cb_set", "cb-rank"))
    _write_output(str(rank), args.out)
    return 0


def _staircase_cell(value) -> str:
    return str(value) if isinstance(value, Fraction) else repr(float(value))


def _cmd_staircase(args) -> int:
    cfg = _load_scene(args.scene)
    if cfg.dimension != 1:
        raise SceneError("dimension", "the 'staircase' command works on dimension 1")
    pts = cfg.require("points", "staircase")
    rows = []
    for (x,) in pts:
        rows.append((x, cantor_staircase(x)))
    fmt = _pick(args.format, None, cfg.out_format)
    if fmt == "csv":
        text = _csv_text(["x", "c"], [[_staircase_cell(x), _staircase_cell(c)] for x, c in rows])
        _write_output(text, args.out)
    else:
        doc = {
            "command": "staircase",
            "values": [{"x": _staircase_cell(x), "c": _staircase_cell(c)} for x, c in rows],
        }
        _write_output(_json_text(doc), args.out)
    return 0


def _cmd_lipschitz(args) -> int:
    cfg = _load_scene(args.scene)
    descriptor = cfg.require("function", "lipschitz")
    f = fixture(descriptor["kind"], v=descriptor.get("v"))
    metric = cfg.params.get("metric", "euclidean")
    pairs = _pick(args.pairs, cfg.params.get("pairs"), DEFAULT_PAIRS)
    seed = _pick(args.seed, cfg.params.get("seed"), 0)
    est = lipschitz_constant_estimate(f, metric=metric, pairs=pairs, seed=seed)
    fmt = _pick(args.format, None, cfg.out_format)
    if fmt == "csv":
        text = _csv_text(["kind", "metric", "pairs_used", "max_ratio"],
                         [[f.kind, metric, str(est.pairs_used), repr(est.value)]])
        _write_output(text, args.out)
    else:
        doc = {
            "command": "lipschitz",
            "kind": f.kind,
            "metric": metric,
            "pairs_used": est.pairs_used,
            "max_ratio": est.value,
            "witness": [list(est.witness[0]), list(est.witness[1])],
        }
        _write_output(_json_text(doc), args.out)
    return 0


def _cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 0
    summary = run_paper_suite(seed=seed, report_path=args.out)
    if args.out is None:
        _write_output(_json_text(summary), None)
    else:
        for check in summary["checks"]:
            flag = "ok" if check["matches_expectation"] else "MISMATCH"
            sys.stdout.write(f"{check['claim']}: {check['verdict']} [{flag}]\n")
    return 0 if summary["all_expected"] else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intrametric",
        description="Distances, permeability certificates, and Lipschitz checks "
                    "for removed-set geometries.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text, scene_required=True):
        p = sub.add_parser(name, help=help_text)
        if scene_required:
            p.add_argument("scene", help="path to a JSON scene file")
        p.add_argument("--eps", type=float, default=None,
                       help="length-excess budget (default 1e-6)")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
        p.add_argument("--grid-depth", type=int, default=None,
                       help="grid refinement depth (default 10)")
        p.add_argument("--pairs", type=int, default=None,
                       help="sampled pair count (default 10000)")
        p.add_argument("--format", choices=("json", "csv"), default=None,
                       help="output format (default json)")
        p.add_argument("--out", default=None, help="write the artifact to this path")
        p.set_defaults(handler=handler)
        return p

    add("dist", _cmd_dist, "intrinsic distance avoiding the scene's removed set")
    add("theta-dist", _cmd_theta_dist, "distance over paths with admissible crossing sets")
    add("certify", _cmd_certify, "permeability certificate: short witness with finite crossings")
    add("cb-rank", _cmd_cb_rank, "derived-set rank of the scene's 1-d closed set")
    add("staircase", _cmd_staircase, "evaluate the devil's staircase at the scene points")
    add("lipschitz", _cmd_lipschitz, "sampled Lipschitz-constant estimate for a fixture")
    add("verify", _cmd_verify, "run the whole verification suite", scene_required=False)
    return parser


def _emit_error(exc: Exception) -> None:
    doc = {"error": type(exc).__name__, "detail": str(exc)}
    if isinstance(exc, SceneError):
        doc["field"] = exc.field
    sys.stderr.write(json.dumps(doc, sort_keys=True) + "\n")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except SceneError as exc:
        _emit_error(exc)
        return 2
    except IntrametricError as exc:
        _emit_error(exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
