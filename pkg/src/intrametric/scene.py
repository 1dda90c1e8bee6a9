"""Scene-file parsing for the command-line tools.

A scene is a JSON object fully validated before any computation runs:
unknown keys are rejected with the offending field path, coordinates are
checked against the declared dimension, and descriptors are materialized
eagerly so a bad scene fails at parse time, not mid-run.

Schema (all keys optional unless a command requires them):

    {
      "dimension": 2,
      "exception_set": {"kind": "slit", "tip": [0, 0], "direction": [-1, 0]},
      "function": {"kind": "linear", "v": [3, 4]},
      "cb_set": {"kind": "sk_family", "k": 3},
      "points": [[-1, 1], [-1, -1]],
      "params": {"depth": 10, "eps": 1e-6, "seed": 0, "pairs": 10000},
      "format": "json"
    }

Point coordinates may be numbers or exact-fraction strings like "1/3";
fractions survive parsing unconverted so digit-exact queries stay exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Optional, Union

from .cbrank import CBSet, cbset_from_json
from .errors import SceneError
from .exception_sets import ExceptionSet, exception_set_from_json

_TOP_KEYS = {"dimension", "exception_set", "function", "cb_set", "points", "params", "format"}

_FUNCTION_KEYS = {
    "slit_arg": set(),
    "slit_arg_quadratic": set(),
    "radial_piecewise": set(),
    "linear": {"v"},
    "cantor_staircase_1d": set(),
}

_PARAM_TYPES = {
    "depth": int,
    "eps": float,
    "seed": int,
    "pairs": int,
    "tol": float,
    "finite_only": bool,
    "method": str,
    "metric": str,
}

_METHODS = {"auto", "analytic", "grid"}
_METRICS = {"euclidean", "intrinsic", "theta_intrinsic", "l1_square"}

Coordinate = Union[float, Fraction]


@dataclass(frozen=True)
class SceneConfig:
    """A validated scene ready to hand to a command."""

    dimension: int
    exception_set: Optional[ExceptionSet] = None
    function: Optional[dict] = None
    cb_set: Optional[CBSet] = None
    points: tuple[tuple[Coordinate, ...], ...] = ()
    params: dict = field(default_factory=dict)
    out_format: str = "json"

    def require(self, name: str, command: str):
        value = getattr(self, "cb_set" if name == "cb_set" else name)
        if value is None or (name == "points" and not value):
            raise SceneError(name, f"required by the {command!r} command")
        return value


def _parse_coordinate(raw, where: str) -> Coordinate:
    if isinstance(raw, bool):
        raise SceneError(where, "coordinate must be a number or a fraction string")
    if isinstance(raw, Real):
        return float(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise SceneError(where, f"not a valid fraction: {raw!r}") from exc
    raise SceneError(where, "coordinate must be a number or a fraction string")


def _parse_points(raw, dimension: int) -> tuple:
    if not isinstance(raw, list):
        raise SceneError("points", "must be a list of points")
    points = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, list) or len(entry) != dimension:
            raise SceneError(f"points/{i}", f"expected a list of {dimension} coordinates")
        points.append(tuple(_parse_coordinate(c, f"points/{i}/{j}") for j, c in enumerate(entry)))
    return tuple(points)


def _parse_function(raw) -> dict:
    if not isinstance(raw, dict):
        raise SceneError("function", "must be an object")
    kind = raw.get("kind")
    if kind is None:
        raise SceneError("function/kind", "missing required field")
    if kind not in _FUNCTION_KEYS:
        raise SceneError("function/kind", f"unknown function kind {kind!r}")
    extra = set(raw) - _FUNCTION_KEYS[kind] - {"kind"}
    if extra:
        raise SceneError(f"function/{sorted(extra)[0]}", f"unknown key for kind {kind!r}")
    missing = _FUNCTION_KEYS[kind] - set(raw)
    if missing:
        raise SceneError(f"function/{sorted(missing)[0]}", "missing required field")
    return dict(raw)


def _parse_params(raw) -> dict:
    if not isinstance(raw, dict):
        raise SceneError("params", "must be an object")
    params = {}
    for key, value in raw.items():
        want = _PARAM_TYPES.get(key)
        if want is None:
            raise SceneError(f"params/{key}", "unknown parameter")
        if want is bool:
            if not isinstance(value, bool):
                raise SceneError(f"params/{key}", "must be a boolean")
            params[key] = value
        elif want is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise SceneError(f"params/{key}", "must be an integer")
            params[key] = value
        elif want is float:
            if isinstance(value, bool) or not isinstance(value, Real):
                raise SceneError(f"params/{key}", "must be a number")
            params[key] = float(value)
        else:
            if not isinstance(value, str):
                raise SceneError(f"params/{key}", "must be a string")
            params[key] = value
    if "method" in params and params["method"] not in _METHODS:
        raise SceneError("params/method", f"must be one of {sorted(_METHODS)}")
    if "metric" in params and params["metric"] not in _METRICS:
        raise SceneError("params/metric", f"must be one of {sorted(_METRICS)}")
    for key in ("depth", "pairs"):
        if key in params and params[key] < 1:
            raise SceneError(f"params/{key}", "must be positive")
    for key in ("eps", "tol"):
        if key in params and params[key] <= 0:
            raise SceneError(f"params/{key}", "must be positive")
    return params


def parse_scene_config(text: str) -> SceneConfig:
    """Parse and validate a scene document, or raise SceneError at the first problem."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError("$", f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise SceneError("$", "scene must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise SceneError(sorted(unknown)[0], "unknown key")
    dimension = raw.get("dimension")
    if isinstance(dimension, bool) or not isinstance(dimension, int) or dimension < 1:
        raise SceneError("dimension", "must be a positive integer")
    exception_set = None
    if "exception_set" in raw:
        exception_set = exception_set_from_json(raw["exception_set"], dimension)
    function = _parse_function(raw["function"]) if "function" in raw else None
    cb_set = cbset_from_json(raw["cb_set"]) if "cb_set" in raw else None
    points = _parse_points(raw["points"], dimension) if "points" in raw else ()
    params = _parse_params(raw.get("params", {}))
    out_format = raw.get("format", "json")
    if out_format not in ("json", "csv"):
        raise SceneError("format", "must be 'json' or 'csv'")
    return SceneConfig(dimension, exception_set, function, cb_set, points, params, out_format)
