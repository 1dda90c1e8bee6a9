"""Cantor-Bendixson derivatives and ranks for structured closed subsets of R.

Sets are recursive descriptors rather than point clouds: finite point lists,
limit nodes (a point p plus a rule generating affine copies of a template that
accumulate only at p), finite separated unions, and a perfect-core marker for
Cantor-type sets.  Derivatives and ranks are computed symbolically on the
descriptor, so the answers are exact for every representable set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .errors import DepthExceededError, OutOfDomainError, SceneError

N_CHILD = 64         # lazy enumeration cutoff for limit-node children
MAX_NESTING = 32     # declared bound on limit-node nesting
PERFECT_CORE = "perfect_core"


class CBSet:
    """Base descriptor; concrete variants below."""

    def bounds(self) -> tuple[float, float]:
        raise NotImplementedError

    def is_empty(self) -> bool:
        return False

    def nesting_depth(self) -> int:
        return 0

    def has_perfect_core(self) -> bool:
        return False

    def affine(self, scale: float, offset: float) -> "CBSet":
        """The image of the set under x -> scale*x + offset."""
        raise NotImplementedError

    def points_upto(self, per_level: int = 16) -> list[float]:
        """Finitely many member points, enumerating limit rules to a cutoff."""
        raise NotImplementedError

    def to_json_obj(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Points(CBSet):
    """A finite (possibly empty) list of reals."""

    values: tuple[float, ...]

    def __init__(self, values: Sequence[float] = ()):
        object.__setattr__(self, "values", tuple(sorted(float(v) for v in values)))

    def bounds(self) -> tuple[float, float]:
        if not self.values:
            return (math.inf, -math.inf)
        return (self.values[0], self.values[-1])

    def is_empty(self) -> bool:
        return not self.values

    def affine(self, scale: float, offset: float) -> "Points":
        return Points(tuple(scale * v + offset for v in self.values))

    def points_upto(self, per_level: int = 16) -> list[float]:
        return list(self.values)

    def to_json_obj(self) -> dict:
        return {"kind": "points", "values": list(self.values)}


EMPTY = Points(())


class Limit(CBSet):
    """{p} together with affine copies of a template accumulating only at p.

    maps(n) returns (scale_n, offset_n) for n >= 1; the n-th child is
    scale_n * template + offset_n.  Children must be pairwise disjoint, stay
    clear of p, and approach p monotonically.
    """

    def __init__(self, point: float, template: CBSet, maps: Callable[[int], tuple[float, float]],
                 rule_json: Optional[dict] = None, validate: bool = True):
        self.point = float(point)
        self.template = template
        self.maps = maps
        self.rule_json = rule_json
        if template.is_empty():
            raise ValueError("limit node needs a nonempty template")
        if self.nesting_depth() > MAX_NESTING:
            raise DepthExceededError(f"limit nesting exceeds {MAX_NESTING}")
        if validate:
            self._validate()

    def child(self, n: int) -> CBSet:
        s, o = self.maps(n)
        return self.template.affine(s, o)

    def _child_interval(self, n: int) -> tuple[float, float]:
        s, o = self.maps(n)
        tlo, thi = self.template.bounds()
        lo, hi = s * tlo + o, s * thi + o
        return (min(lo, hi), max(lo, hi))

    def _validate(self):
        probes = list(range(1, 17)) + [N_CHILD]
        intervals = [self._child_interval(n) for n in probes]
        dists = [max(abs(lo - self.point), abs(hi - self.point)) for lo, hi in intervals]
        for (lo, hi) in intervals:
            if lo <= self.point <= hi:
                raise ValueError("limit-node child interval contains the accumulation point")
        for d_prev, d_next in zip(dists, dists[1:]):
            if not d_next < d_prev:
                raise ValueError("limit-node children do not approach the accumulation point monotonically")
        ordered = sorted(intervals)
        for (lo1, hi1), (lo2, hi2) in zip(ordered, ordered[1:]):
            if hi1 >= lo2:
                raise ValueError("limit-node children overlap")

    def bounds(self) -> tuple[float, float]:
        lo1, hi1 = self._child_interval(1)
        return (min(lo1, self.point), max(hi1, self.point))

    def nesting_depth(self) -> int:
        return 1 + self.template.nesting_depth()

    def has_perfect_core(self) -> bool:
        return self.template.has_perfect_core()

    def affine(self, scale: float, offset: float) -> "Limit":
        maps = self.maps

        def new_maps(n: int, _s=scale, _o=offset):
            s_n, o_n = maps(n)
            return (_s * s_n, _s * o_n + _o)

        return Limit(scale * self.point + offset, self.template, new_maps,
                     rule_json=None, validate=False)

    def points_upto(self, per_level: int = 16) -> list[float]:
        out = [self.point]
        for n in range(1, per_level + 1):
            out.extend(self.child(n).points_upto(per_level))
        return out

    def to_json_obj(self) -> dict:
        if self.rule_json is None:
            raise ValueError("limit node built from a raw map has no JSON form")
        return {"kind": "limit", "point": self.point, "template": self.template.to_json_obj(),
                "rule": dict(self.rule_json)}


class UnionSet(CBSet):
    """Finite union of positively separated parts."""

    def __init__(self, parts: Sequence[CBSet], validate: bool = True):
        self.parts = [p for p in parts if not p.is_empty()]
        if validate and len(self.parts) >= 2:
            ordered = sorted(self.parts, key=lambda p: p.bounds()[0])
            for p1, p2 in zip(ordered, ordered[1:]):
                if p1.bounds()[1] >= p2.bounds()[0]:
                    raise ValueError("union parts must be positively separated")

    def bounds(self) -> tuple[float, float]:
        if not self.parts:
            return (math.inf, -math.inf)
        los, his = zip(*(p.bounds() for p in self.parts))
        return (min(los), max(his))

    def is_empty(self) -> bool:
        return not self.parts

    def nesting_depth(self) -> int:
        return max((p.nesting_depth() for p in self.parts), default=0)

    def has_perfect_core(self) -> bool:
        return any(p.has_perfect_core() for p in self.parts)

    def affine(self, scale: float, offset: float) -> "UnionSet":
        return UnionSet([p.affine(scale, offset) for p in self.parts], validate=False)

    def points_upto(self, per_level: int = 16) -> list[float]:
        out: list[float] = []
        for p in self.parts:
            out.extend(p.points_upto(per_level))
        return out

    def to_json_obj(self) -> dict:
        return {"kind": "union", "parts": [p.to_json_obj() for p in self.parts]}


@dataclass(frozen=True)
class PerfectCore(CBSet):
    """Marker for a perfect set: a Cantor set on the interval [start, end]."""

    start: float = 0.0
    end: float = 1.0

    def bounds(self) -> tuple[float, float]:
        return (min(self.start, self.end), max(self.start, self.end))

    def has_perfect_core(self) -> bool:
        return True

    def affine(self, scale: float, offset: float) -> "PerfectCore":
        return PerfectCore(scale * self.start + offset, scale * self.end + offset)

    def points_upto(self, per_level: int = 16) -> list[float]:
        # Level-3 gap endpoints are enough for desk-scale illustrations.
        pts = [0.0, 1.0]
        for k in range(1, 4):
            step = 3.0 ** -k
            pts = sorted({p for q in pts for p in (q, q + 2 * step) if p <= 1.0})
        span = self.end - self.start
        return [self.start + t * span for t in pts]

    def to_json_obj(self) -> dict:
        return {"kind": "perfect_core", "start": self.start, "end": self.end}


# ---------------------------------------------------------------------------
# derivative and rank


def cb_derivative(s: CBSet) -> CBSet:
    """The set minus its isolated points."""
    if isinstance(s, Points):
        return EMPTY
    if isinstance(s, PerfectCore):
        return s
    if isinstance(s, UnionSet):
        parts = [cb_derivative(p) for p in s.parts]
        parts = [p for p in parts if not p.is_empty()]
        if not parts:
            return EMPTY
        if len(parts) == 1:
            return parts[0]
        return UnionSet(parts, validate=False)
    if isinstance(s, Limit):
        d_template = cb_derivative(s.template)
        if d_template.is_empty():
            # Children become empty: only the accumulation point survives.
            return Points((s.point,))
        return Limit(s.point, d_template, s.maps, rule_json=None, validate=False)
    raise TypeError(f"not a CBSet descriptor: {type(s).__name__}")


def cb_rank(s: CBSet) -> Union[int, str]:
    """Smallest k with the k-th derivative empty, or "perfect_core"."""
    if s.has_perfect_core():
        return PERFECT_CORE
    current = s
    for k in range(N_CHILD + 1):
        if current.is_empty():
            return k
        current = cb_derivative(current)
    raise DepthExceededError(f"rank exceeds the iteration bound {N_CHILD}")


@dataclass(frozen=True)
class Permeability1D:
    permeable: bool
    rank: Union[int, str]
    reason: str


def is_permeable_1d(s: CBSet) -> Permeability1D:
    """Countable closure (finite rank) decides permeability on the line."""
    r = cb_rank(s)
    if r == PERFECT_CORE:
        return Permeability1D(False, r, "derivation stabilizes on a perfect core: closure is uncountable")
    return Permeability1D(True, r, f"rank {r}: the closure is countable")


# ---------------------------------------------------------------------------
# standard examples


def harmonic_limit(point: float = 0.0, anchor: float = 1.0,
                   template: Optional[CBSet] = None) -> Limit:
    """{point} together with copies of the template shrinking like anchor/n."""
    span = anchor - point
    if template is None:
        template = Points((1.0,))

    def maps(n: int) -> tuple[float, float]:
        return (span / n, point)

    return Limit(point, template, maps, rule_json={"type": "harmonic", "anchor": anchor})


def geometric_limit(template: CBSet, point: float = 0.0, base: float = 0.5,
                    shift: float = 3.0) -> Limit:
    """{point} with children base^n * (template + shift) accumulating at point."""

    def maps(n: int) -> tuple[float, float]:
        return (base**n, point + base**n * shift)

    return Limit(point, template, maps,
                 rule_json={"type": "geometric", "base": base, "shift": shift})


def sk_family(k: int) -> CBSet:
    """S_0 = {0}; S_(j+1) = {0} union of 2^-n (S_j + 3) over n >= 1; rank k+1."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > MAX_NESTING:
        raise DepthExceededError(f"sk_family nesting {k} exceeds {MAX_NESTING}")
    s: CBSet = Points((0.0,))
    for _ in range(k):
        s = geometric_limit(s, point=0.0, base=0.5, shift=3.0)
    return s


# ---------------------------------------------------------------------------
# Cantor staircase


def cantor_staircase(x, depth: int = 52):
    """Devil's staircase via ternary digits: truncate at the first 1, map
    2 -> 1, read the result in binary.

    Exact over Fractions; float input returns float(exact value of that
    float).  Monotone, constant on complementary gaps reached within depth.
    """
    if depth > 52 or depth < 1:
        raise DepthExceededError("staircase depth must be between 1 and 52")
    as_fraction = isinstance(x, Fraction)
    f = x if as_fraction else Fraction(float(x))
    if f < 0 or f > 1:
        raise OutOfDomainError(f"staircase input {float(f)} outside [0, 1]")
    out = Fraction(0)
    unit = Fraction(1)
    for _ in range(depth):
        if f == 1:  # tail is all twos: binary tail of all ones sums to one unit
            out += unit
            break
        f *= 3
        d = int(f)
        f -= d
        unit /= 2
        if d == 1:
            out += unit
            break
        if d == 2:
            out += unit
        if f == 0:
            break
    return out if as_fraction else float(out)


# ---------------------------------------------------------------------------
# JSON construction

_CB_KEYS = {
    "points": {"values"},
    "limit": {"point", "template", "rule"},
    "union": {"parts"},
    "perfect_core": {"start", "end"},
    "sk_family": {"k"},
}


def cbset_from_json(obj: dict, where: str = "cb_set") -> CBSet:
    if not isinstance(obj, dict):
        raise SceneError(where, "must be an object")
    kind = obj.get("kind")
    if kind not in _CB_KEYS:
        raise SceneError(f"{where}/kind", f"unknown CB-set kind {kind!r}")
    extra = set(obj) - _CB_KEYS[kind] - {"kind"}
    if extra:
        raise SceneError(f"{where}/{sorted(extra)[0]}", f"unknown key for kind {kind!r}")
    try:
        if kind == "points":
            return Points(tuple(obj["values"]))
        if kind == "union":
            return UnionSet([cbset_from_json(p, f"{where}/parts/{i}")
                             for i, p in enumerate(obj["parts"])])
        if kind == "perfect_core":
            return PerfectCore(float(obj.get("start", 0.0)), float(obj.get("end", 1.0)))
        if kind == "sk_family":
            return sk_family(int(obj["k"]))
        # limit
        rule = obj["rule"]
        template = cbset_from_json(obj["template"], f"{where}/template")
        point = float(obj["point"])
        rtype = rule.get("type")
        if rtype == "harmonic":
            return harmonic_limit(point, float(rule.get("anchor", point + 1.0)), template)
        if rtype == "geometric":
            return geometric_limit(template, point, float(rule.get("base", 0.5)),
                                   float(rule.get("shift", 3.0)))
        raise SceneError(f"{where}/rule/type", f"unknown limit rule {rtype!r}")
    except KeyError as exc:
        raise SceneError(f"{where}/{exc.args[0]}", "missing required field") from exc
    except (ValueError, DepthExceededError) as exc:
        raise SceneError(where, str(exc)) from exc
