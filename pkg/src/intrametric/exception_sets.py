"""Exception-set families: membership, segment/path crossing reports, sampling.

Each family answers three questions about a set Theta in R^d: does a point
belong to it (at a tolerance), how does a segment meet it (finitely many
points, a countable set with countable closure, or a set whose closure is
uncountable), and how to draw points from it for stratified sampling.

Families that can act as grid-search obstacles additionally provide a
vectorized distance field and a finite list of feature points that the grid
bounding box must cover.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    SceneError,
    UndecidableToleranceError,
    UnsupportedFamilyError,
)
from .geometry import TOL_GEOM, Polyline, Segment, as_point

Q_MAX = 10**6          # denominator bound for rational reconstruction
RATIONAL_TOL = 1e-13   # default tolerance for rationality decisions
SINE_CUTOFF = 1e-6     # sin(1/t) crossings are enumerated for t >= SINE_CUTOFF
TERNARY_DEPTH = 24     # resolution depth for ternary constructions

FINITE = "finite"
COUNTABLE_CLOSURE = "countable_closure"
UNCOUNTABLE_CLOSURE = "uncountable_closure"
UNKNOWN = "unknown_classification"

_SEVERITY = {FINITE: 0, COUNTABLE_CLOSURE: 1, UNKNOWN: 2, UNCOUNTABLE_CLOSURE: 3}


@dataclass(frozen=True)
class CrossingReport:
    """How a segment or path meets an exception set.

    crossings is the exhaustive (parameter, point) list when classification is
    "finite" and None otherwise.  Parameters are the segment parameter in
    [0, 1] for segment reports and the chord-length fraction for path reports.
    """

    classification: str
    crossings: Optional[tuple[tuple[float, np.ndarray], ...]]
    evidence: str = ""

    @property
    def count(self) -> int:
        if self.crossings is None:
            raise ValueError(f"no crossing list for classification {self.classification!r}")
        return len(self.crossings)

    def to_json_obj(self) -> dict:
        obj: dict = {"classification": self.classification, "evidence": self.evidence}
        if self.crossings is not None:
            obj["crossings"] = [
                {"parameter": float(t), "point": [float(c) for c in p]} for t, p in self.crossings
            ]
        return obj


def _finite(crossings: list[tuple[float, np.ndarray]], evidence: str = "") -> CrossingReport:
    crossings.sort(key=lambda c: c[0])
    deduped: list[tuple[float, np.ndarray]] = []
    for t, p in crossings:
        if deduped and abs(t - deduped[-1][0]) <= 1e-9 and np.linalg.norm(p - deduped[-1][1]) <= TOL_GEOM:
            continue
        deduped.append((t, p))
    return CrossingReport(FINITE, tuple(deduped), evidence)


# ---------------------------------------------------------------------------
# rational and ternary helpers


def nearest_rational(x: float, max_denominator: int = Q_MAX) -> Fraction:
    return Fraction(float(x)).limit_denominator(max_denominator)


def is_rational(x: float, tol: Optional[float] = None) -> bool:
    """Decide whether x is (within tol) a rational with denominator <= Q_MAX.

    Rationals with denominator <= Q_MAX are at least 1/Q_MAX**2 apart, so the
    question is undecidable once tol reaches half that spacing.
    """
    if tol is None:
        tol = RATIONAL_TOL
    if tol >= 0.5 / Q_MAX**2:
        raise UndecidableToleranceError(
            f"tol={tol:g} exceeds half the Farey spacing 0.5/Q_MAX^2 = {0.5 / Q_MAX**2:g}"
        )
    return abs(float(x) - float(nearest_rational(x))) <= tol


def cantor_next(t: float) -> float:
    """Smallest point of the middle-thirds Cantor set that is >= t.

    Returns math.inf when t > 1.  Exact digit walk over Fractions: the first
    ternary digit equal to 1 is rounded up to 2 and the tail cleared.
    """
    if t > 1.0:
        return math.inf
    if t <= 0.0:
        return 0.0
    f = Fraction(float(t))
    prefix = Fraction(0)
    unit = Fraction(1)
    for _ in range(60):
        if f == 1:  # all remaining digits are 2: t itself is in the set
            return float(prefix + unit)
        f *= 3
        d = int(f)
        f -= d
        unit /= 3
        if d == 1:
            return float(prefix + 2 * unit)
        prefix += d * unit
        if f == 0:
            return float(prefix)
    return float(prefix)


def cantor_prev(t: float) -> float:
    """Largest point of the middle-thirds Cantor set that is <= t."""
    if t < 0.0:
        return -math.inf
    if t >= 1.0:
        return 1.0
    return 1.0 - cantor_next(1.0 - t)


def cantor_distance(t: float) -> float:
    """Distance from t to the middle-thirds Cantor set."""
    if t <= 0.0:
        return -float(t)
    if t >= 1.0:
        return float(t) - 1.0
    up = cantor_next(t)
    down = cantor_prev(t)
    return min(up - t if math.isfinite(up) else math.inf, t - down)


def cantor_interval_hit(lo: float, hi: float, tol: float = TOL_GEOM) -> str:
    """Classify how the open interval (lo, hi) meets the Cantor set.

    Returns "block" when the open interval contains Cantor points (and hence a
    scaled copy of the whole set), "touch" when only the closed interval's
    endpoints meet the set, and "miss" otherwise.
    """
    if hi < lo:
        lo, hi = hi, lo
    inner = cantor_next(max(lo, 0.0) + tol)
    if inner <= min(hi, 1.0) - tol:
        return "block"
    closed = cantor_next(max(lo, 0.0) - tol)
    if closed <= min(hi, 1.0) + tol:
        return "touch"
    return "miss"


@lru_cache(maxsize=1)
def _cantor_level_intervals(level: int = 12) -> tuple[np.ndarray, np.ndarray]:
    los = np.array([0.0])
    for _ in range(level):
        los = np.concatenate([los / 3.0, los / 3.0 + 2.0 / 3.0])
    los.sort()
    width = 3.0 ** -level
    return los, los + width


def cantor_distance_field(t: np.ndarray, level: int = 12) -> np.ndarray:
    """Vectorized distance to the Cantor set, exact up to 3**-level."""
    los, his = _cantor_level_intervals(level)
    t = np.asarray(t, dtype=float)
    idx = np.searchsorted(los, t)
    dist = np.full(t.shape, np.inf)
    right = np.clip(idx, 0, len(los) - 1)
    left = np.clip(idx - 1, 0, len(los) - 1)
    for j in (left, right):
        inside = (t >= los[j]) & (t <= his[j])
        gap = np.minimum(np.abs(t - los[j]), np.abs(t - his[j]))
        gap[inside] = 0.0
        dist = np.minimum(dist, gap)
    return dist


# ---------------------------------------------------------------------------
# family base class


class ExceptionSet:
    """Base class for exception-set families."""

    kind: str = "abstract"
    closed_subset: bool = False
    lebesgue_null: bool = True

    def __init__(self, dimension: int):
        if not isinstance(dimension, int) or dimension < 1:
            raise DimensionMismatchError(f"dimension must be a positive integer, got {dimension!r}")
        self.dimension = dimension

    # -- public API (validates inputs, dispatches to _impl methods) --------

    def contains(self, x: Sequence[float] | np.ndarray, tol: Optional[float] = None) -> bool:
        p = as_point(x)
        if p.size != self.dimension:
            raise DimensionMismatchError(
                f"{self.kind}: point has dimension {p.size}, set lives in {self.dimension}"
            )
        return self._contains(p, TOL_GEOM if tol is None else float(tol))

    def segment_crossings(self, seg: Segment, tol: Optional[float] = None) -> CrossingReport:
        a, b = as_point(seg[0]), as_point(seg[1])
        if a.size != self.dimension or b.size != self.dimension:
            raise DimensionMismatchError(
                f"{self.kind}: segment dimension mismatch with d={self.dimension}"
            )
        return self._segment_crossings(a, b, TOL_GEOM if tol is None else float(tol))

    # -- family hooks -------------------------------------------------------

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        raise NotImplementedError

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        raise NotImplementedError

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        """A point of the set, for stratified sampling."""
        raise UnsupportedFamilyError(f"{self.kind}: no point sampler")

    def feature_points(self) -> list[np.ndarray]:
        """Finitely many anchor points a grid bounding box should cover."""
        return []

    def distance_field(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized distance (or a lower bound on it) from rows of pts."""
        raise UnsupportedFamilyError(f"{self.kind}: no distance field; not usable as a grid obstacle")

    def params_json(self) -> dict:
        raise NotImplementedError

    def to_json_obj(self) -> dict:
        obj = {"kind": self.kind}
        obj.update(self.params_json())
        return obj


def contains(theta: ExceptionSet, x, tol: Optional[float] = None) -> bool:
    return theta.contains(x, tol)


def segment_crossings(theta: ExceptionSet, seg: Segment, tol: Optional[float] = None) -> CrossingReport:
    return theta.segment_crossings(seg, tol)


def path_crossings(theta: ExceptionSet, path: Polyline, tol: Optional[float] = None) -> CrossingReport:
    """Aggregate per-segment reports along a polyline.

    The worst classification wins; finite lists concatenate with duplicates at
    shared vertices removed.  Parameters are chord-length fractions.
    """
    if path.dimension != theta.dimension:
        raise DimensionMismatchError(
            f"{theta.kind}: path dimension {path.dimension} != set dimension {theta.dimension}"
        )
    seg_lengths = np.linalg.norm(np.diff(path.vertices, axis=0), axis=1)
    total = float(seg_lengths.sum())
    reports = [theta.segment_crossings(s, tol) for s in path.segments()]
    worst = max(reports, key=lambda r: _SEVERITY[r.classification])
    if worst.classification != FINITE:
        return CrossingReport(worst.classification, None, worst.evidence)
    merged: list[tuple[float, np.ndarray]] = []
    eff_tol = TOL_GEOM if tol is None else tol
    acc = 0.0
    for rep, length in zip(reports, seg_lengths):
        for t, p in rep.crossings:
            g = (acc + t * length) / total if total > 0 else 0.0
            if merged and g - merged[-1][0] <= eff_tol / max(total, eff_tol) \
                    and np.linalg.norm(p - merged[-1][1]) <= eff_tol:
                continue
            merged.append((g, p))
        acc += length
    return _finite(merged, "per-segment reports merged")


# ---------------------------------------------------------------------------
# finite point sets


class FinitePoints(ExceptionSet):
    kind = "finite_points"
    closed_subset = True

    def __init__(self, points: Sequence[Sequence[float]], dimension: Optional[int] = None):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.size == 0:
            raise ValueError("finite_points needs at least one point")
        super().__init__(dimension if dimension is not None else int(pts.shape[1]))
        if pts.shape[1] != self.dimension:
            raise DimensionMismatchError("finite_points: point dimension mismatch")
        self.points = pts

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.min(np.linalg.norm(self.points - x, axis=1)) <= tol)

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        u = b - a
        uu = float(u @ u)
        out = []
        for p in self.points:
            if uu == 0.0:
                if np.linalg.norm(p - a) <= tol:
                    out.append((0.0, a.copy()))
                continue
            t = min(max(float((p - a) @ u) / uu, 0.0), 1.0)
            c = a + t * u
            if np.linalg.norm(p - c) <= tol:
                out.append((t, c))
        return _finite(out, f"{len(out)} of {len(self.points)} points on segment")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        return self.points[int(rng.integers(len(self.points)))].copy()

    def feature_points(self) -> list[np.ndarray]:
        return [p.copy() for p in self.points]

    def distance_field(self, pts: np.ndarray) -> np.ndarray:
        diffs = pts[:, None, :] - self.points[None, :, :]
        return np.min(np.linalg.norm(diffs, axis=2), axis=1)

    def params_json(self) -> dict:
        return {"points": self.points.tolist()}


# ---------------------------------------------------------------------------
# hyperplanes, half-hyperplanes and arrangements


class Hyperplane(ExceptionSet):
    """{x : normal . x = offset} with the normal stored at unit length."""

    kind = "hyperplane"
    closed_subset = True

    def __init__(self, normal: Sequence[float], offset: float, dimension: Optional[int] = None):
        n = as_point(normal)
        super().__init__(dimension if dimension is not None else int(n.size))
        if n.size != self.dimension:
            raise DimensionMismatchError("hyperplane: normal dimension mismatch")
        norm = float(np.linalg.norm(n))
        if norm <= 0:
            raise ValueError("hyperplane: zero normal")
        self.normal = n / norm
        self.offset = float(offset) / norm

    def signed_distance(self, x: np.ndarray) -> float:
        return float(self.normal @ x) - self.offset

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return abs(self.signed_distance(x)) <= tol

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        f0, f1 = self.signed_distance(a), self.signed_distance(b)
        if abs(f0) <= tol and abs(f1) <= tol:
            if np.linalg.norm(b - a) <= tol:
                return _finite([(0.0, (a + b) / 2)], "degenerate segment on the hyperplane")
            return CrossingReport(UNCOUNTABLE_CLOSURE, None, "segment lies inside the hyperplane")
        out = []
        if f0 * f1 < 0:
            t = f0 / (f0 - f1)
            out.append((t, a + t * (b - a)))
        else:
            if abs(f0) <= tol:
                out.append((0.0, a.copy()))
            if abs(f1) <= tol:
                out.append((1.0, b.copy()))
        return _finite(out, "transversal hyperplane crossing")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        r = rng.normal(size=self.dimension)
        tang = r - (r @ self.normal) * self.normal
        return self.offset * self.normal + tang

    def feature_points(self) -> list[np.ndarray]:
        return [self.offset * self.normal]

    def distance_field(self, pts: np.ndarray) -> np.ndarray:
        return np.abs(pts @ self.normal - self.offset)

    def params_json(self) -> dict:
        return {"normal": self.normal.tolist(), "offset": self.offset}


class HalfFlat:
    """A hyperplane piece clipped by closed linear constraints m . x >= b."""

    def __init__(self, normal, offset, constraints: Sequence[tuple[Sequence[float], float]] = ()):
        n = as_point(normal)
        norm = float(np.linalg.norm(n))
        if norm <= 0:
            raise ValueError("half-flat: zero normal")
        self.normal = n / norm
        self.offset = float(offset) / norm
        self.constraints = []
        for m, b in constraints:
            mv = as_point(m)
            mn = float(np.linalg.norm(mv))
            if mn <= 0:
                raise ValueError("half-flat: zero constraint normal")
            self.constraints.append((mv / mn, float(b) / mn))

    @property
    def dimension(self) -> int:
        return int(self.normal.size)

    def signed_distance(self, x: np.ndarray) -> float:
        return float(self.normal @ x) - self.offset

    def satisfies(self, x: np.ndarray, tol: float) -> bool:
        return all(float(m @ x) >= b - tol for m, b in self.constraints)

    def contains(self, x: np.ndarray, tol: float) -> bool:
        return abs(self.signed_distance(x)) <= tol and self.satisfies(x, tol)

    def segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        f0, f1 = self.signed_distance(a), self.signed_distance(b)
        if abs(f0) <= tol and abs(f1) <= tol:
            # Segment on the carrier hyperplane: clip by the constraints.
            lo, hi = 0.0, 1.0
            u = b - a
            for m, bb in self.constraints:
                g0 = float(m @ a) - bb
                du = float(m @ u)
                if abs(du) <= TOL_GEOM:
                    if g0 < -tol:
                        lo, hi = 1.0, 0.0
                        break
                    continue
                t_hit = -g0 / du
                if du > 0:
                    lo = max(lo, t_hit)
                else:
                    hi = min(hi, t_hit)
            seg_len = float(np.linalg.norm(u))
            if lo > hi + tol / max(seg_len, tol):
                return _finite([], "segment on carrier plane but outside the clip region")
            if (hi - lo) * seg_len <= tol:
                t = (lo + hi) / 2
                return _finite([(t, a + t * u)], "segment grazes the clip region at a point")
            return CrossingReport(UNCOUNTABLE_CLOSURE, None, "segment lies inside the half-flat")
        out = []
        if f0 * f1 < 0:
            t = f0 / (f0 - f1)
            p = a + t * (b - a)
            if self.satisfies(p, tol):
                out.append((t, p))
        else:
            if abs(f0) <= tol and self.satisfies(a, tol):
                out.append((0.0, a.copy()))
            if abs(f1) <= tol and self.satisfies(b, tol):
                out.append((1.0, b.copy()))
        return _finite(out, "transversal half-flat crossing")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        for _ in range(256):
            r = rng.normal(size=self.dimension)
            tang = r - (r @ self.normal) * self.normal
            p = self.offset * self.normal + tang
            if self.satisfies(p, 0.0):
                return p
        # Fall back to a ridge point for narrow clip regions.
        return self.offset * self.normal

    def distance_field(self, pts: np.ndarray) -> np.ndarray:
        if self.dimension != 2:
            raise UnsupportedFamilyError("half-flat distance field implemented for d=2 only")
        # Parametrize the carrier line and clamp to the constraint interval.
        o = self.offset * self.normal
        u = np.array([-self.normal[1], self.normal[0]])
        lo, hi = -np.inf, np.inf
        for m, b in self.constraints:
            du = float(m @ u)
            g0 = float(m @ o) - b
            if abs(du) <= 1e-15:
                if g0 < 0:
                    lo, hi = np.inf, -np.inf
                continue
            t_hit = -g0 / du
            if du > 0:
                lo = max(lo, t_hit)
            else:
                hi = min(hi, t_hit)
        t = (pts - o) @ u
        t = np.clip(t, lo, hi)
        proj = o + t[:, None] * u
        return np.linalg.norm(pts - proj, axis=1)

    def to_json_obj(self) -> dict:
        obj: dict = {"normal": self.normal.tolist(), "offset": self.offset}
        if self.constraints:
            obj["constraints"] = [{"normal": m.tolist(), "offset": b} for m, b in self.constraints]
        return obj


class Arrangement(ExceptionSet):
    """Finite union of hyperplanes and half-hyperplanes."""

    kind = "arrangement"
    closed_subset = True

    def __init__(self, components: Sequence[HalfFlat], dimension: Optional[int] = None):
        comps = list(components)
        if not comps:
            raise ValueError("arrangement needs at least one component")
        super().__init__(dimension if dimension is not None else comps[0].dimension)
        for c in comps:
            if c.dimension != self.dimension:
                raise DimensionMismatchError("arrangement: component dimension mismatch")
        self.components = comps

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return any(c.contains(x, tol) for c in self.components)

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        out: list[tuple[float, np.ndarray]] = []
        for c in self.components:
            rep = c.segment_crossings(a, b, tol)
            if rep.classification != FINITE:
                return CrossingReport(rep.classification, None, rep.evidence)
            out.extend(rep.crossings)
        return _finite(out, f"union over {len(self.components)} components")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        c = self.components[int(rng.integers(len(self.components)))]
        return c.sample_point(rng)

    def feature_points(self) -> list[np.ndarray]:
        pts = [c.offset * c.normal for c in self.components]
        if self.dimension == 2:
            for i in range(len(self.components)):
                for j in range(i + 1, len(self.components)):
                    ci, cj = self.components[i], self.components[j]
                    mat = np.vstack([ci.normal, cj.normal])
                    if abs(np.linalg.det(mat)) < 1e-12:
                        continue
                    p = np.linalg.solve(mat, np.array([ci.offset, cj.offset]))
                    pts.append(p)
            for c in self.components:
                for m, b in c.constraints:
                    mat = np.vstack([c.normal, m])
                    if abs(np.linalg.det(mat)) >= 1e-12:
                        pts.append(np.linalg.solve(mat, np.array([c.offset, b])))
        return pts

    def distance_field(self, pts: np.ndarray) -> np.ndarray:
        return np.min(np.stack([c.distance_field(pts) for c in self.components]), axis=0)

    def params_json(self) -> dict:
        return {"components": [c.to_json_obj() for c in self.components]}


# ---------------------------------------------------------------------------
# the slit


class Slit(ExceptionSet):
    """Affine image of {x in R^2 : x1 < 0, x2 = 0}: a ray open at its tip.

    The closed variant includes the tip (it is the closure of the open slit).
    """

    kind = "slit"

    def __init__(self, tip: Sequence[float] = (0.0, 0.0), direction: Sequence[float] = (-1.0, 0.0),
                 closed: bool = False):
        super().__init__(2)
        self.tip = as_point(tip)
        d = as_point(direction)
        if self.tip.size != 2 or d.size != 2:
            raise DimensionMismatchError("slit lives in R^2")
        norm = float(np.linalg.norm(d))
        if norm <= 0:
            raise ValueError("slit: zero direction")
        self.direction = d / norm
        self.closed = bool(closed)

    @property
    def closed_subset(self) -> bool:  # type: ignore[override]
        return self.closed

    def _coords(self, x: np.ndarray) -> tuple[float, float]:
        r = x - self.tip
        s = float(r @ self.direction)
        perp = float(r[0] * self.direction[1] - r[1] * self.direction[0])
        return s, perp

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        s, perp = self._coords(x)
        if abs(perp) > tol:
            return False
        return s >= -tol if self.closed else s > tol

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        s0, p0 = self._coords(a)
        s1, p1 = self._coords(b)
        lo_s = tol if not self.closed else -tol
        if abs(p0) <= tol and abs(p1) <= tol:
            lo, hi = min(s0, s1), max(s0, s1)
            lo = max(lo, lo_s)
            if hi - lo > tol:
                return CrossingReport(UNCOUNTABLE_CLOSURE, None, "segment lies along the slit")
            if hi >= lo_s:
                t = (lo - s0) / (s1 - s0) if abs(s1 - s0) > 0 else 0.0
                t = min(max(t, 0.0), 1.0)
                return _finite([(t, self.tip + lo * self.direction)], "collinear graze at the tip region")
            return _finite([], "collinear with the carrier line but off the slit")
        out = []
        if p0 * p1 < 0:
            t = p0 / (p0 - p1)
            q = a + t * (b - a)
            s = float((q - self.tip) @ self.direction)
            if s >= lo_s:
                out.append((t, q))
        else:
            for t, (s, p) in ((0.0, (s0, p0)), (1.0, (s1, p1))):
                if abs(p) <= tol and s >= lo_s:
                    out.append((t, a + t * (b - a)))
        return _finite(out, "transversal slit crossing")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        s = float(rng.uniform(0.1, 2.0))
        return self.tip + s * self.direction

    def feature_points(self) -> list[np.ndarray]:
        return [self.tip.copy()]

    def distance_field(self, pts: np.ndarray) -> np.ndarray:
        r = pts - self.tip
        s = r @ self.direction
        perp = r[:, 0] * self.direction[1] - r[:, 1] * self.direction[0]
        return np.where(s >= 0, np.abs(perp), np.hypot(s, perp))

    def params_json(self) -> dict:
        return {"tip": self.tip.tolist(), "direction": self.direction.tolist(), "closed": self.closed}


# ---------------------------------------------------------------------------
# graphs of Lipschitz functions


class LipschitzGraph(ExceptionSet):
    """Graph {(u, g(u))} of an L-Lipschitz g: R^(d-1) -> R.

    The declared constant is validated on sampled pairs at construction
    (relative tolerance 1e-6).
    """

    kind = "lipschitz_graph"
    closed_subset = True

    _VALIDATION_TOL = 1e-6

    def __init__(self, g: Callable[[np.ndarray], float], lipschitz_const: float,
                 dimension: int = 2, profile: Optional[dict] = None, validate: bool = True):
        super().__init__(dimension)
        if dimension < 2:
            raise DimensionMismatchError("lipschitz_graph needs d >= 2")
        self.g = g
        self.lipschitz_const = float(lipschitz_const)
        self.profile = profile
        if validate:
            rng = np.random.default_rng(1234)
            for _ in range(256):
                u = rng.uniform(-2, 2, size=dimension - 1)
                v = rng.uniform(-2, 2, size=dimension - 1)
                du = float(np.linalg.norm(u - v))
                if du < 1e-9:
                    continue
                quot = abs(float(g(u)) - float(g(v))) / du
                if quot > self.lipschitz_const * (1 + self._VALIDATION_TOL) + 1e-12:
                    raise ValueError(
                        f"declared Lipschitz constant {self.lipschitz_const} violated: quotient {quot}"
                    )

    def _defect(self, x: np.ndarray) -> float:
        return float(x[-1]) - float(self.g(x[:-1]))

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return abs(self._defect(x)) <= tol

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        n = 1024
        ts = np.linspace(0.0, 1.0, n + 1)
        pts = a + ts[:, None] * (b - a)
        h = np.array([self._defect(p) for p in pts])
        near = np.abs(h) <= tol
        seg_len = float(np.linalg.norm(b - a))
        if np.all(near):
            if seg_len <= tol:
                return _finite([(0.0, a.copy())], "degenerate segment on the graph")
            return CrossingReport(UNCOUNTABLE_CLOSURE, None, "segment runs along the graph")
        # A run of consecutive near-zero samples longer than the tolerance
        # means a sub-interval lies on the graph.
        if seg_len / n > tol and np.any(near[:-1] & near[1:]):
            return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                  "segment runs along the graph on a sub-interval")
        out: list[tuple[float, np.ndarray]] = []
        for i in range(n):
            if (h[i] == 0.0 and h[i + 1] != 0.0) or h[i] * h[i + 1] < 0:
                lo, hi = ts[i], ts[i + 1]
                flo = h[i]
                for _ in range(60):
                    mid = (lo + hi) / 2
                    fm = self._defect(a + mid * (b - a))
                    if flo * fm <= 0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                t = (lo + hi) / 2
                out.append((t, a + t * (b - a)))
        if near[0] and h[0] * h[1] >= 0 and not (h[0] == 0.0 and h[1] != 0.0):
            out.append((0.0, a.copy()))
        if near[-1] and h[-2] * h[-1] >= 0:
            out.append((1.0, b.copy()))
        # Tangential touches: local |h| minima within tolerance, no sign change.
        for i in range(1, n):
            if near[i] and abs(h[i]) <= np.abs(h[i - 1]) and abs(h[i]) <= np.abs(h[i + 1]) \
                    and h[i - 1] * h[i + 1] > 0:
                out.append((ts[i], pts[i]))
        return _finite(out, "sign-change bracketing at 1024 samples")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        u = rng.uniform(-2, 2, size=self.dimension - 1)
        return np.append(u, float(self.g(u)))

    def feature_points(self) -> list[np.ndarray]:
        pts = []
        for c in (-1.0, 0.0, 1.0):
            u = np.full(self.dimension - 1, c)
            pts.append(np.append(u, float(self.g(u))))
        return pts

    def distance_field(self, pts: np.ndarray) -> np.ndarray:
        # Vertical defect over sqrt(1+L^2) is a lower bound on the distance.
        defect = np.array([abs(self._defect(p)) for p in pts])
        return defect / math.sqrt(1.0 + self.lipschitz_const**2)

    def params_json(self) -> dict:
        if self.profile is None:
            raise UnsupportedFamilyError("lipschitz_graph built from a raw callable has no JSON form")
        return dict(self.profile)

    @classmethod
    def from_profile(cls, profile: str, amplitude: float = 1.0, frequency: float = 1.0,
                     dimension: int = 2) -> "LipschitzGraph":
        a, w = float(amplitude), float(frequency)
        if profile == "abs":
            g = lambda u: a * float(np.abs(u).sum())
            L = abs(a) * math.sqrt(dimension - 1)
        elif profile == "sin":
            g = lambda u: a * math.sin(w * float(u.sum()))
            L = abs(a * w) * math.sqrt(dimension - 1)
        elif profile == "zero":
            g = lambda u: 0.0
            L = 0.0
        else:
            raise SceneError("exception_set/profile", f"unknown lipschitz_graph profile {profile!r}")
        spec = {"profile": profile, "amplitude": a, "frequency": w}
        return cls(g, L, dimension=dimension, profile=spec)


# ---------------------------------------------------------------------------
# circles and spheres


class CircleSphere(ExceptionSet):
    """The sphere {x : ||x - center|| = radius} (a circle when d = 2)."""

    kind = "circle"
    closed_subset = True

    def __init__(self, center: Sequence[float], radius: float, dimension: Optional[int] = None):
        c = as_point(center)
        super().__init__(dimension if dimension is not None else int(c.size))
        if c.size != self.dimension:
            raise DimensionMismatchError("circle: center dimension mismatch")
        if radius <= 0:
            raise ValueError("circle: radius must be positive")
        self.center = c
        self.radius = float(radius)

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return abs(float(np.linalg.norm(x - self.center)) - self.radius) <= tol

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        u = b - a
        w = a - self.center
        uu = float(u @ u)
        if uu <= tol * tol:
            if self._contains(a, tol):
                return _finite([(0.0, a.copy())], "degenerate segment on the sphere")
            return _finite([], "degenerate segment off the sphere")
        B = float(w @ u)
        C = float(w @ w) - self.radius**2
        disc = B * B - uu * C
        out = []
        if disc >= 0:
            sq = math.sqrt(disc)
            for t in ((-B - sq) / uu, (-B + sq) / uu):
                if -tol / math.sqrt(uu) <= t <= 1 + tol / math.sqrt(uu):
                    tc = min(max(t, 0.0), 1.0)
                    out.append((tc, a + tc * u))
        else:
            # Grazing pass: closest approach may still be within tolerance.
            t = min(max(-B / uu, 0.0), 1.0)
            p = a + t * u
            if self._contains(p, tol):
                out.append((t, p))
        return _finite(out, "quadratic solve")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        v = rng.normal(size=self.dimension)
        v /= np.linalg.norm(v)
        return self.center + self.radius * v

    def feature_points(self) -> list[np.ndarray]:
        pts = []
        for i in range(self.dimension):
            e = np.zeros(self.dimension)
            e[i] = self.radius
            pts.extend([self.center + e, self.center - e])
        return pts

    def distance_field(self, pts: np.ndarray) -> np.ndarray:
        return np.abs(np.linalg.norm(pts - self.center, axis=1) - self.radius)

    def params_json(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius}


# ---------------------------------------------------------------------------
# manifolds given by bi-Lipschitz charts


@dataclass
class Chart:
    """One bi-Lipschitz chart Psi: V -> R^d with V a coordinate box.

    The manifold piece is Psi({y in V : y_(m+1..d) = 0}) where m is the
    manifold dimension.  forward/inverse must be mutually inverse on V.
    """

    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    box_lo: np.ndarray
    box_hi: np.ndarray
    manifold_dim: int

    @classmethod
    def affine(cls, matrix: np.ndarray, shift: np.ndarray, box_lo, box_hi, manifold_dim: int) -> "Chart":
        A = np.asarray(matrix, dtype=float)
        b = np.asarray(shift, dtype=float)
        Ainv = np.linalg.inv(A)
        return cls(
            forward=lambda y: A @ y + b,
            inverse=lambda x: Ainv @ (x - b),
            box_lo=np.asarray(box_lo, dtype=float),
            box_hi=np.asarray(box_hi, dtype=float),
            manifold_dim=manifold_dim,
        )

    def in_box(self, y: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.all(y >= self.box_lo - tol) and np.all(y <= self.box_hi + tol))


class ChartManifold(ExceptionSet):
    """A manifold-like set covered by finitely many bi-Lipschitz charts."""

    kind = "chart_manifold"
    closed_subset = True

    _VALIDATION_TOL = 1e-6

    def __init__(self, charts: Sequence[Chart], lipschitz_const: float, dimension: int,
                 validate: bool = True, json_spec: Optional[dict] = None):
        super().__init__(dimension)
        if not charts:
            raise ValueError("chart_manifold needs at least one chart")
        self.charts = list(charts)
        self.lipschitz_const = float(lipschitz_const)
        self.json_spec = json_spec
        if validate:
            rng = np.random.default_rng(4321)
            for chart in self.charts:
                for _ in range(64):
                    y1 = rng.uniform(chart.box_lo, chart.box_hi)
                    y2 = rng.uniform(chart.box_lo, chart.box_hi)
                    dy = float(np.linalg.norm(y1 - y2))
                    if dy < 1e-9:
                        continue
                    dx = float(np.linalg.norm(chart.forward(y1) - chart.forward(y2)))
                    bound = self.lipschitz_const * (1 + self._VALIDATION_TOL)
                    if dx > bound * dy + 1e-12 or dy > bound * dx + 1e-12:
                        raise ValueError("declared bi-Lipschitz constant violated on samples")

    def _tail_defect(self, x: np.ndarray) -> Optional[tuple[Chart, np.ndarray, float]]:
        best = None
        for chart in self.charts:
            y = np.asarray(chart.inverse(x), dtype=float)
            if not chart.in_box(y, tol=1e-9):
                continue
            defect = float(np.linalg.norm(y[chart.manifold_dim:]))
            if best is None or defect < best[2]:
                best = (chart, y, defect)
        return best

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        hit = self._tail_defect(x)
        return hit is not None and hit[2] <= tol * self.lipschitz_const

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        n = 1024
        ts = np.linspace(0.0, 1.0, n + 1)
        tol_chart = tol * self.lipschitz_const
        vals = []
        for t in ts:
            hit = self._tail_defect(a + t * (b - a))
            vals.append(None if hit is None else hit)
        near = [v is not None and v[2] <= tol_chart for v in vals]
        seg_len = float(np.linalg.norm(b - a))
        if all(near):
            if seg_len <= tol:
                return _finite([(0.0, a.copy())], "degenerate segment on the manifold")
            return CrossingReport(UNCOUNTABLE_CLOSURE, None, "segment runs inside the manifold")
        if seg_len / n > tol and any(near[i] and near[i + 1] for i in range(n)):
            return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                  "segment runs inside the manifold on a sub-interval")
        out: list[tuple[float, np.ndarray]] = []
        codim1 = all(c.manifold_dim == self.dimension - 1 for c in self.charts)
        if codim1:
            signed = np.array([
                (v[1][-1] if v is not None else np.nan) for v in vals
            ])
            for i in range(n):
                s0, s1 = signed[i], signed[i + 1]
                if np.isnan(s0) or np.isnan(s1):
                    if near[i]:
                        out.append((ts[i], a + ts[i] * (b - a)))
                    continue
                if (s0 == 0.0 and s1 != 0.0) or s0 * s1 < 0:
                    lo, hi = ts[i], ts[i + 1]
                    flo = s0
                    for _ in range(60):
                        mid = (lo + hi) / 2
                        hit = self._tail_defect(a + mid * (b - a))
                        fm = hit[1][-1] if hit is not None else flo
                        if flo * fm <= 0:
                            hi = mid
                        else:
                            lo, flo = mid, fm
                    t = (lo + hi) / 2
                    out.append((t, a + t * (b - a)))
            if near[-1] and not (not np.isnan(signed[-2]) and signed[-2] * signed[-1] < 0):
                out.append((1.0, b.copy()))
            if near[0] and not (not np.isnan(signed[1]) and signed[0] * signed[1] < 0) \
                    and not (signed[0] == 0.0 and signed[1] != 0.0):
                out.append((0.0, a.copy()))
        else:
            # Codimension >= 2: sampling cannot certify an exhaustive list.
            if any(near):
                return CrossingReport(UNKNOWN, None,
                                      "sampled approaches to a codimension >= 2 set; finiteness not certified")
        return _finite(out, "chart tail-defect bracketing at 1024 samples")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        chart = self.charts[int(rng.integers(len(self.charts)))]
        y = rng.uniform(chart.box_lo, chart.box_hi)
        y[chart.manifold_dim:] = 0.0
        return np.asarray(chart.forward(y), dtype=float)

    def feature_points(self) -> list[np.ndarray]:
        pts = []
        for chart in self.charts:
            mid = (chart.box_lo + chart.box_hi) / 2
            mid[chart.manifold_dim:] = 0.0
            pts.append(np.asarray(chart.forward(mid), dtype=float))
            for i in range(chart.manifold_dim):
                for val in (chart.box_lo[i], chart.box_hi[i]):
                    y = mid.copy()
                    y[i] = val
                    pts.append(np.asarray(chart.forward(y), dtype=float))
        return pts

    def params_json(self) -> dict:
        if self.json_spec is None:
            raise UnsupportedFamilyError("chart_manifold built from raw callables has no JSON form")
        return dict(self.json_spec)


# ---------------------------------------------------------------------------
# Cantor set on a carrier segment


class CantorSet(ExceptionSet):
    """Middle-thirds Cantor set scaled onto the segment [start, end] in R^d."""

    kind = "cantor_set"
    closed_subset = True

    def __init__(self, start: Sequence[float] = (0.0,), end: Sequence[float] = (1.0,),
                 dimension: Optional[int] = None):
        a = as_point(start)
        super().__init__(dimension if dimension is not None else int(a.size))
        b = as_point(end)
        if a.size != self.dimension or b.size != self.dimension:
            raise DimensionMismatchError("cantor_set: carrier endpoint dimension mismatch")
        self.start = a
        self.end = b
        self.carrier_len = float(np.linalg.norm(b - a))
        if self.carrier_len <= 0:
            raise ValueError("cantor_set: carrier segment is degenerate")
        self.unit = (b - a) / self.carrier_len

    def _carrier_coords(self, x: np.ndarray) -> tuple[float, float]:
        r = x - self.start
        s = float(r @ self.unit)
        perp = float(np.linalg.norm(r - s * self.unit))
        return s / self.carrier_len, perp

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        t, perp = self._carrier_coords(x)
        if perp > tol:
            return False
        return cantor_distance(t) * self.carrier_len <= tol

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        t0, p0 = self._carrier_coords(a)
        t1, p1 = self._carrier_coords(b)
        tol_t = tol / self.carrier_len
        if p0 <= tol and p1 <= tol:
            hit = cantor_interval_hit(min(t0, t1), max(t0, t1), tol_t)
            if hit == "block":
                return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                      "segment runs along the carrier through Cantor points")
            out = []
            for t_end, param in ((t0, 0.0), (t1, 1.0)):
                if 0 - tol_t <= t_end <= 1 + tol_t and cantor_distance(t_end) <= tol_t:
                    out.append((param, a + param * (b - a)))
            return _finite(out, "collinear touch of the Cantor carrier")
        # Closest approach between the segment and the carrier line.
        u = b - a
        v = self.unit
        w = a - self.start
        uu, uv, vv = float(u @ u), float(u @ v), 1.0
        wu, wv = float(w @ u), float(w @ v)
        den = uu * vv - uv * uv
        out = []
        if den > TOL_GEOM**2 * uu:
            t = (uv * wv - vv * wu) / den
            s = (uu * wv - uv * wu) / den
            if -tol / max(math.sqrt(uu), tol) <= t <= 1 + tol / max(math.sqrt(uu), tol):
                tc = min(max(t, 0.0), 1.0)
                q = a + tc * u
                gap = float(np.linalg.norm(w + tc * u - s * v))
                if gap <= tol and 0 - tol_t <= s / self.carrier_len <= 1 + tol_t \
                        and cantor_distance(s / self.carrier_len) * self.carrier_len <= tol:
                    out.append((tc, q))
                    return _finite(out, "transversal crossing lands on a Cantor point")
            return _finite(out, "transversal crossing misses the Cantor set")
        # Parallel to the carrier but off the line: only endpoint grazes matter.
        for param, (t_end, perp) in ((0.0, (t0, p0)), (1.0, (t1, p1))):
            if perp <= tol and 0 - tol_t <= t_end <= 1 + tol_t \
                    and cantor_distance(t_end) * self.carrier_len <= tol:
                out.append((param, a + param * (b - a)))
        return _finite(out, "segment parallel to the carrier line")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        t = 0.0
        scale = 1.0
        for _ in range(40):
            scale /= 3.0
            t += (2.0 * int(rng.integers(2))) * scale
        return self.start + t * (self.end - self.start)

    def feature_points(self) -> list[np.ndarray]:
        return [self.start.copy(), self.end.copy()]

    def distance_field(self, pts: np.ndarray) -> np.ndarray:
        r = pts - self.start
        s = (r @ self.unit) / self.carrier_len
        perp = np.linalg.norm(r - np.outer(s * self.carrier_len, self.unit), axis=1)
        along = cantor_distance_field(s) * self.carrier_len
        return np.hypot(along, perp)

    def params_json(self) -> dict:
        return {"start": self.start.tolist(), "end": self.end.tolist()}


# ---------------------------------------------------------------------------
# rational grid Q^2


class RationalGrid(ExceptionSet):
    """Q^2: points of the plane with both coordinates rational.

    Denominators are reconstructed by continued fractions up to Q_MAX; the
    classification of a segment rests on the slope test (a line through two
    rational points has rational slope or is vertical at rational abscissa).
    """

    kind = "rational_grid"
    closed_subset = False
    lebesgue_null = True

    def __init__(self, dimension: int = 2, scan_denominator_max: int = 32):
        if dimension != 2:
            raise DimensionMismatchError("rational_grid is defined for d = 2")
        super().__init__(2)
        self.scan_denominator_max = int(scan_denominator_max)

    def contains(self, x, tol: Optional[float] = None) -> bool:
        # Rationality has its own default tolerance; an explicit coarse tol is
        # rejected by is_rational rather than silently clamped.
        p = as_point(x)
        if p.size != 2:
            raise DimensionMismatchError("rational_grid: point must be 2-dimensional")
        rtol = RATIONAL_TOL if tol is None else float(tol)
        return is_rational(p[0], rtol) and is_rational(p[1], rtol)

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return is_rational(x[0], min(tol, RATIONAL_TOL)) and is_rational(x[1], min(tol, RATIONAL_TOL))

    def _point_if_rational(self, t: float, a: np.ndarray, u: np.ndarray) -> Optional[np.ndarray]:
        p = a + t * u
        if is_rational(p[0]) and is_rational(p[1]):
            return p
        return None

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        u = b - a
        seg_len = float(np.linalg.norm(u))
        if seg_len <= tol:
            if self._contains(a, tol):
                return _finite([(0.0, a.copy())], "degenerate rational point")
            return _finite([], "degenerate irrational point")
        if abs(u[0]) <= TOL_GEOM * seg_len:  # vertical
            if is_rational(a[0]):
                return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                      "vertical segment at rational abscissa is dense in Q^2")
            return _finite([], "vertical segment at irrational abscissa misses Q^2")
        if abs(u[1]) <= TOL_GEOM * seg_len:  # horizontal
            if is_rational(a[1]):
                return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                      "horizontal segment at rational ordinate is dense in Q^2")
            return _finite([], "horizontal segment at irrational ordinate misses Q^2")
        slope = float(u[1]) / float(u[0])
        intercept = float(a[1]) - slope * float(a[0])
        if is_rational(slope):
            if is_rational(intercept):
                return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                      "rational slope and intercept: rational points are dense on the chord")
            return _finite([], "rational slope, irrational intercept: no rational point exists")
        # Irrational slope: at most one rational point on the carrier line.
        out: list[tuple[float, np.ndarray]] = []
        x_lo, x_hi = min(a[0], b[0]), max(a[0], b[0])
        candidates = [0.0, 1.0]
        if x_lo <= 0.0 <= x_hi:
            candidates.append((0.0 - a[0]) / u[0])
        if min(a[1], b[1]) <= 0.0 <= max(a[1], b[1]):
            candidates.append((0.0 - a[1]) / u[1])
        for t in candidates:
            if -1e-12 <= t <= 1 + 1e-12:
                p = self._point_if_rational(min(max(t, 0.0), 1.0), a, u)
                if p is not None:
                    out.append((min(max(t, 0.0), 1.0), p))
                    break
        if not out and self.scan_denominator_max > 0:
            for q in range(1, self.scan_denominator_max + 1):
                p_lo = math.ceil(x_lo * q)
                for pnum in range(p_lo, math.floor(x_hi * q) + 1):
                    xr = pnum / q
                    t = (xr - a[0]) / u[0]
                    hit = self._point_if_rational(t, a, u)
                    if hit is not None:
                        out.append((t, hit))
                        break
                if out:
                    break
        return _finite(out, "irrational slope: at most one rational point on the line")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        q1, q2 = rng.integers(1, 1000, size=2)
        p1 = rng.integers(-2 * q1, 2 * q1 + 1)
        p2 = rng.integers(-2 * q2, 2 * q2 + 1)
        return np.array([p1 / q1, p2 / q2])

    def params_json(self) -> dict:
        return {}


# ---------------------------------------------------------------------------
# the irrational square


class IrrationalSquare(ExceptionSet):
    """([0,1] \\ Q)^2: unit-square points with both coordinates irrational.

    Full planar measure inside the square, so it is not Lebesgue-null; its
    complement within the square is the grid of rational lines.
    """

    kind = "irrational_square"
    closed_subset = False
    lebesgue_null = False

    def __init__(self, dimension: int = 2):
        if dimension != 2:
            raise DimensionMismatchError("irrational_square is defined for d = 2")
        super().__init__(2)

    def contains(self, x, tol: Optional[float] = None) -> bool:
        p = as_point(x)
        if p.size != 2:
            raise DimensionMismatchError("irrational_square: point must be 2-dimensional")
        gtol = TOL_GEOM if tol is None else float(tol)
        rtol = RATIONAL_TOL if tol is None else float(tol)
        if not (0 - gtol <= p[0] <= 1 + gtol and 0 - gtol <= p[1] <= 1 + gtol):
            return False
        return not is_rational(p[0], rtol) and not is_rational(p[1], rtol)

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        if not (0 - tol <= x[0] <= 1 + tol and 0 - tol <= x[1] <= 1 + tol):
            return False
        return not is_rational(x[0]) and not is_rational(x[1])

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        # Clip to the unit square first; outside it there are no members.
        u = b - a
        lo, hi = 0.0, 1.0
        for i in (0, 1):
            if abs(u[i]) <= 1e-15:
                if not (0 - tol <= a[i] <= 1 + tol):
                    return _finite([], "segment misses the unit square")
                continue
            t0 = (0.0 - a[i]) / u[i]
            t1 = (1.0 - a[i]) / u[i]
            lo = max(lo, min(t0, t1))
            hi = min(hi, max(t0, t1))
        if lo > hi:
            return _finite([], "segment misses the unit square")
        clipped_len = (hi - lo) * float(np.linalg.norm(u))
        if clipped_len <= tol:
            mid = a + ((lo + hi) / 2) * u
            if self._contains(mid, tol):
                return _finite([(min(max((lo + hi) / 2, 0.0), 1.0), mid)], "single-point touch")
            return _finite([], "single-point touch at a rational line")
        seg_len = float(np.linalg.norm(u))
        if abs(u[0]) <= TOL_GEOM * seg_len:
            if is_rational(a[0]):
                return _finite([], "vertical run along a rational grid line misses the set")
            return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                  "vertical run at irrational abscissa meets the set in co-countably many points")
        if abs(u[1]) <= TOL_GEOM * seg_len:
            if is_rational(a[1]):
                return _finite([], "horizontal run along a rational grid line misses the set")
            return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                  "horizontal run at irrational ordinate meets the set in co-countably many points")
        return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                              "oblique run: only countably many parameters have a rational coordinate")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        while True:
            p = rng.uniform(0, 1, size=2)
            if not is_rational(p[0]) and not is_rational(p[1]):
                return p

    def params_json(self) -> dict:
        return {}


# ---------------------------------------------------------------------------
# topologist's sine curve


class TopologistSine(ExceptionSet):
    """The graph {(t, sin(1/t)) : t > 0}, optionally with its closure segment.

    Crossings are enumerated for t >= SINE_CUTOFF.  A segment whose sub-cutoff
    part stays inside the oscillation band is reported with the (correct but
    weaker) classification countable_closure, since the finitely many
    crossings there cannot be enumerated at desk scale.
    """

    kind = "topologist_sine"
    lebesgue_null = True

    def __init__(self, closure: bool = False, dimension: int = 2):
        if dimension != 2:
            raise DimensionMismatchError("topologist_sine is defined for d = 2")
        super().__init__(2)
        self.closure = bool(closure)

    @property
    def closed_subset(self) -> bool:  # type: ignore[override]
        return self.closure

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        t, y = float(x[0]), float(x[1])
        if t >= SINE_CUTOFF:
            return abs(y - math.sin(1.0 / t)) <= tol
        if t > 0:
            # Branch spacing here is ~2*pi*t^2 < tol: the band is Theta-dense.
            return abs(y) <= 1 + tol
        if self.closure:
            return abs(t) <= tol and abs(y) <= 1 + tol
        return False

    def _graph_defect(self, p: np.ndarray) -> float:
        return float(p[1]) - math.sin(1.0 / float(p[0]))

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        u = b - a
        seg_len = float(np.linalg.norm(u))
        x_lo, x_hi = min(a[0], b[0]), max(a[0], b[0])
        out: list[tuple[float, np.ndarray]] = []

        # Closure segment {0} x [-1, 1].
        if self.closure and x_lo <= tol and x_hi >= -tol:
            if abs(u[0]) <= TOL_GEOM * max(seg_len, tol) and abs(a[0]) <= tol:
                y_lo, y_hi = min(a[1], b[1]), max(a[1], b[1])
                ov = min(y_hi, 1.0) - max(y_lo, -1.0)
                if ov > tol:
                    return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                          "segment runs along the closure segment {0} x [-1, 1]")

        # Does the segment enter the sub-cutoff oscillation band?
        def y_at(x: float) -> float:
            t = (x - a[0]) / u[0]
            return float(a[1] + t * u[1])

        if abs(u[0]) > TOL_GEOM * seg_len:
            band_lo, band_hi = max(x_lo, 0.0), min(x_hi, SINE_CUTOFF)
            if band_lo < band_hi:
                ys = [y_at(band_lo), y_at(band_hi)]
                if min(ys) <= 1 + tol and max(ys) >= -1 - tol:
                    evidence = "crossings accumulate toward the closure segment" if x_lo <= 0 \
                        else "sub-cutoff crossings are not enumerated"
                    return CrossingReport(COUNTABLE_CLOSURE, None, evidence)
        else:
            # Near-vertical segment: meets each branch at most once anyway.
            pass

        # Enumerate crossings for x >= SINE_CUTOFF via sign changes of the
        # defect, sampling densely in 1/x.
        lo_x = max(x_lo, SINE_CUTOFF)
        if lo_x > x_hi:
            return _finite(out, "segment stays left of the enumeration cutoff")
        if abs(u[0]) <= TOL_GEOM * seg_len:
            # Vertical segment: single graph point at this abscissa.
            x = float(a[0])
            if x >= SINE_CUTOFF:
                y = math.sin(1.0 / x)
                y_lo, y_hi = min(a[1], b[1]) - tol, max(a[1], b[1]) + tol
                if y_lo <= y <= y_hi:
                    t = (y - a[1]) / u[1] if abs(u[1]) > 0 else 0.0
                    t = min(max(t, 0.0), 1.0)
                    out.append((t, np.array([x, y])))
            return _finite(out, "vertical segment meets the graph at most once")
        t_for = lambda x: (x - a[0]) / u[0]
        t_a, t_b = sorted((t_for(lo_x), t_for(x_hi)))
        t_a, t_b = max(t_a, 0.0), min(t_b, 1.0)
        inv_lo, inv_hi = 1.0 / x_hi, 1.0 / lo_x
        n_branch = int(min((inv_hi - inv_lo) / (math.pi / 4) + 8, 2_000_000))
        ts = np.unique(np.concatenate([
            np.linspace(t_a, t_b, 257),
            t_for(1.0 / np.linspace(inv_lo, inv_hi, n_branch)),
        ]))
        ts = ts[(ts >= t_a) & (ts <= t_b)]
        pts = a + ts[:, None] * u
        h = pts[:, 1] - np.sin(1.0 / pts[:, 0])
        for i in range(len(ts) - 1):
            if h[i] == 0.0 or h[i] * h[i + 1] < 0:
                lo_t, hi_t = ts[i], ts[i + 1]
                flo = h[i]
                for _ in range(60):
                    mid = (lo_t + hi_t) / 2
                    p = a + mid * u
                    fm = self._graph_defect(p)
                    if flo * fm <= 0:
                        hi_t = mid
                    else:
                        lo_t, flo = mid, fm
                t = (lo_t + hi_t) / 2
                out.append((t, a + t * u))
        if len(ts) and abs(h[-1]) == 0.0:
            out.append((ts[-1], a + ts[-1] * u))
        return _finite(out, f"sign-change bracketing over {len(ts)} samples")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        t = float(rng.uniform(0.05, 2.0))
        return np.array([t, math.sin(1.0 / t)])

    def feature_points(self) -> list[np.ndarray]:
        return [np.array([0.0, -1.0]), np.array([0.0, 1.0]), np.array([2 / math.pi, 1.0])]

    def params_json(self) -> dict:
        return {"closure": self.closure}


# ---------------------------------------------------------------------------
# a countable set whose points are all isolated but whose closure is uncountable


class IsolatedCantorD0(ExceptionSet):
    """All points isolated, yet the closure contains the whole Cantor set.

    The set collects, for every finite ternary endpoint e = sum d_k 3^-k with
    digits in {0, 2} ending in a 2 at position n, the increasing sequence
    e - 3^-(j+n) -> e, together with the sequence -3^-j -> 0.  In d >= 2 the
    set is extruded along the remaining axes.
    """

    kind = "isolated_cantor_d0"
    closed_subset = False
    lebesgue_null = True

    _ENDPOINT_DEPTH = 12

    def __init__(self, dimension: int = 1):
        super().__init__(dimension)
        self._points: Optional[np.ndarray] = None

    def generated_points(self) -> np.ndarray:
        """Sorted first-axis coordinates generated to the resolution bound."""
        if self._points is None:
            pts = []
            for j in range(1, TERNARY_DEPTH + 1):
                pts.append(-(3.0 ** -j))
            endpoints = [(Fraction(0), 0)]
            for n in range(1, self._ENDPOINT_DEPTH + 1):
                new = []
                for e, last in endpoints:
                    new.append((e, last))
                    new.append((e + Fraction(2, 3**n), n))
                endpoints = new
            for e, n in endpoints:
                if n == 0:
                    continue  # trailing digit must be 2 at position n >= 1
                for j in range(1, TERNARY_DEPTH - n + 1):
                    pts.append(float(e - Fraction(1, 3 ** (j + n))))
            self._points = np.unique(np.array(pts))
        return self._points

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        pts = self.generated_points()
        i = int(np.searchsorted(pts, x[0]))
        best = math.inf
        for j in (i - 1, i):
            if 0 <= j < len(pts):
                best = min(best, abs(float(pts[j]) - float(x[0])))
        return best <= tol

    def _interval_classification(self, lo: float, hi: float, tol: float) -> str:
        hit = cantor_interval_hit(lo, hi, tol)
        if hit == "block":
            return UNCOUNTABLE_CLOSURE
        if hit == "touch":
            return COUNTABLE_CLOSURE
        return FINITE

    def _segment_crossings(self, a: np.ndarray, b: np.ndarray, tol: float) -> CrossingReport:
        x0, x1 = float(a[0]), float(b[0])
        lo, hi = min(x0, x1), max(x0, x1)
        u = b - a
        seg_len = float(np.linalg.norm(u))
        if self.dimension >= 2 and abs(u[0]) <= TOL_GEOM * max(seg_len, tol):
            # Constant first coordinate: either inside a slab or missing all.
            pts = self.generated_points()
            i = int(np.searchsorted(pts, x0))
            near = any(abs(float(pts[j]) - x0) <= tol for j in (i - 1, i) if 0 <= j < len(pts))
            if near:
                if seg_len > tol:
                    return CrossingReport(UNCOUNTABLE_CLOSURE, None,
                                          "segment runs inside an extruded slab of the set")
                return _finite([(0.0, a.copy())], "degenerate touch")
            return _finite([], "constant first coordinate off the set")
        cls = self._interval_classification(lo, hi, tol)
        if cls == UNCOUNTABLE_CLOSURE:
            return CrossingReport(cls, None, "closure of the crossings contains a Cantor block")
        if cls == COUNTABLE_CLOSURE:
            return CrossingReport(cls, None,
                                  "infinitely many isolated points accumulate at a closure point in range")
        pts = self.generated_points()
        i0 = int(np.searchsorted(pts, lo - tol))
        i1 = int(np.searchsorted(pts, hi + tol))
        out = []
        for p in pts[i0:i1]:
            t = 0.5 if hi == lo else (float(p) - x0) / (x1 - x0)
            t = min(max(t, 0.0), 1.0)
            out.append((t, a + t * u))
        return _finite(out, "isolated points enumerated on the range")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        pts = self.generated_points()
        x = float(pts[int(rng.integers(len(pts)))])
        return np.array([x] + [0.0] * (self.dimension - 1))

    def params_json(self) -> dict:
        return {}


# ---------------------------------------------------------------------------
# JSON construction

_FAMILY_KEYS = {
    "finite_points": {"points"},
    "hyperplane": {"normal", "offset"},
    "arrangement": {"components"},
    "slit": {"tip", "direction", "closed"},
    "lipschitz_graph": {"profile", "amplitude", "frequency"},
    "circle": {"center", "radius"},
    "chart_manifold": {"charts", "lipschitz"},
    "cantor_set": {"start", "end"},
    "rational_grid": set(),
    "irrational_square": set(),
    "topologist_sine": {"closure"},
    "isolated_cantor_d0": set(),
}


def exception_set_from_json(obj: dict, dimension: int, where: str = "exception_set") -> ExceptionSet:
    """Build a family from its scene-JSON description, rejecting unknown keys."""
    if not isinstance(obj, dict):
        raise SceneError(where, "must be an object")
    kind = obj.get("kind")
    if kind is None:
        raise SceneError(f"{where}/kind", "missing required field")
    if kind not in _FAMILY_KEYS:
        raise SceneError(f"{where}/kind", f"unknown exception-set kind {kind!r}")
    extra = set(obj) - _FAMILY_KEYS[kind] - {"kind"}
    if extra:
        raise SceneError(f"{where}/{sorted(extra)[0]}", f"unknown key for kind {kind!r}")
    try:
        if kind == "finite_points":
            return FinitePoints(obj["points"], dimension=dimension)
        if kind == "hyperplane":
            return Hyperplane(obj["normal"], obj["offset"], dimension=dimension)
        if kind == "arrangement":
            comps = []
            for i, c in enumerate(obj["components"]):
                extra_c = set(c) - {"normal", "offset", "constraints"}
                if extra_c:
                    raise SceneError(f"{where}/components/{i}/{sorted(extra_c)[0]}", "unknown key")
                cons = [(cc["normal"], cc["offset"]) for cc in c.get("constraints", [])]
                comps.append(HalfFlat(c["normal"], c["offset"], cons))
            return Arrangement(comps, dimension=dimension)
        if kind == "slit":
            if dimension != 2:
                raise SceneError(f"{where}/kind", "slit requires dimension 2")
            return Slit(obj.get("tip", (0.0, 0.0)), obj.get("direction", (-1.0, 0.0)),
                        obj.get("closed", False))
        if kind == "lipschitz_graph":
            return LipschitzGraph.from_profile(
                obj.get("profile", "zero"), obj.get("amplitude", 1.0), obj.get("frequency", 1.0),
                dimension=dimension)
        if kind == "circle":
            return CircleSphere(obj["center"], obj["radius"], dimension=dimension)
        if kind == "chart_manifold":
            charts = []
            for i, c in enumerate(obj["charts"]):
                extra_c = set(c) - {"rotation", "translation", "box", "manifold_dim"}
                if extra_c:
                    raise SceneError(f"{where}/charts/{i}/{sorted(extra_c)[0]}", "unknown key")
                if dimension != 2:
                    raise SceneError(f"{where}/charts", "JSON charts support dimension 2 only")
                th = float(c.get("rotation", 0.0))
                A = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
                shift = np.asarray(c.get("translation", [0.0, 0.0]), dtype=float)
                lo, hi = c["box"]
                charts.append(Chart.affine(A, shift, lo, hi, int(c.get("manifold_dim", 1))))
            return ChartManifold(charts, float(obj.get("lipschitz", 1.0)), dimension)
        if kind == "cantor_set":
            return CantorSet(obj.get("start", [0.0] * dimension),
                             obj.get("end", [1.0] + [0.0] * (dimension - 1)), dimension=dimension)
        if kind == "rational_grid":
            if dimension != 2:
                raise SceneError(f"{where}/kind", "rational_grid requires dimension 2")
            return RationalGrid()
        if kind == "irrational_square":
            if dimension != 2:
                raise SceneError(f"{where}/kind", "irrational_square requires dimension 2")
            return IrrationalSquare()
        if kind == "topologist_sine":
            if dimension != 2:
                raise SceneError(f"{where}/kind", "topologist_sine requires dimension 2")
            return TopologistSine(obj.get("closure", False))
        if kind == "isolated_cantor_d0":
            return IsolatedCantorD0(dimension)
    except KeyError as exc:
        raise SceneError(f"{where}/{exc.args[0]}", "missing required field") from exc
    except DimensionMismatchError as exc:
        raise SceneError(f"{where}/kind", str(exc)) from exc
    raise SceneError(f"{where}/kind", f"unknown exception-set kind {kind!r}")
