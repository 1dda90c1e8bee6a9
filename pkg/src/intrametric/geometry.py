"""Polyline geometry: lengths, robust segment intersection, loop erasure.

All coincidence decisions use the absolute tolerance TOL_GEOM, which is safe
for coordinates at unit scale in double precision.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import DimensionMismatchError

TOL_GEOM = 1e-9

Point = np.ndarray
Segment = tuple[np.ndarray, np.ndarray]


def as_point(coords: Sequence[float] | np.ndarray) -> np.ndarray:
    """Validate and convert coordinates to a float vector."""
    p = np.asarray(coords, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise DimensionMismatchError(f"point must be a 1-d coordinate array, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"non-finite coordinate in point {p!r}")
    return p


class Polyline:
    """Finite vertex chain in R^d.

    Exactly coincident consecutive vertices are merged on construction.  A
    chain whose vertices all coincide is kept as the two-vertex constant
    polyline, so every instance has at least one segment.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Sequence[Sequence[float]] | np.ndarray):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 1:
            raise DimensionMismatchError(
                f"polyline needs an (n>=2, d>=1) vertex array, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite vertex coordinate")
        keep = [0]
        for i in range(1, v.shape[0]):
            if not np.array_equal(v[i], v[keep[-1]]):
                keep.append(i)
        if len(keep) == 1:
            keep.append(0)
        self.vertices = np.ascontiguousarray(v[keep])

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Polyline) and np.array_equal(self.vertices, other.vertices)

    def __repr__(self) -> str:
        return f"Polyline({self.vertices.tolist()!r})"

    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.vertices, axis=0), axis=1).sum())

    def segments(self) -> Iterator[Segment]:
        for i in range(len(self) - 1):
            yield self.vertices[i], self.vertices[i + 1]

    def is_constant(self, tol: float = TOL_GEOM) -> bool:
        return bool(np.all(np.linalg.norm(self.vertices - self.vertices[0], axis=1) <= tol))

    def point_at(self, t: float) -> np.ndarray:
        """Point at chord-length fraction t in [0, 1]."""
        t = min(max(float(t), 0.0), 1.0)
        seg = np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)
        total = seg.sum()
        if total <= 0.0:
            return self.vertices[0].copy()
        target = t * total
        acc = 0.0
        for i, s in enumerate(seg):
            if acc + s >= target or i == len(seg) - 1:
                local = 0.0 if s == 0.0 else (target - acc) / s
                return self.vertices[i] + local * (self.vertices[i + 1] - self.vertices[i])
            acc += s
        return self.vertices[-1].copy()

    def to_json_obj(self) -> list[list[float]]:
        return [list(map(float, row)) for row in self.vertices]

    @classmethod
    def from_json_obj(cls, obj: Sequence[Sequence[float]]) -> "Polyline":
        return cls(obj)

    def write_csv(self, path: str) -> None:
        """One vertex per row, columns x1..xd."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i + 1}" for i in range(self.dimension)])
            for row in self.vertices:
                writer.writerow([repr(float(c)) for c in row])

    @classmethod
    def read_csv(cls, path: str) -> "Polyline":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        return cls([[float(c) for c in row] for row in rows[1:]])


def polyline_length(p: Polyline | Sequence[Sequence[float]]) -> float:
    if not isinstance(p, Polyline):
        p = Polyline(p)
    return p.length()


@dataclass(frozen=True)
class SegmentIntersection:
    """Outcome of intersecting two closed segments.

    kind is "empty", "point" (field point set) or "overlap" (collinear
    sub-segment; overlap endpoints are ordered along the first segment's
    direction of traversal).
    """

    kind: str
    point: Optional[np.ndarray] = None
    overlap: Optional[tuple[np.ndarray, np.ndarray]] = None

    EMPTY = "empty"
    POINT = "point"
    OVERLAP = "overlap"


def _point_segment_closest(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray]:
    u = b - a
    uu = float(u @ u)
    if uu == 0.0:
        return float(np.linalg.norm(q - a)), a.copy()
    t = min(max(float((q - a) @ u) / uu, 0.0), 1.0)
    c = a + t * u
    return float(np.linalg.norm(q - c)), c


def point_segment_distance(q: np.ndarray, seg: Segment) -> float:
    return _point_segment_closest(np.asarray(q, float), np.asarray(seg[0], float), np.asarray(seg[1], float))[0]


def point_polyline_distance(q: np.ndarray, p: Polyline) -> float:
    return min(point_segment_distance(q, s) for s in p.segments())


def segment_intersection(s1: Segment, s2: Segment, tol: float = TOL_GEOM) -> SegmentIntersection:
    """Classify the intersection of two closed segments in a common R^d.

    Decisions are made at absolute tolerance tol: segments closer than tol at
    their nearest approach count as intersecting, and collinear segments whose
    common piece is shorter than tol degrade to a point intersection.
    """
    a0, a1 = as_point(s1[0]), as_point(s1[1])
    b0, b1 = as_point(s2[0]), as_point(s2[1])
    if not (a0.size == a1.size == b0.size == b1.size):
        raise DimensionMismatchError("segments live in different dimensions")
    u = a1 - a0
    v = b1 - b0
    w = b0 - a0
    uu = float(u @ u)
    vv = float(v @ v)

    if uu <= tol * tol and vv <= tol * tol:
        if np.linalg.norm((a0 + a1) / 2 - (b0 + b1) / 2) <= tol:
            return SegmentIntersection(SegmentIntersection.POINT, point=(a0 + a1) / 2)
        return SegmentIntersection(SegmentIntersection.EMPTY)
    if uu <= tol * tol:
        d, c = _point_segment_closest(a0, b0, b1)
        if d <= tol:
            return SegmentIntersection(SegmentIntersection.POINT, point=c)
        return SegmentIntersection(SegmentIntersection.EMPTY)
    if vv <= tol * tol:
        d, c = _point_segment_closest(b0, a0, a1)
        if d <= tol:
            return SegmentIntersection(SegmentIntersection.POINT, point=c)
        return SegmentIntersection(SegmentIntersection.EMPTY)

    uv = float(u @ v)
    wu = float(w @ u)
    wv = float(w @ v)
    den = uu * vv - uv * uv

    if den > 1e-12 * uu * vv:
        s = (wu * vv - wv * uv) / den
        t = (wu * uv - wv * uu) / den
        if -0.0 <= s <= 1.0 and 0.0 <= t <= 1.0:
            p = a0 + s * u
            q = b0 + t * v
            if np.linalg.norm(p - q) <= tol:
                return SegmentIntersection(SegmentIntersection.POINT, point=(p + q) / 2)
            return SegmentIntersection(SegmentIntersection.EMPTY)
        # Closest pair with at least one clamped parameter.
        best: tuple[float, np.ndarray] | None = None
        for sc in (0.0, 1.0):
            d, c = _point_segment_closest(a0 + sc * u, b0, b1)
            cand = (d, (a0 + sc * u + c) / 2)
            if best is None or d < best[0]:
                best = cand
        for tc in (0.0, 1.0):
            d, c = _point_segment_closest(b0 + tc * v, a0, a1)
            cand = (d, (b0 + tc * v + c) / 2)
            if best is None or d < best[0]:
                best = cand
        if best is not None and best[0] <= tol:
            return SegmentIntersection(SegmentIntersection.POINT, point=best[1])
        return SegmentIntersection(SegmentIntersection.EMPTY)

    # Parallel directions: check the gap between the carrier lines.
    w_perp = w - (wu / uu) * u
    if np.linalg.norm(w_perp) > tol:
        return SegmentIntersection(SegmentIntersection.EMPTY)
    # Collinear: compare parameter intervals along s1.
    t0 = wu / uu
    t1 = float((b1 - a0) @ u) / uu
    lo, hi = min(t0, t1), max(t0, t1)
    lo_c = max(lo, 0.0)
    hi_c = min(hi, 1.0)
    tol_p = tol / np.sqrt(uu)
    if lo_c > hi_c + tol_p:
        return SegmentIntersection(SegmentIntersection.EMPTY)
    if hi_c - lo_c <= tol_p:
        return SegmentIntersection(SegmentIntersection.POINT, point=a0 + ((lo_c + hi_c) / 2) * u)
    return SegmentIntersection(
        SegmentIntersection.OVERLAP,
        overlap=(a0 + lo_c * u, a0 + hi_c * u),
    )


def _dedupe(vertices: list[np.ndarray], tol: float) -> list[np.ndarray]:
    out = [vertices[0]]
    for p in vertices[1:]:
        if np.linalg.norm(p - out[-1]) > tol:
            out.append(p)
    return out


def loop_erase(p: Polyline, tol: float = TOL_GEOM, max_passes: int = 10_000) -> Polyline:
    """Erase self-intersections by splicing, yielding a simple polyline.

    Scans segments forward; on finding segment i meeting a later segment j
    away from an adjacent shared vertex, replaces the sub-path between the
    meeting point's two visits by the single meeting point and restarts.
    Collinear overlaps splice at the overlap point reached earliest along
    segment i, so the earlier traversal direction survives.  The result has
    the same endpoints, its vertices lie on the input, and it is never longer.
    """
    verts = [p.vertices[i].copy() for i in range(len(p))]
    if len(verts) == 2:
        return Polyline(verts)
    first, last = verts[0].copy(), verts[-1].copy()
    for _ in range(max_passes):
        changed = False
        n = len(verts)
        for i in range(n - 1):
            for j in range(n - 2, i, -1):
                inter = segment_intersection((verts[i], verts[i + 1]), (verts[j], verts[j + 1]), tol)
                if inter.kind == SegmentIntersection.EMPTY:
                    continue
                if j == i + 1 and inter.kind == SegmentIntersection.POINT \
                        and np.linalg.norm(inter.point - verts[i + 1]) <= tol:
                    continue
                q = inter.point if inter.kind == SegmentIntersection.POINT else inter.overlap[0]
                verts = _dedupe(verts[: i + 1] + [q] + verts[j + 1 :], tol)
                changed = True
                break
            if changed:
                break
        if not changed:
            break
        if len(verts) < 2:
            verts = [first, last]
    if len(verts) == 1:
        verts = [verts[0], verts[0]]
    verts[0], verts[-1] = first, last
    return Polyline(verts)


def is_simple(p: Polyline, tol: float = TOL_GEOM) -> bool:
    """True when no two non-adjacent segments meet and adjacent segments meet
    only at their shared vertex."""
    if p.is_constant(tol):
        return True
    segs = list(p.segments())
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            inter = segment_intersection(segs[i], segs[j], tol)
            if inter.kind == SegmentIntersection.EMPTY:
                continue
            if j == i + 1 and inter.kind == SegmentIntersection.POINT \
                    and np.linalg.norm(inter.point - segs[i][1]) <= tol:
                continue
            return False
    return True
