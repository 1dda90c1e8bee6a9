"""Planar grid search for shortest obstacle-avoiding paths.

Nodes live on an axis-aligned lattice of spacing 2^-depth covering the
bounding box of the query points and the obstacle's feature points, inflated
by 25% per side.  A node is removed when the obstacle's distance field at it
is at most 0.75 * spacing: for straight thin obstacles two nodes on opposite
sides of any 8-neighbour move are at most sqrt(2)/2 * spacing from the
separating line, so no admissible move can jump across.  Upper bounds are
made monotone in depth by running a ladder of refinements and keeping the
best witness, then pulling the polyline taut against the continuous obstacle.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np
from skimage.graph import MCP_Geometric

from .errors import GridTooLargeError
from .exception_sets import FINITE, ExceptionSet
from .geometry import TOL_GEOM, Polyline, as_point

MAX_CELLS = 30_000_000
BLOCK_FACTOR = 0.75
MIN_DEPTH = 3


def _bounding_box(obstacle: ExceptionSet, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pts = [x, y] + list(obstacle.feature_points())
    arr = np.vstack(pts)
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    extent = hi - lo
    biggest = float(extent.max()) if float(extent.max()) > 0 else 1.0
    extent = np.where(extent > 0, extent, biggest)
    return lo - 0.25 * extent, hi + 0.25 * extent


def _segment_is_free(obstacle: ExceptionSet, a: np.ndarray, b: np.ndarray) -> bool:
    rep = obstacle.segment_crossings((a, b))
    return rep.classification == FINITE and rep.count == 0


def shortcut_smooth(vertices: np.ndarray, obstacle: ExceptionSet,
                    tol: float = TOL_GEOM, passes: int = 8) -> np.ndarray:
    """Replace sub-paths by straight segments wherever the obstacle allows.

    Every jump the output takes between non-adjacent input vertices has been
    checked crossing-free, so admissibility is preserved; only optimality of
    the jumps is heuristic.
    """

    def free(i: int, j: int) -> bool:
        return _segment_is_free(obstacle, vertices[i], vertices[j])

    out: list[int] = [0]

    def pull(i: int, j: int):
        if j - i <= 1 or free(i, j):
            out.append(j)
            return
        m = (i + j) // 2
        pull(i, m)
        pull(m, j)

    pull(0, len(vertices) - 1)
    idx = out
    for _ in range(passes):
        keep: list[int] = [idx[0]]
        pos = 0
        while pos < len(idx) - 1:
            last = len(idx) - 1 - pos
            step = 1
            while step * 2 <= last and free(idx[pos], idx[pos + step * 2]):
                step *= 2
            lo_s, hi_s = step, min(step * 2, last)
            while lo_s < hi_s:
                mid = (lo_s + hi_s + 1) // 2
                if free(idx[pos], idx[pos + mid]):
                    lo_s = mid
                else:
                    hi_s = mid - 1
            keep.append(idx[pos + lo_s])
            pos += lo_s
        if keep == idx:
            break
        idx = keep
    return vertices[np.array(idx)]


def _collapse_collinear(path: np.ndarray) -> np.ndarray:
    if len(path) <= 2:
        return path
    keep = [0]
    for i in range(1, len(path) - 1):
        d1 = path[i] - path[keep[-1]]
        d2 = path[i + 1] - path[i]
        if abs(d1[0] * d2[1] - d1[1] * d2[0]) > 1e-12:
            keep.append(i)
    keep.append(len(path) - 1)
    return path[keep]


class _GridSolve:
    def __init__(self, upper: float, vertices: Optional[np.ndarray], diagnostic: str = ""):
        self.upper = upper
        self.vertices = vertices
        self.diagnostic = diagnostic


def _solve_at_depth(obstacle: ExceptionSet, x: np.ndarray, y: np.ndarray, depth: int,
                    lo: np.ndarray, hi: np.ndarray, four_connected: bool) -> _GridSolve:
    h = 2.0 ** -depth
    counts = np.maximum(np.ceil((hi - lo) / h).astype(int) + 1, 2)
    n_cells = int(counts[0]) * int(counts[1])
    if n_cells > MAX_CELLS:
        raise GridTooLargeError(
            f"grid at depth {depth} needs {n_cells} nodes (cap {MAX_CELLS}); shrink the box or depth"
        )
    gx = lo[0] + h * np.arange(counts[0])
    gy = lo[1] + h * np.arange(counts[1])
    centers = np.stack(np.meshgrid(gx, gy, indexing="ij"), axis=-1).reshape(-1, 2)
    dist = obstacle.distance_field(centers).reshape(counts[0], counts[1])
    blocked = dist <= BLOCK_FACTOR * h
    costs = np.where(blocked, np.inf, 1.0)

    def nearest_free(p: np.ndarray) -> Optional[tuple[int, int]]:
        i0 = int(round((p[0] - lo[0]) / h))
        j0 = int(round((p[1] - lo[1]) / h))
        best, best_d2 = None, math.inf
        for r in range(0, 4):
            for di in range(-r, r + 1):
                for dj in range(-r, r + 1):
                    if max(abs(di), abs(dj)) != r:
                        continue
                    i, j = i0 + di, j0 + dj
                    if 0 <= i < counts[0] and 0 <= j < counts[1] and not blocked[i, j]:
                        d2 = (gx[i] - p[0]) ** 2 + (gy[j] - p[1]) ** 2
                        if d2 < best_d2:
                            best, best_d2 = (i, j), d2
            if best is not None:
                return best
        return None

    start = nearest_free(x)
    end = nearest_free(y)
    if start is None or end is None:
        return _GridSolve(math.inf, None, "no free grid node near an endpoint")
    mcp = MCP_Geometric(costs, fully_connected=not four_connected)
    cum, _ = mcp.find_costs(starts=[start], ends=[end])
    if not np.isfinite(cum[end]):
        return _GridSolve(math.inf, None, f"endpoints disconnected on the depth-{depth} grid")
    trace = mcp.traceback(end)
    path = np.array([(lo[0] + i * h, lo[1] + j * h) for i, j in trace])
    path = _collapse_collinear(path)
    # The snapped endpoints may sit on the wrong side of a thin obstacle when
    # the query point lies inside the blocking radius; refuse rather than
    # return a path that tunnels.  A deeper rung of the ladder resolves it.
    if not _segment_is_free(obstacle, x, path[0]) or not _segment_is_free(obstacle, path[-1], y):
        return _GridSolve(math.inf, None, f"endpoint stub crosses the obstacle at depth {depth}")
    verts = np.vstack([x, path, y])
    length = float(np.linalg.norm(np.diff(verts, axis=0), axis=1).sum())
    return _GridSolve(length, verts)


def grid_distance(obstacle: ExceptionSet, x: np.ndarray, y: np.ndarray, depth: int = 10,
                  four_connected: bool = False, smooth: bool = True,
                  box: Optional[tuple[np.ndarray, np.ndarray]] = None) -> tuple[float, Optional[Polyline], str]:
    """Best upper bound over the depth ladder; (inf, None, why) when cut off.

    The returned length never increases when depth grows: each refinement is
    compared against the best coarser solve and the better witness is kept.
    """
    x, y = as_point(x), as_point(y)
    if x.size != 2 or y.size != 2:
        raise ValueError("grid search is planar (d = 2)")
    # Canonical endpoint order makes the estimate symmetric in (x, y).
    flipped = tuple(y) < tuple(x)
    if flipped:
        x, y = y, x
    lo, hi = box if box is not None else _bounding_box(obstacle, x, y)
    best_len, best_verts = math.inf, None
    diagnostic = "grid search not run"
    for k in range(min(MIN_DEPTH, depth), depth + 1):
        sol = _solve_at_depth(obstacle, x, y, k, lo, hi, four_connected)
        if sol.vertices is None:
            diagnostic = sol.diagnostic or diagnostic
            continue
        verts = sol.vertices
        length = sol.upper
        if smooth:
            cand = _collapse_collinear(shortcut_smooth(verts, obstacle))
            cand_len = float(np.linalg.norm(np.diff(cand, axis=0), axis=1).sum())
            if cand_len <= length + TOL_GEOM:  # smoothing must never lengthen
                verts, length = cand, cand_len
        if length < best_len:
            best_len, best_verts = length, verts
    if best_verts is None:
        return math.inf, None, diagnostic
    if flipped:
        best_verts = best_verts[::-1]
    return best_len, Polyline(best_verts), ""
