"""Distance estimates in the presence of an exception set, with witnesses.

Three metrics are estimated.  The plain intrinsic distance treats the set as
removed from space and searches for short paths in the complement.  The
exception-aware distances keep the ambient space but restrict how often an
admissible path may meet the set: crossing sets with countable closure, or
finite crossing sets in the strict variant.  Every finite estimate carries a
witness polyline together with the crossing report that justifies it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BudgetExhaustedError,
    ChartDetourLeavesChartError,
    DimensionMismatchError,
    NoConstructionError,
    NotPermeableFamilyError,
    OutOfDomainError,
    UnsupportedFamilyError,
)
from .exception_sets import (
    COUNTABLE_CLOSURE,
    FINITE,
    UNCOUNTABLE_CLOSURE,
    CantorSet,
    Chart,
    ChartManifold,
    CircleSphere,
    CrossingReport,
    ExceptionSet,
    FinitePoints,
    Hyperplane,
    IrrationalSquare,
    IsolatedCantorD0,
    RationalGrid,
    Slit,
    TopologistSine,
    cantor_distance,
    contains,
    is_rational,
    nearest_rational,
    path_crossings,
    segment_crossings,
)
from .geometry import TOL_GEOM, Polyline, as_point, point_segment_distance
from .grid import grid_distance

DEFAULT_EPS = 1e-6
DEFAULT_DEPTH = 10
CONE_SAMPLES = 10_000
CONE_RETRIES = 64
# Membership tolerance for Monte-Carlo measure checks.  The default rational
# tolerance marks a few percent of random reals as rational (denominators up
# to 10^6 cover a 2e-13 neighbourhood each); at 1e-15 the false-positive mass
# is negligible while genuine positive-measure families still light up.
MEASURE_TOL = 1e-15


@dataclass(frozen=True)
class MetricEstimate:
    """Certified bracket [lower, upper] for one distance query.

    A finite estimate always carries the witness path realising the upper
    bound and the crossing report that makes the path admissible.  An
    infinite verdict carries neither, only a diagnostic explaining it.
    """

    lower: float
    upper: float
    witness: Optional[Polyline]
    crossing_report: Optional[CrossingReport]
    infinite: bool = False
    diagnostic: str = ""

    def __post_init__(self):
        if self.infinite:
            if self.witness is not None or math.isfinite(self.upper):
                raise ValueError("an infinite estimate has no witness and an infinite upper bound")
        else:
            if not math.isfinite(self.upper):
                raise ValueError("finite estimates need a finite upper bound")
            if self.lower > self.upper + 1e-9 + 1e-12 * abs(self.upper):
                raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def to_json_obj(self) -> dict:
        return {
            "lower": None if math.isinf(self.lower) else self.lower,
            "upper": None if self.infinite else self.upper,
            "infinite": self.infinite,
            "witness": None if self.witness is None else self.witness.to_json_obj(),
            "crossings": None if self.crossing_report is None else self.crossing_report.to_json_obj(),
            "diagnostic": self.diagnostic,
        }


def _infinite(lower: float, diagnostic: str) -> MetricEstimate:
    return MetricEstimate(lower, math.inf, None, None, infinite=True, diagnostic=diagnostic)


def _no_set_report(note: str = "no exception set") -> CrossingReport:
    return CrossingReport(FINITE, (), note)


def _straight(theta: Optional[ExceptionSet], x: np.ndarray, y: np.ndarray) -> tuple[Polyline, CrossingReport]:
    pl = Polyline([x, y])
    rep = path_crossings(theta, pl) if theta is not None else _no_set_report()
    return pl, rep


def _estimate_from_witness(lower: float, witness: Polyline, rep: CrossingReport,
                           diagnostic: str = "") -> MetricEstimate:
    return MetricEstimate(lower, witness.length(), witness, rep, diagnostic=diagnostic)


def _check_pair(theta: Optional[ExceptionSet], x, y) -> tuple[np.ndarray, np.ndarray]:
    x, y = as_point(x), as_point(y)
    if x.size != y.size:
        raise DimensionMismatchError(f"point dimensions differ: {x.size} vs {y.size}")
    if theta is not None and theta.dimension != x.size:
        raise DimensionMismatchError(
            f"points live in d={x.size} but the exception set in d={theta.dimension}")
    return x, y


# ---------------------------------------------------------------------------
# Intrinsic distance in the complement of the set


def _is_free(rep: CrossingReport) -> bool:
    return rep.classification == FINITE and rep.count == 0


def _intrinsic_finite_points(theta: FinitePoints, x: np.ndarray, y: np.ndarray,
                             L: float) -> MetricEstimate:
    pl, rep = _straight(theta, x, y)
    if x.size == 1:
        if _is_free(rep):
            return _estimate_from_witness(L, pl, rep)
        return _infinite(math.inf, "a removed point separates x and y on the line")
    if _is_free(rep):
        return _estimate_from_witness(L, pl, rep)
    # Finitely many removed points never change the infimum in d >= 2; bend
    # the chain slightly around each hit.
    u = (y - x) / L
    n = np.zeros_like(u)
    n[0], n[1] = -u[1], u[0]
    if x.size > 2:
        n = np.zeros_like(u)
        n[np.argmin(np.abs(u))] = 1.0
        n = n - (n @ u) * u
        n = n / np.linalg.norm(n)
    delta = 1e-8 * max(L, 1.0)
    for _ in range(40):
        verts = [x] + [p + delta * n for _, p in rep.crossings] + [y]
        cand = Polyline(verts)
        cand_rep = path_crossings(theta, cand)
        if _is_free(cand_rep):
            return _estimate_from_witness(L, cand, cand_rep)
        delta *= 0.5
    raise BudgetExhaustedError("could not bend around the removed points")


def _intrinsic_hyperplane(theta: Hyperplane, x: np.ndarray, y: np.ndarray, L: float) -> MetricEstimate:
    if theta.signed_distance(x) * theta.signed_distance(y) > 0:
        pl, rep = _straight(theta, x, y)
        return _estimate_from_witness(L, pl, rep)
    return _infinite(math.inf, "the removed hyperplane separates x and y")


def _intrinsic_slit(theta: Slit, x: np.ndarray, y: np.ndarray, L: float) -> MetricEstimate:
    pl, rep = _straight(theta, x, y)
    if _is_free(rep):
        return _estimate_from_witness(L, pl, rep)
    # Every path between points separated by the ray has to round the tip.
    # For the closed variant the corner is pulled off the tip by more than
    # the membership tolerance, else the detour itself reads as a crossing.
    exact = float(np.linalg.norm(x - theta.tip) + np.linalg.norm(theta.tip - y))
    corner = theta.tip if not theta.closed else theta.tip - 1e-7 * theta.direction
    witness = Polyline([x, corner, y])
    wit_rep = path_crossings(theta, witness)
    if not _is_free(wit_rep):
        raise BudgetExhaustedError("tip detour unexpectedly blocked")
    return MetricEstimate(exact, witness.length(), witness, wit_rep)


def _perp_in_plane(u: np.ndarray) -> np.ndarray:
    n = np.zeros_like(u)
    n[np.argmin(np.abs(u))] = 1.0
    n = n - (n @ u) * u
    return n / np.linalg.norm(n)


def _intrinsic_sphere(theta: CircleSphere, x: np.ndarray, y: np.ndarray,
                      L: float) -> Optional[MetricEstimate]:
    c, r = theta.center, theta.radius
    if x.size == 1:
        cuts = [c[0] - r, c[0] + r]
        lo, hi = min(x[0], y[0]), max(x[0], y[0])
        if any(lo < p < hi for p in cuts):
            return _infinite(math.inf, "a removed sphere point separates x and y on the line")
        pl, rep = _straight(theta, x, y)
        return _estimate_from_witness(L, pl, rep)
    dx = float(np.linalg.norm(x - c))
    dy = float(np.linalg.norm(y - c))
    if (dx < r) != (dy < r):
        return _infinite(math.inf, "the removed sphere separates x and y")
    if dx < r and dy < r:
        pl, rep = _straight(theta, x, y)
        return _estimate_from_witness(L, pl, rep)
    if point_segment_distance(c, (x, y)) > r:
        pl, rep = _straight(theta, x, y)
        return _estimate_from_witness(L, pl, rep)
    # Wrap around the sphere inside the plane spanned by x, y and the centre.
    ux = (x - c) / dx
    uy = (y - c) / dy
    cos_a = float(np.clip(ux @ uy, -1.0, 1.0))
    alpha = math.acos(cos_a)
    beta_x = math.acos(min(1.0, r / dx))
    beta_y = math.acos(min(1.0, r / dy))
    phi = max(alpha - beta_x - beta_y, 0.0)
    exact = math.sqrt(max(dx * dx - r * r, 0.0)) + math.sqrt(max(dy * dy - r * r, 0.0)) + r * phi
    w = uy - cos_a * ux
    wn = float(np.linalg.norm(w))
    e2 = w / wn if wn > 1e-12 else _perp_in_plane(ux)
    # Run the witness on a slightly inflated sphere so its chords clear the
    # real one; the inflation must dominate the chord sagitta.
    slack = min((dx - r) / (2 * r), (dy - r) / (2 * r), 2.5e-5)
    if slack < 1e-9:
        return None  # endpoint hugs the sphere; leave it to the grid
    n_seg = max(256, int(math.ceil(phi / math.sqrt(4 * slack))) + 1)
    if n_seg > 200_000:
        return None
    rho = r * (1.0 + slack)
    bx = math.acos(min(1.0, rho / dx))
    by = math.acos(min(1.0, rho / dy))
    if bx <= alpha - by:
        angles = np.linspace(bx, alpha - by, n_seg + 1)
    else:  # near-grazing: the inflated tangents already overlap
        angles = np.array([0.5 * (bx + alpha - by)])
    arc = [c + rho * (math.cos(t) * ux + math.sin(t) * e2) for t in angles]
    witness = Polyline([x] + arc + [y])
    wit_rep = path_crossings(theta, witness)
    if not _is_free(wit_rep):
        return None
    return MetricEstimate(exact, witness.length(), witness, wit_rep)


def _intrinsic_rational_grid(theta: RationalGrid, x: np.ndarray, y: np.ndarray,
                             L: float) -> MetricEstimate:
    pl, rep = _straight(theta, x, y)
    if _is_free(rep):
        return _estimate_from_witness(L, pl, rep)
    # A countable set never disconnects the plane; bend past the hits.
    u = (y - x) / L
    n = np.array([-u[1], u[0]])
    delta = 1e-7 * max(L, 1.0)
    for _ in range(40):
        cand = Polyline([x, 0.5 * (x + y) + delta * n, y])
        cand_rep = path_crossings(theta, cand)
        if _is_free(cand_rep):
            return MetricEstimate(L, cand.length(), cand, cand_rep)
        delta *= 0.618
    raise BudgetExhaustedError("could not bend around the rational points")


def _intrinsic_irrational_square(theta: IrrationalSquare, x: np.ndarray,
                                 y: np.ndarray) -> MetricEstimate:
    inside = lambda p: bool(np.all(p >= -1e-12) and np.all(p <= 1 + 1e-12))
    if not (inside(x) and inside(y)):
        raise UnsupportedFamilyError(
            "intrinsic queries for this family are supported inside the unit square only")
    est = _rational_line_route(theta, x, y)
    return est


def _rational_line_route(theta: IrrationalSquare, x: np.ndarray, y: np.ndarray) -> MetricEstimate:
    """Route along rational grid lines; the length is the l1 distance.

    Lower bound: the complement of the set is a union of axis-parallel
    segments, so almost everywhere a rectifiable path moves along a single
    axis and its length is the sum of both coordinates' total variations,
    at least |dx1| + |dx2|.
    """
    l1 = float(np.abs(x - y).sum())
    vx, hx = is_rational(float(x[0])), is_rational(float(x[1]))
    vy, hy = is_rational(float(y[0])), is_rational(float(y[1]))
    if not (vx or hx) or not (vy or hy):
        raise OutOfDomainError("endpoint lies in the exception set (both coordinates irrational)")
    routes: list[list[np.ndarray]] = []
    if vx and hy:
        routes.append([x, np.array([x[0], y[1]]), y])
    if hx and vy:
        routes.append([x, np.array([y[0], x[1]]), y])
    if vx and vy:
        lo, hi = sorted((float(x[1]), float(y[1])))
        c = float(nearest_rational(min(max(0.5 * (lo + hi), 0.0), 1.0)))
        routes.append([x, np.array([x[0], c]), np.array([y[0], c]), y])
    if hx and hy:
        lo, hi = sorted((float(x[0]), float(y[0])))
        c = float(nearest_rational(min(max(0.5 * (lo + hi), 0.0), 1.0)))
        routes.append([x, np.array([c, x[1]]), np.array([c, y[1]]), y])
    best: Optional[MetricEstimate] = None
    for verts in routes:
        pl = Polyline(verts)
        rep = path_crossings(theta, pl)
        if rep.classification != FINITE:
            continue
        if best is None or pl.length() < best.upper:
            best = MetricEstimate(l1, pl.length(), pl, rep)
    if best is None:
        raise BudgetExhaustedError("no admissible grid-line route found")
    return best


def _cantor_gap_param(s: float) -> Optional[float]:
    for k in range(6, 31):
        step = 0.5 * 3.0 ** -k
        for cand in (s + step, s - step):
            if 0.0 < cand < 1.0 and cantor_distance(cand) > 3.0 ** -(k + 4):
                return cand
    return None


def _intrinsic_cantor(theta: CantorSet, x: np.ndarray, y: np.ndarray, L: float) -> Optional[MetricEstimate]:
    pl, rep = _straight(theta, x, y)
    if _is_free(rep):
        return _estimate_from_witness(L, pl, rep)
    span = theta.end - theta.start
    if rep.classification == FINITE:
        # Transversal hit: slide the crossing along the carrier into a gap.
        verts = [x]
        for _, p in rep.crossings:
            s = float((p - theta.start) @ span) / float(span @ span)
            g = _cantor_gap_param(s)
            if g is None:
                return None
            verts.append(theta.start + g * span)
        verts.append(y)
        cand = Polyline(verts)
        cand_rep = path_crossings(theta, cand)
        if _is_free(cand_rep):
            return MetricEstimate(L, cand.length(), cand, cand_rep)
        return None
    if rep.classification == UNCOUNTABLE_CLOSURE:
        # Collinear span: hop off the carrier, run parallel past the dust,
        # and drop back.  Any positive clearance works, so the infimum is L.
        u = span / np.linalg.norm(span)
        n = np.array([-u[1], u[0]])
        proj = lambda p: float((p - theta.start) @ span) / float(span @ span)
        sx, sy = proj(x), proj(y)
        lo, hi = sorted((sx, sy))
        a = max(lo, 0.0) - 1e-6
        b = min(hi, 1.0) + 1e-6
        h = 1e-7 * max(float(np.linalg.norm(span)), 1.0)
        pa = theta.start + a * span
        pb = theta.start + b * span
        first, last = (pa, pb) if sx <= sy else (pb, pa)
        cand = Polyline([x, first, first + h * n, last + h * n, last, y])
        cand_rep = path_crossings(theta, cand)
        if _is_free(cand_rep):
            return MetricEstimate(L, cand.length(), cand, cand_rep)
        return None
    return None


def _intrinsic_isolated_d0(theta: IsolatedCantorD0, x: np.ndarray, y: np.ndarray,
                           L: float) -> MetricEstimate:
    pl, rep = _straight(theta, x, y)
    if _is_free(rep):
        return _estimate_from_witness(L, pl, rep)
    # Each member extrudes to a separating hyperplane (a point when d = 1),
    # and the first coordinate of any path sweeps the whole interval.
    return _infinite(math.inf, "removed set members separate x and y in the first coordinate")


def _analytic_intrinsic(theta: Optional[ExceptionSet], x: np.ndarray, y: np.ndarray,
                        L: float) -> Optional[MetricEstimate]:
    if theta is None:
        pl, rep = _straight(None, x, y)
        return _estimate_from_witness(L, pl, rep)
    if isinstance(theta, FinitePoints):
        return _intrinsic_finite_points(theta, x, y, L)
    if isinstance(theta, Hyperplane):
        return _intrinsic_hyperplane(theta, x, y, L)
    if isinstance(theta, Slit):
        return _intrinsic_slit(theta, x, y, L)
    if isinstance(theta, CircleSphere):
        return _intrinsic_sphere(theta, x, y, L)
    if isinstance(theta, RationalGrid):
        return _intrinsic_rational_grid(theta, x, y, L)
    if isinstance(theta, IrrationalSquare):
        return _intrinsic_irrational_square(theta, x, y)
    if isinstance(theta, CantorSet):
        return _intrinsic_cantor(theta, x, y, L)
    if isinstance(theta, IsolatedCantorD0):
        return _intrinsic_isolated_d0(theta, x, y, L)
    return None


def intrinsic_distance(obstacle: Optional[ExceptionSet], x, y, depth: int = DEFAULT_DEPTH,
                       method: str = "auto") -> MetricEstimate:
    """Shortest-path estimate in the space with the obstacle removed.

    method: "auto" prefers the analytic rules and falls back to the planar
    grid search; "analytic" and "grid" force one strategy.  The grid upper
    bound is nonincreasing in depth.
    """
    if method not in ("auto", "analytic", "grid"):
        raise ValueError(f"unknown method {method!r}")
    x, y = _check_pair(obstacle, x, y)
    if obstacle is not None:
        if contains(obstacle, x):
            raise OutOfDomainError("x lies in the removed set")
        if contains(obstacle, y):
            raise OutOfDomainError("y lies in the removed set")
    L = float(np.linalg.norm(y - x))
    if L == 0.0:
        pl = Polyline([x, y])
        rep = path_crossings(obstacle, pl) if obstacle is not None else _no_set_report()
        return MetricEstimate(0.0, 0.0, pl, rep)
    if method in ("auto", "analytic"):
        est = _analytic_intrinsic(obstacle, x, y, L)
        if est is not None:
            return est
        if method == "analytic":
            raise UnsupportedFamilyError(f"no analytic shortest-path rule for kind {obstacle.kind!r}")
    if obstacle is None:
        pl, rep = _straight(None, x, y)
        return _estimate_from_witness(L, pl, rep)
    if obstacle.dimension != 2:
        raise UnsupportedFamilyError(
            f"grid search is planar and no analytic rule covers kind {obstacle.kind!r} in d={obstacle.dimension}")
    upper, witness, diag = grid_distance(obstacle, x, y, depth=depth)
    if witness is None:
        return MetricEstimate(L, math.inf, None, None, infinite=True, diagnostic=diag)
    rep = path_crossings(obstacle, witness)
    if not _is_free(rep):
        return MetricEstimate(L, math.inf, None, None, infinite=True,
                              diagnostic="grid witness failed admissibility re-check")
    return MetricEstimate(L, upper, witness, rep)


# ---------------------------------------------------------------------------
# Exception-aware distances


def theta_intrinsic_distance(theta: ExceptionSet, x, y, eps: float = DEFAULT_EPS,
                             finite_only: bool = False, seed: int = 0) -> MetricEstimate:
    """Distance through paths whose crossing set stays small.

    Admissible paths meet the set in a set with countable closure; with
    finite_only the crossing set must be finite.  Endpoints may lie in the
    set.  Upper bounds never exceed ||x - y|| + eps when a construction
    exists; families that forbid admissible paths yield an infinite verdict.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    x, y = _check_pair(theta, x, y)
    L = float(np.linalg.norm(y - x))
    admissible = (FINITE,) if finite_only else (FINITE, COUNTABLE_CLOSURE)
    straight, rep = _straight(theta, x, y)
    if L == 0.0:
        return MetricEstimate(0.0, 0.0, straight, rep)
    if rep.classification in admissible:
        return MetricEstimate(L, L, straight, rep)
    if isinstance(theta, IrrationalSquare):
        return _infinite(math.inf, "every positive-length path meets the set in a set with uncountable closure")
    if isinstance(theta, IsolatedCantorD0):
        # The first coordinate of any path sweeps the interval, so no path
        # has fewer crossings than the straight segment.
        why = ("the crossing set's closure is uncountable for every path"
               if rep.classification == UNCOUNTABLE_CLOSURE
               else "every path crosses infinitely many members")
        return _infinite(math.inf, why)
    if isinstance(theta, TopologistSine) and finite_only:
        raise NoConstructionError(
            "finite-crossing paths for this pair need long detours; no construction within eps")
    try:
        chain = cone_chain(theta, x, y, eps, seed=seed,
                           allow_countable_closure=not finite_only)
    except BudgetExhaustedError as exc:
        raise NoConstructionError(f"no admissible construction found: {exc}") from exc
    chain_rep = path_crossings(theta, chain)
    if chain_rep.classification not in admissible:
        raise NoConstructionError(
            f"constructed chain classified {chain_rep.classification!r}, needed one of {admissible}")
    return MetricEstimate(L, chain.length(), chain, chain_rep)


def permeability_certificate(theta: ExceptionSet, x, y, eps: float = DEFAULT_EPS,
                             seed: int = 0) -> tuple[Polyline, CrossingReport]:
    """Short path witnessing finite permeability for one pair.

    The result crosses the set finitely often and is shorter than
    ||x - y|| + eps.  Families that cannot admit such certificates raise
    NotPermeableFamilyError; search failures raise BudgetExhaustedError.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    x, y = _check_pair(theta, x, y)
    if isinstance(theta, IrrationalSquare):
        raise NotPermeableFamilyError(
            theta.kind, "the set has full measure in the unit square; every positive-length "
                        "path inside meets it in a set with uncountable closure")
    L = float(np.linalg.norm(y - x))
    straight, rep = _straight(theta, x, y)
    if rep.classification == FINITE:
        return straight, rep
    if isinstance(theta, IsolatedCantorD0):
        raise NotPermeableFamilyError(
            theta.kind, "every path between these points crosses infinitely many members; "
                        "the family is not finitely permeable")
    try:
        chain = cone_chain(theta, x, y, eps, seed=seed)
        chain_rep = path_crossings(theta, chain)
        if chain_rep.classification == FINITE and chain.length() < L + eps:
            return chain, chain_rep
    except BudgetExhaustedError:
        pass
    if isinstance(theta, ChartManifold):
        detour = _manifold_run_detour(theta, x, y, eps)
        if detour is not None:
            det_rep = path_crossings(theta, detour)
            if det_rep.classification == FINITE and detour.length() < L + eps:
                return detour, det_rep
    raise BudgetExhaustedError(
        f"certificate search budget exhausted for kind {theta.kind!r}")


def _manifold_run_detour(theta: ChartManifold, x: np.ndarray, y: np.ndarray,
                         eps: float) -> Optional[Polyline]:
    """Lift the path off the manifold wherever the segment runs inside it."""
    n = 1024
    ts = np.linspace(0.0, 1.0, n + 1)
    pts = x[None, :] + ts[:, None] * (y - x)[None, :]
    hits = [theta._tail_defect(p) for p in pts]
    defects = np.array([math.inf if h is None else h[2] for h in hits])
    near = defects <= 10 * TOL_GEOM
    runs: list[tuple[int, int]] = []
    i = 0
    while i <= n:
        if near[i]:
            j = i
            while j + 1 <= n and near[j + 1]:
                j += 1
            if j > i:
                runs.append((i, j))
            i = j + 1
        else:
            i += 1
    if not runs:
        return None
    budget = eps / (2 * len(runs))
    verts: list[np.ndarray] = [x]
    for i, j in runs:
        entry = pts[max(i - 1, 0)]
        exit_ = pts[min(j + 1, n)]
        mid = pts[(i + j) // 2]
        chart = None
        for ch in theta.charts:
            yc = np.asarray(ch.inverse(mid), dtype=float)
            if ch.in_box(yc, TOL_GEOM):
                chart = ch
                break
        if chart is None:
            return None
        a = 0.5
        piece = None
        for _ in range(40):
            try:
                cand = chart_detour(chart, entry, exit_, a)
            except ChartDetourLeavesChartError:
                a *= 0.5
                continue
            if cand.length() <= float(np.linalg.norm(exit_ - entry)) + budget:
                piece = cand
                break
            a *= 0.5
        if piece is None:
            return None
        verts.extend(piece.vertices)
    verts.append(y)
    return Polyline(np.vstack(verts))


def cone_chain(theta: Optional[ExceptionSet], x, y, eps: float = DEFAULT_EPS, seed: int = 0,
               samples: int = CONE_SAMPLES, retries: int = CONE_RETRIES,
               allow_countable_closure: bool = False) -> Polyline:
    """Two-segment chain through a random midpoint with controlled crossings.

    The midpoint is drawn from the disc orthogonal to y - x whose radius
    keeps the chain length at most ||y - x|| + eps/2.  A draw is accepted
    when both segments classify admissibly and a Monte-Carlo scan finds no
    sampled chain point inside the set (crossing parameters of measure zero).
    """
    x, y = _check_pair(theta, x, y)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if x.size < 2:
        raise DimensionMismatchError("the cone construction needs d >= 2")
    L = float(np.linalg.norm(y - x))
    if L == 0.0:
        raise ValueError("the cone construction needs distinct endpoints")
    if theta is not None and not theta.lebesgue_null:
        raise NotPermeableFamilyError(
            theta.kind, "the cone construction requires a Lebesgue-null set")
    admissible = (FINITE, COUNTABLE_CLOSURE) if allow_countable_closure else (FINITE,)
    u = (y - x) / L
    radius = 0.5 * math.sqrt((L + eps / 2) ** 2 - L * L)
    mid = 0.5 * (x + y)
    basis = np.linalg.svd(u[None, :])[2][1:]
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        g = rng.normal(size=x.size - 1)
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            continue
        rad = radius * rng.uniform() ** (1.0 / (x.size - 1))
        z = mid + (rad / gn) * (g @ basis)
        chain = Polyline([x, z, y])
        if theta is not None:
            if any(segment_crossings(theta, s).classification not in admissible
                   for s in chain.segments()):
                continue
            ts = rng.uniform(size=samples)
            half = samples // 2
            probes = np.vstack([
                x[None, :] + ts[:half, None] * (z - x)[None, :],
                z[None, :] + ts[half:, None] * (y - z)[None, :],
            ])
            if any(contains(theta, p, tol=MEASURE_TOL) for p in probes):
                continue
        return chain
    raise BudgetExhaustedError(
        f"all_samples_rejected: {retries} midpoint draws failed the crossing checks")


def chart_detour(chart: Chart, entry, exit_point, a: float, tol: float = TOL_GEOM) -> Polyline:
    """Three-piece lift between two manifold points of one chart.

    In chart coordinates the path rises along the last axis to offset
    (l_k/2) * a, traverses, and descends, so its chart length is
    l_k * (1 + a) <= 2 l_k.  Its image meets the manifold only at the
    endpoints.  Raises ChartDetourLeavesChartError when the lifted vertices
    leave the chart box; callers should retry with a halved.
    """
    if not 0 < a <= 1:
        raise ValueError("the lift fraction a must lie in (0, 1]")
    entry = as_point(entry)
    exit_point = as_point(exit_point)
    y_in = np.asarray(chart.inverse(entry), dtype=float)
    y_out = np.asarray(chart.inverse(exit_point), dtype=float)
    if not chart.in_box(y_in, tol) or not chart.in_box(y_out, tol):
        raise ChartDetourLeavesChartError("entry or exit lies outside the chart box")
    l_k = float(np.linalg.norm(y_out - y_in))
    if l_k <= tol:
        return Polyline([entry, entry])
    off = np.zeros_like(y_in)
    off[-1] = 0.5 * l_k * a
    lifted = [y_in + off, y_out + off]
    for v in lifted:
        if not chart.in_box(v):
            raise ChartDetourLeavesChartError(
                f"lift offset {off[-1]:.3g} leaves the chart box; halve a")
    verts = [entry, chart.forward(lifted[0]), chart.forward(lifted[1]), exit_point]
    return Polyline(np.vstack([as_point(v) for v in verts]))


# ---------------------------------------------------------------------------
# Small closed forms and the quasi-convexity probe


def l1_distance_irrational_square(x, y) -> float:
    """Taxicab distance, the exact restricted-geometry value in the square."""
    x, y = as_point(x), as_point(y)
    if x.size != 2 or y.size != 2:
        raise DimensionMismatchError("the unit-square metric is planar")
    for p in (x, y):
        if not (np.all(p >= -1e-12) and np.all(p <= 1 + 1e-12)):
            raise OutOfDomainError("out_of_domain: points must lie in the closed unit square")
    return float(np.abs(x - y).sum())


def bounded_metric_transform(value: float) -> float:
    """Map [0, inf] onto [0, 1] by v / (1 + v); infinity maps to exactly 1."""
    v = float(value)
    if math.isnan(v) or v < 0:
        raise ValueError("the transform is defined for nonnegative values only")
    if math.isinf(v):
        return 1.0
    return v / (1.0 + v)


@dataclass(frozen=True)
class Domain:
    """Search region: an ambient dimension, an optional removed set, and
    optional half-space constraints (normal . x >= offset keeps x)."""

    dimension: int
    obstacle: Optional[ExceptionSet] = None
    halfspaces: tuple[tuple[tuple[float, ...], float], ...] = ()
    box_lo: Optional[tuple[float, ...]] = None
    box_hi: Optional[tuple[float, ...]] = None

    def sample_box(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.full(self.dimension, -1.5) if self.box_lo is None else np.asarray(self.box_lo, float)
        hi = np.full(self.dimension, 1.5) if self.box_hi is None else np.asarray(self.box_hi, float)
        return lo, hi

    def admits(self, p: np.ndarray) -> bool:
        for normal, offset in self.halfspaces:
            if float(np.asarray(normal) @ p) < offset:
                return False
        if self.obstacle is not None and contains(self.obstacle, p):
            return False
        return True

    def distance(self, x, y, depth: int = DEFAULT_DEPTH) -> MetricEstimate:
        x, y = as_point(x), as_point(y)
        if not self.admits(x) or not self.admits(y):
            raise OutOfDomainError("query point outside the domain")
        if self.obstacle is None:
            # Half-space intersections are convex, so the segment stays inside.
            pl, rep = _straight(None, x, y)
            return _estimate_from_witness(float(np.linalg.norm(y - x)), pl, rep)
        if self.halfspaces:
            raise UnsupportedFamilyError("mixing half-space constraints with a removed set is unsupported")
        return intrinsic_distance(self.obstacle, x, y, depth=depth)


def quasi_convexity_ratio(domain: Domain, pairs: int = 100, seed: int = 0,
                          depth: int = DEFAULT_DEPTH,
                          explicit_pairs: Optional[Sequence[tuple]] = None
                          ) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Largest observed ratio of intrinsic to Euclidean distance.

    Samples point pairs from the domain box (plus any explicit pairs) and
    returns the worst ratio together with the pair realising it.  An
    infinite estimate short-circuits with an infinite ratio.
    """
    rng = np.random.default_rng(seed)
    lo, hi = domain.sample_box()
    candidates: list[tuple[np.ndarray, np.ndarray]] = []
    if explicit_pairs:
        candidates.extend((as_point(a), as_point(b)) for a, b in explicit_pairs)
    tries = 0
    while len(candidates) < pairs + (len(explicit_pairs) if explicit_pairs else 0):
        if tries > 200 * max(pairs, 1):
            raise BudgetExhaustedError("could not sample enough admissible pairs from the domain")
        tries += 1
        a = lo + (hi - lo) * rng.uniform(size=domain.dimension)
        b = lo + (hi - lo) * rng.uniform(size=domain.dimension)
        if np.linalg.norm(a - b) < 1e-6:
            continue
        if domain.admits(a) and domain.admits(b):
            candidates.append((a, b))
    best_ratio = 0.0
    best_pair = candidates[0]
    for a, b in candidates:
        est = domain.distance(a, b, depth=depth)
        if est.infinite:
            return math.inf, (a, b)
        ratio = est.upper / float(np.linalg.norm(a - b))
        if ratio > best_ratio:
            best_ratio, best_pair = ratio, (a, b)
    return best_ratio, best_pair
