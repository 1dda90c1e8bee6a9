"""End-to-end acceptance checks.

Each test covers one numbered criterion and prints a single
"criterion N: PASS/FAIL - description" line (run pytest with -s to see
the lines for passing tests).  Targets are analytic: the slit geodesic
is 2*sqrt(2) by reflection through the tip, removing the rational grid
leaves straight paths, the staircase difference quotient at 3**-n is
(3/2)**n, and the rational-line metric on the unit square is the
l1 distance.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from intrametric.cbrank import (
    PERFECT_CORE,
    PerfectCore,
    cantor_staircase,
    cb_rank,
    harmonic_limit,
    sk_family,
)
from intrametric.cli import main as cli_main
from intrametric.errors import NotPermeableFamilyError
from intrametric.exception_sets import (
    Arrangement,
    CircleSphere,
    HalfFlat,
    Hyperplane,
    IrrationalSquare,
    RationalGrid,
    Slit,
    contains,
)
from intrametric.geometry import (
    Polyline,
    is_simple,
    loop_erase,
    point_polyline_distance,
)
from intrametric.metrics import (
    intrinsic_distance,
    l1_distance_irrational_square,
    permeability_certificate,
    theta_intrinsic_distance,
)
from intrametric.verification import (
    fixture,
    lipschitz_constant_estimate,
    verify_equal_constants,
    verify_main_theorem,
)


def _verdict(num: int, description: str, body) -> None:
    try:
        body()
    except BaseException:
        print(f"criterion {num}: FAIL - {description}")
        raise
    print(f"criterion {num}: PASS - {description}")


def _screened_pairs(theta, count, seed, lo=-1.5, hi=1.5):
    """Seeded pairs with endpoints off the removed set and a real gap."""
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < count:
        a = rng.uniform(lo, hi, size=2)
        b = rng.uniform(lo, hi, size=2)
        if np.linalg.norm(a - b) < 1e-3 or contains(theta, a) or contains(theta, b):
            continue
        pairs.append((a, b))
    return pairs


def test_criterion_01_slit_geodesic():
    def body():
        slit = Slit((0.0, 0.0), (-1.0, 0.0))
        start = time.perf_counter()
        est = intrinsic_distance(slit, (-1.0, 1.0), (-1.0, -1.0), depth=10, method="grid")
        elapsed = time.perf_counter() - start
        exact = 2.0 * math.sqrt(2.0)
        assert not est.infinite
        assert abs(est.upper - exact) / exact <= 0.01
        assert elapsed < 5.0

    _verdict(1, "slit geodesic at grid depth 10 within 1% of 2*sqrt(2) in under 5 s", body)


def test_criterion_02_rational_grid_short_witnesses():
    def body():
        theta = RationalGrid()
        pairs = _screened_pairs(theta, 100, seed=11)
        start = time.perf_counter()
        for a, b in pairs:
            est = theta_intrinsic_distance(theta, a, b, eps=1e-6)
            gap = float(np.linalg.norm(a - b))
            assert not est.infinite
            assert est.upper <= gap + 1e-6
            for seg in est.witness.segments():
                assert theta.segment_crossings(seg).count <= 1
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0

    _verdict(2, "100 pairs off the rational grid: near-straight witnesses, "
                "at most one removed point per segment, under 1 s", body)


def test_criterion_03_closed_submanifold_certificates():
    def body():
        circle = CircleSphere((0.0, 0.0), 1.0)
        lines = Arrangement([HalfFlat((1.0, 0.0), 0.0),
                             HalfFlat((0.0, 1.0), 0.0),
                             HalfFlat((1.0, 1.0), 1.0)])
        for theta, seed in ((circle, 21), (lines, 22)):
            for k, (a, b) in enumerate(_screened_pairs(theta, 100, seed=seed)):
                witness, report = permeability_certificate(theta, a, b, eps=1e-6, seed=k)
                gap = float(np.linalg.norm(a - b))
                assert report.classification == "finite"
                assert witness.length() <= gap + 1e-6

    _verdict(3, "100 certificates each against the unit circle and a 3-line "
                "arrangement: finite crossings, no length excess", body)


def test_criterion_04_derived_set_ranks():
    def body():
        for k in range(7):
            assert cb_rank(sk_family(k)) == k + 1
        assert cb_rank(PerfectCore()) == PERFECT_CORE
        assert cb_rank(harmonic_limit()) == 2

    _verdict(4, "derived-set ranks: S_k gives k+1 for k <= 6, Cantor core is "
                "perfect, {0} u {1/n} gives 2", body)


def test_criterion_05_staircase_ratio_and_violation():
    def body():
        for n in range(1, 21):
            x = Fraction(1, 3) ** n
            ratio = abs(cantor_staircase(Fraction(0)) - cantor_staircase(x)) / x
            assert ratio == Fraction(3, 2) ** n
        rep = verify_main_theorem(fixture("cantor_staircase_1d"), pairs=2000, seed=0)
        assert rep.verdict == "violated"
        assert rep.witness is not None

    _verdict(5, "staircase quotient equals (3/2)^n exactly for n <= 20 and the "
                "flat-bound check reports violated with a witness", body)


def test_criterion_06_main_theorem_harness():
    def body():
        confirmed = verify_main_theorem(fixture("radial_piecewise"),
                                        pairs=10_000, tol=1e-3, seed=0)
        assert confirmed.verdict == "confirmed"
        rejected = verify_main_theorem(fixture("slit_arg"), pairs=10_000, seed=0)
        assert rejected.verdict == "precondition_rejected"

    _verdict(6, "radial fixture confirmed 1-Lipschitz on 10^4 stratified pairs; "
                "discontinuous angular fixture rejected on the precondition", body)


def test_criterion_07_irrational_square():
    def body():
        theta = IrrationalSquare()
        rng = np.random.default_rng(31)
        done = 0
        while done < 100:
            a = rng.integers(0, 129, size=2) / 128.0
            b = rng.integers(0, 129, size=2) / 128.0
            l1 = l1_distance_irrational_square(a, b)
            if l1 < 1e-6:
                continue
            est = intrinsic_distance(theta, a, b)
            assert abs(est.upper - l1) / l1 <= 0.02
            done += 1
        with pytest.raises(NotPermeableFamilyError):
            permeability_certificate(theta, (0.0, 0.0), (1.0, 0.5))
        est = lipschitz_constant_estimate(fixture("linear", v=(1.0, 1.0)),
                                          pairs=10_000, seed=0)
        assert est.value <= math.sqrt(2.0) * 1.0 * (1.0 + 1e-3)

    _verdict(7, "rational-line distance on the square matches the l1 oracle "
                "within 2% on 100 pairs, certification refuses the family, and "
                "the sqrt(2)-scaled bound holds for an l1-Lipschitz fixture", body)


def test_criterion_08_loop_erasure():
    def body():
        rng = np.random.default_rng(41)
        for _ in range(1000):
            n = int(rng.integers(3, 10))
            poly = Polyline(rng.uniform(-1.0, 1.0, size=(n, 2)))
            erased = loop_erase(poly)
            assert is_simple(erased)
            assert np.allclose(erased.vertices[0], poly.vertices[0], atol=1e-12)
            assert np.allclose(erased.vertices[-1], poly.vertices[-1], atol=1e-12)
            assert erased.length() <= poly.length() + 1e-9
            for v in erased.vertices:
                assert point_polyline_distance(v, poly) <= 1e-7

    _verdict(8, "1000 seeded polylines loop-erase to simple, endpoint-preserving, "
                "image-contained paths that never get longer", body)


def test_criterion_09_equal_constants():
    def body():
        rep = verify_equal_constants(
            fixture("slit_arg"),
            Slit((0.0, 0.0), (-1.0, 0.0), closed=True),
            Hyperplane((0.0, 1.0), 0.0),
            pairs=10_000, tol=0.05, seed=0)
        assert rep.verdict == "confirmed"

    _verdict(9, "sampled Lipschitz sups for the slit and the full axis agree "
                "within 5% on 10^4 pairs", body)


def test_criterion_10_determinism(tmp_path):
    def body():
        first = tmp_path / "run1.json"
        second = tmp_path / "run2.json"
        start = time.perf_counter()
        assert cli_main(["verify", "--seed", "7", "--out", str(first)]) == 0
        elapsed = time.perf_counter() - start
        assert cli_main(["verify", "--seed", "7", "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        assert elapsed < 60.0
        assert json.loads(first.read_text())["all_expected"] is True

    _verdict(10, "verify --seed 7 writes byte-identical reports twice and the "
                 "suite finishes in under 60 s", body)
