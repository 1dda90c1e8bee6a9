"""Tests for the sampled verification layer.

Reference values are computed from closed forms inside each test: the
linear fixture attains its constant exactly, the staircase difference
quotient at 3**-n is (3/2)**n, and the angular fixture near the negative
axis has Euclidean quotient sqrt(1+d*d)*(pi - atan(d))/d.
"""

import json
import math

import numpy as np
import pytest

from intrametric.errors import NoFinitePairError, SubsetViolationError
from intrametric.exception_sets import CircleSphere, Hyperplane, Slit
from intrametric.verification import (
    EXPECTED_VERDICTS,
    FixtureFunction,
    VerificationReport,
    fixture,
    lipschitz_constant_estimate,
    run_paper_suite,
    stratified_pairs,
    verify_equal_constants,
    verify_main_theorem,
    verify_subset_permeability,
)

SUP_SLIT_ARG = math.hypot(1.0, math.pi)


class TestFixtures:
    def test_slit_arg_facts(self):
        f = fixture("slit_arg")
        assert f.lipschitz_const == pytest.approx(SUP_SLIT_ARG, rel=1e-15)
        assert not f.continuous
        assert f.dimension == 2
        assert isinstance(f.exception_set, Slit)
        assert f.exception_set.closed

    def test_slit_arg_values(self):
        f = fixture("slit_arg")
        assert f((1.0, 0.0)) == 0.0
        assert f((0.0, 1.0)) == pytest.approx(math.pi / 2.0, rel=1e-15)
        # jump across the removed ray
        assert f((-1.0, 1e-9)) - f((-1.0, -1e-9)) == pytest.approx(2.0 * math.pi, rel=1e-8)

    def test_radial_facts_and_values(self):
        f = fixture("radial_piecewise")
        assert f.lipschitz_const == 1.0
        assert f.continuous
        assert isinstance(f.exception_set, CircleSphere)
        assert f((0.0, 0.0)) == 1.0
        assert f((1.0, 0.0)) == 0.0
        assert f((2.0, 0.0)) == pytest.approx(-math.sin(1.0), rel=1e-15)

    def test_linear_constant_is_the_norm(self):
        f = fixture("linear", v=(3.0, 4.0))
        assert f.lipschitz_const == 5.0
        assert f.exception_set is None
        assert f((1.0, 1.0)) == 7.0

    def test_linear_needs_vector(self):
        with pytest.raises(ValueError):
            fixture("linear")

    def test_staircase_fixture_box(self):
        f = fixture("cantor_staircase_1d")
        lo, hi = f.box()
        assert lo.tolist() == [0.0] and hi.tolist() == [1.0]
        assert f.lipschitz_const == 0.0
        assert f((0.5,)) == 0.5

    def test_quadratic_variant_has_no_declared_constant(self):
        f = fixture("slit_arg_quadratic")
        assert f.lipschitz_const is None
        assert not f.continuous

    def test_default_box(self):
        lo, hi = fixture("slit_arg").box()
        assert lo.tolist() == [-1.5, -1.5]
        assert hi.tolist() == [1.5, 1.5]

    def test_user_fixture_roundtrip(self):
        f = fixture("user_tabulated", func=lambda x: float(x[0] ** 2),
                    dimension=1, continuous=True, lipschitz_const=3.0)
        assert f((1.5,)) == 2.25
        assert f.dimension == 1

    def test_user_fixture_needs_flags(self):
        with pytest.raises(ValueError):
            fixture("user_tabulated", func=lambda x: 0.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            fixture("devil")


class TestStratifiedPairs:
    def test_deterministic_for_a_seed(self):
        theta = CircleSphere((0.0, 0.0), 1.0)
        lo, hi = np.full(2, -1.5), np.full(2, 1.5)
        first = stratified_pairs(theta, 40, np.random.default_rng(5), lo, hi)
        second = stratified_pairs(theta, 40, np.random.default_rng(5), lo, hi)
        assert len(first) == 40
        for (a, b), (c, d) in zip(first, second):
            assert np.array_equal(a, c) and np.array_equal(b, d)

    def test_pairs_stay_in_the_box(self):
        theta = CircleSphere((0.0, 0.0), 1.0)
        lo, hi = np.full(2, -1.5), np.full(2, 1.5)
        for a, b in stratified_pairs(theta, 200, np.random.default_rng(0), lo, hi):
            for p in (a, b):
                assert np.all(p >= lo - 1e-12) and np.all(p <= hi + 1e-12)

    def test_no_set_means_uniform_sampling_still_works(self):
        lo, hi = np.full(2, -1.0), np.full(2, 1.0)
        pairs = stratified_pairs(None, 30, np.random.default_rng(1), lo, hi)
        assert len(pairs) == 30

    def test_straddle_pairs_bracket_the_set(self):
        theta = CircleSphere((0.0, 0.0), 1.0)
        lo, hi = np.full(2, -1.5), np.full(2, 1.5)
        pairs = stratified_pairs(theta, 100, np.random.default_rng(2), lo, hi)
        near = sum(1 for a, b in pairs
                   if abs(np.linalg.norm(a) - 1.0) < 0.2 or abs(np.linalg.norm(b) - 1.0) < 0.2)
        assert near >= 30


class TestLipschitzEstimate:
    def test_linear_attains_its_constant_exactly(self):
        f = fixture("linear", v=(3.0, 4.0))
        est = lipschitz_constant_estimate(
            f, pairs=200, seed=3, explicit_pairs=[((0.0, 0.0), (3.0, 4.0))])
        assert est.value == 5.0
        assert est.pairs_used >= 200
        a, b = est.witness
        assert abs(f(a) - f(b)) / math.dist(a, b) == 5.0

    def test_linear_sampled_only_stays_below_constant(self):
        f = fixture("linear", v=(3.0, 4.0))
        est = lipschitz_constant_estimate(f, pairs=1000, seed=0)
        assert est.value <= 5.0 + 1e-12
        assert est.value >= 4.9

    def test_staircase_quotient_grows_geometrically(self):
        f = fixture("cantor_staircase_1d")
        est = lipschitz_constant_estimate(
            f, pairs=0, seed=0, explicit_pairs=[((0.0,), (3.0 ** -20,))])
        assert est.value == pytest.approx(1.5 ** 20, rel=1e-12)

    def test_slit_arg_euclidean_quotient(self):
        d = 1e-3
        f = fixture("slit_arg")
        est = lipschitz_constant_estimate(
            f, pairs=0, seed=0, explicit_pairs=[((-1.0, d), (-1.0, -d))])
        expected = math.hypot(1.0, d) * (math.pi - math.atan(d)) / d
        assert est.value == pytest.approx(expected, rel=1e-12)
        assert est.value > 3000.0

    def test_slit_arg_detour_quotient_is_bounded(self):
        # the same pair measured along paths around the tip stays near pi
        d = 1e-3
        f = fixture("slit_arg")
        est = lipschitz_constant_estimate(
            f, metric="intrinsic", pairs=0, seed=0, obstacle=f.exception_set,
            explicit_pairs=[((-1.0, d), (-1.0, -d))])
        assert est.value < SUP_SLIT_ARG
        assert est.value == pytest.approx(math.pi, abs=2e-3)

    def test_blocked_pairs_are_skipped(self):
        f = fixture("linear", v=(3.0, 4.0))
        wall = Hyperplane((0.0, 1.0), 0.0)
        est = lipschitz_constant_estimate(
            f, metric="intrinsic", pairs=0, seed=0, obstacle=wall,
            explicit_pairs=[((0.0, 1.0), (0.0, -1.0)), ((0.0, 1.0), (1.0, 1.0))])
        assert est.pairs_used == 1
        assert est.value == pytest.approx(3.0, rel=1e-12)

    def test_all_blocked_raises(self):
        f = fixture("linear", v=(3.0, 4.0))
        wall = Hyperplane((0.0, 1.0), 0.0)
        with pytest.raises(NoFinitePairError):
            lipschitz_constant_estimate(
                f, metric="intrinsic", pairs=0, seed=0, obstacle=wall,
                explicit_pairs=[((0.0, 1.0), (0.0, -1.0))])

    def test_unknown_metric(self):
        f = fixture("linear", v=(1.0, 0.0))
        with pytest.raises(ValueError):
            lipschitz_constant_estimate(f, metric="manhattan", pairs=10)


class TestMainTheorem:
    def test_radial_bound_confirmed(self):
        rep = verify_main_theorem(fixture("radial_piecewise"), pairs=2000, tol=1e-3, seed=0)
        assert rep.claim == "main_theorem:radial_piecewise"
        assert rep.verdict == "confirmed"
        assert rep.threshold == pytest.approx(1.001, rel=1e-15)
        assert rep.max_ratio <= rep.threshold + 1e-15
        assert rep.witness is not None

    def test_staircase_violates_the_flat_bound(self):
        rep = verify_main_theorem(fixture("cantor_staircase_1d"), pairs=2000, tol=1e-3, seed=0)
        assert rep.verdict == "violated"
        assert rep.max_ratio > 0.0
        a, b = rep.witness
        f = fixture("cantor_staircase_1d")
        assert abs(f(a) - f(b)) / math.dist(a, b) == pytest.approx(rep.max_ratio, rel=1e-12)

    def test_discontinuous_fixture_is_rejected(self):
        rep = verify_main_theorem(fixture("slit_arg"), pairs=100, seed=0)
        assert rep.verdict == "precondition_rejected"
        assert rep.pairs == 0
        assert math.isnan(rep.max_ratio)
        assert rep.witness is None

    def test_missing_constant_raises(self):
        with pytest.raises(ValueError):
            verify_main_theorem(fixture("slit_arg_quadratic"), pairs=10)

    def test_understated_constant_is_caught(self):
        rep = verify_main_theorem(fixture("linear", v=(3.0, 4.0)), L=4.0, pairs=500, seed=1)
        assert rep.verdict == "violated"
        assert rep.max_ratio > 4.0

    def test_user_fixture_end_to_end(self):
        f = fixture("user_tabulated", func=lambda x: float(x[0] ** 2),
                    dimension=1, continuous=True, lipschitz_const=3.0)
        rep = verify_main_theorem(f, pairs=500, tol=1e-3, seed=0)
        assert rep.verdict == "confirmed"


class TestEqualConstants:
    def test_slit_inside_axis_confirmed(self):
        rep = verify_equal_constants(
            fixture("slit_arg"),
            Slit((0.0, 0.0), (-1.0, 0.0), closed=True),
            Hyperplane((0.0, 1.0), 0.0),
            pairs=3000, seed=0)
        assert rep.verdict == "confirmed"
        assert rep.max_ratio <= SUP_SLIT_ARG + 1e-6
        assert rep.max_ratio > 3.0
        assert "spread" in rep.note

    def test_identical_sets_have_zero_spread(self):
        theta = Slit((0.0, 0.0), (-1.0, 0.0), closed=True)
        rep = verify_equal_constants(fixture("slit_arg"), theta, theta, pairs=400, seed=2)
        assert rep.verdict == "confirmed"
        assert "spread 0.000%" in rep.note

    def test_open_small_set_rejected(self):
        theta0 = Slit((0.0, 0.0), (-1.0, 0.0), closed=False)
        with pytest.raises(ValueError):
            verify_equal_constants(fixture("slit_arg"), theta0,
                                   Hyperplane((0.0, 1.0), 0.0), pairs=10)

    def test_non_subset_rejected(self):
        with pytest.raises(SubsetViolationError):
            verify_equal_constants(
                fixture("slit_arg"),
                Hyperplane((0.0, 1.0), 0.0),
                Slit((0.0, 0.0), (-1.0, 0.0), closed=True),
                pairs=10, seed=0)


class TestSubsetPermeability:
    def test_ray_inside_line_arrangement(self):
        from intrametric.exception_sets import Arrangement, HalfFlat
        axes = Arrangement([HalfFlat((0.0, 1.0), 0.0), HalfFlat((1.0, 0.0), 0.0)])
        ray = Slit((0.0, 0.0), (-1.0, 0.0), closed=True)
        rep = verify_subset_permeability(axes, ray, pairs=20, seed=0)
        assert rep.claim == "subset_permeability"
        assert rep.verdict == "confirmed"
        assert rep.pairs >= 15

    def test_empty_subset_is_trivial(self):
        theta = Hyperplane((0.0, 1.0), 0.0)
        rep = verify_subset_permeability(theta, None, pairs=10, seed=1)
        assert rep.verdict == "confirmed"
        assert rep.pairs >= 5


class TestReports:
    def test_json_form_masks_infinities(self):
        rep = VerificationReport("demo", 3, math.inf, math.nan, "violated",
                                 ((np.float64(0.25), np.float64(1.0)), (0.5, 0.5)))
        obj = rep.to_json_obj()
        assert obj["max_ratio"] is None and obj["threshold"] is None
        assert obj["witness"] == [[0.25, 1.0], [0.5, 0.5]]
        json.dumps(obj, allow_nan=False)

    def test_json_form_keeps_finite_values(self):
        rep = VerificationReport("demo", 1, 2.5, 3.0, "confirmed")
        obj = rep.to_json_obj()
        assert obj == {"claim": "demo", "pairs": 1, "max_ratio": 2.5,
                       "threshold": 3.0, "verdict": "confirmed",
                       "witness": None, "note": ""}


class TestSuite:
    def test_suite_matches_expectations_and_repeats(self, tmp_path):
        path = tmp_path / "report.json"
        first = run_paper_suite(seed=3, report_path=str(path))
        second = run_paper_suite(seed=3)
        assert first == second
        assert first["seed"] == 3
        assert first["all_expected"] is True
        names = [c["claim"] for c in first["checks"]]
        assert names == list(EXPECTED_VERDICTS)
        for check in first["checks"]:
            assert check["matches_expectation"] is True
            assert check["verdict"] == check["expected"]
        on_disk = json.loads(path.read_text())
        assert on_disk == first
