"""Symbolic derivative/rank computations and the staircase counterexample."""
import math
from fractions import Fraction

import numpy as np
import pytest

from intrametric import cbrank as cb
from intrametric.errors import DepthExceededError, OutOfDomainError, SceneError


def test_derivative_of_finite_set_is_empty():
    s = cb.Points((1.0, 2.0, 3.0))
    assert cb.cb_derivative(s).is_empty()


def test_derivative_of_harmonic_set_is_the_limit_point():
    s = cb.harmonic_limit()  # {0} with {1/n}
    d = cb.cb_derivative(s)
    assert isinstance(d, cb.Points)
    assert d.values == (0.0,)


def test_derivative_of_perfect_core_is_itself():
    s = cb.PerfectCore(0.0, 1.0)
    assert cb.cb_derivative(s) is s


def test_rank_trivials():
    assert cb.cb_rank(cb.Points(())) == 0
    assert cb.cb_rank(cb.Points((5.0,))) == 1
    assert cb.cb_rank(cb.Points((1.0, 2.0, 3.0))) == 1
    assert cb.cb_rank(cb.harmonic_limit()) == 2
    assert cb.cb_rank(cb.PerfectCore()) == cb.PERFECT_CORE


def test_sk_family_rank_is_k_plus_one():
    for k in range(0, 7):
        assert cb.cb_rank(cb.sk_family(k)) == k + 1


def test_sk_family_rank_monotone():
    ranks = [cb.cb_rank(cb.sk_family(k)) for k in range(7)]
    assert ranks == sorted(ranks)


def test_derivative_decrements_rank():
    for s in (cb.Points((1.0, 4.0)), cb.harmonic_limit(), cb.sk_family(3), cb.sk_family(5)):
        r = cb.cb_rank(s)
        assert cb.cb_rank(cb.cb_derivative(s)) == r - 1


def test_sk1_numeric_isolation():
    # S_1 = {0} u {3/2^n}: every generated child is isolated, children
    # approach 0, and 0 is the only accumulation point.
    s = cb.sk_family(1)
    pts = sorted(s.points_upto(40))
    arr = np.array(pts)
    gaps = np.diff(arr)
    assert np.all(gaps > 0)
    children = arr[arr > 0]
    assert children.min() <= 3 * 2.0**-40
    # Each child's distance to the rest of the set is positive and roughly
    # half its own magnitude.
    for i in range(1, len(arr) - 1):
        nn = min(arr[i] - arr[i - 1], arr[i + 1] - arr[i])
        assert nn >= arr[i] / 4


def test_union_rank_and_separation():
    s = cb.UnionSet([cb.Points((20.0, 21.0)), cb.harmonic_limit(0.0, 1.0)])
    assert cb.cb_rank(s) == 2
    with pytest.raises(ValueError):
        cb.UnionSet([cb.Points((0.0, 1.0)), cb.harmonic_limit(0.0, 1.0)])


def test_union_with_perfect_core():
    s = cb.UnionSet([cb.PerfectCore(0.0, 1.0), cb.Points((5.0,))])
    assert cb.cb_rank(s) == cb.PERFECT_CORE


def test_limit_validation_rejects_overlapping_children():
    with pytest.raises(ValueError):
        cb.geometric_limit(cb.Points((0.0, 10.0)), base=0.5, shift=3.0)


def test_limit_validation_rejects_children_through_point():
    with pytest.raises(ValueError):
        cb.geometric_limit(cb.Points((-4.0, 1.0)), base=0.5, shift=3.0)


def test_nesting_depth_guard():
    with pytest.raises(DepthExceededError):
        cb.sk_family(cb.MAX_NESTING + 1)


def test_permeability_1d():
    assert cb.is_permeable_1d(cb.Points((1.0, 2.0))).permeable
    assert cb.is_permeable_1d(cb.harmonic_limit()).permeable
    dec = cb.is_permeable_1d(cb.PerfectCore())
    assert not dec.permeable
    assert dec.rank == cb.PERFECT_CORE
    assert cb.is_permeable_1d(cb.sk_family(6)).permeable


# ---------------------------------------------------------------------------
# staircase


def test_staircase_endpoints():
    assert cb.cantor_staircase(0.0) == 0.0
    assert cb.cantor_staircase(1.0) == 1.0
    assert cb.cantor_staircase(Fraction(1)) == Fraction(1)


def test_staircase_frozen_values():
    assert cb.cantor_staircase(Fraction(1, 3)) == Fraction(1, 2)
    assert cb.cantor_staircase(Fraction(2, 3)) == Fraction(1, 2)
    assert cb.cantor_staircase(Fraction(1, 2)) == Fraction(1, 2)
    # Periodic ternary 0.020202... truncates at depth 52.
    assert cb.cantor_staircase(0.25) == pytest.approx(1 / 3, abs=2.0**-50)
    assert cb.cantor_staircase(Fraction(1, 4), depth=52) \
        == Fraction(1, 3) * (1 - Fraction(1, 4**26))


def test_staircase_gap_plateaus():
    # Middle gap maps to 1/2, the two level-2 gaps to 1/4 and 3/4.
    for x in (0.34, 0.4, 0.5, 0.6, 0.66):
        assert cb.cantor_staircase(x) == 0.5
    for x in (0.12, 0.15, 0.2, 0.22):
        assert cb.cantor_staircase(x) == 0.25
    for x in (0.78, 0.8, 0.88):
        assert cb.cantor_staircase(x) == 0.75


def test_staircase_monotone_on_sorted_samples():
    rng = np.random.default_rng(12)
    xs = np.sort(rng.uniform(0, 1, size=10_000))
    vals = [cb.cantor_staircase(float(x)) for x in xs]
    assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_staircase_slope_ratio_exact():
    # |c(0) - c(3^-n)| / 3^-n = (3/2)^n, exactly, for n <= 20.
    for n in range(1, 21):
        x = Fraction(1, 3**n)
        ratio = abs(cb.cantor_staircase(Fraction(0)) - cb.cantor_staircase(x)) / x
        assert ratio == Fraction(3, 2) ** n


def test_staircase_domain_and_depth_errors():
    with pytest.raises(OutOfDomainError):
        cb.cantor_staircase(1.5)
    with pytest.raises(OutOfDomainError):
        cb.cantor_staircase(-0.1)
    with pytest.raises(DepthExceededError):
        cb.cantor_staircase(0.5, depth=53)
    with pytest.raises(DepthExceededError):
        cb.cantor_staircase(0.5, depth=0)


# ---------------------------------------------------------------------------
# JSON


def test_cbset_json_round_trips():
    specs = [
        {"kind": "points", "values": [1.0, 2.0]},
        {"kind": "limit", "point": 0.0, "template": {"kind": "points", "values": [1.0]},
         "rule": {"type": "harmonic", "anchor": 1.0}},
        {"kind": "limit", "point": 0.0, "template": {"kind": "points", "values": [0.0]},
         "rule": {"type": "geometric", "base": 0.5, "shift": 3.0}},
        {"kind": "union", "parts": [
            {"kind": "points", "values": [50.0]},
            {"kind": "perfect_core", "start": 0.0, "end": 1.0},
        ]},
        {"kind": "perfect_core", "start": 0.0, "end": 1.0},
        {"kind": "sk_family", "k": 3},
    ]
    expected = [1, 2, 2, cb.PERFECT_CORE, cb.PERFECT_CORE, 4]
    for spec_obj, want in zip(specs, expected):
        s = cb.cbset_from_json(spec_obj)
        assert cb.cb_rank(s) == want
        if spec_obj["kind"] != "sk_family":
            again = cb.cbset_from_json(s.to_json_obj())
            assert cb.cb_rank(again) == want


def test_cbset_json_errors():
    with pytest.raises(SceneError):
        cb.cbset_from_json({"kind": "mystery"})
    with pytest.raises(SceneError):
        cb.cbset_from_json({"kind": "points", "values": [1.0], "bogus": 2})
    with pytest.raises(SceneError):
        cb.cbset_from_json({"kind": "limit", "point": 0.0,
                            "template": {"kind": "points", "values": [1.0]},
                            "rule": {"type": "fancy"}})
    with pytest.raises(SceneError):
        cb.cbset_from_json({"kind": "sk_family", "k": 99})


def test_affine_images():
    s = cb.harmonic_limit().affine(2.0, 5.0)  # {5} u {5 + 2/n}
    assert cb.cb_rank(s) == 2
    d = cb.cb_derivative(s)
    assert isinstance(d, cb.Points) and d.values == (5.0,)
    p = cb.PerfectCore(0.0, 1.0).affine(-1.0, 0.0)
    assert p.bounds() == (-1.0, 0.0)
