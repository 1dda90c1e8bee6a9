import math

import numpy as np
import pytest

from intrametric.errors import GridTooLargeError
from intrametric.exception_sets import CircleSphere, Hyperplane, Slit, path_crossings
from intrametric.geometry import Polyline
from intrametric.grid import grid_distance, shortcut_smooth

SQRT2 = math.sqrt(2.0)


def test_slit_geodesic_converges():
    slit = Slit((0.0, 0.0), (-1.0, 0.0))
    length, witness, diag = grid_distance(slit, (-1.0, 1.0), (-1.0, -1.0), depth=8)
    exact = 2.0 * SQRT2
    assert abs(length - exact) / exact < 0.01
    assert witness is not None
    rep = path_crossings(slit, witness)
    assert rep.classification == "finite" and rep.count == 0


def test_free_plane_straight():
    # circle far away from the query pair
    circle = CircleSphere((50.0, 50.0), 1.0)
    length, witness, _ = grid_distance(circle, (0.0, 0.0), (3.0, 4.0), depth=6)
    assert length == pytest.approx(5.0, rel=1e-6)


def test_blocked_hyperplane_is_infinite():
    wall = Hyperplane((0.0, 1.0), 0.0)
    length, witness, diag = grid_distance(wall, (0.0, 1.0), (0.0, -1.0), depth=6)
    assert math.isinf(length)
    assert witness is None


def test_symmetry_exact():
    slit = Slit((0.0, 0.0), (-1.0, 0.0))
    a, b = (-1.3, 0.7), (-0.4, -0.9)
    l1, _, _ = grid_distance(slit, a, b, depth=7)
    l2, _, _ = grid_distance(slit, b, a, depth=7)
    assert l1 == l2


def test_depth_ladder_monotone():
    slit = Slit((0.0, 0.0), (-1.0, 0.0))
    prev = math.inf
    for depth in range(4, 9):
        length, _, _ = grid_distance(slit, (-1.0, 1.0), (-1.0, -1.0), depth=depth)
        assert length <= prev + 1e-9
        prev = length


def test_witness_length_matches_value():
    slit = Slit((0.0, 0.0), (-1.0, 0.0))
    length, witness, _ = grid_distance(slit, (-1.0, 0.5), (-1.0, -0.5), depth=8)
    assert witness.length() == pytest.approx(length, abs=1e-12)
    assert np.allclose(witness.vertices[0], (-1.0, 0.5))
    assert np.allclose(witness.vertices[-1], (-1.0, -0.5))


def test_refuses_oversized_grid():
    slit = Slit((0.0, 0.0), (-1.0, 0.0))
    with pytest.raises(GridTooLargeError):
        grid_distance(slit, (-1.0, 1.0), (-1.0, -1.0), depth=16)


def test_shortcut_smooth_preserves_admissibility_and_shortens():
    slit = Slit((0.0, 0.0), (-1.0, 0.0))
    rng = np.random.default_rng(5)
    for _ in range(25):
        # random wobbly admissible path in the upper half plane
        xs = np.linspace(-1.0, 1.0, 12)
        ys = 0.2 + rng.uniform(0.0, 0.8, size=12)
        poly = Polyline(np.column_stack([xs, ys]))
        smoothed = Polyline(shortcut_smooth(poly.vertices, slit))
        assert smoothed.length() <= poly.length() + 1e-12
        assert np.allclose(smoothed.vertices[0], poly.vertices[0])
        assert np.allclose(smoothed.vertices[-1], poly.vertices[-1])
        rep = path_crossings(slit, smoothed)
        assert rep.classification == "finite" and rep.count == 0


def test_smooth_improves_or_keeps_grid_value():
    slit = Slit((0.0, 0.0), (-1.0, 0.0))
    rough, _, _ = grid_distance(slit, (-1.0, 1.0), (-1.0, -1.0), depth=6, smooth=False)
    smooth, _, _ = grid_distance(slit, (-1.0, 1.0), (-1.0, -1.0), depth=6, smooth=True)
    assert smooth <= rough + 1e-12
