import math

import pytest
from hypothesis import given, strategies as st

from swarmsim.geometry import (
    INFINITE_DISTANCE,
    Box,
    Position3,
    Region,
    dist,
    dist_point_segment,
    dist_to_region,
    midpoint,
    normalize_angle,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
points = st.builds(Position3, finite, finite, finite)


def test_dist_identity():
    assert dist(Position3(0, 0, 0), Position3(0, 0, 0)) == 0


def test_dist_345_triangle():
    assert dist(Position3(0, 0, 0), Position3(3, 4, 0)) == 5


def test_dist_translated_triangle():
    assert dist(Position3(1, 2, 3), Position3(4, 6, 3)) == 5


def test_position_rejects_nan():
    with pytest.raises(ValueError):
        Position3(math.nan, 0, 0)
    with pytest.raises(ValueError):
        Position3(0, math.inf, 0)


@given(points, points)
def test_dist_symmetric(a, b):
    assert dist(a, b) == dist(b, a)


@given(points, points, points)
def test_dist_triangle_inequality(a, b, c):
    assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-6


def test_dist_to_region_axis_gap():
    r = Region([Box(Position3(1, 0, 0), Position3(2, 1, 1))])
    assert dist_to_region(Position3(0, 0, 0), r) == 1


def test_dist_to_region_inside_is_zero():
    r = Region([Box(Position3(1, 0, 0), Position3(2, 1, 1))])
    assert dist_to_region(Position3(1.5, 0.5, 0.5), r) == 0


def test_dist_to_empty_region_is_infinite():
    d = dist_to_region(Position3(0, 0, 0), Region())
    assert d == INFINITE_DISTANCE
    assert d > 1e300


def test_box_requires_ordered_corners():
    with pytest.raises(ValueError):
        Box(Position3(1, 0, 0), Position3(0, 1, 1))


boxes = st.builds(
    lambda lo, dx, dy, dz: Box(lo, Position3(lo.x + dx, lo.y + dy, lo.z + dz)),
    st.builds(Position3, finite, finite, finite),
    st.floats(min_value=0, max_value=100),
    st.floats(min_value=0, max_value=100),
    st.floats(min_value=0, max_value=100),
)
regions = st.lists(boxes, min_size=1, max_size=4).map(Region)


@given(points, regions)
def test_zero_distance_iff_contained(p, r):
    d = dist_to_region(p, r)
    assert (d == 0) == r.contains(p)


@given(points, points, regions)
def test_dist_to_region_is_lipschitz(p, q, r):
    assert abs(dist_to_region(p, r) - dist_to_region(q, r)) <= dist(p, q) + 1e-6


@given(st.floats(min_value=-50, max_value=50, allow_nan=False))
def test_normalize_angle_range(theta):
    w = normalize_angle(theta)
    assert -math.pi < w <= math.pi
    # same angle modulo 2*pi
    assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(theta), abs_tol=1e-9)


def test_midpoint():
    assert midpoint(Position3(0, 0, 0), Position3(2, 4, 6)) == Position3(1, 2, 3)


def test_dist_point_segment():
    a, b = Position3(0, 0, 0), Position3(2, 0, 0)
    assert dist_point_segment(Position3(1, 1, 0), a, b) == 1
    assert dist_point_segment(Position3(-1, 0, 0), a, b) == 1
    assert dist_point_segment(Position3(3, 0, 0), a, b) == 1
    assert dist_point_segment(Position3(1, 0, 0), a, a) == 1
