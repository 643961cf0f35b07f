import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from l1pm.geom import (Pt, Ray, Segment, WeightedSite, fr, l1_dist, orient,
                       weighted_bisector, bisector_sample_points, site_dist,
                       EAST, WEST, NORTH, SOUTH)


def test_l1_dist_examples():
    assert l1_dist(Pt(0, 0), Pt(3, 4)) == 7
    assert l1_dist(Pt(2, 5), Pt(2, 5)) == 0
    assert l1_dist(Pt(-1, 3), Pt(4, -2)) == 10


def test_orientation_examples():
    assert orient(Pt(0, 0), Pt(1, 0), Pt(0, 1)) == 1
    assert orient(Pt(0, 0), Pt(1, 1), Pt(2, 2)) == 0
    assert orient(Pt(0, 0), Pt(0, 1), Pt(1, 1)) == -1


def test_bisector_vertical_line():
    bis = weighted_bisector(WeightedSite(Pt(0, 0), 0), WeightedSite(Pt(4, 0), 0))
    assert bis.middle is None
    dirs = {bis.ray1.direction, bis.ray2.direction}
    assert dirs == {NORTH, SOUTH}
    assert bis.ray1.origin == Pt(2, 0) and bis.ray2.origin == Pt(2, 0)


def test_bisector_diagonal_equal_weights():
    bis = weighted_bisector(WeightedSite(Pt(0, 0), 0), WeightedSite(Pt(2, 2), 0))
    assert bis.middle is not None
    ends = {bis.middle.a, bis.middle.b}
    assert ends == {Pt(2, 0), Pt(0, 2)}
    assert bis.degenerate_quadrant_resolved
    assert (bis.ray1.origin, bis.ray1.direction) == (Pt(0, 2), NORTH)
    assert (bis.ray2.origin, bis.ray2.direction) == (Pt(2, 0), SOUTH)


def test_bisector_weight_exceeds_distance_is_empty():
    # a weight difference larger than the separation leaves no tie points
    bis = weighted_bisector(WeightedSite(Pt(0, 0), 6), WeightedSite(Pt(2, 2), 0))
    assert bis.empty


def test_bisector_shifted_sampled_equation():
    a = WeightedSite(Pt(0, 0), fr(2))
    b = WeightedSite(Pt(2, 2), fr(0))
    bis = weighted_bisector(a, b)
    pts = bisector_sample_points(bis, 20, 50)
    assert len(pts) >= 20
    for q in pts:
        assert site_dist(a, q) == site_dist(b, q)


def test_bisector_rejects_coincident_points():
    with pytest.raises(ValueError):
        weighted_bisector(WeightedSite(Pt(1, 1), 0), WeightedSite(Pt(1, 1), 5))


coords = st.integers(min_value=-50, max_value=50)
weights = st.integers(min_value=0, max_value=60)


@given(coords, coords, coords, coords, weights, weights)
@settings(max_examples=120, deadline=None)
def test_bisector_sampled_equality_and_symmetry(ax, ay, bx, by, wa, wb):
    if (ax, ay) == (bx, by):
        return
    a = WeightedSite(Pt(ax, ay), fr(wa))
    b = WeightedSite(Pt(bx, by), fr(wb))
    bis = weighted_bisector(a, b)
    if bis.empty:
        assert abs(wa - wb) > l1_dist(a.point, b.point)
        return
    for q in bisector_sample_points(bis, 8, 40):
        assert site_dist(a, q) == site_dist(b, q)
    # swapping arguments yields the same point set
    rev = weighted_bisector(b, a)
    pts1 = sorted(set(bisector_sample_points(bis, 4, 17)))
    for q in pts1:
        assert site_dist(b, q) == site_dist(a, q)
    assert bis.empty == rev.empty


@given(coords, coords, coords, coords, weights, weights)
@settings(max_examples=60, deadline=None)
def test_bisector_pieces_monotone(ax, ay, bx, by, wa, wb):
    if (ax, ay) == (bx, by):
        return
    bis = weighted_bisector(WeightedSite(Pt(ax, ay), fr(wa)),
                            WeightedSite(Pt(bx, by), fr(wb)))
    if bis.middle is not None:
        dx = bis.middle.b.x - bis.middle.a.x
        dy = bis.middle.b.y - bis.middle.a.y
        assert abs(dx) == abs(dy) != 0
    for ray in (bis.ray1, bis.ray2):
        if ray is not None:
            assert ray.direction in (EAST, WEST, NORTH, SOUTH)


def test_ray_hit_segment():
    r = Ray(Pt(0, 0), EAST)
    assert r.hit_segment(Pt(5, -1), Pt(5, 3)) == Pt(5, 0)
    assert r.hit_segment(Pt(-3, -1), Pt(-3, 4)) is None
