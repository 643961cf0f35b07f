import random

import pytest

from l1pm.geom import Pt, Ray, fr, EAST, SOUTH, SE_DIAG
from l1pm.freespace import (triangulate_free_space, TrapezoidMap, trapezoid_map,
                            batched_target_points)
from l1pm.polygons import poly_area2
from helpers import load_corpus
from l1pm.instance import parse_instance
import json


def test_triangulate_empty_rect():
    dom = parse_instance(json.dumps({"rect": [0, 0, 100, 100], "source": [1, 1],
                                     "obstacles": []}).encode())
    tri = triangulate_free_space(dom)
    assert len(tri.triangles) == 2


def test_triangulate_one_obstacle_euler():
    dom = parse_instance(json.dumps(
        {"rect": [0, 0, 100, 100], "source": [1, 1],
         "obstacles": [[[30, 30], [60, 25], [45, 62]]]}).encode())
    tri = triangulate_free_space(dom)
    assert len(tri.triangles) == 7 + 2 * 1 - 2


def test_triangulate_tri_pair_euler():
    tri = triangulate_free_space(load_corpus("tri_pair"))
    assert len(tri.triangles) == 10 + 2 * 2 - 2
    assert len(tri.bridges) >= 1


def test_extra_vertex_adds_two_triangles():
    dom = load_corpus("tri_pair")
    base = triangulate_free_space(dom)
    plus = triangulate_free_space(dom, [dom.source])
    assert len(plus.triangles) == len(base.triangles) + 2


QUAD = [Pt(0, 0), Pt(10, 2), Pt(11, 9), Pt(1, 7)]
COMB = [Pt(0, 0), Pt(14, 1), Pt(13, 9), Pt(11, 3), Pt(9, 8), Pt(7, 2),
        Pt(5, 7), Pt(3, 2), Pt(2, 8), Pt(1, 6)]


def test_trapezoid_map_convex_quad():
    tm = trapezoid_map(QUAD, "horizontal")
    assert len(tm) == 3
    assert tm.area2() == poly_area2(QUAD)


def test_trapezoid_map_triangle():
    t3 = [Pt(0, 0), Pt(9, 4), Pt(3, 8)]
    assert len(trapezoid_map(t3, "horizontal")) == 2


def test_trapezoid_map_comb_partition_audit():
    tm = trapezoid_map(COMB, "horizontal")
    assert tm.area2() == poly_area2(COMB)
    vm = trapezoid_map(COMB, "vertical")
    assert vm.area2() == poly_area2(COMB)


def test_trapezoid_map_axis_parallel_edges():
    L = [Pt(0, 0), Pt(8, 0), Pt(8, 3), Pt(4, 3), Pt(4, 9), Pt(0, 9)]
    tm = trapezoid_map(L, "horizontal")
    assert tm.area2() == poly_area2(L)


def _brute_target(ray, poly):
    best = None
    for i in range(len(poly)):
        h = ray.hit_segment(poly[i], poly[(i + 1) % len(poly)])
        if h is not None and h != ray.origin:
            d = abs(h.x - ray.origin.x) + abs(h.y - ray.origin.y)
            if best is None or d < best[0]:
                best = (d, h)
    return best[1] if best else None


def test_batched_single_horizontal_ray():
    tm = trapezoid_map(QUAD, "horizontal")
    c = Pt(fr(22, 4), fr(18, 4))
    res = batched_target_points(tm, [Ray(c, EAST)], order_hint=QUAD[0])
    assert res == [_brute_target(Ray(c, EAST), QUAD)]


def test_batched_two_south_rays_ordered():
    vm = trapezoid_map(QUAD, "vertical")
    rays = [Ray(Pt(8, 6), SOUTH), Ray(Pt(4, 5), SOUTH)]
    res = batched_target_points(vm, rays, order_hint=QUAD[2])
    assert res == [_brute_target(r, QUAD) for r in rays]


def test_batched_zero_rays():
    tm = trapezoid_map(QUAD, "horizontal")
    assert batched_target_points(tm, []) == []
    assert tm.last_scan_checks == 0


def test_batched_matches_brute_force_randomized():
    rng = random.Random(4)
    vm = trapezoid_map(COMB, "vertical")
    walked = 0
    n_rays = 0
    for _trial in range(50):
        # pick rays inside, then order them by brute-force target position
        rays = []
        while len(rays) < 6:
            p = Pt(fr(rng.randint(4, 56), 4), fr(rng.randint(4, 36), 4))
            from l1pm.polygons import point_in_poly
            if point_in_poly(p, COMB) == 2:
                rays.append(Ray(p, SOUTH))
        brute = [(r, _brute_target(r, COMB)) for r in rays]
        # order by clockwise boundary position of the target (walk from COMB[0])
        from l1pm.freespace import clockwise_walk
        walk_edges, _ids = clockwise_walk(COMB, COMB[0])
        def pos(t):
            for wi, (a, b) in enumerate(walk_edges):
                from l1pm.geom import on_segment
                if on_segment(t, a, b):
                    return (wi, abs(t.x - a.x) + abs(t.y - a.y))
            raise AssertionError("target not on boundary")
        brute.sort(key=lambda rt: pos(rt[1]))
        vm2 = trapezoid_map(COMB, "vertical")
        res = batched_target_points(vm2, [r for r, _t in brute], order_hint=COMB[0])
        assert res == [t for _r, t in brute]
        walked += vm2.last_scan_checks
        n_rays += len(rays)
    # linear-work audit: scan checks bounded by c * (edges + rays)
    assert walked <= 4 * (50 * len(COMB) + n_rays)


def test_batched_diag_rays():
    tm = trapezoid_map(COMB, "horizontal")
    rays = [Ray(Pt(fr(5, 2), fr(11, 2)), SE_DIAG)]
    res = batched_target_points(tm, rays)
    want = _brute_target(rays[0], COMB)
    assert res == [want]
