import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from l1pm.geom import Pt, fr
from l1pm.polygons import (poly_area2, triangulate, TriMesh, convex_partition,
                           split_polygon, dissolve, point_in_poly, convex_subtract,
                           convex_intersect, pieces_area2, ensure_ccw,
                           boundary_of_triangle_set, is_convex)


SQUARE = [Pt(0, 0), Pt(10, 0), Pt(10, 10), Pt(0, 10)]


def test_triangulate_square():
    assert len(triangulate(SQUARE)) == 2


def test_triangulate_with_hole_euler_count():
    hole = [Pt(4, 4), Pt(6, 5), Pt(5, 7)]
    tris = triangulate(SQUARE, [hole])
    assert len(tris) == 7 + 2 * 1 - 2
    assert sum(poly_area2(list(t)) for t in tris) == poly_area2(SQUARE) - poly_area2(hole)


def test_trimesh_adjacency():
    tris = triangulate(SQUARE, [[Pt(4, 4), Pt(6, 5), Pt(5, 7)]])
    mesh = TriMesh(tris)
    for i, nbrs in enumerate(mesh.neighbors):
        assert 1 <= len(nbrs) <= 3


def test_split_polygon_area_conservation():
    left, right = split_polygon(SQUARE, [Pt(0, 0), Pt(6, 4), Pt(10, 10)])
    assert poly_area2(left) + poly_area2(right) == poly_area2(SQUARE)


def test_convex_partition_l_shape():
    L = [Pt(0, 0), Pt(4, 0), Pt(4, 2), Pt(2, 2), Pt(2, 4), Pt(0, 4)]
    pieces = convex_partition(L)
    assert len(pieces) == 2
    assert all(is_convex(p) for p in pieces)
    assert sum(poly_area2(p) for p in pieces) == poly_area2(L)


def test_convex_subtract_and_dissolve():
    tri = [Pt(0, 0), Pt(8, 0), Pt(0, 8)]
    k = [Pt(2, 2), Pt(4, 2), Pt(4, 4), Pt(2, 4)]
    pieces = convex_subtract(tri, k)
    assert pieces_area2(pieces) == poly_area2(tri) - poly_area2(k)
    outers, holes = dissolve(pieces)
    assert len(outers) == 1 and len(holes) == 1
    assert len(outers[0]) == 3 and len(holes[0]) == 4


def test_dissolve_partial_edge_overlap():
    a = [Pt(0, 0), Pt(4, 0), Pt(4, 2), Pt(0, 2)]
    b = [Pt(1, 2), Pt(3, 2), Pt(3, 5), Pt(1, 5)]
    outers, holes = dissolve([a, b])
    assert len(outers) == 1 and not holes
    assert poly_area2(outers[0]) == poly_area2(a) + poly_area2(b)


def test_boundary_of_triangle_set():
    tris = triangulate(SQUARE, [[Pt(4, 4), Pt(6, 5), Pt(5, 7)]])
    outers, holes = boundary_of_triangle_set(tris)
    assert len(outers) == 1 and len(holes) == 1
    assert sorted(p for p in outers[0]) == sorted(SQUARE)


@st.composite
def star_polygon(draw):
    import math
    n = draw(st.integers(min_value=3, max_value=10))
    rnd = draw(st.randoms(use_true_random=False))
    angs = sorted(rnd.uniform(0, 2 * math.pi) for _ in range(n))
    pts = []
    for a in angs:
        r = rnd.uniform(5, 40)
        p = Pt(fr(round(math.cos(a) * r * 8), 8), fr(round(math.sin(a) * r * 8), 8))
        if p not in pts:
            pts.append(p)
    return pts


@given(star_polygon())
@settings(max_examples=60, deadline=None)
def test_triangulation_area_identity_random(poly):
    from l1pm.geom import segments_cross
    if len(poly) < 3 or poly_area2(poly) == 0:
        return
    n = len(poly)
    for i in range(n):
        for j in range(i + 1, n):
            if j in (i, (i + 1) % n) or (j + 1) % n == i:
                continue
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]):
                return
    poly = ensure_ccw(poly)
    tris = triangulate(poly)  # raises internally on area mismatch
    assert sum(poly_area2(list(t)) for t in tris) == poly_area2(poly)


def test_point_in_poly_boundary_and_interior():
    assert point_in_poly(Pt(5, 5), SQUARE) == 2
    assert point_in_poly(Pt(0, 5), SQUARE) == 1
    assert point_in_poly(Pt(-1, 5), SQUARE) == 0
    assert point_in_poly(Pt(10, 10), SQUARE) == 1
