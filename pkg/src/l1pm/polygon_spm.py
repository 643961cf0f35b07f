"""Shortest paths inside a simple polygon: funnel tree and window subdivision.

The shortest path tree is Euclidean (funnel algorithm, orientation tests
only); inside a simple polygon a Euclidean geodesic is also an L1 geodesic,
so all recorded lengths are exact L1 values.
"""
from __future__ import annotations

from typing import NamedTuple, Optional

from .geom import Pt, WeightedSite, l1_dist, orient, cross, fr, line_intersection, on_segment
from .polygons import TriMesh, triangulate, point_in_poly, split_polygon, ensure_ccw, simplify_collinear


def _attach_index(funnel, apexidx, c):
    """Index of the funnel vertex the taut path to c wraps at.

    The downstream extension rays of the funnel edges are angularly sorted;
    c's attachment is where its side against them switches.  sigma normalizes
    the funnel's handedness (which side of the diagonal c lies on).
    """
    m = len(funnel) - 1
    sigma = orient(funnel[0], funnel[-1], c)
    if sigma == 0:
        # degenerate flat funnel: attach at the nearer end along the line
        return 0 if l1_dist(funnel[0], c) <= l1_dist(funnel[-1], c) else m
    v = 0
    for j in range(m):
        a, b = funnel[j], funnel[j + 1]
        if j < apexidx:
            d = (a.x - b.x, a.y - b.y)      # downstream toward f_0
            w = (c.x - a.x, c.y - a.y)
        else:
            d = (b.x - a.x, b.y - a.y)      # downstream toward f_m
            w = (c.x - b.x, c.y - b.y)
        s = d[0] * w[1] - d[1] * w[0]
        if s * sigma < 0:
            v = j + 1
        else:
            break
    return v


def shortest_path_tree(poly, root: Pt, mesh: Optional[TriMesh] = None):
    """Geodesic tree from root to every polygon vertex.

    Returns (parent, mesh): parent maps each reachable vertex to its tree
    predecessor (root maps to None).  Lengths are derived by callers in L1.
    """
    poly = ensure_ccw(poly)
    if mesh is None:
        mesh = TriMesh(triangulate(poly))
    rt = mesh.locate(root)
    if rt is None:
        raise ValueError(f"root {root} not inside polygon")
    parent = {root: None}

    def try_attach(c, fv):
        if c not in parent and c != root:
            parent[c] = fv

    for v in mesh.tris[rt]:
        try_attach(v, root)
    stack = []
    for tj, (a, b) in mesh.neighbors[rt]:
        fun = [p for p in (a, root, b) if True]
        dedup = [fun[0]]
        for p in fun[1:]:
            if p != dedup[-1]:
                dedup.append(p)
        apexidx = dedup.index(root)
        stack.append((tj, rt, dedup, apexidx))
    while stack:
        ti, origin, funnel, apexidx = stack.pop()
        tri = mesh.tris[ti]
        f0, fm = funnel[0], funnel[-1]
        c = next(v for v in tri if v != f0 and v != fm)
        v = _attach_index(funnel, apexidx, c)
        try_attach(c, funnel[v])
        left = funnel[:v + 1] + [c]
        left_apex = min(v, apexidx)
        right = [c] + funnel[v:]
        right_apex = 1 + max(0, apexidx - v)
        for tj, (ea, eb) in mesh.neighbors[ti]:
            if tj == origin:
                continue
            e = {ea, eb}
            if e == {f0, c}:
                stack.append((tj, ti, left, left_apex))
            elif e == {c, fm}:
                stack.append((tj, ti, right, right_apex))
            elif e == {f0, fm}:
                # duplicate diagonal (possible only in degenerate meshes)
                stack.append((tj, ti, funnel, apexidx))
    return parent, mesh


def tree_l1_lengths(parent, root_site: WeightedSite):
    """Exact L1 length from the weighted root to every tree vertex."""
    dist = {root_site.point: root_site.weight}

    def d(v):
        if v in dist:
            return dist[v]
        res = d(parent[v]) + l1_dist(parent[v], v)
        dist[v] = res
        return res

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, len(parent) * 2 + 50))
    for v in parent:
        if parent[v] is not None:
            d(v)
    sys.setrecursionlimit(old)
    return dist


def _dir_strictly_inside(poly, i, d) -> bool:
    """Does direction d from vertex i point into the polygon interior?"""
    n = len(poly)
    a, v, b = poly[i - 1], poly[i], poly[(i + 1) % n]
    da = (a.x - v.x, a.y - v.y)
    db = (b.x - v.x, b.y - v.y)
    # interior sector at a CCW vertex runs from db to da counterclockwise
    cab = da[0] * db[1] - da[1] * db[0]
    cda = db[0] * d[1] - db[1] * d[0]
    cdb = d[0] * da[1] - d[1] * da[0]
    if cab < 0:  # convex vertex: interior = strictly left of both edges
        return cda > 0 and cdb > 0
    # reflex (or straight): interior = not strictly inside the outside sector
    return not (cda < 0 and cdb < 0)


def _shoot_in_polygon(poly, w: Pt, d):
    """First boundary point hit by the ray from w (a vertex) in direction d."""
    n = len(poly)
    best = None
    best_t = None
    far = Pt(w.x + d[0], w.y + d[1])
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if w == a or w == b:
            continue
        den = d[0] * (b.y - a.y) - d[1] * (b.x - a.x)
        if den == 0:
            for q in (a, b):
                rx, ry = q.x - w.x, q.y - w.y
                if rx * d[1] == ry * d[0] and rx * d[0] + ry * d[1] > 0:
                    t = fr(rx * d[0] + ry * d[1], d[0] * d[0] + d[1] * d[1])
                    if best_t is None or t < best_t:
                        best_t, best = t, q
            continue
        t = fr((a.x - w.x) * (b.y - a.y) - (a.y - w.y) * (b.x - a.x), den)
        if t <= 0:
            continue
        p = Pt(w.x + t * d[0], w.y + t * d[1])
        if on_segment(p, a, b):
            if best_t is None or t < best_t:
                best_t, best = t, p
    if best is None:
        raise RuntimeError(f"window ray from {w} found no boundary")
    return best


class WCell(NamedTuple):
    polygon: list
    root: Pt
    weight: object
    parent: Optional[Pt]   # previous tree vertex (None at the tree root)


def window_cells(poly, root_site: WeightedSite, mesh=None):
    """Subdivide a simple polygon into cells of the single-source SPM.

    Every cell is star-shaped from its root vertex; within a cell,
    dist(p) = weight(root) + L1(root, p) exactly.
    """
    poly = ensure_ccw(simplify_collinear(poly))
    root = root_site.point
    parent, mesh = shortest_path_tree(poly, root, mesh)
    dist = tree_l1_lengths(parent, root_site)

    # windows in tree order (parents before children)
    depth = {}

    def dep(v):
        if v == root:
            return 0
        if v not in depth:
            depth[v] = dep(parent[v]) + 1
        return depth[v]

    idx_of = {p: i for i, p in enumerate(poly)}
    windows = []
    for v in poly:
        u = parent.get(v)
        if u is None or v == root:
            continue
        d = (v.x - u.x, v.y - u.y)
        if v not in idx_of:
            continue
        if not _dir_strictly_inside(poly, idx_of[v], d):
            continue
        z = _shoot_in_polygon(poly, v, d)
        if z == v:
            continue
        mid = Pt(fr(v.x + z.x, 2), fr(v.y + z.y, 2))
        if point_in_poly(mid, poly) != 2:
            continue  # extension runs along the boundary: no cell behind it
        windows.append((dep(v), v, z, u))
    windows.sort(key=lambda t: t[0])

    pieces = [(list(poly), root, None)]
    for _, w, z, u in windows:
        if w == z:
            continue
        hit = None
        for i, (pc, rt, par) in enumerate(pieces):
            mid = Pt(fr(w.x + z.x, 2), fr(w.y + z.y, 2))
            if point_in_poly(mid, pc) > 0 and point_in_poly(w, pc) > 0 and point_in_poly(z, pc) > 0:
                hit = i
                break
        if hit is None:
            raise RuntimeError("window chord lost during splitting")
        pc, rt, par = pieces.pop(hit)
        left, right = split_polygon(pc, [w, z])
        near, farp = (left, right) if point_in_poly(u, left) > 0 else (right, left)
        if point_in_poly(u, near) == 0:
            raise RuntimeError("window split could not find the parent side")
        pieces.append((near, rt, par))
        pieces.append((farp, w, parent[w]))
    return [WCell(pc, rt, dist[rt], par if par is not None else parent.get(rt))
            for pc, rt, par in pieces], parent, dist
