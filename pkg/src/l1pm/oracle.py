"""Brute-force ground truth: visibility-graph Dijkstra and densified gate labeling.

Deliberately simple and quadratic; exactness over speed.  Grazing contact along
an obstacle edge counts as visible (paths may slide along boundaries).
"""
from __future__ import annotations

import heapq
import math
from fractions import Fraction

from .geom import Pt, l1_dist, l22, fr, segments_cross_properly, on_segment
from .polygons import point_in_poly, segment_crosses_poly_interior, bbox


def l2_dist(p: Pt, q: Pt) -> float:
    return math.sqrt(float(l22(p, q)))


def segment_free(a: Pt, b: Pt, polygons, blockers=()) -> bool:
    """True iff the segment meets no polygon's open interior.

    `blockers` are interior edge segments (shared piece boundaries); riding
    along one with positive overlap length also blocks.
    """
    if a == b:
        return True
    lo_x, hi_x = min(a.x, b.x), max(a.x, b.x)
    lo_y, hi_y = min(a.y, b.y), max(a.y, b.y)
    for poly in polygons:
        bx = bbox(poly)
        if bx[0] > hi_x or bx[2] < lo_x or bx[1] > hi_y or bx[3] < lo_y:
            continue
        if segment_crosses_poly_interior(a, b, poly):
            return False
    from .geom import collinear_overlap
    for u, v in blockers:
        if collinear_overlap(a, b, u, v) is not None:
            return False
    return True


def segment_within(a: Pt, b: Pt, poly) -> bool:
    """True iff the closed segment stays within the closed polygon."""
    if a == b:
        return point_in_poly(a, poly) > 0
    n = len(poly)
    tvals = [fr(0), fr(1)]
    for i in range(n):
        c, d = poly[i], poly[(i + 1) % n]
        if segments_cross_properly(a, b, c, d):
            return False
        for q in (c, d):
            if q != a and q != b and on_segment(q, a, b):
                if b.x != a.x:
                    tvals.append(fr(q.x - a.x, b.x - a.x))
                else:
                    tvals.append(fr(q.y - a.y, b.y - a.y))
    for p in (a, b):
        if point_in_poly(p, poly) == 0:
            return False
    tvals = sorted(set(tvals))
    for t0, t1 in zip(tvals, tvals[1:]):
        tm = fr(t0 + t1, 2)
        m = Pt(a.x + tm * (b.x - a.x), a.y + tm * (b.y - a.y))
        if point_in_poly(m, poly) == 0:
            return False
    return True


class VisOracle:
    """Visibility graph over a fixed polygon set; queries add s and t on the fly."""

    def __init__(self, polygons, extra_edges=(), blockers=()):
        self.polygons = [list(p) for p in polygons]
        self.blockers = list(blockers)
        verts = []
        seen = set()
        for p in self.polygons:
            for v in p:
                if v not in seen:
                    seen.add(v)
                    verts.append(v)
        self.verts = verts
        self.index = {v: i for i, v in enumerate(verts)}
        self.extra_edges = []
        for u, v, ln in extra_edges:
            self.extra_edges.append((self.index[u], self.index[v], ln))
        self._vis = None

    def _visibility(self):
        if self._vis is None:
            n = len(self.verts)
            vis = [[] for _ in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    if segment_free(self.verts[i], self.verts[j], self.polygons,
                                    self.blockers):
                        vis[i].append(j)
                        vis[j].append(i)
            self._vis = vis
        return self._vis

    def query(self, s: Pt, t: Pt, metric="L1", with_path=False):
        """Shortest obstacle-avoiding distance (and optionally path) from s to t."""
        if metric == "L1":
            wf = l1_dist
        elif metric == "L2":
            wf = l2_dist
        elif callable(metric):
            wf = metric
        else:
            raise ValueError(f"unknown metric {metric!r}")
        vis = self._visibility()
        n = len(self.verts)
        si, ti = n, n + 1
        pts = self.verts + [s, t]
        adj = {i: [(j, wf(self.verts[i], self.verts[j])) for j in vis[i]] for i in range(n)}
        for u, v, ln in self.extra_edges:
            lnw = ln if metric == "L1" or callable(metric) else float(ln)
            adj[u].append((v, lnw))
            adj[v].append((u, lnw))
        adj[si], adj[ti] = [], []
        for i in range(n):
            if segment_free(s, self.verts[i], self.polygons, self.blockers):
                w = wf(s, self.verts[i])
                adj[si].append((i, w))
                adj[i].append((si, w))
            if segment_free(t, self.verts[i], self.polygons, self.blockers):
                w = wf(t, self.verts[i])
                adj[ti].append((i, w))
                adj[i].append((ti, w))
        if segment_free(s, t, self.polygons, self.blockers):
            w = wf(s, t)
            adj[si].append((ti, w))
            adj[ti].append((si, w))

        dist = {si: 0 if metric != "L2" else 0.0}
        pred = {si: None}
        pq = [(dist[si], si)]
        done = set()
        while pq:
            d, u = heapq.heappop(pq)
            if u in done:
                continue
            done.add(u)
            if u == ti:
                break
            for v, w in adj[u]:
                nd = d + w
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    pred[v] = u
                    heapq.heappush(pq, (nd, v))
        if ti not in dist:
            raise ValueError("oracle: target unreachable")
        if not with_path:
            return dist[ti]
        path = []
        cur = ti
        while cur is not None:
            path.append(pts[cur])
            cur = pred[cur]
        return dist[ti], list(reversed(path))


def oracle_distance(domain, s: Pt, t: Pt, metric="L1", extra_edges=()):
    """One-shot visibility-graph distance among the domain's obstacles."""
    return VisOracle(domain.obstacles, extra_edges).query(s, t, metric)


def oracle_path(domain, s: Pt, t: Pt, metric="L1", extra_edges=()):
    return VisOracle(domain.obstacles, extra_edges).query(s, t, metric, with_path=True)


def path_l1_length(path):
    return sum(l1_dist(a, b) for a, b in zip(path, path[1:]))


def path_l2_length(path) -> float:
    return sum(l2_dist(a, b) for a, b in zip(path, path[1:]))


# ---------------------------------------------------------------------------
# densified-gate weighted Voronoi labeling for bay tests

class _InBayGraph:
    """Visibility graph inside one simple polygon over a fixed vertex set."""

    def __init__(self, poly, points):
        self.poly = list(poly)
        self.pts = list(points)
        n = len(self.pts)
        self.adj = [[] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if segment_within(self.pts[i], self.pts[j], self.poly):
                    w = l1_dist(self.pts[i], self.pts[j])
                    self.adj[i].append((j, w))
                    self.adj[j].append((i, w))

    def multisource(self, seeds):
        """seeds: list of (vertex_index, start_dist); returns dist array (None = unreachable)."""
        dist = [None] * len(self.pts)
        pq = []
        for i, d0 in seeds:
            if dist[i] is None or d0 < dist[i]:
                dist[i] = d0
                heapq.heappush(pq, (d0, i))
        done = [False] * len(self.pts)
        while pq:
            d, u = heapq.heappop(pq)
            if done[u]:
                continue
            done[u] = True
            for v, w in self.adj[u]:
                nd = d + w
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(pq, (nd, v))
        return dist


def densify_interval(a: Pt, b: Pt, d: int):
    """d+1 points splitting segment ab into d equal parts (endpoints included)."""
    out = []
    for i in range(d + 1):
        t = fr(i, d)
        out.append(Pt(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    return out


def oracle_bay_labels(bay_poly, roots, gate_vertices, samples, densification: int):
    """Nearest-root labels for sample points of a bay, by densified-gate brute force.

    roots: list of WeightedSite (ordered along the gate); gate_vertices: the
    k+1 points v_0..v_k on the gate.  In addition to the uniform densification,
    the exact crossings of each root's sightlines (to samples and bay
    vertices) with its own gate interval are included, which makes direct and
    one-bend entries exact.  Returns a list of (root_index, distance) with
    root_index None when the sample is unreachable.
    """
    from .geom import seg_intersection
    k = len(roots)
    gate_pts = []
    intervals = []
    targets = list(samples) + list(bay_poly)
    for i in range(k):
        pts = densify_interval(gate_vertices[i], gate_vertices[i + 1], densification)
        for x in targets:
            try:
                q = seg_intersection(roots[i].point, x,
                                     gate_vertices[i], gate_vertices[i + 1])
            except ValueError:
                q = None
            if q is not None and q not in pts:
                pts.append(q)
        intervals.append(pts)
        gate_pts.extend(pts)
    allpts = list(dict.fromkeys(list(bay_poly) + gate_pts + list(samples)))
    graph = _InBayGraph(bay_poly, allpts)
    idx = {p: i for i, p in enumerate(allpts)}
    sample_idx = [idx[p] for p in samples]
    best = [(None, None)] * len(samples)
    for ri, site in enumerate(roots):
        seeds = [(idx[q], site.weight + l1_dist(site.point, q)) for q in intervals[ri]]
        dist = graph.multisource(seeds)
        for si, pi in enumerate(sample_idx):
            d = dist[pi]
            if d is None:
                continue
            if best[si][1] is None or d < best[si][1]:
                best[si] = (ri, d)
    return best


def stable_bay_labels(bay_poly, roots, gate_vertices, samples, d: int):
    """Labels stable from densification d to 2d (the accepted test tolerance)."""
    lab1 = oracle_bay_labels(bay_poly, roots, gate_vertices, samples, d)
    lab2 = oracle_bay_labels(bay_poly, roots, gate_vertices, samples, 2 * d)
    out = []
    for (r1, d1), (r2, d2) in zip(lab1, lab2):
        out.append((r1, d2) if r1 == r2 else (None, None))
    return out
