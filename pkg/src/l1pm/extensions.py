"""Geodesic Voronoi diagrams, fixed-orientation paths, approximate Euclidean paths.

Orientation sets {0,90} and {0,45,90,135} stay exact in Q(sqrt 2); general
equally spaced sets use certified interval reals.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .geom import Pt, fr, l1_dist
from .polygons import convex_partition, ensure_ccw, point_in_poly
from .cores import Ear, convert_path
from .numbersq import QuadF, Interval, cos_of_pi_multiple, sin_of_pi_multiple, pi_interval
from .spm_ocean import internal_edges, cores_visible
from .query import build_map, distance as map_distance, SpmMap


# ---------------------------------------------------------------------------
# orientation sets and the fixed-orientation metric

class OrientationSet:
    """c >= 2 equally spaced orientations in [0, pi).

    Directions are unit vectors; c=2 uses integers, c=4 the field Q(sqrt 2),
    anything else certified intervals.
    """

    def __init__(self, c: int):
        if c < 2:
            raise ValueError("need at least 2 orientations")
        self.c = c
        if c == 2:
            dirs = [(fr(1), fr(0)), (fr(0), fr(1))]
        elif c == 4:
            s = QuadF(0, fr(1, 2))  # sqrt(2)/2
            dirs = [(QuadF(1), QuadF(0)), (s, s), (QuadF(0), QuadF(1)), (-s, s)]
        else:
            dirs = []
            for k in range(c):
                cos = cos_of_pi_multiple(k, c)
                sin = sin_of_pi_multiple(k, c)
                dirs.append((cos, sin))
        # full circle of 2c direction vectors
        self.dirs = dirs + [(-dx, -dy) for dx, dy in dirs]

    def zero(self):
        if self.c == 2:
            return fr(0)
        if self.c == 4:
            return QuadF(0)
        return Interval(0)

    def length(self, u: Pt, v: Pt):
        """Length of a shortest C-oriented path between co-visible points."""
        w = (v.x - u.x, v.y - u.y)
        if w[0] == 0 and w[1] == 0:
            return self.zero()
        n = len(self.dirs)
        for k in range(n):
            e1 = self.dirs[k]
            e2 = self.dirs[(k + 1) % n]
            c1 = _cross2(e1, w)
            c2 = _cross2(w, e2)
            if _sign_ge0(c1) and _sign_ge0(c2):
                det = _cross2(e1, e2)
                alpha = _div(_cross2(w, e2), det)
                beta = _div(_cross2(e1, w), det)
                return alpha + beta
        raise ArithmeticError("direction bracketing failed")


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _sign_ge0(v) -> bool:
    if isinstance(v, QuadF):
        return v.sign() >= 0
    if isinstance(v, Interval):
        if v.lo > 0 or (v.lo == 0 and v.hi == 0):
            return True
        if v.hi < 0:
            return False
        return v.hi >= 0 and v.lo <= 0 and float(v) >= 0
    return v >= 0


def _div(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    return a / b


def _c_extreme_keep(piece, oset: OrientationSet):
    """Vertices extreme along each orientation normal (all ties kept)."""
    keep = set()
    for dx, dy in oset.dirs:
        # normal of the orientation: rotate by 90 degrees
        nx, ny = -dy, dx
        best = None
        arg = []
        for p in piece:
            val = nx * p.x + ny * p.y
            if best is None or _lt(best, val):
                best = val
                arg = [p]
            elif _eq(best, val):
                arg.append(p)
        keep.update(arg)
    return keep


def _lt(a, b):
    if isinstance(a, QuadF) or isinstance(b, QuadF):
        return (QuadF(0) + a) < (QuadF(0) + b)
    if isinstance(a, Interval) or isinstance(b, Interval):
        av = a if isinstance(a, Interval) else Interval(a)
        bv = b if isinstance(b, Interval) else Interval(b)
        return av.definitely_lt(bv)
    return a < b


def _eq(a, b):
    if isinstance(a, QuadF) or isinstance(b, QuadF):
        return (QuadF(0) + a) == (QuadF(0) + b)
    if isinstance(a, Interval) or isinstance(b, Interval):
        return False
    return a == b


def c_cores(pieces, oset: OrientationSet, keep_extra=()):
    """C-oriented cores and ears of convex pieces (O(c) vertices per core)."""
    from .cores import compute_cores
    keep = set(keep_extra)
    for piece in pieces:
        keep |= _c_extreme_keep(ensure_ccw(piece), oset)
    return compute_cores(pieces, terminals=(), keep_extra=keep)


def c_oriented_shortest_path(domain, s: Pt, t: Pt, oset: OrientationSet):
    """(length, polyline): a shortest path with every edge C-parallel.

    Obstacles are convex-partitioned individually; the Dijkstra runs over the
    C-core vertices with C-distance weights, and ear-penetrating chords are
    replaced by their monotone obstacle paths (length preserved in the
    C-metric, asserted exactly for c in {2, 4}).
    """
    pieces = []
    for o in domain.obstacles:
        pieces.extend(convex_partition(o))
    blockers = internal_edges(pieces)
    keep = set()
    for a, b in blockers:
        keep.add(a)
        keep.add(b)
    cores, ears = c_cores(pieces, oset, keep_extra=keep)
    core_polys = [c.vertices for c in cores if len(c.vertices) >= 2]

    pts = []
    index = {}

    def add(p):
        if p not in index:
            index[p] = len(pts)
            pts.append(p)
        return index[p]

    for cp in core_polys:
        for p in cp:
            add(p)
    si, ti = add(s), add(t)
    n = len(pts)
    dist = {si: oset.zero()}
    pred = {si: None}
    done = set()
    pq = [(oset.zero(), si)]
    counter = 0
    heap = [(0.0, 0, si, oset.zero())]
    while heap:
        _f, _c, u, du = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        dist[u] = du
        if u == ti:
            break
        for v in range(n):
            if v in done or v == u:
                continue
            if not cores_visible(pts[u], pts[v], core_polys, blockers):
                continue
            nd = du + oset.length(pts[u], pts[v])
            if v not in dist or _lt(nd, dist[v]):
                dist[v] = nd
                pred[v] = u
                counter += 1
                heapq.heappush(heap, (float(nd), counter, v, nd))
    if ti not in done:
        raise ValueError("target unreachable in the C-oriented graph")
    chain = []
    cur = ti
    while cur is not None:
        chain.append(pts[cur])
        cur = pred.get(cur)
    chain = list(reversed(chain))
    mlen = lambda a, b: oset.length(a, b)
    path = convert_path(chain, pieces, ears, length_fn=mlen) \
        if oset.c in (2, 4) else _convert_checked(chain, pieces, ears, mlen)
    return dist[ti], path


def _convert_checked(chain, pieces, ears, mlen):
    # interval lengths cannot be compared exactly; convert with the L1 check
    # disabled and keep the chord geometry
    from .cores import _segment_ear_detour
    out = [chain[0]]
    for p, q in zip(chain, chain[1:]):
        if p == q:
            continue
        detours = []
        for ear in ears:
            d = _segment_ear_detour(p, q, ear)
            if d is not None:
                detours.append(d)
        detours.sort(key=lambda t: t[0])
        for _t, pts2 in detours:
            for v in pts2:
                if out[-1] != v:
                    out.append(v)
        if out[-1] != q:
            out.append(q)
    return out


def approx_euclidean(domain, s: Pt, t: Pt, delta):
    """(length, polyline, c): delta-optimal Euclidean path via c orientations.

    c is the smallest power of two with sec(pi/(2c)) <= 1 + delta, checked by
    certified interval arithmetic (an exact sufficient condition).
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    target = Fraction(1) / (1 + delta)   # need cos(pi/(2c)) >= target
    c = 2
    while True:
        enc = cos_of_pi_multiple(1, 2 * c)
        if enc.definitely_gt(Interval(target)) or enc.lo >= target:
            break
        if c > 2 ** 12:
            raise ArithmeticError("orientation count explosion")
        c *= 2
    oset = OrientationSet(c)
    length, path = c_oriented_shortest_path(domain, s, t, oset)
    return length, path, c


# ---------------------------------------------------------------------------
# geodesic Voronoi diagrams

@dataclass
class GvdResult:
    map: SpmMap
    sites: list

    def label_at(self, p: Pt) -> int:
        i = self.map.locator.locate(p)
        if i is None:
            raise ValueError(f"{p} not in the free space")
        return self.map.spm.cells[i].label

    def distance_at(self, p: Pt):
        from .query import distance
        return distance(self.map, p)


def gvd(domain) -> GvdResult:
    """L1 geodesic Voronoi diagram of the domain's point sites.

    Sites are treated as point obstacles in the triangulation; the full
    pipeline then runs multi-source and the labels flow through expansion.
    """
    if not domain.sites:
        raise ValueError("gvd needs at least one site")
    m = build_map(domain)
    return GvdResult(m, list(domain.sites))
