"""Exact polygon machinery: faces, triangulation, convex partition, splitting, dissolve.

Polygons are lists of Pt, outer boundaries counterclockwise, holes clockwise.
Everything is exact; every triangulation is audited by an area identity.
"""
from __future__ import annotations

from fractions import Fraction

from .geom import Pt, fr, orient, cross, on_segment, l1_dist


def poly_area2(poly):
    """Twice the signed area (positive for CCW)."""
    s = 0
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        s += a.x * b.y - b.x * a.y
    return s


def poly_area(poly) -> Fraction:
    return fr(poly_area2(poly), 2)


def is_ccw(poly) -> bool:
    return poly_area2(poly) > 0


def ensure_ccw(poly):
    return list(poly) if is_ccw(poly) else list(reversed(poly))


def ensure_cw(poly):
    return list(poly) if not is_ccw(poly) else list(reversed(poly))


def simplify_collinear(poly):
    """Drop duplicate consecutive points and collinear middle vertices."""
    pts = []
    for p in poly:
        if pts and p == pts[-1]:
            continue
        pts.append(p)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    if len(pts) < 3:
        return pts
    out = []
    for p in pts:
        while len(out) >= 2 and orient(out[-2], out[-1], p) == 0:
            out.pop()
        out.append(p)
    # wrap-around fixups at the seam
    while len(out) > 2 and orient(out[-2], out[-1], out[0]) == 0:
        out.pop()
    while len(out) > 2 and orient(out[-1], out[0], out[1]) == 0:
        out.pop(0)
    return out


def bbox(poly):
    xs = [p.x for p in poly]
    ys = [p.y for p in poly]
    return (min(xs), min(ys), max(xs), max(ys))


def point_in_poly(p: Pt, poly) -> int:
    """2 strictly inside, 1 on the boundary, 0 outside (exact crossing test)."""
    n = len(poly)
    inside = False
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if on_segment(p, a, b):
            return 1
        if (a.y <= p.y) != (b.y <= p.y):
            # edge crosses the horizontal through p; test x of crossing vs p.x
            side = orient(a, b, p)
            if b.y > a.y:
                if side > 0:
                    inside = not inside
            else:
                if side < 0:
                    inside = not inside
    return 2 if inside else 0


def segment_crosses_poly_interior(a: Pt, b: Pt, poly) -> bool:
    """True iff open segment ab meets the open interior of the polygon."""
    from .geom import segments_cross_properly, seg_intersection
    n = len(poly)
    # any proper crossing with an edge implies interior intersection
    cuts = []
    for i in range(n):
        c, d = poly[i], poly[(i + 1) % n]
        if segments_cross_properly(a, b, c, d):
            return True
    # otherwise the segment only touches boundary points; check midpoints of
    # the pieces between consecutive contact points
    contacts = {0: a, 1: b}
    tvals = [fr(0), fr(1)]
    for i in range(n):
        c, d = poly[i], poly[(i + 1) % n]
        for q in (c, d):
            if on_segment(q, a, b) and q != a and q != b:
                if b.x != a.x:
                    t = fr(q.x - a.x, b.x - a.x)
                else:
                    t = fr(q.y - a.y, b.y - a.y)
                tvals.append(t)
    tvals = sorted(set(tvals))
    for t0, t1 in zip(tvals, tvals[1:]):
        tm = fr(t0 + t1, 2)
        m = Pt(a.x + tm * (b.x - a.x), a.y + tm * (b.y - a.y))
        if point_in_poly(m, poly) == 2:
            return True
    return False


# ---------------------------------------------------------------------------
# directional order helpers (exact)

def _same_dir(a, b) -> bool:
    return a[0] * b[1] == a[1] * b[0] and a[0] * b[0] + a[1] * b[1] > 0


def _cw_rank(ref, d) -> int:
    """Coarse clockwise rank of d from ref: 1 cw side, 2 opposite, 3 ccw side, 4 same."""
    if _same_dir(ref, d):
        return 4
    c = ref[0] * d[1] - ref[1] * d[0]
    if c < 0:
        return 1
    if c == 0:
        return 2
    return 3


def _cw_less(ref, d1, d2) -> bool:
    """True if, rotating clockwise from `ref`, d1 is met strictly before d2."""
    r1, r2 = _cw_rank(ref, d1), _cw_rank(ref, d2)
    if r1 != r2:
        return r1 < r2
    if r1 in (2, 4):
        return False
    c = d1[0] * d2[1] - d1[1] * d2[0]
    return c < 0


class PSLG:
    """Planar straight-line graph of directed edges; traces interior-left faces.

    Every input edge is used by exactly one face.  For a region given by outer
    boundaries (CCW) plus holes (CW) plus internal diagonals (both directions),
    the traced faces are exactly the subdivision faces of the region.
    """

    def __init__(self):
        self.out = {}

    def add_edge(self, u: Pt, v: Pt):
        if u == v:
            raise ValueError("zero-length edge")
        self.out.setdefault(u, []).append(v)

    def faces(self):
        used = set()
        faces = []
        for u in list(self.out):
            for v in self.out[u]:
                if (u, v) in used:
                    continue
                cyc = self._trace(u, v, used)
                faces.append(cyc)
        return faces

    def _trace(self, u0, v0, used):
        cyc = [u0]
        u, v = u0, v0
        guard = 0
        while True:
            used.add((u, v))
            cyc.append(v)
            guard += 1
            if guard > 10_000_000:
                raise RuntimeError("face trace diverged")
            ref = (u.x - v.x, u.y - v.y)  # direction back toward u
            cands = self.out.get(v)
            if not cands:
                raise ValueError("dangling PSLG vertex during face trace")
            best = None
            bestd = None
            for w in cands:
                d = (w.x - v.x, w.y - v.y)
                if best is None or _cw_less(ref, d, bestd):
                    best, bestd = w, d
            u, v = v, best
            if (u, v) == (u0, v0):
                cyc.pop()  # closing vertex repeats start
                return cyc[:-1] if cyc[-1] == cyc[0] else cyc


# ---------------------------------------------------------------------------
# monotone decomposition (sweep) and triangulation

def _below(p: Pt, q: Pt) -> bool:
    """Lexicographic comparison making every vertex y-distinct for the sweep."""
    return p.y < q.y or (p.y == q.y and p.x > q.x)


_START, _END, _SPLIT, _MERGE, _REGULAR = range(5)


class _SweepEdge:
    __slots__ = ("a", "b", "helper", "helper_kind")

    def __init__(self, a, b):
        self.a = a  # upper endpoint
        self.b = b  # lower endpoint
        self.helper = None
        self.helper_kind = None

    def x_left_of(self, p: Pt) -> bool:
        """True if this edge passes strictly left of (or through) point p."""
        # edge directed a(up) -> b(down); p east of it iff orient > 0
        o = orient(self.a, self.b, p)
        if o != 0:
            return o > 0
        return True


def monotone_pieces(cycles):
    """Split a region (outer CCW cycle + CW hole cycles) into y-monotone faces.

    Returns (faces, diagonals) where diagonals is the list of added chords.
    """
    verts = []
    info = {}
    for ci, cyc in enumerate(cycles):
        n = len(cyc)
        if n < 3:
            raise ValueError("degenerate cycle")
        for i, v in enumerate(cyc):
            if v in info:
                raise ValueError(f"repeated vertex across cycles: {v}")
            prv, nxt = cyc[i - 1], cyc[(i + 1) % n]
            info[v] = (prv, nxt, ci)
            verts.append(v)
    order = sorted(verts, key=lambda p: (p.y, -p.x), reverse=True)

    def classify(v):
        prv, nxt, _ = info[v]
        pb, nb = _below(prv, v), _below(nxt, v)
        if pb and nb:
            return _START if orient(prv, v, nxt) > 0 else _SPLIT
        if not pb and not nb:
            return _END if orient(prv, v, nxt) > 0 else _MERGE
        return _REGULAR

    status: list[_SweepEdge] = []
    edges = {}
    diagonals = []

    def edge_of(u, v):
        return edges[(u, v)]

    def insert_edge(u, v):
        e = _SweepEdge(u, v)
        edges[(u, v)] = e
        # keep status x-ordered at the sweep position (u)
        lo, hi = 0, len(status)
        while lo < hi:
            mid = (lo + hi) // 2
            if status[mid].x_left_of(u):
                lo = mid + 1
            else:
                hi = mid
        status.insert(lo, e)
        return e

    def remove_edge(u, v):
        e = edges.pop((u, v))
        status.remove(e)
        return e

    def left_of(v):
        lo, hi = 0, len(status)
        while lo < hi:
            mid = (lo + hi) // 2
            if status[mid].x_left_of(v):
                lo = mid + 1
            else:
                hi = mid
        if lo == 0:
            raise ValueError(f"no edge left of {v}: region not valid at this vertex")
        return status[lo - 1]

    def set_helper(e, v, kind):
        e.helper, e.helper_kind = v, kind

    def fix_up(v, e):
        if e.helper_kind == _MERGE:
            diagonals.append((v, e.helper))

    for v in order:
        prv, nxt, _ = info[v]
        kind = classify(v)
        if kind == _START:
            set_helper(insert_edge(v, nxt), v, kind)
        elif kind == _END:
            fix_up(v, edge_of(prv, v))
            remove_edge(prv, v)
        elif kind == _SPLIT:
            e = left_of(v)
            diagonals.append((v, e.helper))
            set_helper(e, v, kind)
            set_helper(insert_edge(v, nxt), v, kind)
        elif kind == _MERGE:
            fix_up(v, edge_of(prv, v))
            remove_edge(prv, v)
            e = left_of(v)
            fix_up(v, e)
            set_helper(e, v, kind)
        else:  # regular
            if _below(nxt, v):  # interior right of v: boundary descends through v
                fix_up(v, edge_of(prv, v))
                remove_edge(prv, v)
                set_helper(insert_edge(v, nxt), v, kind)
            else:
                e = left_of(v)
                fix_up(v, e)
                set_helper(e, v, kind)

    pslg = PSLG()
    for cyc in cycles:
        for i in range(len(cyc)):
            pslg.add_edge(cyc[i], cyc[(i + 1) % len(cyc)])
    for u, v in diagonals:
        pslg.add_edge(u, v)
        pslg.add_edge(v, u)
    faces = pslg.faces()
    return faces, diagonals


def triangulate_monotone(poly):
    """Triangulate a CCW y-monotone polygon by the two-chain stack algorithm."""
    n = len(poly)
    if n == 3:
        return [tuple(poly)]
    idx_order = sorted(range(n), key=lambda i: (poly[i].y, -poly[i].x), reverse=True)
    top, bot = idx_order[0], idx_order[-1]
    # CCW walk from the top vertex descends the left chain
    chain = {}
    i = (top + 1) % n
    while i != bot:
        chain[poly[i]] = "L"
        i = (i + 1) % n
    i = (bot + 1) % n
    while i != top:
        chain[poly[i]] = "R"
        i = (i + 1) % n
    chain[poly[top]] = "L"   # endpoints may act as either; pick one
    chain[poly[bot]] = "R"

    order = [poly[i] for i in idx_order]
    tris = []

    def emit(a, b, c):
        if orient(a, b, c) < 0:
            b, c = c, b
        if orient(a, b, c) != 0:
            tris.append((a, b, c))

    stack = [order[0], order[1]]
    for j in range(2, n - 1):
        u = order[j]
        if chain[u] != chain[stack[-1]]:
            while len(stack) > 1:
                v2 = stack.pop()
                emit(u, v2, stack[-1])
            prev_top = order[j - 1]
            stack = [prev_top, u]
        else:
            last = stack.pop()
            while stack:
                w = stack[-1]
                if chain[u] == "L":
                    ok = orient(u, last, w) < 0
                else:
                    ok = orient(u, last, w) > 0
                if not ok:
                    break
                emit(u, last, w)
                last = stack.pop()
            stack.append(last)
            stack.append(u)
    u = order[-1]
    while len(stack) > 1:
        v2 = stack.pop()
        emit(u, v2, stack[-1])
    return tris


def triangulate(outer, holes=()):
    """Triangulate the region bounded by `outer` (CCW) minus hole interiors.

    Holes are given CCW as polygons and reoriented internally.  Returns a list
    of CCW triangles; the exact area identity is asserted.
    """
    cycles = [ensure_ccw(simplify_collinear(outer))]
    for h in holes:
        cycles.append(ensure_cw(simplify_collinear(h)))
    if len(cycles) == 1 and len(cycles[0]) == 3:
        tris = [tuple(cycles[0])]
    else:
        faces, _diag = monotone_pieces(cycles)
        tris = []
        for f in faces:
            tris.extend(triangulate_monotone(f))
    want = poly_area2(cycles[0]) + sum(poly_area2(c) for c in cycles[1:])
    got = sum(poly_area2(list(t)) for t in tris)
    if want != got:
        raise ArithmeticError(f"triangulation area mismatch: {want} != {got}")
    return tris


def triangulation_diagonals(outer, holes=()):
    """The monotone-decomposition chords; chords joining distinct cycles bridge holes."""
    cycles = [ensure_ccw(simplify_collinear(outer))]
    for h in holes:
        cycles.append(ensure_cw(simplify_collinear(h)))
    if len(cycles) == 1 and len(cycles[0]) == 3:
        return [], cycles
    _faces, diag = monotone_pieces(cycles)
    return diag, cycles


class TriMesh:
    """Triangle soup with shared-edge adjacency (the dual graph)."""

    def __init__(self, tris):
        self.tris = [tuple(t) for t in tris]
        self.neighbors = [[] for _ in self.tris]
        edge_owner = {}
        for ti, t in enumerate(self.tris):
            for k in range(3):
                e = (t[k], t[(k + 1) % 3])
                rev = (e[1], e[0])
                if rev in edge_owner:
                    tj = edge_owner.pop(rev)
                    self.neighbors[ti].append((tj, rev))
                    self.neighbors[tj].append((ti, e))
                else:
                    if e in edge_owner:
                        raise ValueError("duplicate directed edge in mesh")
                    edge_owner[e] = ti
        self.boundary_edges = list(edge_owner)

    def __len__(self):
        return len(self.tris)

    def locate(self, p: Pt):
        """Index of a triangle whose closure contains p, or None."""
        for i, t in enumerate(self.tris):
            if point_in_poly(p, list(t)) > 0:
                return i
        return None


def convex_partition(outer, holes=()):
    """Hertel-Mehlhorn: triangulate, then greedily merge across diagonals."""
    tris = triangulate(outer, holes)
    polys = {i: list(t) for i, t in enumerate(tris)}
    edge2faces = {}
    for i, t in enumerate(tris):
        for k in range(3):
            e = frozenset((t[k], t[(k + 1) % 3]))
            edge2faces.setdefault(e, []).append(i)
    parent = list(range(len(tris)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for e, faces in edge2faces.items():
        if len(faces) != 2:
            continue
        a, b = frozenset(e)
        ra, rb = find(faces[0]), find(faces[1])
        if ra == rb:
            continue
        pa, pb = polys[ra], polys[rb]
        if a not in pa or b not in pa or a not in pb or b not in pb:
            continue  # merge of an earlier step removed the chord
        merged = _merge_across(pa, pb, a, b)
        if merged is None:
            continue
        parent[rb] = ra
        polys[ra] = merged
        del polys[rb]
    return [simplify_collinear(p) for p in polys.values()]


def _merge_across(pa, pb, a, b):
    """Union of two polygons sharing exactly edge ab, if the union is convex."""
    ia, ib = pa.index(a), pa.index(b)
    if (ia + 1) % len(pa) == ib:
        first, second = a, b
    elif (ib + 1) % len(pa) == ia:
        first, second = b, a
    else:
        return None
    # walk pa from second..first, then pb from first..second (skipping dup ends)
    ja = pa.index(second)
    out = []
    i = ja
    while pa[i] != first:
        out.append(pa[i])
        i = (i + 1) % len(pa)
    out.append(first)
    jb = pb.index(first)
    i = (jb + 1) % len(pb)
    while pb[i] != second:
        out.append(pb[i])
        i = (i + 1) % len(pb)
    merged = simplify_collinear(out)
    if len(merged) < 3:
        return None
    for k in range(len(merged)):
        if orient(merged[k - 1], merged[k], merged[(k + 1) % len(merged)]) < 0:
            return None
    return merged


def is_convex(poly) -> bool:
    n = len(poly)
    for i in range(n):
        if orient(poly[i - 1], poly[i], poly[(i + 1) % n]) < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# boundary bookkeeping and polygon splitting

def boundary_location(poly, p: Pt):
    """(edge_index, is_vertex) for a point on the polygon boundary, else None.

    A point equal to vertex i reports (i, True); a point interior to edge
    i->i+1 reports (i, False).
    """
    n = len(poly)
    for i in range(n):
        if poly[i] == p:
            return (i, True)
    for i in range(n):
        if on_segment(p, poly[i], poly[(i + 1) % n]):
            return (i, False)
    return None


def _bpos(poly, p: Pt, loc):
    """Boundary position of p as (edge_index, fraction along that edge)."""
    if loc[1]:
        return (loc[0], fr(0))
    i = loc[0]
    a, b = poly[i], poly[(i + 1) % len(poly)]
    if b.x != a.x:
        return (i, fr(p.x - a.x, b.x - a.x))
    return (i, fr(p.y - a.y, b.y - a.y))


def boundary_walk(poly, s_pos, t_pos):
    """Polygon vertices strictly between boundary positions s and t, CCW."""
    n = len(poly)
    dt = (t_pos[0] - s_pos[0]) % n
    if dt == 0 and t_pos[1] <= s_pos[1]:
        dt = n
    key_t = (dt, t_pos[1])
    out = []
    for k in range(n + 1):
        # vertex at unwrapped edge-offset k+1 from s's edge
        if (k + 1, fr(0)) >= key_t:
            return out
        out.append(poly[(s_pos[0] + 1 + k) % n])
    raise RuntimeError("boundary walk failed")


def split_polygon(poly, chain):
    """Split a CCW polygon by a chain whose endpoints lie on the boundary.

    The chain's interior must be strictly inside.  Returns (left, right):
    `left` is the piece lying to the left of the directed chain; both CCW.
    """
    poly = ensure_ccw(poly)
    cleaned = [chain[0]]
    for q in chain[1:]:
        if q != cleaned[-1]:
            cleaned.append(q)
    chain = cleaned
    if len(chain) < 2:
        raise ValueError("empty split chain")
    s, t = chain[0], chain[-1]
    if s == t:
        raise ValueError("split chain endpoints coincide")
    ls = boundary_location(poly, s)
    lt = boundary_location(poly, t)
    if ls is None or lt is None:
        raise ValueError("split chain endpoints must lie on the boundary")
    ps, pt = _bpos(poly, s, ls), _bpos(poly, t, lt)
    right = list(chain) + boundary_walk(poly, pt, ps)
    left = list(reversed(chain)) + boundary_walk(poly, ps, pt)
    left = simplify_collinear(left)
    right = simplify_collinear(right)
    if poly_area2(left) <= 0 or poly_area2(right) <= 0:
        raise ArithmeticError("split produced a non-positive piece")
    if poly_area2(left) + poly_area2(right) != poly_area2(poly):
        raise ArithmeticError("split area mismatch")
    return left, right


def split_pinched(cycle):
    """Split a closed walk with repeated vertices into simple loops."""
    seen = {}
    for i, v in enumerate(cycle):
        if v in seen:
            j = seen[v]
            inner = cycle[j:i]
            outer = cycle[:j] + cycle[i:]
            out = []
            for c in (inner, outer):
                if len(c) >= 3:
                    out.extend(split_pinched(c))
            return out
        seen[v] = i
    return [cycle] if len(cycle) >= 3 else []


def dissolve(pieces):
    """Boundary cycles of a union of interior-disjoint CCW pieces.

    Pieces may share partial edges.  Returns (outers, holes): CCW outer cycles
    and CW hole cycles; pinched contours are split into simple loops.
    """
    edges = []
    for p in pieces:
        q = ensure_ccw(p)
        for i in range(len(q)):
            a, b = q[i], q[(i + 1) % len(q)]
            if a != b:
                edges.append((a, b))
    # mutual splitting: cut every edge at every other endpoint lying inside it
    endpoints = set()
    for a, b in edges:
        endpoints.add(a)
        endpoints.add(b)
    split_edges = []
    for a, b in edges:
        cuts = [a, b]
        for p in endpoints:
            if p != a and p != b and on_segment(p, a, b):
                cuts.append(p)
        if b.x != a.x:
            cuts.sort(key=lambda p: p.x, reverse=a.x > b.x)
        else:
            cuts.sort(key=lambda p: p.y, reverse=a.y > b.y)
        for u, v in zip(cuts, cuts[1:]):
            split_edges.append((u, v))
    # cancel opposite pairs
    from collections import Counter
    count = Counter(split_edges)
    for (a, b), c in list(count.items()):
        if c == 0:
            continue
        rc = count.get((b, a), 0)
        k = min(c, rc)
        if k:
            count[(a, b)] -= k
            count[(b, a)] -= k
    pslg = PSLG()
    n_edges = 0
    for (a, b), c in count.items():
        if c > 1:
            raise ValueError("overlapping piece interiors in dissolve")
        if c == 1:
            pslg.add_edge(a, b)
            n_edges += 1
    if n_edges == 0:
        return [], []
    cycles = pslg.faces()
    outers, holes = [], []
    for cyc in cycles:
        for loop in split_pinched(cyc):
            loop = simplify_collinear(loop)
            if len(loop) < 3:
                continue
            if poly_area2(loop) > 0:
                outers.append(loop)
            else:
                holes.append(loop)
    return outers, holes


# ---------------------------------------------------------------------------
# convex piece algebra

def clip_halfplane(poly, a: Pt, b: Pt):
    """Intersection of convex CCW `poly` with the closed half-plane left of ab."""
    from .geom import line_intersection
    out = []
    n = len(poly)
    signs = [orient(a, b, p) for p in poly]
    if all(s >= 0 for s in signs):
        return list(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        sp, sq = signs[i], signs[(i + 1) % n]
        if sp >= 0:
            if not out or out[-1] != p:
                out.append(p)
        if (sp > 0 and sq < 0) or (sp < 0 and sq > 0):
            x = line_intersection(a, b, p, q)
            if not out or out[-1] != x:
                out.append(x)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    if len(out) < 3 or poly_area2(out) <= 0:
        return None
    return out


def convex_intersect(P, Q):
    """Intersection of two convex CCW polygons (None if empty interior)."""
    cur = list(P)
    n = len(Q)
    for i in range(n):
        cur = clip_halfplane(cur, Q[i], Q[(i + 1) % n])
        if cur is None:
            return None
    return cur


def convex_disjoint(P, K) -> bool:
    """Quick separating-edge test: some K edge has all of P strictly outside."""
    n = len(K)
    for i in range(n):
        a, b = K[i], K[(i + 1) % n]
        if all(orient(a, b, p) <= 0 for p in P):
            return True
    m = len(P)
    for i in range(m):
        a, b = P[i], P[(i + 1) % m]
        if all(orient(a, b, q) <= 0 for q in K):
            return True
    return False


def convex_subtract(P, K):
    """P minus convex K as a list of convex pieces (P convex CCW, K convex CCW)."""
    if convex_disjoint(P, K):
        return [list(P)]
    pieces = []
    work = list(P)
    n = len(K)
    for i in range(n):
        a, b = K[i], K[(i + 1) % n]
        outside = clip_halfplane(work, b, a)  # right side of ab
        if outside is not None:
            pieces.append(outside)
        work = clip_halfplane(work, a, b)
        if work is None:
            break
    return pieces


def pieces_area2(pieces):
    return sum(poly_area2(p) for p in pieces)


def subtract_convex_many(pieces, convexes):
    """Subtract a sequence of convex polygons from a set of convex pieces."""
    cur = list(pieces)
    for K in convexes:
        nxt = []
        kb = bbox(K)
        for p in cur:
            pb = bbox(p)
            if pb[0] >= kb[2] or pb[2] <= kb[0] or pb[1] >= kb[3] or pb[3] <= kb[1]:
                nxt.append(p)
            else:
                nxt.extend(convex_subtract(p, K))
        cur = nxt
    return cur


def boundary_of_triangle_set(tris):
    """Boundary cycle(s) of a union of triangles sharing exact edges.

    Much faster than `dissolve` (no partial-overlap splitting); valid whenever
    all triangles come from one triangulation.  Returns (outers, holes).
    """
    from collections import Counter
    count = Counter()
    for t in tris:
        for k in range(3):
            count[(t[k], t[(k + 1) % 3])] += 1
    border = []
    for (a, b), c in count.items():
        c2 = count.get((b, a), 0)
        if c > 1 or c2 > 1:
            raise ValueError("overlapping triangles")
        if c == 1 and c2 == 0:
            border.append((a, b))
    pslg = PSLG()
    for a, b in border:
        pslg.add_edge(a, b)
    outers, holes = [], []
    for cyc in pslg.faces():
        for loop in split_pinched(cyc):
            loop = simplify_collinear(loop)
            if len(loop) < 3:
                continue
            (outers if poly_area2(loop) > 0 else holes).append(loop)
    return outers, holes
