"""Free-space triangulation and axis-parallel trapezoidal visibility maps.

The trapezoid map of a simple polygon has one maximal axis-parallel diagonal
through each vertex; its faces support O(1) directional ray shooting and the
batched target-sorted shooting used by the bay sweep.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .geom import Pt, Rect, fr, orient, on_segment, EAST, WEST, NORTH, SOUTH, SE_DIAG, Ray
from .polygons import TriMesh, triangulate, triangulation_diagonals, point_in_poly, poly_area2


@dataclass
class Triangulation:
    mesh: TriMesh
    cycles: list                  # outer (CCW) then holes (CW) as triangulated
    bridges: list                 # monotone chords joining distinct cycles
    extra_vertices: list

    @property
    def triangles(self):
        return self.mesh.tris

    def dual_degree(self, i):
        return len(self.mesh.neighbors[i])


def triangulate_free_space(domain, extra_vertices=()) -> Triangulation:
    """Triangulate closure(rect) minus obstacle interiors.

    extra_vertices (e.g. the source treated as a point obstacle) are inserted
    afterwards by splitting their containing triangles, so they appear as
    triangulation vertices.
    """
    outer = domain.rect.corners()
    diagonals, cycles = triangulation_diagonals(outer, domain.obstacles)
    tris = triangulate(outer, domain.obstacles)

    cyc_of = {}
    for ci, cyc in enumerate(cycles):
        for v in cyc:
            cyc_of[v] = ci
    bridges = [(u, v) for u, v in diagonals if cyc_of.get(u) != cyc_of.get(v)]

    inserted = []
    for p in extra_vertices:
        vertset = {v for t in tris for v in t}
        if p in vertset:
            inserted.append(p)
            continue
        new_tris = []
        split_done = False
        for t in tris:
            if split_done or point_in_poly(p, list(t)) == 0:
                new_tris.append(t)
                continue
            a, b, c = t
            if on_segment(p, a, b):
                new_tris += [(a, p, c), (p, b, c)]
            elif on_segment(p, b, c):
                new_tris += [(b, p, a), (p, c, a)]
            elif on_segment(p, c, a):
                new_tris += [(c, p, b), (p, a, b)]
            else:
                new_tris += [(p, a, b), (p, b, c), (p, c, a)]
            # an edge point splits both incident triangles; keep scanning
            split_done = not (on_segment(p, a, b) or on_segment(p, b, c) or on_segment(p, c, a))
        tris = [t for t in new_tris if poly_area2(list(t)) != 0]
        inserted.append(p)
    mesh = TriMesh(tris)
    return Triangulation(mesh, cycles, bridges, inserted)


# ---------------------------------------------------------------------------
# trapezoid maps

def _transpose(p: Pt) -> Pt:
    return Pt(p.y, p.x)


class _TEdge:
    __slots__ = ("eid", "up", "dn")

    def __init__(self, eid, up, dn):
        self.eid = eid
        self.up = up
        self.dn = dn

    def x_at(self, y):
        if self.up.y == self.dn.y:
            raise ArithmeticError("horizontal edge in trapezoid sweep")
        return self.up.x + fr(y - self.up.y, self.dn.y - self.up.y) * (self.dn.x - self.up.x)

    def west_of(self, p: Pt) -> bool:
        """Edge strictly west of p at p.y (edge directed downward)."""
        return orient(self.up, self.dn, p) > 0

    def east_of(self, p: Pt) -> bool:
        return orient(self.up, self.dn, p) < 0


class _WalkStuck(Exception):
    pass


class Trapezoid:
    __slots__ = ("tid", "left", "right", "top_y", "bot_y", "above", "below")

    def __init__(self, tid, left, right, top_y):
        self.tid = tid
        self.left = left
        self.right = right
        self.top_y = top_y
        self.bot_y = None
        self.above = []
        self.below = []

    def corners(self):
        lt, rt = self.left.x_at(self.top_y), self.right.x_at(self.top_y)
        lb, rb = self.left.x_at(self.bot_y), self.right.x_at(self.bot_y)
        return [Pt(lb, self.bot_y), Pt(rb, self.bot_y), Pt(rt, self.top_y), Pt(lt, self.top_y)]

    def area2(self):
        lt, rt = self.left.x_at(self.top_y), self.right.x_at(self.top_y)
        lb, rb = self.left.x_at(self.bot_y), self.right.x_at(self.bot_y)
        return (self.top_y - self.bot_y) * ((rt - lt) + (rb - lb))

    def contains(self, p: Pt) -> bool:
        if not (self.bot_y <= p.y <= self.top_y):
            return False
        return not self.left.east_of(p) and not self.right.west_of(p)


class TrapezoidMap:
    """Axis-parallel visibility map of a simple polygon.

    axis='horizontal' uses horizontal diagonals (supports east/west shooting);
    axis='vertical' uses vertical diagonals (supports north/south shooting).
    """

    def __init__(self, polygon, axis="horizontal"):
        self.axis = axis
        self.polygon = list(polygon)
        pts = self.polygon if axis == "horizontal" else [_transpose(p) for p in self.polygon]
        self.traps, self.vertex_diagonals = _sweep_traps(pts)
        # edge id i corresponds to polygon edge polygon[i] -> polygon[i+1]

    def _fwd(self, p: Pt) -> Pt:
        return p if self.axis == "horizontal" else _transpose(p)

    def _back(self, p: Pt) -> Pt:
        return p if self.axis == "horizontal" else _transpose(p)

    def __len__(self):
        return len(self.traps)

    def area2(self):
        return sum(t.area2() for t in self.traps)

    def locate(self, p: Pt):
        q = self._fwd(p)
        for t in self.traps:
            if t.contains(q):
                return t.tid
        return None

    def shoot(self, p: Pt, direction: str, tid=None):
        """Target point of an axis ray from p; p must lie in trapezoid tid if given.

        Directions east/west need a horizontal map; north/south a vertical map.
        Returns (target_point, polygon_edge_id).
        """
        dmap = {("horizontal", EAST): "R", ("horizontal", WEST): "L",
                ("vertical", NORTH): "R", ("vertical", SOUTH): "L"}
        side = dmap.get((self.axis, direction))
        if side is None:
            raise ValueError(f"map axis {self.axis} cannot shoot {direction}")
        q = self._fwd(p)
        if tid is None:
            tid = self.locate(p)
            if tid is None:
                raise ValueError(f"shoot origin {p} outside polygon")
        t = self.traps[tid]
        e = t.right if side == "R" else t.left
        hit = Pt(e.x_at(q.y), q.y)
        return self._back(hit), e.eid

    def locate_all(self, p: Pt):
        q = self._fwd(p)
        return [t.tid for t in self.traps if t.contains(q)]

    def walk(self, a: Pt, b: Pt, tid=None):
        """Walk the segment a->b through the map.

        Returns (reached_b, stop_point, edge_id_or_None, final_tid, steps).
        stop_point is b if reached, else the first boundary intersection.
        A starting trapezoid hint may be given; when the segment immediately
        leaves it (origin on a shared wall) the other candidates are tried.
        """
        cands = []
        if tid is not None:
            cands.append(tid)
        cands += [t for t in self.locate_all(a) if t not in cands]
        if not cands:
            raise ValueError(f"walk origin {a} outside polygon")
        last_err = None
        for start in cands:
            try:
                return self._walk_from(a, b, start)
            except _WalkStuck as e:
                last_err = e
        raise RuntimeError(f"trapezoid walk stuck from {a} toward {b}: {last_err}")

    def _walk_from(self, a: Pt, b: Pt, tid):
        A, B = self._fwd(a), self._fwd(b)
        steps = 0
        cur = self.traps[tid]
        pos = A
        guard = len(self.traps) * 4 + 8
        first = True
        while True:
            steps += 1
            if steps > guard:
                raise RuntimeError("trapezoid walk diverged")
            if cur.contains(B):
                return True, b, None, cur.tid, steps
            try:
                exit_pt, kind = _trap_exit(cur, pos, B)
            except RuntimeError:
                if first:
                    raise _WalkStuck(f"no exit from trapezoid {cur.tid}")
                raise
            first = False
            if kind in ("L", "R"):
                e = cur.left if kind == "L" else cur.right
                return False, self._back(exit_pt), e.eid, cur.tid, steps
            nxts = cur.below if kind == "B" else cur.above
            nxt = None
            for t2id in nxts:
                if self.traps[t2id].contains(exit_pt):
                    nxt = t2id
                    break
            if nxt is None:
                # crossing exactly at a diagonal endpoint that meets the boundary
                return False, self._back(exit_pt), None, cur.tid, steps
            cur = self.traps[nxt]
            pos = exit_pt

    def trapezoids_bounded_by(self, side: str):
        """Map polygon edge id -> trapezoid ids having it as the given bound.

        side='target' gives the bound hit by south rays (vertical map) or east
        rays (horizontal map): the 'L' side of the sweep space for south.
        """
        out = {}
        for t in self.traps:
            e = t.left if side == "L" else t.right
            out.setdefault(e.eid, []).append(t.tid)
        return out


def _trap_exit(trap, frm, to):
    """Where segment frm->to leaves the trapezoid (sweep space)."""
    best_t = None
    best = None
    kind = None
    dx, dy = to.x - frm.x, to.y - frm.y
    # bottom / top
    for yy, kk in ((trap.bot_y, "B"), (trap.top_y, "T")):
        if dy == 0:
            continue
        t = fr(yy - frm.y, dy)
        if 0 <= t <= 1:
            p = Pt(frm.x + t * dx, yy)
            if p == frm:
                continue
            if not trap.left.east_of(p) and not trap.right.west_of(p):
                if best_t is None or t < best_t:
                    best_t, best, kind = t, p, kk
    for e, kk in ((trap.left, "L"), (trap.right, "R")):
        den = dx * (e.dn.y - e.up.y) - dy * (e.dn.x - e.up.x)
        if den == 0:
            continue
        t = fr((e.up.x - frm.x) * (e.dn.y - e.up.y) - (e.up.y - frm.y) * (e.dn.x - e.up.x), den)
        if 0 <= t <= 1:
            p = Pt(frm.x + t * dx, frm.y + t * dy)
            if p == frm:
                continue
            if trap.bot_y <= p.y <= trap.top_y:
                if best_t is None or t < best_t:
                    best_t, best, kind = t, p, kk
    if best is None:
        raise RuntimeError("segment does not exit trapezoid")
    return best, kind


def _slope_left_down(d1, d2) -> bool:
    """Among two downward directions, is d1 left of d2 just below the apex?"""
    return d1[0] * (-d2[1]) < d2[0] * (-d1[1])


def _sweep_traps(poly):
    """Trapezoids of the horizontal visibility map (sweep space).

    Descending sweep with a full interval rebuild at every vertex level; this
    handles several vertices per level and horizontal boundary edges (which
    contribute no walls), as happens along the bounding rectangle.
    """
    n = len(poly)
    walls = []
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if a.y == b.y:
            continue  # flat edge: boundary at a single level, never a wall
        up, dn = (a, b) if a.y > b.y else (b, a)
        walls.append(_TEdge(i, up, dn))

    byy = {}
    for v in poly:
        byy.setdefault(v.y, set()).add(v.x)
    levels = sorted(byy, reverse=True)
    start_at = {}
    end_at = {}
    for w in walls:
        start_at.setdefault(w.up.y, []).append(w)
        end_at.setdefault(w.dn.y, []).append(w)

    traps = []
    open_traps = []
    diagonals = {i: None for i in range(n)}

    def x_of(w, y):
        return w.x_at(y)

    for y in levels:
        ev_xs = sorted(byy[y])
        ending = set(id(w) for w in end_at.get(y, ()))
        closed = []
        survive = []
        for t in open_traps:
            xl, xr = x_of(t.left, y), x_of(t.right, y)
            affected = id(t.left) in ending or id(t.right) in ending or \
                any(xl <= x <= xr for x in ev_xs)
            if affected:
                t.bot_y = y
                closed.append((t, xl, xr))
            else:
                survive.append(t)
        pool = []
        for t, xl, xr in closed:
            for w in (t.left, t.right):
                if id(w) not in ending:
                    pool.append(w)
        pool.extend(start_at.get(y, ()))
        if len(pool) % 2:
            raise RuntimeError("trapezoid sweep wall parity broken")

        def key(w):
            x = x_of(w, y)
            d = (w.dn.x - (w.up.x if w.up.y == y else x),
                 w.dn.y - y)
            # tie-break walls sharing the level point by downward slope
            return (x, _SlopeKey(w, y))

        pool.sort(key=key)
        opened = []
        for j in range(0, len(pool), 2):
            t = Trapezoid(len(traps), pool[j], pool[j + 1], y)
            traps.append(t)
            opened.append(t)
        # adjacency across this level by x-overlap
        for t2 in opened:
            lo2, hi2 = x_of(t2.left, y), x_of(t2.right, y)
            for t1, xl, xr in closed:
                lo, hi = max(lo2, xl), min(hi2, xr)
                if lo < hi:
                    t1.below.append(t2.tid)
                    t2.above.append(t1.tid)
        open_traps = survive + opened
    if open_traps:
        raise RuntimeError("trapezoid sweep left open intervals")

    # per-vertex diagonal spans from the trapezoids closed at each level
    for i, v in enumerate(poly):
        lo = hi = v.x
        for t in traps:
            if t.bot_y == v.y or t.top_y == v.y:
                yy = v.y
                xl, xr = t.left.x_at(yy), t.right.x_at(yy)
                if xl <= v.x <= xr:
                    lo, hi = min(lo, xl), max(hi, xr)
        diagonals[i] = (Pt(lo, v.y), Pt(hi, v.y))
    return traps, diagonals


class _SlopeKey:
    """Orders walls sharing an x position by their downward slope."""

    __slots__ = ("w", "y")

    def __init__(self, w, y):
        self.w = w
        self.y = y

    def _dir(self):
        w, y = self.w, self.y
        if w.up.y == y:
            return (w.dn.x - w.up.x, w.dn.y - w.up.y)
        # continuing wall: direction below the level
        return (w.dn.x - w.up.x, w.dn.y - w.up.y)

    def __lt__(self, other):
        return _slope_left_down(self._dir(), other._dir())

    def __eq__(self, other):
        return self._dir() == other._dir()


def trapezoid_map(polygon, axis="horizontal") -> TrapezoidMap:
    return TrapezoidMap(polygon, axis)


# ---------------------------------------------------------------------------
# batched target-sorted ray shooting

_SIDE_FOR = {("vertical", SOUTH): "L", ("vertical", NORTH): "R",
             ("horizontal", EAST): "R", ("horizontal", WEST): "L"}


class BoundaryScanner:
    """Resumable scan over a boundary edge walk with a trapezoid map.

    `walk_edges` are directed (a, b) edges in the promised target order with
    their polygon edge ids; `side` is the sweep-space wall hit by the rays.
    The cursor only advances; `checks` audits the linear-work contract.
    """

    def __init__(self, tmap: TrapezoidMap, walk_edges, edge_ids, side):
        self.tmap = tmap
        self.side = side
        by_side = tmap.trapezoids_bounded_by(side)
        self.asc = []
        self.slots = []          # (walk_idx, directed_entry_key, tid)
        for wi, ((a, b), eid) in enumerate(zip(walk_edges, edge_ids)):
            A, B = tmap._fwd(a), tmap._fwd(b)
            asc = B.y > A.y
            self.asc.append(asc)
            keyed = []
            for tid in by_side.get(eid, []):
                t = tmap.traps[tid]
                keyed.append(((t.bot_y if asc else -t.top_y), tid))
            for entry, tid in sorted(keyed):
                self.slots.append((wi, entry, tid))
        self.cursor = 0
        self.checks = 0

    def stop_key(self, walk_idx, point):
        """Position key of a boundary point on walk edge walk_idx."""
        q = self.tmap._fwd(point)
        return (walk_idx, q.y if self.asc[walk_idx] else -q.y)

    def scan(self, origins, stop=None):
        """Targets for a target-sorted prefix of `origins`; halts at `stop`.

        Returns a list of (target, edge_id), one per origin whose target lies
        before the stop position.  With stop=None an unfound origin raises a
        sortedness-violation diagnostic.
        """
        out = []
        for o in origins:
            q = self.tmap._fwd(o)
            found = None
            while self.cursor < len(self.slots):
                wi, entry, tid = self.slots[self.cursor]
                if stop is not None and (wi, entry) > stop:
                    return out
                self.checks += 1
                t = self.tmap.traps[tid]
                if t.contains(q):
                    wall = t.left if self.side == "L" else t.right
                    hit = Pt(wall.x_at(q.y), q.y)
                    hit_key = (wi, hit.y if self.asc[wi] else -hit.y)
                    if stop is not None and hit_key > stop:
                        return out
                    found = (self.tmap._back(hit), wall.eid)
                    break
                self.cursor += 1
            if found is None:
                if stop is not None:
                    return out
                raise ValueError(f"sortedness violation: no trapezoid ahead contains {o}")
            out.append(found)
        return out


def clockwise_walk(poly, order_hint):
    """Directed boundary edges walking clockwise from order_hint (a vertex)."""
    n = len(poly)
    start = poly.index(order_hint)
    walk_edges, edge_ids = [], []
    if poly_area2(poly) > 0:  # CCW polygon: clockwise is reversed order
        for k in range(n):
            i = (start - k) % n
            walk_edges.append((poly[i], poly[(i - 1) % n]))
            edge_ids.append((i - 1) % n)
    else:
        for k in range(n):
            i = (start + k) % n
            walk_edges.append((poly[i], poly[(i + 1) % n]))
            edge_ids.append(i)
    return walk_edges, edge_ids


def batched_target_points(tmap: TrapezoidMap, rays, order_hint=None):
    """Target points of parallel target-sorted rays (batched linear shooting).

    Axis rays must match the map's axis (south/north with a vertical map,
    east/west with a horizontal map); slope -1 rays are traced by trapezoid
    walking on a horizontal map.  Scan work is audited in
    `tmap.last_scan_checks`.
    """
    if not rays:
        tmap.last_scan_checks = 0
        return []
    dirs = {r.direction for r in rays}
    if len(dirs) > 1:
        raise ValueError("batched rays must be parallel")
    d = dirs.pop()
    poly = tmap.polygon
    if d == SE_DIAG:
        if tmap.axis != "horizontal":
            raise ValueError("slope -1 shooting needs a horizontal map")
        checks = 0
        out = []
        for r in rays:
            tid = tmap.locate(r.origin)
            if tid is None:
                raise ValueError(f"ray origin {r.origin} outside polygon")
            far = Pt(r.origin.x + _diag_span(poly), r.origin.y - _diag_span(poly))
            reached, stop, _eid, _, steps = tmap.walk(r.origin, far, tid)
            checks += steps
            if reached:
                raise RuntimeError("slope -1 ray failed to reach the boundary")
            out.append(stop)
        tmap.last_scan_checks = checks
        return out

    side = _SIDE_FOR.get((tmap.axis, d))
    if side is None:
        raise ValueError(f"map axis {tmap.axis} cannot batch-shoot {d}")
    if order_hint is None:
        order_hint = poly[0]
    walk_edges, edge_ids = clockwise_walk(poly, order_hint)
    sc = BoundaryScanner(tmap, walk_edges, edge_ids, side)
    res = sc.scan([r.origin for r in rays])
    tmap.last_scan_checks = sc.checks
    return [p for p, _ in res]


def _diag_span(poly):
    xs = [p.x for p in poly]
    ys = [p.y for p in poly]
    return (max(xs) - min(xs)) + (max(ys) - min(ys)) + 1
