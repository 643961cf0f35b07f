"""Expanding SPM(M) through gates: the bay sweep and the canal merge.

A gate front is the ordered root/vertex sequence SPM(M) induces on a gate.
Bays are decomposed into weighted Voronoi regions by a single boundary sweep
with a stack of vertical rays (the fourteen loop invariants are asserted);
canals are merged from two one-gate diagrams along a dividing curve.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .geom import (Pt, Ray, Segment, WeightedSite, fr, l1_dist, orient, on_segment,
                   weighted_bisector, site_dist, EAST, WEST, NORTH, SOUTH, SE_DIAG,
                   seg_intersection)
from .polygons import (bbox, boundary_location, ensure_ccw, point_in_poly, poly_area2,
                       simplify_collinear, split_polygon, triangulate, TriMesh)
from .freespace import TrapezoidMap, BoundaryScanner
from .polygon_spm import window_cells
from .spm_ocean import Spm, SpmCell, StructInfo


class SweepError(AssertionError):
    """A sweep invariant failed; the trace is attached for diagnosis."""

    def __init__(self, msg, trace=None):
        super().__init__(msg + ("" if not trace else "\n" + "\n".join(trace[-40:])))
        self.trace = trace or []


@dataclass
class GateFront:
    gate: tuple                    # (c, d)
    roots: list                    # WeightedSite r_1..r_k in order c -> d
    vertices: list                 # v_0=c, v_1..v_k=d
    ocean_cells: list              # SPM(M) cell id per root
    labels: list

    @property
    def k(self):
        return len(self.roots)


def _segment_cell_intervals(c: Pt, d: Pt, poly):
    """Sub-intervals of segment cd inside the closed polygon, as (t0, t1)."""
    ts = {fr(0), fr(1)}
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if orient(c, d, a) == 0 and orient(c, d, b) == 0:
            for q in (a, b):
                t = _param(c, d, q)
                if 0 <= t <= 1:
                    ts.add(t)
            continue
        x = seg_intersection(c, d, a, b)
        if x is not None:
            ts.add(_param(c, d, x))
        for q in (a, b):
            if on_segment(q, c, d):
                ts.add(_param(c, d, q))
    ts = sorted(ts)
    out = []
    for t0, t1 in zip(ts, ts[1:]):
        tm = fr(t0 + t1, 2)
        m = Pt(c.x + tm * (d.x - c.x), c.y + tm * (d.y - c.y))
        if point_in_poly(m, poly) > 0:
            out.append((t0, t1))
    return out


def _param(c: Pt, d: Pt, p: Pt):
    if d.x != c.x:
        return fr(p.x - c.x, d.x - c.x)
    return fr(p.y - c.y, d.y - c.y)


def _at_param(c: Pt, d: Pt, t):
    return Pt(c.x + t * (d.x - c.x), c.y + t * (d.y - c.y))


def gate_front(spm_m: Spm, gate) -> GateFront:
    """Ordered roots and SPM(M) vertices on a gate (an edge of the ocean)."""
    c, d = gate
    breaks = {fr(0), fr(1)}
    touching = []
    for i, cell in enumerate(spm_m.cells):
        bb = bbox(cell.polygon)
        lo_x, hi_x = min(c.x, d.x), max(c.x, d.x)
        lo_y, hi_y = min(c.y, d.y), max(c.y, d.y)
        if bb[0] > hi_x or bb[2] < lo_x or bb[1] > hi_y or bb[3] < lo_y:
            continue
        ivs = _segment_cell_intervals(c, d, cell.polygon)
        if ivs:
            touching.append(i)
            for t0, t1 in ivs:
                breaks.add(t0)
                breaks.add(t1)
    ts = sorted(breaks)
    runs = []
    for t0, t1 in zip(ts, ts[1:]):
        tm = fr(t0 + t1, 2)
        m = _at_param(c, d, tm)
        best = None
        for i in touching:
            cell = spm_m.cells[i]
            if point_in_poly(m, cell.polygon) > 0:
                key = (cell.value_at(m), cell.root.x, cell.root.y)
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise AssertionError(f"gate segment not covered by SPM(M) at {m}")
        i = best[1]
        if runs and runs[-1][0] == i:
            runs[-1][2] = t1
        else:
            runs.append([i, t0, t1])
    # merge runs with identical root site (duplicate cells along the gate)
    merged = []
    for i, t0, t1 in runs:
        cell = spm_m.cells[i]
        key = (cell.root, cell.weight)
        if merged and (spm_m.cells[merged[-1][0]].root,
                       spm_m.cells[merged[-1][0]].weight) == key:
            merged[-1][2] = t1
        else:
            merged.append([i, t0, t1])
    roots, verts, cells, labels = [], [_at_param(c, d, merged[0][1])], [], []
    for i, t0, t1 in merged:
        cell = spm_m.cells[i]
        roots.append(WeightedSite(cell.root, cell.weight))
        cells.append(i)
        labels.append(cell.label)
        verts.append(_at_param(c, d, t1))
    front = GateFront((c, d), roots, verts, cells, labels)
    # adjacent roots agree exactly at the shared vertex (it lies on the bisector)
    for j in range(front.k - 1):
        v = front.vertices[j + 1]
        if site_dist(front.roots[j], v) != site_dist(front.roots[j + 1], v):
            raise AssertionError(f"front vertex {v} not equidistant")
    _snap_tie_vertices(front)
    # drop runs emptied by snapping
    keep = [j for j in range(front.k)
            if front.vertices[j] != front.vertices[j + 1]]
    if len(keep) != front.k:
        front = GateFront(front.gate, [front.roots[j] for j in keep],
                          [front.vertices[keep[0]]] + [front.vertices[j + 1] for j in keep],
                          [front.ocean_cells[j] for j in keep],
                          [front.labels[j] for j in keep])
    return front




def tie_quadrants(a: WeightedSite, b: WeightedSite):
    """Two-dimensional tie regions of a weighted pair, as (corner, xdir, ydir).

    Candidates sit at the Rec corners and beyond either site; a quadrant ties
    iff the weighted distances agree on three independent probes inside it.
    """
    pa, pb = a.point, b.point
    K = l1_dist(pa, pb) + abs(a.weight - b.weight) + 1
    xs = sorted({pa.x, pb.x})
    ys = sorted({pa.y, pb.y})
    cands = []
    for cx in xs:
        for cy in ys:
            for dx in (-1, 1):
                for dy in (-1, 1):
                    cands.append((Pt(cx, cy), dx, dy))
    out = []
    seen = set()
    for corner, dx, dy in cands:
        key = (corner, dx, dy)
        if key in seen:
            continue
        seen.add(key)
        probes = [corner, Pt(corner.x + dx * K, corner.y),
                  Pt(corner.x, corner.y + dy * K),
                  Pt(corner.x + dx * K, corner.y + dy * K)]
        if all(site_dist(a, q) == site_dist(b, q) for q in probes):
            out.append((corner, dx, dy))
    return out


def _in_quadrant(p: Pt, quad, strict=False):
    corner, dx, dy = quad
    rx = (p.x - corner.x) * dx
    ry = (p.y - corner.y) * dy
    if strict:
        return rx > 0 and ry > 0
    return rx >= 0 and ry >= 0


def _tie_owner(a: WeightedSite, b: WeightedSite) -> int:
    """0 if a owns two-dimensional ties, 1 for b (heavier, then lex smaller)."""
    if a.weight != b.weight:
        return 0 if a.weight > b.weight else 1
    return 0 if (a.point.x, a.point.y) < (b.point.x, b.point.y) else 1


def _snap_tie_vertices(front: GateFront):
    """Move run boundaries out of 2D tie interiors onto the quadrant boundary.

    Inside a tie quadrant both roots agree exactly, so the boundary position
    is a convention; the sweep needs it on the quadrant boundary (the
    vertical-half-line rule).  The quadrant goes to the tie owner, so the
    boundary snaps to the edge of gate-cap-quadrant nearer the other run.
    """
    c, d = front.gate
    for i in range(front.k - 1):
        v = front.vertices[i + 1]
        ra, rb = front.roots[i], front.roots[i + 1]
        quads = tie_quadrants(ra, rb)
        hit = next((q for q in quads if _in_quadrant(v, q, strict=True)), None)
        if hit is None:
            continue
        corner, dx, dy = hit
        # clip the gate segment to the quadrant (exact parametric clip)
        t0, t1 = fr(0), fr(1)
        for (coord_c, coord_d, lim, sgn) in ((c.x, d.x, corner.x, dx),
                                             (c.y, d.y, corner.y, dy)):
            den = coord_d - coord_c
            num = lim - coord_c
            if den == 0:
                if (coord_c - lim) * sgn < 0:
                    t0, t1 = fr(1), fr(0)
                continue
            t_at = fr(num, den)
            if den * sgn > 0:
                t0 = max(t0, t_at)
            else:
                t1 = min(t1, t_at)
        if t0 > t1:
            continue
        owner = _tie_owner(ra, rb)
        tstar = t1 if owner == 0 else t0
        lo = _param(c, d, front.vertices[i])
        hi = _param(c, d, front.vertices[i + 2]) if i + 2 < len(front.vertices) else fr(1)
        if not (lo < tstar < hi):
            tstar = max(min(tstar, hi), lo)
        front.vertices[i + 1] = _at_param(c, d, tstar)
    # re-assert consistency
    for j in range(front.k - 1):
        v = front.vertices[j + 1]
        if site_dist(front.roots[j], v) != site_dist(front.roots[j + 1], v):
            raise AssertionError("tie snapping broke front consistency")


# ---------------------------------------------------------------------------
# canonical orientation transforms

_TRANSFORMS = [
    ("id", lambda p: p, lambda p: p),
    ("fx", lambda p: Pt(-p.x, p.y), lambda p: Pt(-p.x, p.y)),
    ("fy", lambda p: Pt(p.x, -p.y), lambda p: Pt(p.x, -p.y)),
    ("fxy", lambda p: Pt(-p.x, -p.y), lambda p: Pt(-p.x, -p.y)),
    ("sw", lambda p: Pt(p.y, p.x), lambda p: Pt(p.y, p.x)),
    ("swfx", lambda p: Pt(-p.y, p.x), lambda p: Pt(p.y, -p.x)),
    ("swfy", lambda p: Pt(p.y, -p.x), lambda p: Pt(-p.y, p.x)),
    ("swfxy", lambda p: Pt(-p.y, -p.x), lambda p: Pt(-p.y, -p.x)),
]


def _normalize_front(poly, front: GateFront):
    """Reflect/reverse so the gate is positive-sloped, c above d, bay right of cd."""
    for name, fwd, inv in _TRANSFORMS:
        for rev in (False, True):
            verts = [fwd(v) for v in front.vertices]
            roots = [WeightedSite(fwd(w.point), w.weight) for w in front.roots]
            cells = list(front.ocean_cells)
            labels = list(front.labels)
            if rev:
                verts = list(reversed(verts))
                roots = list(reversed(roots))
                cells = list(reversed(cells))
                labels = list(reversed(labels))
            c, d = verts[0], verts[-1]
            if c.x == d.x or c.y == d.y:
                continue
            slope_pos = (d.x - c.x) * (d.y - c.y) > 0
            if not slope_pos or not (c.y > d.y):
                continue
            tpoly = ensure_ccw([fwd(p) for p in poly])
            # the sweep rays go east/south, so the bay lies southeast of the
            # gate: the CCW cycle must traverse the gate as c -> d
            n = len(tpoly)
            if c not in tpoly:
                continue
            ci = tpoly.index(c)
            if tpoly[(ci + 1) % n] != d:
                continue
            nf = GateFront((c, d), roots, verts, cells, labels)
            return tpoly, nf, (name, fwd, inv, rev)
    raise AssertionError("no canonical transform found for bay")


# ---------------------------------------------------------------------------
# preprocessing: rays, -1 shootings, splits

@dataclass
class SweepRay:
    origin: Pt
    direction: str            # EAST or SOUTH
    lo: int                   # root indices: ray on B(r_lo, r_hi), lo < hi
    hi: int
    tail: list                # polyline from a fixed boundary anchor to origin
    tp: Optional[Pt] = None
    hm_trap: Optional[int] = None

    def key(self):
        return (self.origin, self.direction)


@dataclass
class BaySub:
    polygon: list             # CCW, gate edge (c..d) on the boundary
    front: GateFront
    kept_edges: list          # fixed middle-segment pieces (final SPM edges)


def _ray_for_pair(front: GateFront, i: int):
    """Psi ray through front vertex v_{i+1} for root pair (i, i+1), 0-based."""
    ra, rb = front.roots[i], front.roots[i + 1]
    v = front.vertices[i + 1]
    bis = weighted_bisector(ra, rb)
    if bis.empty:
        raise AssertionError("front roots with empty bisector")
    if bis.degenerate_quadrant_resolved:
        quads = tie_quadrants(ra, rb)
        if any(_in_quadrant(v, q) for q in quads):
            return _degenerate_pair_ray(ra, rb, v, i)
    # locate v on the bisector pieces
    if bis.middle is not None and on_segment(v, bis.middle.a, bis.middle.b):
        a, b = bis.middle.a, bis.middle.b
        lo_end = a if (a.y, a.x) < (b.y, b.x) else b
        if lo_end == v:
            pass
        # the middle must be negative-sloped here (Lemma: r_{i+1} southwest of r_i)
        if (b.x - a.x) * (b.y - a.y) > 0:
            raise AssertionError("front middle segment is positive-sloped")
        ray = bis.ray2 if bis.ray2 is not None and bis.ray2.origin == lo_end else bis.ray1
        if ray is None or ray.origin != lo_end:
            raise AssertionError("bisector has no ray at the bay-side end")
        if ray.direction not in (EAST, SOUTH):
            raise AssertionError(f"front ray direction {ray.direction} not east/south")
        return SweepRay(ray.origin, ray.direction, i, i + 1, [v, ray.origin])
    for ray in (bis.ray1, bis.ray2):
        if ray is not None and ray.contains_point(v):
            if ray.direction not in (EAST, SOUTH):
                # v may sit at the middle's end; fall through to the other ray
                continue
            return SweepRay(v, ray.direction, i, i + 1, [v])
    raise AssertionError(f"front vertex {v} not on bisector of its roots")


def _degenerate_pair_ray(ra: WeightedSite, rb: WeightedSite, v: Pt, i: int):
    """Frontier ray for a pair whose tie region contains a full quadrant.

    The frontier is the quadrant's L-shaped boundary; the piece entering the
    bay from v must head east or south in the canonical frame.
    """
    quads = tie_quadrants(ra, rb)
    hit = next((q for q in quads if _in_quadrant(v, q)), None)
    if hit is None:
        raise AssertionError(f"vertex {v} not on the degenerate tie boundary")
    corner, dx, dy = hit
    hdir = EAST if dx > 0 else WEST
    vdir = NORTH if dy > 0 else SOUTH
    on_h = v.y == corner.y
    on_v = v.x == corner.x
    if on_h and not on_v:
        if hdir == EAST:
            return SweepRay(v, EAST, i, i + 1, [v])
        if vdir != SOUTH:
            raise AssertionError("degenerate frontier has no east/south piece")
        return SweepRay(corner, SOUTH, i, i + 1, [v, corner])
    if on_v and not on_h:
        if vdir == SOUTH:
            return SweepRay(v, SOUTH, i, i + 1, [v])
        if hdir != EAST:
            raise AssertionError("degenerate frontier has no east/south piece")
        return SweepRay(corner, EAST, i, i + 1, [v, corner])
    if on_v and on_h:
        d = EAST if hdir == EAST else (SOUTH if vdir == SOUTH else None)
        if d is None:
            raise AssertionError("degenerate corner frontier not east/south")
        return SweepRay(v, d, i, i + 1, [v])
    raise AssertionError(f"vertex {v} strictly inside a tie quadrant")


def preprocess_bay(poly, front: GateFront, trace=None):
    """Rays, kept middle pieces and independent sub-bays of one gate front.

    Expects canonical orientation (positive-sloped gate, c above d, bay right).
    Returns a list of BaySub plus the kept middle-segment edges.
    """
    trace = trace if trace is not None else []
    k = front.k
    c, d = front.gate
    if k == 1:
        return [BaySub(ensure_ccw(poly), front, [])], []
    rays = [_ray_for_pair(front, i) for i in range(k - 1)]
    # Lemma 7 (origins northeast -> southwest); violation means an SPM(M) bug
    for r1, r2 in zip(rays, rays[1:]):
        if not (r2.origin.x <= r1.origin.x and r2.origin.y <= r1.origin.y):
            raise SweepError(f"ray origins not NE->SW ordered: {r1.origin} {r2.origin}", trace)

    hm = TrapezoidMap(poly, "horizontal")
    kept = []
    # -1-sloped shootings for middle pieces, origins sorted along the gate
    splits = []
    for ri, ray in enumerate(rays):
        if len(ray.tail) < 2:
            continue
        v, o = ray.tail[0], ray.tail[-1]
        tid = hm.locate(v)
        if tid is None:
            raise SweepError(f"middle piece start {v} not in bay", trace)
        reached, stop, _eid, _tid2, steps = hm.walk(v, o, tid)
        trace.append(f"EVENT diag-shoot ray=({v.x},{v.y},se) p*=({v.x},{v.y}) |S|=0")
        if reached:
            kept.append((v, o))
        else:
            kept.append((v, stop))
            splits.append((ri, v, stop))

    subs = []
    if not splits:
        subs.append((poly, 0, k, front.vertices[0], front.vertices[-1], []))
    else:
        work = ensure_ccw(poly)
        lo = 0
        vstart = front.vertices[0]
        for ri, v, z in splits:
            left, right = split_polygon(work, [v, z])
            # the piece whose boundary contains the earlier gate portion
            mid = Pt(fr(vstart.x + v.x, 2), fr(vstart.y + v.y, 2))
            first, rest = (left, right) if point_in_poly(mid, left) > 0 else (right, left)
            subs.append((first, lo, ri + 1, vstart, v, []))
            work, lo, vstart = rest, ri + 1, v
        subs.append((work, lo, k, vstart, front.vertices[-1], []))

    out = []
    for spoly, lo, hi, cc, dd, _ in subs:
        sub_front = GateFront((cc, dd), front.roots[lo:hi],
                              front.vertices[lo:hi + 1],
                              front.ocean_cells[lo:hi], front.labels[lo:hi])
        out.append(BaySub(ensure_ccw(spoly), sub_front,
                          [(v, z) for ri, v, z in splits if lo <= ri < hi]))
    return out, kept


def _clip_cut_to_piece(active, cut):
    """Maximal suffix of the cut polyline lying in the active piece.

    The cut ends on the boundary of `active`; walking backwards from the end,
    stop where the polyline leaves the piece and anchor at the crossing point.
    """
    pts = [p for p in cut]
    out = [pts[-1]]
    n = len(active)
    for a, b in zip(reversed(pts[:-1]), reversed(pts)):
        # segment a->b with b already accepted; does a->b stay in the piece?
        if point_in_poly(a, active) > 0:
            seg_ok = True
            mid = Pt(fr(a.x + b.x, 2), fr(a.y + b.y, 2))
            if point_in_poly(mid, active) == 0:
                seg_ok = False
            if seg_ok:
                out.append(a)
                continue
        # find the entry point on the boundary along a->b
        best = None
        for i in range(n):
            e1, e2 = active[i], active[(i + 1) % n]
            x = seg_intersection(a, b, e1, e2)
            if x is not None and x != b:
                t = _param(a, b, x)
                if best is None or t > best[0]:
                    best = (t, x)
        if best is None:
            raise AssertionError("cut does not re-enter the active piece")
        out.append(best[1])
        break
    return list(reversed(out))


def _carve(active, cut, marker):
    """Split the active polygon along the cut; return (region, rest).

    `marker` is a point on the carved region's boundary (a gate-interval
    midpoint); the cut is clipped to the piece first.
    """
    eff = _clip_cut_to_piece(active, cut)
    eff2 = [eff[0]]
    for p in eff[1:]:
        if p != eff2[-1]:
            eff2.append(p)
    if len(eff2) < 2:
        return None, active
    a, b = split_polygon(active, eff2)
    am = point_in_poly(marker, a)
    bm = point_in_poly(marker, b)
    if am > 0 and bm == 0:
        return a, b
    if bm > 0 and am == 0:
        return b, a
    raise AssertionError(f"carve marker {marker} ambiguous ({am},{bm})")


def _gate_mid(front: GateFront, i: int):
    a, b = front.vertices[i], front.vertices[i + 1]
    return Pt(fr(a.x + b.x, 2), fr(a.y + b.y, 2))


class BaySweep:
    """Algorithm state for one (sub-)bay: Q, S, p*, active region, trace."""

    def __init__(self, sub: BaySub, strict=False, trace=None):
        self.sub = sub
        self.front = sub.front
        self.poly = ensure_ccw(sub.polygon)
        self.strict = strict
        self.trace = trace if trace is not None else []
        self.regions = {}        # root index -> polygon
        self.active = list(self.poly)
        self.push_count = 0
        k = self.front.k
        self.hm = TrapezoidMap(self.poly, "horizontal")
        self.vm = TrapezoidMap(self.poly, "vertical")
        walk_edges, edge_ids, self.gate_first_edge = self._boundary_walk()
        self.scanner = BoundaryScanner(self.vm, walk_edges, edge_ids, "L")
        self.edge_to_walk = {}
        for wi, eid in enumerate(edge_ids):
            self.edge_to_walk.setdefault(eid, wi)
        self.S = []
        self.Q = []
        for i in range(k - 1):
            ray = _ray_for_pair(self.front, i)
            ray.hm_trap = self.hm.locate(ray.origin)
            if ray.hm_trap is None:
                raise SweepError(f"ray origin {ray.origin} outside bay", self.trace)
            self.Q.append(ray)
        self.pstar = None        # scanner stop key of the reference point
        self.pstar_pt = self.front.gate[0]

    def _boundary_walk(self):
        """Directed edges of the boundary from c to d excluding the gate.

        The CCW cycle contains the gate as the edge c -> d, so the walk runs
        the cycle backwards from c (the paper's clockwise scan).
        """
        poly = self.poly
        c, d = self.front.gate
        n = len(poly)
        ci = poly.index(c)
        walk, ids = [], []
        i = ci
        while poly[i] != d:
            j = (i - 1) % n
            walk.append((poly[i], poly[j]))
            ids.append(j)
            i = j
        return walk, ids, ci

    def log(self, kind, ray=None, extra=""):
        o = ray.origin if ray else Pt(0, 0)
        dirn = {EAST: "east", SOUTH: "south"}.get(ray.direction, "-") if ray else "-"
        p = self.pstar_pt
        pp = f"({p.x},{p.y})" if p is not None else "(-,-)"
        self.trace.append(f"EVENT {kind} ray=({o.x},{o.y},{dirn}) p*={pp} |S|={len(self.S)}{extra}")

    # --- invariant checks -------------------------------------------------
    def check_invariants(self, nxt: Optional[SweepRay]):
        S = self.S
        for r in S:
            if r.direction != SOUTH:
                raise SweepError("invariant 1: stack ray not vertical", self.trace)
        for hi_r, lo_r in zip(S[::-1], S[-2::-1]):
            o1, o2 = hi_r.origin, lo_r.origin
            if not (o1.x <= o2.x and o1.y <= o2.y):
                raise SweepError("invariant 2: stack origins not SW->NE", self.trace)
        if nxt is not None and S:
            o, t = nxt.origin, S[-1].origin
            if not (o.x <= t.x and o.y <= t.y):
                raise SweepError("invariant 3: next origin not SW of top", self.trace)
        if nxt is not None and S and S[-1].hi != nxt.lo:
            raise SweepError("invariant 4: stack top pair mismatch", self.trace)
        for r1, r2 in zip(S, S[1:]):
            if r1.hi != r2.lo:
                raise SweepError("invariant 8: stack pair chain broken", self.trace)
        if self.strict:
            roots = self.front.roots
            for r in S:
                # weak form: degenerate quadrant pairs put a root on the ray line
                if not (roots[r.lo].point.x >= r.origin.x):
                    raise SweepError("invariant 6: lo root not right of stack ray", self.trace)
                if not (roots[r.hi].point.x <= r.origin.x):
                    raise SweepError("invariant 6: hi root not left of stack ray", self.trace)

    # --- shooting ---------------------------------------------------------
    def _horizontal_tp(self, ray: SweepRay):
        tp, eid = self.hm.shoot(ray.origin, EAST, ray.hm_trap)
        return tp, eid

    def _scan_targets(self, stop_key):
        """Find targets of unresolved stack rays bottom-to-top up to stop_key."""
        pending = [r for r in self.S if r.tp is None]
        found = self.scanner.scan([r.origin for r in pending], stop=stop_key)
        for r, (tp, eid) in zip(pending, found):
            r.tp = tp
        return len(found), len(pending)

    def _advance_pstar(self, key, label, point=None):
        if self.pstar is not None and key is not None and key < self.pstar:
            raise SweepError("invariant 11-13: reference point moved backwards", self.trace)
        if key is not None:
            self.pstar = key
        if point is not None:
            self.pstar_pt = point

    def _carve_region(self, root_idx, cut):
        marker = _gate_mid(self.front, root_idx)
        region, rest = _carve(self.active, cut, marker)
        if region is None:
            raise SweepError("empty carve", self.trace)
        if root_idx in self.regions:
            raise SweepError(f"root {root_idx} carved twice", self.trace)
        self.regions[root_idx] = region
        self.active = rest

    # --- main loop ----------------------------------------------------------
    def run(self):
        k = self.front.k
        if k == 1:
            self.regions[0] = self.active
            return self.regions
        while self.Q:
            ray = self.Q.pop(0)
            self.check_invariants(ray)
            self.log("consider", ray)
            if ray.direction == SOUTH:
                self.S.append(ray)
                self.push_count += 1
                self.log("push", ray)
                continue
            # horizontal ray
            loc = boundary_location(self.poly, ray.origin)
            c0, d0 = self.front.gate
            if loc is not None and not on_segment(ray.origin, c0, d0):
                # degenerate: origin already on the non-gate boundary
                ray.tp = ray.origin
                self._carve_region(ray.lo, ray.tail)
                self.log("carve", ray, " degenerate")
                continue
            tp, eid = self._horizontal_tp(ray)
            ray.tp = tp
            stop = self.scanner.stop_key(self.edge_to_walk[eid], tp)
            if not self.S:
                self._carve_region(ray.lo, ray.tail + [tp])
                self._advance_pstar(stop, "2a", tp)
                self.log("carve", ray)
                continue
            self._scan_targets(stop)
            top = self.S[-1]
            if top.tp is not None:
                # Subcase 2(b.1): everything in the stack ends before tp(ray)
                self.log("split-procedure", ray)
                while self.S:
                    r = self.S.pop(0)
                    if r.tp is None:
                        raise SweepError("2(b.1): bottom ray target missing", self.trace)
                    self._carve_region(r.lo, r.tail + [r.tp])
                self._carve_region(ray.lo, ray.tail + [ray.tp])
                self._advance_pstar(stop, "2b1", ray.tp)
                continue
            # Subcase 2(b.2): the top stack ray crosses this one
            if top.hi != ray.lo:
                raise SweepError("invariant 4 broken in 2(b.2)", self.trace)
            p1 = Pt(top.origin.x, ray.origin.y)
            cut = list(top.tail) + [top.origin, p1, ray.origin] + list(reversed(ray.tail))
            self._carve_region(ray.lo, cut)
            roots = self.front.roots
            rt, rhi = roots[top.lo], roots[ray.hi]
            q1 = Pt(rt.point.x, rhi.point.y)
            if not (q1.x >= p1.x and q1.y <= p1.y):
                raise SweepError("2(b.2): q1 not southeast of p1", self.trace)
            tstar = min(q1.x - p1.x, p1.y - q1.y)
            p1p = Pt(p1.x + tstar, p1.y - tstar)
            if site_dist(rt, p1p) != site_dist(rhi, p1p):
                raise SweepError("2(b.2): p1' is not on the new bisector", self.trace)
            # walk the -1 piece through the horizontal map
            reached, stopp, _e, endtrap, _steps = self.hm.walk(p1, p1p, ray.hm_trap)
            hit_boundary = (not reached) or boundary_location(self.poly, p1p) is not None
            if not reached:
                z = stopp
            elif boundary_location(self.poly, p1p) is not None:
                z = p1p  # tie with the boundary resolved as a boundary hit
            if hit_boundary:
                zloc = boundary_location(self.poly, z)
                bayp, rest = split_polygon(self.active, [p1, z]) if True else (None, None)
                # piece containing tp(ray) is decomposed by the stack
                pa, pb = bayp, rest
                in_a = point_in_poly(ray.tp, pa) > 0
                bayp, rest = (pa, pb) if in_a else (pb, pa)
                self.active = bayp
                zkey = None
                if zloc is not None and zloc[0] in self.edge_to_walk:
                    zkey = self.scanner.stop_key(self.edge_to_walk[zloc[0]], z)
                self._scan_targets(zkey)
                self.log("boundary-hit", ray)
                while self.S:
                    r = self.S.pop(0)
                    if r.tp is None:
                        raise SweepError("boundary-hit: stack target missing", self.trace)
                    self._carve_region(r.lo, r.tail + [r.tp])
                # remainder of bayp belongs to the top pair's lo root chain;
                # it must be empty now, fold it back if zero area
                if poly_area2(self.active) != 0:
                    # the last region keeps the remainder
                    last = max(self.regions)
                    raise SweepError("boundary-hit: leftover active area", self.trace)
                self.active = rest
                if zkey is not None:
                    self._advance_pstar(zkey, "2b2-z", z)
                continue
            # p1' strictly inside: termination vertical ray or successor ray
            old_top = self.S.pop()
            if p1p.y == q1.y:
                nr = SweepRay(p1p, SOUTH, top.lo, ray.hi, [p1, p1p])
                self.S.append(nr)
                self.push_count += 1
                self._advance_pstar(stop, "2b2-term", ray.tp)
                self.log("termination", nr)
            else:
                nr = SweepRay(p1p, EAST, top.lo, ray.hi, [p1, p1p])
                nr.hm_trap = endtrap
                self.Q.insert(0, nr)
                self._advance_pstar(stop, "2b2-succ", ray.tp)
                self.log("successor", nr)
        # epilogue: drain the stack, remainder is the last root's region
        if self.S:
            self._scan_targets(None)
            self.log("epilogue")
            while self.S:
                r = self.S.pop(0)
                if r.tp is None:
                    raise SweepError("epilogue: stack ray has no target", self.trace)
                self._carve_region(r.lo, r.tail + [r.tp])
        k = self.front.k
        if k - 1 in self.regions:
            if poly_area2(self.active) != 0:
                raise SweepError("leftover active region after all roots", self.trace)
        else:
            self.regions[k - 1] = self.active
        if self.push_count > k:
            raise SweepError(f"stack lifecycle: {self.push_count} pushes > k={k}", self.trace)
        return self.regions


def _region_cells(region, gate_a, gate_b, root: WeightedSite, struct_id, label):
    """Window SPM of one Voronoi region seeded from its root through the gate.

    The root usually lies outside the region (in the ocean); it is joined to
    its gate interval to form a simple polygon, and the resulting cells are
    clipped back to the bay side of the gate line.
    """
    region = ensure_ccw(simplify_collinear(region))
    r = root.point
    if r in region or point_in_poly(r, region) > 0:
        poly = region
        synthetic = False
    else:
        n = len(region)
        k = None
        for i in range(n):
            a, b = region[i], region[(i + 1) % n]
            if on_segment(gate_a, a, b) and on_segment(gate_b, a, b):
                k = i
                break
        if k is None:
            raise AssertionError("region does not contain its gate interval")
        a, b = region[k], region[(k + 1) % n]
        poly = region[:k + 1] + [r] + region[k + 1:]
        if poly_area2(poly) <= poly_area2(region):
            raise AssertionError("root insertion did not extend the region")
        synthetic = True
    wcells, parents, dists = window_cells(poly, root)
    out = []
    for wc in wcells:
        polys = [wc.polygon]
        if synthetic:
            polys = _clip_off_triangle(wc.polygon, gate_a, gate_b, r)
        for cp in polys:
            if poly_area2(cp) > 0:
                out.append(SpmCell(cp, wc.root, wc.weight, wc.parent, struct_id, label))
    return out, parents


def _clip_off_triangle(poly, ga, gb, r):
    """Subtract the synthetic triangle (gate interval + root) from a cell."""
    from .polygons import convex_subtract, dissolve, ensure_ccw
    tri = ensure_ccw([ga, gb, r])
    pieces = []
    for t in triangulate(poly):
        pieces.extend(convex_subtract(list(t), tri))
    outers, holes = dissolve(pieces)
    if holes:
        raise AssertionError("gate clip produced holes")
    return outers


def expand_bay(bay_poly, front: GateFront, spm_m: Spm, strict=False, trace=None,
               regions_only=False):
    """Voronoi regions and SPM cells of one bay; returns (regions, cells, structs).

    regions are in original coordinates, keyed by root index of the front.
    """
    trace = trace if trace is not None else []
    if front.k == 1:
        regions = {0: ensure_ccw(bay_poly)}
        if regions_only:
            return regions, [], [], trace
        cells, structs = _pocket_cells(regions, front, spm_m, 0)
        return regions, cells, structs, trace

    tpoly, tfront, (name, fwd, inv, rev) = _normalize_front(bay_poly, front)
    subs, kept = preprocess_bay(tpoly, tfront, trace)
    regions_t = {}
    base = 0 if not rev else None
    for sub in subs:
        sweep = BaySweep(sub, strict=strict, trace=trace)
        regs = sweep.run()
        # map sub-front root indices back to tfront indices
        off = tfront.roots.index(sub.front.roots[0]) if sub.front.roots else 0
        # identical WeightedSites may repeat; use vertex alignment instead
        off = tfront.vertices.index(sub.front.vertices[0])
        for i, poly in regs.items():
            regions_t[off + i] = poly
    # map back to original orientation and root order
    regions = {}
    k = front.k
    for i, poly in regions_t.items():
        orig_i = (k - 1 - i) if rev else i
        regions[orig_i] = ensure_ccw([inv(p) for p in poly])
    if set(regions) != set(range(k)):
        raise SweepError(f"regions missing: {sorted(regions)} of {k}", trace)
    area = sum(poly_area2(p) for p in regions.values())
    if area != poly_area2(ensure_ccw(bay_poly)):
        raise SweepError("bay region areas do not sum to the bay area", trace)
    if regions_only:
        return regions, [], [], trace
    cells, structs = _pocket_cells(regions, front, spm_m, 0)
    return regions, cells, structs, trace


def _pocket_cells(regions, front: GateFront, spm_m: Spm, struct_base=0):
    cells, structs = [], []
    for i in sorted(regions):
        region = regions[i]
        root = front.roots[i]
        ga, gb = front.vertices[i], front.vertices[i + 1]
        sid = struct_base + len(structs)
        ccells, parents = _region_cells(region, ga, gb, root, sid, front.labels[i])
        structs.append(StructInfo("pocket", parents=parents,
                                  anchor_cell=front.ocean_cells[i],
                                  anchor_root=root.point))
        cells.extend(ccells)
    return cells, structs


# ---------------------------------------------------------------------------
# canals

def expand_canal(canal, spm_m: Spm, strict=False, trace=None):
    """SPM cells over a canal: two one-gate diagrams merged along the dividing curve.

    Both gates are expanded as if the canal were a bay; the two cell fields
    are then clipped against each other exactly (their common boundary is the
    dividing curve), and the curve itself is traced for verification.
    """
    trace = trace if trace is not None else []
    (w1, x), (w2, y) = canal.gates
    f1 = gate_front(spm_m, (w1, x))
    f2 = gate_front(spm_m, (w2, y))
    poly = ensure_ccw(canal.polygon)
    inc = spm_m.prop.incoming if spm_m.prop else {}
    x_in = inc.get(x, True)
    y_in = inc.get(y, True)

    if not y_in and f2.k == 1 and f2.roots[0].point == y:
        _r, cells, structs, _ = expand_bay(canal.polygon, f1, spm_m,
                                           strict=strict, trace=trace)
        return cells, structs, trace
    if not x_in and f1.k == 1 and f1.roots[0].point == x:
        _r, cells, structs, _ = expand_bay(canal.polygon, f2, spm_m,
                                           strict=strict, trace=trace)
        return cells, structs, trace

    _r1, cells1, structs1, _ = expand_bay(canal.polygon, f1, spm_m,
                                          strict=strict, trace=trace)
    _r2, cells2, structs2, _ = expand_bay(canal.polygon, f2, spm_m,
                                          strict=strict, trace=trace)

    # dividing curve seed
    dvals = _terminal_dists(spm_m, canal)
    if x_in and y_in:
        pstar = _balance_point(canal.corridor_path, dvals[x], dvals[y])
    elif not y_in:
        j = next(i for i in range(f2.k) if f2.roots[i].point == y)
        pstar = f2.vertices[j] if j > 0 else f2.vertices[j + 1]
    else:
        j = next(i for i in range(f1.k) if f1.roots[i].point == x)
        pstar = f1.vertices[j] if j > 0 else f1.vertices[j + 1]
    gamma = trace_dividing_curve(poly, cells1, cells2, pstar)
    trace.append(f"EVENT dividing-curve ray=(0,0,-) p*=({pstar.x},{pstar.y}) "
                 f"|S|=0 len={len(gamma)}")

    merged = _dominance_merge(cells1, cells2)
    got = sum(poly_area2(c.polygon) for c, _f in merged)
    want = poly_area2(poly)
    if got != want:
        raise SweepError(f"canal cells area {got} != canal {want}", trace)
    structs = structs1 + structs2
    ns1 = len(structs1)
    out = [SpmCell(c.polygon, c.root, c.weight, c.parent,
                   c.struct + (ns1 if from2 else 0), c.label)
           for c, from2 in merged]
    return out, structs, trace


def _dominance_merge(cells1, cells2):
    """Clip each diagram's cells by the other's field; ties stay with side 1.

    Returns a list of (SpmCell, from_second_diagram) covering the canal exactly.
    """
    tri1 = [(c, [list(t) for t in triangulate(c.polygon)]) for c in cells1]
    tri2 = [(c, [list(t) for t in triangulate(c.polygon)]) for c in cells2]
    from .polygons import convex_intersect, subtract_convex_many, dissolve
    from .geom import Rect
    out = []
    for own, rivals, from2 in ((tri1, tri2, False), (tri2, tri1, True)):
        for c, tris in own:
            pieces = [list(t) for t in tris]
            bb = bbox(c.polygon)
            rect = Rect(Pt(bb[0], bb[1]), Pt(bb[2], bb[3]))
            for c2, tris2 in rivals:
                if not pieces:
                    break
                b2 = bbox(c2.polygon)
                if b2[0] >= bb[2] or b2[2] <= bb[0] or b2[1] >= bb[3] or b2[3] <= bb[1]:
                    continue
                if c2.root == c.root and c2.weight == c.weight:
                    beats = tris2 if from2 else []
                else:
                    from .spm_ocean import beat_pieces
                    raw = beat_pieces(c2.root, c2.weight, c.root, c.weight, rect)
                    beats = []
                    for bp in raw:
                        for t2 in tris2:
                            q = convex_intersect(bp, t2)
                            if q is not None:
                                beats.append(q)
                if beats:
                    pieces = subtract_convex_many(pieces, beats)
            if not pieces:
                continue
            outers, holes = dissolve(pieces)
            if holes:
                raise AssertionError("dominance merge produced a hole")
            for o in outers:
                out.append((SpmCell(o, c.root, c.weight, c.parent, c.struct, c.label),
                            from2))
    return out


def trace_dividing_curve(poly, cells1, cells2, pstar):
    """Walk the equidistance curve of two cell fields from p*.

    Every step midpoint is asserted exactly equidistant; the walk may visit
    each (cell, triangle) pair of the underlying triangulations once.
    """
    meshes1 = {i: TriMesh(triangulate(c.polygon)) for i, c in enumerate(cells1)}
    meshes2 = {i: TriMesh(triangulate(c.polygon)) for i, c in enumerate(cells2)}
    bb = bbox(poly)
    bigspan = (bb[2] - bb[0]) + (bb[3] - bb[1]) + 1

    def bis_polyline(ra, rb):
        bis = weighted_bisector(ra, rb)
        pts = []
        if bis.ray1 is not None:
            pts += [bis.ray1.point_at(2 * bigspan), bis.ray1.origin]
        if bis.middle is not None:
            for q in (bis.middle.a, bis.middle.b):
                if not pts or pts[-1] != q:
                    pts.append(q)
        if bis.ray2 is not None:
            if not pts or pts[-1] != bis.ray2.origin:
                pts.append(bis.ray2.origin)
            pts.append(bis.ray2.point_at(2 * bigspan))
        return pts

    visited = set()
    last_key = [None]

    def field_val(cells, p):
        best = None
        for c in cells:
            if point_in_poly(p, c.polygon) > 0:
                v = c.value_at(p)
                if best is None or v < best:
                    best = v
        return best

    def step(cur, prev, forbidden=None):
        cands1 = [i for i, c in enumerate(cells1) if point_in_poly(cur, c.polygon) > 0]
        cands2 = [i for i, c in enumerate(cells2) if point_in_poly(cur, c.polygon) > 0]
        for i1 in cands1:
            for i2 in cands2:
                ra = WeightedSite(cells1[i1].root, cells1[i1].weight)
                rb = WeightedSite(cells2[i2].root, cells2[i2].weight)
                if ra.point == rb.point and ra.weight == rb.weight:
                    continue
                if site_dist(ra, cur) != site_dist(rb, cur):
                    continue
                pl = bis_polyline(ra, rb)
                for j in range(len(pl) - 1):
                    if not on_segment(cur, pl[j], pl[j + 1]):
                        continue
                    for corner in (pl[j + 1], pl[j]):
                        if corner == cur:
                            jj = j + 2 if corner == pl[j + 1] else j - 1
                            if not (0 <= jj < len(pl)):
                                continue
                            corner = pl[jj]
                        hit = _first_exit(cur, corner,
                                          [cells1[i1].polygon, cells2[i2].polygon, poly])
                        q = hit if hit is not None else corner
                        if q == cur or q == prev:
                            continue
                        if prev is not None and orient(prev, cur, q) == 0:
                            dd = (cur.x - prev.x) * (q.x - cur.x) \
                                + (cur.y - prev.y) * (q.y - cur.y)
                            if dd < 0:
                                continue
                        if forbidden is not None and orient(cur, q, forbidden) == 0:
                            dd = (q.x - cur.x) * (forbidden.x - cur.x) \
                                + (q.y - cur.y) * (forbidden.y - cur.y)
                            if dd > 0:
                                continue
                        mid = Pt(fr(cur.x + q.x, 2), fr(cur.y + q.y, 2))
                        if point_in_poly(mid, cells1[i1].polygon) == 0 or \
                                point_in_poly(mid, cells2[i2].polygon) == 0 or \
                                point_in_poly(mid, poly) == 0:
                            continue
                        v1 = field_val(cells1, mid)
                        v2 = field_val(cells2, mid)
                        if v1 != v2:
                            continue  # equidistant for the pair but not the fields
                        t1 = meshes1[i1].locate(mid)
                        t2 = meshes2[i2].locate(mid)
                        key = (i1, t1, i2, t2)
                        if key in visited and key != last_key[0]:
                            raise AssertionError("dividing curve revisited a triangle")
                        visited.add(key)
                        last_key[0] = key
                        return q
        return None

    def walk(forbidden=None):
        pts = [pstar]
        prev = None
        cur = pstar
        guard = sum(len(m.tris) for m in meshes1.values()) \
            + sum(len(m.tris) for m in meshes2.values()) + 16
        while True:
            guard -= 1
            if guard < 0:
                raise AssertionError("dividing curve trace diverged")
            q = step(cur, prev, forbidden if cur == pstar else None)
            if q is None:
                break
            pts.append(q)
            if boundary_location(poly, q) is not None:
                break
            prev, cur = cur, q
        return pts

    on_bd = boundary_location(poly, pstar) is not None
    leg1 = walk()
    if on_bd or len(leg1) < 2:
        return leg1
    leg2 = walk(forbidden=leg1[1])
    return list(reversed(leg2))[:-1] + leg1


def _terminal_dists(spm_m: Spm, canal):
    x = canal.corridor_path[0]
    y = canal.corridor_path[-1]
    prop = spm_m.prop
    out = {}
    for t in (x, y):
        if prop is not None and t in prop.sites:
            i = prop.sites.index(t)
            out[t] = prop.d[i]
        else:
            val = spm_m.distance_at(t)
            if val is None:
                raise AssertionError(f"terminal {t} not reachable in SPM(M)")
            out[t] = val
    return out


def _balance_point(path, dx, dy):
    """Point p* on the corridor path with dx + len(x..p*) = dy + len(p*..y)."""
    total = sum(l1_dist(a, b) for a, b in zip(path, path[1:]))
    target = fr(total + dy - dx, 2)
    if target < 0 or target > total:
        raise AssertionError("no balance point on the corridor path")
    acc = fr(0)
    for a, b in zip(path, path[1:]):
        step = l1_dist(a, b)
        if acc + step >= target:
            rem = target - acc
            t = fr(rem, step) if step else fr(0)
            return Pt(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
        acc += step
    return path[-1]


def _first_exit(cur, far, polys):
    """Nearest boundary crossing of segment cur->far against several polygons."""
    best = None
    for poly in polys:
        n = len(poly)
        for i in range(n):
            a, b = poly[i], poly[(i + 1) % n]
            if orient(cur, far, a) == 0 and orient(cur, far, b) == 0:
                cands = [q for q in (a, b) if on_segment(q, cur, far)]
            else:
                x = seg_intersection(cur, far, a, b)
                cands = [x] if x is not None else []
            for x in cands:
                if x != cur:
                    t = _param(cur, far, x)
                    if t > 0 and (best is None or t < best[0]):
                        best = (t, x)
    return best[1] if best else None


def assemble_spm(spm_m: Spm, pocket_results) -> Spm:
    """Stitch SPM(M) and all bay/canal maps into one subdivision over F.

    Pocket cells carry struct ids local to their expansion (starting at 0);
    they are re-based onto the combined struct table here.
    """
    cells = list(spm_m.cells)
    structs = list(spm_m.structs)
    for pcells, pstructs in pocket_results:
        base = len(structs)
        structs.extend(pstructs)
        for c in pcells:
            cells.append(SpmCell(c.polygon, c.root, c.weight, c.parent,
                                 base + c.struct, c.label))
    return Spm(cells, structs, list(spm_m.pseudo_cells), prop=spm_m.prop,
               cores=spm_m.cores, ears=spm_m.ears, pieces=spm_m.pieces)


def build_spm_free_space(cs, spm_m: Spm = None, strict=False):
    """SPM(F): the ocean map expanded into every bay and canal."""
    from .spm_ocean import build_spm_ocean
    if spm_m is None:
        spm_m = build_spm_ocean(cs)
    results = []
    traces = []
    for bay in cs.bays:
        front = gate_front(spm_m, bay.gate)
        _regions, cells, structs, trace = expand_bay(bay.polygon, front, spm_m,
                                                     strict=strict)
        results.append((cells, structs))
        traces.append(trace)
    for canal in cs.canals:
        cells, structs, trace = expand_canal(canal, spm_m, strict=strict)
        results.append((cells, structs))
        traces.append(trace)
    spm_f = assemble_spm(spm_m, results)
    spm_f.traces = traces
    dom = cs.domain
    r = dom.rect
    free2 = (r.xmax - r.xmin) * (r.ymax - r.ymin) * 2 \
        - sum(poly_area2(o) for o in dom.obstacles)
    got = spm_f.area2()
    if got != free2:
        raise ArithmeticError(f"SPM(F) area {got} != free space {free2}")
    return spm_f
