"""Exact planar primitives: rational points, segments, rays, L1 metric, weighted bisectors.

Coordinates are Python ints or ``fractions.Fraction``; arithmetic never touches
floats, so every predicate and every constructed point is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional


class Pt(NamedTuple):
    x: Fraction
    y: Fraction

    def __repr__(self):
        return f"({self.x},{self.y})"


def fr(a, b=1) -> Fraction:
    """Exact quotient a/b (never use `/` on coordinates)."""
    return Fraction(a, b)


def l1_dist(p: Pt, q: Pt):
    """|p.x-q.x| + |p.y-q.y|, exact."""
    return abs(p.x - q.x) + abs(p.y - q.y)


def l22(p: Pt, q: Pt):
    """Squared Euclidean distance, exact."""
    dx, dy = p.x - q.x, p.y - q.y
    return dx * dx + dy * dy


def orient(p: Pt, q: Pt, r: Pt) -> int:
    """Sign of the cross product (q-p) x (r-p): +1 left turn, -1 right, 0 collinear."""
    v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
    return (v > 0) - (v < 0)


def cross(o: Pt, a: Pt, b: Pt):
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def dot(o: Pt, a: Pt, b: Pt):
    return (a.x - o.x) * (b.x - o.x) + (a.y - o.y) * (b.y - o.y)


def on_segment(p: Pt, a: Pt, b: Pt) -> bool:
    """True if p lies on the closed segment ab."""
    if orient(a, b, p) != 0:
        return False
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


class Segment(NamedTuple):
    a: Pt
    b: Pt

    @property
    def degenerate(self) -> bool:
        return self.a == self.b


def seg_point_at_x(a: Pt, b: Pt, x):
    """Point on line ab at abscissa x (requires a.x != b.x)."""
    t = fr(x - a.x, b.x - a.x)
    return Pt(fr(x), a.y + t * (b.y - a.y))


def seg_point_at_y(a: Pt, b: Pt, y):
    t = fr(y - a.y, b.y - a.y)
    return Pt(a.x + t * (b.x - a.x), fr(y))


def line_intersection(a: Pt, b: Pt, c: Pt, d: Pt) -> Optional[Pt]:
    """Intersection point of lines ab and cd; None if parallel."""
    d1x, d1y = b.x - a.x, b.y - a.y
    d2x, d2y = d.x - c.x, d.y - c.y
    den = d1x * d2y - d1y * d2x
    if den == 0:
        return None
    t = fr((c.x - a.x) * d2y - (c.y - a.y) * d2x, den)
    return Pt(a.x + t * d1x, a.y + t * d1y)


def segments_cross(a: Pt, b: Pt, c: Pt, d: Pt) -> bool:
    """True iff closed segments ab and cd share at least one point."""
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_segment(c, a, b):
        return True
    if o2 == 0 and on_segment(d, a, b):
        return True
    if o3 == 0 and on_segment(a, c, d):
        return True
    if o4 == 0 and on_segment(b, c, d):
        return True
    return False


def segments_cross_properly(a: Pt, b: Pt, c: Pt, d: Pt) -> bool:
    """True iff ab and cd intersect at a single point interior to both."""
    return (orient(a, b, c) * orient(a, b, d) < 0
            and orient(c, d, a) * orient(c, d, b) < 0)


def seg_intersection(a: Pt, b: Pt, c: Pt, d: Pt) -> Optional[Pt]:
    """Crossing point of segments ab and cd when they meet in exactly one point.

    Returns None for disjoint segments; collinear overlaps are rejected with
    ValueError (callers in this package never produce them knowingly).
    """
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 == 0 and o2 == 0:
        # collinear: accept only single-point touch
        pts = [p for p in (c, d) if on_segment(p, a, b)]
        pts += [p for p in (a, b) if on_segment(p, c, d)]
        uniq = set(pts)
        if not uniq:
            return None
        if len(uniq) == 1:
            return next(iter(uniq))
        raise ValueError("collinear overlapping segments")
    if (o1 * o2 > 0) or (o3 * o4 > 0):
        return None
    p = line_intersection(a, b, c, d)
    assert p is not None
    return p


class Rect(NamedTuple):
    """Axis-aligned rectangle spanned by two diagonal corners."""
    p1: Pt
    p2: Pt

    @property
    def xmin(self):
        return min(self.p1.x, self.p2.x)

    @property
    def xmax(self):
        return max(self.p1.x, self.p2.x)

    @property
    def ymin(self):
        return min(self.p1.y, self.p2.y)

    @property
    def ymax(self):
        return max(self.p1.y, self.p2.y)

    @property
    def degenerate(self) -> bool:
        return self.xmin == self.xmax or self.ymin == self.ymax

    def contains(self, p: Pt, closed: bool = True) -> bool:
        if closed:
            return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax
        return self.xmin < p.x < self.xmax and self.ymin < p.y < self.ymax

    def corners(self):
        return [Pt(self.xmin, self.ymin), Pt(self.xmax, self.ymin),
                Pt(self.xmax, self.ymax), Pt(self.xmin, self.ymax)]


EAST, WEST, NORTH, SOUTH, SE_DIAG = "east", "west", "north", "south", "se_diag"
_DIRVECS = {EAST: (1, 0), WEST: (-1, 0), NORTH: (0, 1), SOUTH: (0, -1), SE_DIAG: (1, -1)}


class Ray(NamedTuple):
    """Axis-parallel (or slope -1) half-line."""
    origin: Pt
    direction: str

    def vec(self):
        return _DIRVECS[self.direction]

    def point_at(self, t):
        dx, dy = _DIRVECS[self.direction]
        return Pt(self.origin.x + t * dx, self.origin.y + t * dy)

    def hit_segment(self, a: Pt, b: Pt) -> Optional[Pt]:
        """First intersection of this ray with closed segment ab, or None."""
        dx, dy = _DIRVECS[self.direction]
        o = self.origin
        far = Pt(o.x, o.y)
        # use a parametric clip: solve o + t*(dx,dy) on segment
        den = dx * (b.y - a.y) - dy * (b.x - a.x)
        if den == 0:
            # parallel: collinear touch handled by endpoints check
            hits = [p for p in (a, b) if self.contains_point(p)]
            if not hits:
                return None
            return min(hits, key=lambda p: abs(p.x - o.x) + abs(p.y - o.y))
        t = fr((a.x - o.x) * (b.y - a.y) - (a.y - o.y) * (b.x - a.x), den)
        if t < 0:
            return None
        p = Pt(o.x + t * dx, o.y + t * dy)
        if on_segment(p, a, b):
            return p
        return None

    def contains_point(self, p: Pt) -> bool:
        dx, dy = _DIRVECS[self.direction]
        rx, ry = p.x - self.origin.x, p.y - self.origin.y
        if rx * dy != ry * dx:
            return False
        return rx * dx + ry * dy >= 0


class WeightedSite(NamedTuple):
    """Additively weighted point: weight is the path length already accumulated."""
    point: Pt
    weight: Fraction


def site_dist(s: WeightedSite, q: Pt):
    return s.weight + l1_dist(s.point, q)


@dataclass(frozen=True)
class Bisector:
    """Weighted L1 bisector decomposed into a middle segment and up to two rays.

    Pieces may individually be absent.  ``degenerate_quadrant_resolved`` is set
    when a two-dimensional tie region was collapsed to a boundary half-line.
    """
    middle: Optional[Segment]
    ray1: Optional[Ray]
    ray2: Optional[Ray]
    degenerate_quadrant_resolved: bool = False
    empty: bool = False

    def pieces(self):
        out = []
        if self.ray1 is not None:
            out.append(self.ray1)
        if self.middle is not None:
            out.append(self.middle)
        if self.ray2 is not None:
            out.append(self.ray2)
        return out


def weighted_bisector(a: WeightedSite, b: WeightedSite) -> Bisector:
    """Locus {q : w_a + L1(a,q) = w_b + L1(b,q)}.

    Two-dimensional tie quadrants are replaced by the vertical half-line
    bounding them; axis-aligned sites with a full half-plane tie are replaced
    by the perpendicular line through the heavier site.  Raises ValueError on
    coincident site points.
    """
    if a.point == b.point:
        raise ValueError("weighted_bisector: coincident site points")
    pa, pb = a.point, b.point
    L = l1_dist(pa, pb)
    delta = b.weight - a.weight
    if abs(delta) > L:
        return Bisector(None, None, None, empty=True)

    if pa.x == pb.x or pa.y == pb.y:
        return _axis_aligned_bisector(a, b, L, delta)

    if pa.x > pb.x:
        # canonicalize: left site first (the locus is symmetric)
        return weighted_bisector(b, a)

    if abs(delta) == L:
        # tie region is the full quadrant beyond the heavier site
        apex = b if delta > 0 else a
        other = a if delta > 0 else b
        d = NORTH if apex.point.y > other.point.y else SOUTH
        return Bisector(None, Ray(apex.point, d), None, degenerate_quadrant_resolved=True)

    deg = False
    if pa.y < pb.y:
        # a southwest of b: tie line x + y = csum inside Rec, slope -1 middle
        csum = fr(pa.x + pa.y + pb.x + pb.y + delta, 2)
        if csum < pa.x + pb.y:
            up = Pt(pa.x, csum - pa.x)          # exits left edge
            r1 = Ray(up, WEST)
        elif csum == pa.x + pb.y:
            up = Pt(pa.x, pb.y)                 # NW corner: quadrant tie
            r1 = Ray(up, NORTH)
            deg = True
        else:
            up = Pt(csum - pb.y, pb.y)          # exits top edge
            r1 = Ray(up, NORTH)
        if csum < pb.x + pa.y:
            lo = Pt(csum - pa.y, pa.y)          # exits bottom edge
            r2 = Ray(lo, SOUTH)
        elif csum == pb.x + pa.y:
            lo = Pt(pb.x, pa.y)                 # SE corner: quadrant tie
            r2 = Ray(lo, SOUTH)
            deg = True
        else:
            lo = Pt(pb.x, csum - pb.x)          # exits right edge
            r2 = Ray(lo, EAST)
    else:
        # a northwest of b: tie line x - y = cdif inside Rec, slope +1 middle
        cdif = fr(pa.x + pb.x - pa.y - pb.y + delta, 2)
        if cdif < pa.x - pb.y:
            up = Pt(pa.x, pa.x - cdif)          # exits left edge
            r1 = Ray(up, WEST)
        elif cdif == pa.x - pb.y:
            up = Pt(pa.x, pb.y)                 # SW corner: quadrant tie
            r1 = Ray(up, SOUTH)
            deg = True
        else:
            up = Pt(cdif + pb.y, pb.y)          # exits bottom edge
            r1 = Ray(up, SOUTH)
        if cdif < pb.x - pa.y:
            lo = Pt(cdif + pa.y, pa.y)          # exits top edge
            r2 = Ray(lo, NORTH)
        elif cdif == pb.x - pa.y:
            lo = Pt(pb.x, pa.y)                 # NE corner: quadrant tie
            r2 = Ray(lo, NORTH)
            deg = True
        else:
            lo = Pt(pb.x, pb.x - cdif)          # exits right edge
            r2 = Ray(lo, EAST)
    mid = Segment(up, lo) if up != lo else None
    return Bisector(mid, r1, r2, degenerate_quadrant_resolved=deg)


def _axis_aligned_bisector(a: WeightedSite, b: WeightedSite, L, delta) -> Bisector:
    """Sites sharing an x or y coordinate (constructed points only)."""
    pa, pb = a.point, b.point
    if (pa.x == pb.x and pa.y > pb.y) or (pa.y == pb.y and pa.x > pb.x):
        return _axis_aligned_bisector(b, a, L, -delta)
    if abs(delta) == L:
        apex = b if delta > 0 else a
        if pa.x == pb.x:
            # tie half-plane above/below apex: horizontal line through apex
            return Bisector(None, Ray(apex.point, EAST), Ray(apex.point, WEST),
                            degenerate_quadrant_resolved=True)
        return Bisector(None, Ray(apex.point, NORTH), Ray(apex.point, SOUTH),
                        degenerate_quadrant_resolved=True)
    if pa.x == pb.x:
        ystar = fr(pa.y + pb.y + delta, 2)
        o = Pt(pa.x, ystar)
        return Bisector(None, Ray(o, EAST), Ray(o, WEST))
    xstar = fr(pa.x + pb.x + delta, 2)
    o = Pt(xstar, pa.y)
    return Bisector(None, Ray(o, NORTH), Ray(o, SOUTH))


def bisector_sample_points(bis: Bisector, n: int, span) -> list[Pt]:
    """n sample points per piece for locus verification; rays sampled out to `span`."""
    out = []
    for piece in bis.pieces():
        if isinstance(piece, Segment):
            a, b = piece
            for i in range(1, n + 1):
                t = fr(i, n + 1)
                out.append(Pt(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
        else:
            for i in range(n):
                out.append(piece.point_at(fr(i * span, n)))
    return out


def collinear_overlap(a: Pt, b: Pt, c: Pt, d: Pt):
    """Positive-length overlap of collinear segments ab and cd, or None."""
    if orient(a, b, c) != 0 or orient(a, b, d) != 0:
        return None
    if a == b or c == d:
        return None
    # parametrize cd on ab
    def t_of(p):
        if b.x != a.x:
            return fr(p.x - a.x, b.x - a.x)
        return fr(p.y - a.y, b.y - a.y)
    t0, t1 = sorted((t_of(c), t_of(d)))
    lo, hi = max(t0, fr(0)), min(t1, fr(1))
    if lo >= hi:
        return None
    p = Pt(a.x + lo * (b.x - a.x), a.y + lo * (b.y - a.y))
    q = Pt(a.x + hi * (b.x - a.x), a.y + hi * (b.y - a.y))
    return (p, q)
