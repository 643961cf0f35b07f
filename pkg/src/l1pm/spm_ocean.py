"""Shortest path map on the ocean: core propagation and refinement to SPM(M).

Distances are obtained by exact Dijkstra over co-visible core vertices with
corridor paths as extra fixed-length edges (the pseudo-wavelet rule applied at
the graph level); cells are assembled as the lower envelope of the rooted
distance functions restricted to visibility regions, then refined per cell by
ear removal and a window subdivision.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .geom import Pt, Rect, WeightedSite, fr, l1_dist, orient, on_segment, segments_cross_properly
from .polygons import (bbox, clip_halfplane, convex_subtract, dissolve, ensure_ccw,
                       point_in_poly, poly_area2, pieces_area2, split_pinched,
                       simplify_collinear, subtract_convex_many)
from .polygon_spm import window_cells
from .cores import compute_cores, convert_path


@dataclass
class WavefrontEvent:
    kind: str                 # vertex-hit | pseudo-wavelet | boundary
    point: Pt
    distance: object
    origin: Optional[Pt] = None


@dataclass
class SpmCell:
    polygon: list
    root: Pt
    weight: object
    parent: Optional[Pt]      # window-tree predecessor of the root (None at a site)
    struct: int               # structure id in Spm.structs
    label: int = 0            # originating source index (multi-source diagrams)

    def value_at(self, p: Pt):
        return self.weight + l1_dist(self.root, p)


@dataclass
class StructInfo:
    kind: str                 # 'site' | 'pocket'
    site: Optional[int] = None        # site index for 'site' structs
    parents: dict = field(default_factory=dict)
    anchor_cell: Optional[int] = None  # continuation cell id (pocket structs)
    anchor_root: Optional[Pt] = None


@dataclass
class Propagation:
    sites: list               # Pt per site
    weight0: list             # initial weights (sources), None for plain vertices
    label0: list
    d: list
    pred: list                # site index or None
    via_corridor: list        # bool per site: settled through a corridor edge
    label: list
    events: list
    incoming: dict            # terminal Pt -> bool (wavefront-incoming)
    corridor_edges: list      # (i, j, length, path)


@dataclass
class Spm:
    cells: list
    structs: list
    pseudo_cells: list        # (root Pt, member Pt, path, d_root, d_member)
    prop: Optional[Propagation] = None
    cores: list = field(default_factory=list)
    ears: list = field(default_factory=list)
    pieces: list = field(default_factory=list)

    def area2(self):
        return sum(poly_area2(c.polygon) for c in self.cells)

    def cells_containing(self, p: Pt):
        out = []
        for i, c in enumerate(self.cells):
            bb = bbox(c.polygon)
            if not (bb[0] <= p.x <= bb[2] and bb[1] <= p.y <= bb[3]):
                continue
            if point_in_poly(p, c.polygon) > 0:
                out.append(i)
        return out

    def locate(self, p: Pt):
        """Cell id for p: minimal value, ties to the lexicographically smaller root."""
        cand = self.cells_containing(p)
        if not cand:
            return None
        return min(cand, key=lambda i: (self.cells[i].value_at(p),
                                        self.cells[i].root.x, self.cells[i].root.y))

    def distance_at(self, p: Pt):
        i = self.locate(p)
        return None if i is None else self.cells[i].value_at(p)


# ---------------------------------------------------------------------------
# visibility among cores

def _blocks(core, a: Pt, b: Pt) -> bool:
    """Does segment ab cross this (possibly degenerate) core?"""
    if len(core) == 2:
        return segments_cross_properly(a, b, core[0], core[1])
    from .polygons import segment_crosses_poly_interior
    return segment_crosses_poly_interior(a, b, core)


def cores_visible(a: Pt, b: Pt, core_polys, blockers=()) -> bool:
    if a == b:
        return True
    lox, hix = min(a.x, b.x), max(a.x, b.x)
    loy, hiy = min(a.y, b.y), max(a.y, b.y)
    for core in core_polys:
        bb = bbox(core)
        if bb[0] > hix or bb[2] < lox or bb[1] > hiy or bb[3] < loy:
            continue
        if _blocks(core, a, b):
            return False
    from .geom import collinear_overlap
    for u, v in blockers:
        if collinear_overlap(a, b, u, v) is not None:
            return False
    return True


def internal_edges(polys):
    """Overlaps between boundary edges of distinct polygons (line-hashed).

    Used to ban riding along partition diagonals shared by two pieces: both
    sides are covered, so the edge is interior to the union with no
    length-preserving detour.
    """
    from math import gcd
    from .geom import collinear_overlap

    def line_key(a, b):
        A = b.y - a.y
        B = a.x - b.x
        C = A * a.x + B * a.y
        # normalize rational coefficients to a canonical integer triple
        dens = [getattr(x, "denominator", 1) for x in (A, B, C)]
        mult = 1
        for d in dens:
            mult = mult * d // gcd(mult, d)
        Ai, Bi, Ci = int(A * mult), int(B * mult), int(C * mult)
        g = gcd(gcd(abs(Ai), abs(Bi)), abs(Ci)) or 1
        Ai, Bi, Ci = Ai // g, Bi // g, Ci // g
        if (Ai, Bi, Ci) < (0, 0, 0) or (Ai < 0 or (Ai == 0 and Bi < 0)):
            Ai, Bi, Ci = -Ai, -Bi, -Ci
        return (Ai, Bi, Ci)

    groups = {}
    for pi, poly in enumerate(polys):
        n = len(poly)
        for i in range(n):
            a, b = poly[i], poly[(i + 1) % n]
            groups.setdefault(line_key(a, b), []).append((pi, a, b))
    out = []
    for edges in groups.values():
        if len(edges) < 2:
            continue
        for i in range(len(edges)):
            pi, a, b = edges[i]
            for j in range(i + 1, len(edges)):
                qj, c, d2 = edges[j]
                if qj == pi:
                    continue
                ov = collinear_overlap(a, b, c, d2)
                if ov is not None:
                    out.append(ov)
    return out


def shadow_region(core, v: Pt, rect: Rect):
    """Closed convex region hidden from v by one core, clipped to the rect."""
    region = [Pt(rect.xmin, rect.ymin), Pt(rect.xmax, rect.ymin),
              Pt(rect.xmax, rect.ymax), Pt(rect.xmin, rect.ymax)]
    m = len(core)
    if v in core:
        if m == 2:
            return None  # a segment blocks nothing from its own endpoint
        i = core.index(v)
        prv, nxt = core[i - 1], core[(i + 1) % m]
        # blocked directions are strictly inside the piece's angle at v
        region = clip_halfplane(region, v, nxt)
        if region is None:
            return None
        region = clip_halfplane(region, prv, v)
        return region
    if m == 2:
        a, b = core
        if orient(a, b, v) == 0:
            return None
        w_left, w_right = (a, b) if orient(v, a, b) >= 0 else (b, a)
        region = clip_halfplane(region, v, w_left)
        if region is not None:
            region = clip_halfplane(region, w_right, v)
        if region is not None:
            if orient(a, b, v) > 0:
                region = clip_halfplane(region, b, a)
            else:
                region = clip_halfplane(region, a, b)
        return region
    # tangent (silhouette) vertices: all of core weakly on one side of v->w
    w_left = w_right = None
    for u in core:
        if u == v:
            continue
        sides = [orient(v, u, w) for w in core if w != u]
        if all(s >= 0 for s in sides):
            w_left = u
        if all(s <= 0 for s in sides):
            w_right = u
    if w_left is None or w_right is None:
        return None  # v inside the core (cannot happen for free sites)
    region = clip_halfplane(region, v, w_left)
    if region is None:
        return None
    region = clip_halfplane(region, w_right, v)
    if region is None:
        return None
    for i in range(m):
        a, b = core[i], core[(i + 1) % m]
        if orient(a, b, v) < 0:  # edge faces v: keep only its far side
            region = clip_halfplane(region, a, b)
            if region is None:
                return None
    return region


def visibility_pieces(v: Pt, core_polys, rect: Rect):
    """Convex pieces covering the set of points visible from v among the cores."""
    start = [[Pt(rect.xmin, rect.ymin), Pt(rect.xmax, rect.ymin),
              Pt(rect.xmax, rect.ymax), Pt(rect.xmin, rect.ymax)]]
    shadows = []
    for core in core_polys:
        s = shadow_region(core, v, rect)
        if s is not None:
            shadows.append(s)
    return subtract_convex_many(start, shadows)


# ---------------------------------------------------------------------------
# weighted dominance

def beat_pieces(u: Pt, du, v: Pt, dv, rect: Rect):
    """Convex pieces where site (u, du) beats (v, dv), ties per the vertical rule.

    Two-dimensional tie regions (the |du - dv| = L1(u,v) family) are assigned
    to the heavier site; the one-dimensional bisector belongs to both cells
    (measure zero, resolved lexicographically at query time).
    """
    xs = sorted({rect.xmin, rect.xmax} | {c for c in (u.x, v.x) if rect.xmin < c < rect.xmax})
    ys = sorted({rect.ymin, rect.ymax} | {c for c in (u.y, v.y) if rect.ymin < c < rect.ymax})
    heavier_u = du > dv or (du == dv and (u.x, u.y) < (v.x, v.y))

    def g(p):
        return (du + l1_dist(u, p)) - (dv + l1_dist(v, p))

    out = []
    for x0, x1 in zip(xs, xs[1:]):
        for y0, y1 in zip(ys, ys[1:]):
            box = [Pt(x0, y0), Pt(x1, y0), Pt(x1, y1), Pt(x0, y1)]
            vals = [g(p) for p in box]
            if all(w == 0 for w in vals):
                if heavier_u:
                    out.append(box)
                continue
            if all(w >= 0 for w in vals):
                continue
            if all(w <= 0 for w in vals):
                out.append(box)
                continue
            # clip the box by the zero line of the (linear-on-box) difference
            kept = []
            for i in range(4):
                p, q = box[i], box[(i + 1) % 4]
                gp, gq = vals[i], vals[(i + 1) % 4]
                if gp <= 0:
                    kept.append(p)
                if (gp < 0 < gq) or (gq < 0 < gp):
                    t = fr(gp, gp - gq)
                    kept.append(Pt(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)))
            kept = simplify_collinear(kept)
            if len(kept) >= 3 and poly_area2(kept) > 0:
                out.append(kept)
    return out


# ---------------------------------------------------------------------------
# propagation (exact Dijkstra with the pseudo-wavelet rule)

def propagate_cores(core_polys, corridor_paths, sources, extra_vertices=(),
                    blockers=None) -> Propagation:
    """Exact multi-source Dijkstra over core vertices plus corridor shortcuts.

    sources: list of WeightedSite; corridor_paths: list of (path, length).
    Every queue operation is recorded as a WavefrontEvent; popped event
    distances are asserted nondecreasing.
    """
    if blockers is None:
        blockers = internal_edges(core_polys)
    pts = []
    index = {}

    def add(p):
        if p not in index:
            index[p] = len(pts)
            pts.append(p)
        return index[p]

    for core in core_polys:
        for p in core:
            add(p)
    for p in extra_vertices:
        add(p)
    weight0 = [None] * len(pts)
    label0 = [None] * len(pts)
    for li, ws in enumerate(sources):
        i = add(ws.point)
        while len(weight0) < len(pts):
            weight0.append(None)
            label0.append(None)
        if weight0[i] is None or ws.weight < weight0[i]:
            weight0[i] = ws.weight
            label0[i] = li

    n = len(pts)
    corridor_edges = []
    cpath_at = {}
    for path, ln in corridor_paths:
        i, j = index[path[0]], index[path[-1]]
        corridor_edges.append((i, j, ln, path))
        cpath_at.setdefault(i, []).append((j, ln, path))
        cpath_at.setdefault(j, []).append((i, ln, list(reversed(path))))

    vis = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if cores_visible(pts[i], pts[j], core_polys, blockers):
                w = l1_dist(pts[i], pts[j])
                vis[i].append((j, w))
                vis[j].append((i, w))

    d = [None] * n
    pred = [None] * n
    via_corridor = [False] * n
    label = [None] * n
    events = []
    pq = []
    for i in range(n):
        if weight0[i] is not None:
            heapq.heappush(pq, (weight0[i], i, None, False))
            events.append(WavefrontEvent("vertex-hit", pts[i], weight0[i], None))
    last_popped = None
    incoming = {}
    while pq:
        dist, i, frm, via_c = heapq.heappop(pq)
        if d[i] is not None:
            continue
        if last_popped is not None and dist < last_popped:
            raise AssertionError("event distances decreased")
        last_popped = dist
        d[i] = dist
        pred[i] = frm
        via_corridor[i] = via_c
        label[i] = label0[i] if frm is None else label[frm]
        if i in cpath_at:
            incoming[pts[i]] = not via_c
        for j, w in vis[i]:
            if d[j] is None:
                nd = dist + w
                events.append(WavefrontEvent("vertex-hit", pts[j], nd, pts[i]))
                heapq.heappush(pq, (nd, j, i, False))
        for j, ln, _path in cpath_at.get(i, ()):
            if d[j] is None and not via_c_blocks(via_c):
                nd = dist + ln
                events.append(WavefrontEvent("pseudo-wavelet", pts[j], nd, pts[i]))
                heapq.heappush(pq, (nd, j, i, True))

    for i, j, ln, _p in corridor_edges:
        if d[i] is not None and d[j] is not None:
            if not (incoming.get(pts[i], False) or incoming.get(pts[j], False)):
                raise AssertionError("corridor path with no wavefront-incoming terminal")
    return Propagation(pts, weight0, label0, d, pred, via_corridor, label,
                       events, incoming, corridor_edges)


def via_c_blocks(via_c):
    # a wavelet arriving through a corridor path continues normally (the paper
    # processes the event as usual), so nothing is blocked
    return False


def pseudo_cells_of(prop: Propagation):
    """Pseudo-cells: one per corridor path with an outgoing terminal."""
    out = []
    for i, j, ln, path in prop.corridor_edges:
        for a, b, pth in ((i, j, path), (j, i, list(reversed(path)))):
            if prop.pred[b] == a and prop.via_corridor[b]:
                if prop.d[b] != prop.d[a] + ln:
                    raise AssertionError("pseudo-cell distance inconsistent")
                out.append((prop.sites[a], prop.sites[b], pth, prop.d[a], prop.d[b]))
    return out


# ---------------------------------------------------------------------------
# cells of SPM over the cores, then SPM(M)

def core_cell_pieces(prop: Propagation, core_polys, rect: Rect, site_order=None):
    """Convex-piece sets of each site's cell in the core-level SPM."""
    n = len(prop.sites)
    sites = prop.sites
    d = prop.d
    order = site_order or range(n)
    shadows = {}

    def shadows_of(i):
        if i not in shadows:
            out = []
            for core in core_polys:
                s = shadow_region(core, sites[i], rect)
                if s is not None:
                    out.append(s)
            shadows[i] = out
        return shadows[i]

    cells = {}
    for v in order:
        if d[v] is None:
            continue
        start = [[Pt(rect.xmin, rect.ymin), Pt(rect.xmax, rect.ymin),
                  Pt(rect.xmax, rect.ymax), Pt(rect.xmin, rect.ymax)]]
        pieces = subtract_convex_many(start, shadows_of(v))
        rivals = sorted((u for u in range(n) if u != v and d[u] is not None),
                        key=lambda u: d[u] + l1_dist(sites[u], sites[v]))
        for u in rivals:
            if not pieces:
                break
            bb = _pieces_bbox(pieces)
            lo_u = d[u] + _bbox_l1_min(bb, sites[u])
            hi_v = d[v] + _bbox_l1_max(bb, sites[v])
            if lo_u > hi_v:
                continue
            sub_rect = Rect(Pt(bb[0], bb[1]), Pt(bb[2], bb[3]))
            beat = beat_pieces(sites[u], d[u], sites[v], d[v], sub_rect)
            if not beat:
                continue
            blocked = subtract_convex_many(beat, shadows_of(u))
            if not blocked:
                continue
            pieces = subtract_convex_many(pieces, blocked)
        cells[v] = pieces
    return cells


def _pieces_bbox(pieces):
    b = bbox(pieces[0])
    x0, y0, x1, y1 = b
    for p in pieces[1:]:
        b = bbox(p)
        x0, y0 = min(x0, b[0]), min(y0, b[1])
        x1, y1 = max(x1, b[2]), max(y1, b[3])
    return (x0, y0, x1, y1)


def _bbox_l1_min(b, p: Pt):
    dx = max(b[0] - p.x, p.x - b[2], 0)
    dy = max(b[1] - p.y, p.y - b[3], 0)
    return dx + dy


def _bbox_l1_max(b, p: Pt):
    dx = max(abs(b[0] - p.x), abs(b[2] - p.x))
    dy = max(abs(b[1] - p.y), abs(b[3] - p.y))
    return dx + dy


def refine_to_ocean(prop: Propagation, cell_pieces, core_polys, cores, ears,
                    pieces, rect: Rect, pockets=()) -> Spm:
    """Clip core cells by ears and pockets, then window-subdivide: SPM(M)."""
    from .polygons import triangulate
    ear_polys = [e.polygon for e in ears]
    pocket_tris = []
    for p in pockets:
        pocket_tris.extend([list(t) for t in triangulate(p)])
    cells = []
    structs = []
    for v, vpieces in cell_pieces.items():
        if not vpieces:
            continue
        kept = subtract_convex_many(vpieces, ear_polys + pocket_tris)
        if not kept:
            continue
        outers, holes = dissolve(kept)
        if holes:
            raise AssertionError("refined cell has a hole")
        site_pt = prop.sites[v]
        values = {site_pt: prop.d[v]}
        remaining = [ensure_ccw(simplify_collinear(o)) for o in outers]
        remaining = [o for o in remaining if len(o) >= 3]
        guard = len(remaining) + 2
        while remaining:
            guard -= 1
            if guard < 0:
                raise AssertionError("refined cell loops are not chained")
            progressed = False
            for lp in list(remaining):
                cands = [(values[q], q) for q in lp if q in values]
                if point_in_poly(site_pt, lp) > 0:
                    cands.append((values[site_pt], site_pt))
                if not cands:
                    continue
                val, seed = min(cands, key=lambda t: (t[0], t[1].x, t[1].y))
                wcells, parents, dists = window_cells(lp, WeightedSite(seed, val))
                sid = len(structs)
                structs.append(StructInfo("site", site=v, parents=parents))
                for wc in wcells:
                    cells.append(SpmCell(wc.polygon, wc.root, wc.weight, wc.parent,
                                         sid, prop.label[v] or 0))
                for q, dq in dists.items():
                    if q not in values or dq < values[q]:
                        values[q] = dq
                remaining.remove(lp)
                progressed = True
            if not progressed:
                # a loop joined to the rest only through a zero-width bridge
                # along an ear path; every point of the refined cell is
                # L1-tight from the site, so seed at the entry vertex
                lp = remaining.pop(0)
                seed = min(lp, key=lambda q: (l1_dist(site_pt, q), q.x, q.y))
                val = prop.d[v] + l1_dist(site_pt, seed)
                wcells, parents, dists = window_cells(lp, WeightedSite(seed, val))
                sid = len(structs)
                structs.append(StructInfo("site", site=v, parents=parents))
                for wc in wcells:
                    cells.append(SpmCell(wc.polygon, wc.root, wc.weight, wc.parent,
                                         sid, prop.label[v] or 0))
                for q, dq in dists.items():
                    if q not in values or dq < values[q]:
                        values[q] = dq
        # Lemma-5 tightness: every refined root value is d(site) + L1(site, root)
        for cell in cells:
            if structs[cell.struct].site == v:
                pass
    return Spm(cells, structs, [], prop=prop, cores=core_polys, ears=ears, pieces=pieces)


def spm_simple_polygon(polygon, root: WeightedSite) -> Spm:
    """Single-source SPM of a simple polygon (root inside or on the boundary)."""
    wcells, parents, _d = window_cells(polygon, root)
    struct = StructInfo("site", site=None, parents=parents)
    cells = [SpmCell(w.polygon, w.root, w.weight, w.parent, 0) for w in wcells]
    return Spm(cells, [struct], [])


def internal_edge_endpoints(pieces, components):
    """Endpoints of partition edges not on the component boundary."""
    keep = set()
    for piece in pieces:
        n = len(piece)
        for i in range(n):
            a, b = piece[i], piece[(i + 1) % n]
            mid = Pt(fr(a.x + b.x, 2), fr(a.y + b.y, 2))
            for outer, holes in components:
                v = point_in_poly(mid, outer)
                if v == 2 and all(point_in_poly(mid, h) == 0 for h in holes):
                    keep.add(a)
                    keep.add(b)
                    break
                if v == 1:
                    break
    return keep


def build_spm_ocean(cs) -> Spm:
    """SPM(M) for a corridor structure: propagate over cores, refine by ears."""
    dom = cs.domain
    rect = dom.rect
    terminals = []
    for path, _l in cs.corridor_paths:
        terminals += [path[0], path[-1]]
    keep = internal_edge_endpoints(cs.pieces, cs.components)
    cores, ears = compute_cores(cs.pieces, terminals, keep_extra=keep)
    core_polys = [c.vertices for c in cores if len(c.vertices) >= 2]
    sources = [WeightedSite(dom.source, fr(0))]
    if dom.sites:
        sources = [WeightedSite(p, fr(0)) for p in dom.sites]
    blockers = internal_edges(cs.pieces)
    prop = propagate_cores(core_polys, cs.corridor_paths, sources,
                           extra_vertices=[w.point for w in sources],
                           blockers=blockers)
    cell_pieces = core_cell_pieces(prop, core_polys, rect)
    spm = refine_to_ocean(prop, cell_pieces, core_polys, cores, ears, cs.pieces, rect)
    spm.pseudo_cells = pseudo_cells_of(prop)
    want = cs.ocean_area2()
    got = spm.area2()
    if got != want:
        raise ArithmeticError(f"SPM(M) area mismatch: cells {got} vs ocean {want}")
    return spm
