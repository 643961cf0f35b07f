"""Cores and ears of convex pieces, and length-preserving path conversion.

The core of a convex piece joins its axis-extreme vertices (plus any corridor
path terminals on the piece); each non-boundary core edge cuts off an ear
whose boundary path is monotone in both coordinates, so replacing a chord by
the path preserves L1 length exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geom import Pt, fr, l1_dist, orient, on_segment, seg_intersection, segments_cross_properly
from .polygons import bbox, ensure_ccw, point_in_poly


@dataclass
class Ear:
    piece_index: int
    core_edge: tuple          # (a, b)
    obstacle_path: list       # a .. b along the piece boundary
    polygon: list             # closed ear region (convex)


@dataclass
class Core:
    piece_index: int
    vertices: list            # convex cyclic order


def compute_cores(pieces, terminals=(), keep_extra=()):
    """Cores and ears for a set of convex pieces.

    terminals: corridor path terminals; keep_extra: additional vertices that
    must stay on cores (endpoints of internal partition edges, so that ear
    paths ride only true boundary).  Both are kept wherever they are piece
    vertices.
    """
    tset = set(terminals) | set(keep_extra)
    cores, ears = [], []
    for pi, piece in enumerate(pieces):
        piece = ensure_ccw(piece)
        keep = set()
        for sel in (min, max):
            keep.add(sel(piece, key=lambda p: (p.x, p.y)))
            keep.add(sel(piece, key=lambda p: (p.y, p.x)))
        keep |= {p for p in piece if p in tset}
        core = [p for p in piece if p in keep]
        cores.append(Core(pi, core))
        m = len(core)
        for i in range(m):
            a, b = core[i], core[(i + 1) % m]
            ia, ib = piece.index(a), piece.index(b)
            chain = [a]
            k = ia
            while k != ib:
                k = (k + 1) % len(piece)
                chain.append(piece[k])
            if len(chain) == 2:
                continue  # core edge is a piece edge, no ear
            ear_poly = ensure_ccw(chain)
            _assert_monotone(chain)
            ears.append(Ear(pi, (a, b), chain, ear_poly))
    return cores, ears


def _assert_monotone(chain):
    sx = {(chain[i + 1].x > chain[i].x) - (chain[i + 1].x < chain[i].x)
          for i in range(len(chain) - 1)}
    sy = {(chain[i + 1].y > chain[i].y) - (chain[i + 1].y < chain[i].y)
          for i in range(len(chain) - 1)}
    if (1 in sx and -1 in sx) or (1 in sy and -1 in sy):
        raise AssertionError(f"ear obstacle path is not xy-monotone: {chain}")


class CoreEdgeCrossing(ValueError):
    """A path segment crosses a core edge interior (invalid input path)."""


def _slope_sign(a: Pt, b: Pt) -> int:
    dx, dy = b.x - a.x, b.y - a.y
    if dx == 0 or dy == 0:
        return 0
    return 1 if (dx > 0) == (dy > 0) else -1


def _segment_ear_detour(p: Pt, q: Pt, ear: Ear):
    """Replacement data if segment pq penetrates the ear, else None.

    Returns (t_enter, detour_points) where the detour runs between the two
    obstacle-path crossing points, exclusive of p and q.
    """
    bb = bbox(ear.polygon)
    if max(p.x, q.x) < bb[0] or min(p.x, q.x) > bb[2] \
            or max(p.y, q.y) < bb[1] or min(p.y, q.y) > bb[3]:
        return None
    a, b = ear.core_edge
    if segments_cross_properly(p, q, a, b):
        raise CoreEdgeCrossing(f"segment {p}-{q} crosses core edge {a}-{b}")
    hits = []
    chain = ear.obstacle_path
    for i in range(len(chain) - 1):
        x = seg_intersection(p, q, chain[i], chain[i + 1])
        if x is not None:
            if q.x != p.x:
                t = fr(x.x - p.x, q.x - p.x)
            else:
                t = fr(x.y - p.y, q.y - p.y)
            hits.append((t, x, i))
    uniq = {}
    for t, x, i in hits:
        uniq.setdefault(x, (t, x, i))
    hits = sorted(uniq.values())
    if len(hits) < 2:
        return None
    (t1, e, i1), (t2, f, i2) = hits[0], hits[-1]
    mid = Pt(fr(e.x + f.x, 2), fr(e.y + f.y, 2))
    if point_in_poly(mid, ear.polygon) != 2:
        return None  # grazing contact only
    sseg = _slope_sign(p, q)
    sear = _slope_sign(a, b)
    if sseg != 0 and sseg != sear:
        raise AssertionError("penetrated ear slope sign mismatch")
    if i1 <= i2:
        mids = chain[i1 + 1:i2 + 1]
    else:
        mids = list(reversed(chain[i2 + 1:i1 + 1]))
    detour = [e]
    for v in mids + [f]:
        if detour[-1] != v:
            detour.append(v)
    got = sum(l1_dist(u, v) for u, v in zip(detour, detour[1:]))
    if got != l1_dist(e, f):
        raise AssertionError("ear detour changed L1 length")
    return (t1, detour)


def convert_path(path, pieces, ears, length_fn=l1_dist):
    """Replace ear-penetrating chords by their obstacle paths; length preserved.

    The input path must avoid core interiors and turn only at core vertices;
    crossing a core edge interior raises CoreEdgeCrossing.  length_fn is the
    metric preserved by the monotone detours (L1 by default).
    """
    out = [path[0]]
    for p, q in zip(path, path[1:]):
        if p == q:
            continue
        detours = []
        for ear in ears:
            d = _segment_ear_detour(p, q, ear)
            if d is not None:
                detours.append(d)
        detours.sort(key=lambda t: t[0])
        for _t, pts in detours:
            for v in pts:
                if out[-1] != v:
                    out.append(v)
        if out[-1] != q:
            out.append(q)
    want = sum((length_fn(a, b) for a, b in zip(path, path[1:])),
               length_fn(path[0], path[0]))
    got = sum((length_fn(a, b) for a, b in zip(out, out[1:])),
              length_fn(out[0], out[0]))
    if want != got:
        raise ArithmeticError(f"convert_path length changed: {want} -> {got}")
    return out
