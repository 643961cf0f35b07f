"""Instance ingestion, validation, general-position perturbation, SVG rendering.

Instance files are JSON with integer coordinates:

    { "rect": [x0,y0,x1,y1], "source": [x,y],
      "obstacles": [[[x,y], ...], ...], "sites": [[x,y], ...] }
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .geom import Pt, Rect, fr, orient, segments_cross, on_segment
from .polygons import (ensure_ccw, is_ccw, point_in_poly, poly_area2,
                       segment_crosses_poly_interior)


class InstanceError(ValueError):
    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}")


@dataclass
class PolygonalDomain:
    rect: Rect
    obstacles: list            # list of CCW vertex lists
    source: Pt
    sites: list = field(default_factory=list)

    @property
    def h(self) -> int:
        return len(self.obstacles)

    @property
    def n(self) -> int:
        return sum(len(o) for o in self.obstacles)

    def free_space_contains(self, p: Pt) -> bool:
        """Closure of rect minus open obstacle interiors."""
        if not self.rect.contains(p):
            return False
        return all(point_in_poly(p, o) != 2 for o in self.obstacles)

    def to_json_obj(self):
        def iv(v):
            if isinstance(v, Fraction) and v.denominator == 1:
                return int(v)
            return int(v) if isinstance(v, int) else [v.numerator, v.denominator]

        return {
            "rect": [iv(self.rect.xmin), iv(self.rect.ymin), iv(self.rect.xmax), iv(self.rect.ymax)],
            "source": [iv(self.source.x), iv(self.source.y)],
            "obstacles": [[[iv(p.x), iv(p.y)] for p in o] for o in self.obstacles],
            "sites": [[iv(p.x), iv(p.y)] for p in self.sites],
        }

    def to_json(self) -> bytes:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":")).encode()


def _coord(v, what):
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v):
        return fr(v[0], v[1])  # rationals appear only in perturbed re-serializations
    raise InstanceError("syntax", f"{what} must be an integer, got {v!r}")


def parse_instance(data: bytes) -> PolygonalDomain:
    """Parse and fully validate an instance document."""
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise InstanceError("syntax", str(e))
    if not isinstance(obj, dict):
        raise InstanceError("syntax", "top-level JSON object required")
    try:
        rx = obj["rect"]
        src = obj["source"]
        obstacles = obj.get("obstacles", [])
        sites = obj.get("sites", [])
    except KeyError as e:
        raise InstanceError("syntax", f"missing field {e}")
    if not (isinstance(rx, list) and len(rx) == 4):
        raise InstanceError("syntax", "rect must be [x0,y0,x1,y1]")
    rect = Rect(Pt(_coord(rx[0], "rect"), _coord(rx[1], "rect")),
                Pt(_coord(rx[2], "rect"), _coord(rx[3], "rect")))
    if rect.degenerate:
        raise InstanceError("rect-nondegenerate", f"rectangle {rx} has zero width or height")
    source = Pt(_coord(src[0], "source"), _coord(src[1], "source"))
    polys = []
    for oi, o in enumerate(obstacles):
        poly = [Pt(_coord(v[0], f"obstacle {oi}"), _coord(v[1], f"obstacle {oi}")) for v in o]
        polys.append(poly)
    site_pts = [Pt(_coord(v[0], "site"), _coord(v[1], "site")) for v in sites]
    return validate_domain(rect, polys, source, site_pts)


def validate_domain(rect, polys, source, site_pts) -> PolygonalDomain:
    for oi, poly in enumerate(polys):
        if len(poly) < 3:
            raise InstanceError("obstacle-simple", f"obstacle {oi} has fewer than 3 vertices")
        if len(set(poly)) != len(poly):
            raise InstanceError("obstacle-simple", f"obstacle {oi} repeats a vertex")
        if poly_area2(poly) == 0:
            raise InstanceError("obstacle-simple", f"obstacle {oi} has zero area")
        n = len(poly)
        for i in range(n):
            a, b = poly[i], poly[(i + 1) % n]
            for j in range(i + 1, n):
                c, d = poly[j], poly[(j + 1) % n]
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                if segments_cross(a, b, c, d):
                    raise InstanceError("obstacle-simple",
                                        f"obstacle {oi} edges {i} and {j} intersect")
        # adjacent edges must not fold back over each other
        for i in range(n):
            a, b, c = poly[i - 1], poly[i], poly[(i + 1) % n]
            if orient(a, b, c) == 0 and on_segment(c, a, b):
                raise InstanceError("obstacle-simple", f"obstacle {oi} folds at vertex {b}")
    polys = [ensure_ccw(p) for p in polys]

    for oi, poly in enumerate(polys):
        for p in poly:
            if not rect.contains(p, closed=False):
                raise InstanceError("obstacle-inside-rect",
                                    f"obstacle {oi} vertex {p} not strictly inside rect")

    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            a, b = polys[i], polys[j]
            for k in range(len(a)):
                for m in range(len(b)):
                    if segments_cross(a[k], a[(k + 1) % len(a)], b[m], b[(m + 1) % len(b)]):
                        raise InstanceError("obstacles-disjoint",
                                            f"obstacles {i} and {j} touch or intersect")
            if point_in_poly(a[0], b) != 0 or point_in_poly(b[0], a) != 0:
                raise InstanceError("obstacles-disjoint", f"obstacle {i} or {j} contains the other")

    seen_x, seen_y = {}, {}
    for oi, poly in enumerate(polys):
        for p in poly:
            if p.x in seen_x:
                raise InstanceError("general-position",
                                    f"vertices {seen_x[p.x]} and {p} share x={p.x}")
            if p.y in seen_y:
                raise InstanceError("general-position",
                                    f"vertices {seen_y[p.y]} and {p} share y={p.y}")
            seen_x[p.x], seen_y[p.y] = p, p

    dom = PolygonalDomain(rect, polys, source, site_pts)
    if not dom.free_space_contains(source):
        raise InstanceError("source-in-free-space", f"source {source} is not in the free space")
    for s in site_pts:
        if not dom.free_space_contains(s):
            raise InstanceError("source-in-free-space", f"site {s} is not in the free space")
    # obstacles are pairwise disjoint closed sets strictly inside the rect, so
    # the free space is connected by construction
    return dom


def perturb_to_general_position(domain: PolygonalDomain, seed: int):
    """Nudge colliding obstacle coordinates by distinct tiny rationals.

    Returns (new_domain, offsets) where offsets is a list of
    (obstacle_index, vertex_index, axis, offset) entries.  Idempotent on
    outputs: a domain already in general position comes back unchanged.
    """
    rng = random.Random(seed)
    offsets = []
    obstacles = [list(o) for o in domain.obstacles]

    for axis in ("x", "y"):
        vals = []
        for oi, poly in enumerate(obstacles):
            for vi, p in enumerate(poly):
                vals.append((getattr(p, axis), oi, vi))
        vals.sort(key=lambda t: t[0])
        distinct = sorted({v for v, _, _ in vals})
        if len(distinct) > 1:
            gap = min(b - a for a, b in zip(distinct, distinct[1:]))
        else:
            gap = fr(1)
        groups = {}
        for v, oi, vi in vals:
            groups.setdefault(v, []).append((oi, vi))
        bump_count = sum(len(g) - 1 for g in groups.values())
        if bump_count == 0:
            continue
        # distinct offsets, all below gap/4 in magnitude
        unit = fr(gap, 4 * (bump_count + 1))
        k = 1
        for v in sorted(groups):
            g = groups[v]
            if len(g) == 1:
                continue
            order = sorted(g, key=lambda t: rng.random())
            for oi, vi in order[1:]:
                off = unit * k
                k += 1
                p = obstacles[oi][vi]
                q = Pt(p.x + off, p.y) if axis == "x" else Pt(p.x, p.y + off)
                obstacles[oi][vi] = q
                offsets.append((oi, vi, axis, off))

    if not offsets:
        return domain, []
    try:
        dom = validate_domain(domain.rect, obstacles, domain.source, domain.sites)
    except InstanceError as e:
        raise InstanceError("perturbation-failed", f"perturbation violated {e}")
    return dom, offsets


# ---------------------------------------------------------------------------
# SVG rendering

_PALETTE = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
            "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"]


def _fmt(v) -> str:
    return f"{float(v):.6g}"


def render_svg(domain: PolygonalDomain, overlay: str = "none", *, cells=None,
               path=None, corridor_data=None) -> bytes:
    """Standalone SVG of the domain with an optional overlay.

    cells: iterable of (polygon, key) colored per key (spm / gvd overlays)
    path: polyline as a list of points
    corridor_data: dict with 'junctions', 'corridor_paths', 'gates'
    """
    r = domain.rect
    w, hgt = r.xmax - r.xmin, r.ymax - r.ymin
    pad = fr(max(w, hgt), 20)
    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'viewBox="{_fmt(r.xmin - pad)} {_fmt(-(r.ymax + pad))} '
               f'{_fmt(w + 2 * pad)} {_fmt(hgt + 2 * pad)}">')

    def pts_attr(poly):
        return " ".join(f"{_fmt(p.x)},{_fmt(-p.y)}" for p in poly)

    out.append(f'<rect x="{_fmt(r.xmin)}" y="{_fmt(-r.ymax)}" width="{_fmt(w)}" '
               f'height="{_fmt(hgt)}" fill="white" stroke="black" stroke-width="{_fmt(fr(max(w, hgt), 400))}"/>')
    if overlay in ("spm", "gvd") and cells:
        keys = {}
        for poly, key in cells:
            color = _PALETTE[keys.setdefault(key, len(keys)) % len(_PALETTE)]
            out.append(f'<polygon points="{pts_attr(poly)}" fill="{color}" '
                       f'fill-opacity="0.55" stroke="#333" stroke-width="{_fmt(fr(max(w, hgt), 800))}"/>')
    for o in domain.obstacles:
        out.append(f'<polygon points="{pts_attr(o)}" fill="#555" stroke="black" '
                   f'stroke-width="{_fmt(fr(max(w, hgt), 400))}"/>')
    if overlay == "corridors" and corridor_data:
        for t in corridor_data.get("junctions", ()):
            out.append(f'<polygon points="{pts_attr(t)}" fill="#e15759" fill-opacity="0.5"/>')
        for cp in corridor_data.get("corridor_paths", ()):
            out.append(f'<polyline points="{pts_attr(cp)}" fill="none" stroke="#b07aa1" '
                       f'stroke-width="{_fmt(fr(max(w, hgt), 200))}"/>')
        for g in corridor_data.get("gates", ()):
            out.append(f'<polyline points="{pts_attr(g)}" fill="none" stroke="#59a14f" '
                       f'stroke-width="{_fmt(fr(max(w, hgt), 200))}" stroke-dasharray="2,1"/>')
    if path:
        out.append(f'<polyline points="{pts_attr(path)}" fill="none" stroke="#d62728" '
                   f'stroke-width="{_fmt(fr(max(w, hgt), 150))}"/>')
    mr = _fmt(fr(max(w, hgt), 100))
    out.append(f'<circle cx="{_fmt(domain.source.x)}" cy="{_fmt(-domain.source.y)}" r="{mr}" fill="#2ca02c"/>')
    for s in domain.sites:
        out.append(f'<circle cx="{_fmt(s.x)}" cy="{_fmt(-s.y)}" r="{mr}" fill="#1f77b4"/>')
    out.append("</svg>")
    return "\n".join(out).encode()
