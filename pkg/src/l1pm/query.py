"""Queries over the final map: point location, distances, path extraction.

Path walk-back follows window-tree parents within each structure, jumps to
the ocean at pocket anchors, and finishes along the core-level predecessor
chain with ear detours and corridor-path splices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geom import Pt, fr, l1_dist
from .polygons import bbox, point_in_poly, poly_area2
from .cores import convert_path
from .spm_ocean import Spm, cores_visible
from .corridors import build_corridor_structure, CorridorStructure
from .spm_expand import build_spm_free_space


class DomainError(ValueError):
    pass


class LocatorIndex:
    """Bucketed bounding-box index over the subdivision cells.

    Linear size (audited via `size`); queries filter buckets by x, then test
    exact containment, resolving ties by value then lexicographic root.
    """

    def __init__(self, spm: Spm, buckets: int = 0):
        self.spm = spm
        self.boxes = [bbox(c.polygon) for c in spm.cells]
        xs = sorted({b[0] for b in self.boxes} | {b[2] for b in self.boxes})
        if not xs:
            xs = [0]
        nb = buckets or max(1, int(len(spm.cells) ** 0.5))
        lo, hi = xs[0], xs[-1]
        self.lo, self.hi = lo, hi
        self.nb = nb
        self.width = (hi - lo) if hi > lo else 1
        self.buckets = [[] for _ in range(nb)]
        for i, b in enumerate(self.boxes):
            b0 = self._bucket(b[0])
            b1 = self._bucket(b[2])
            for k in range(b0, b1 + 1):
                self.buckets[k].append(i)

    def _bucket(self, x):
        t = fr(x - self.lo, self.width)
        k = int(t * self.nb)
        return min(max(k, 0), self.nb - 1)

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.buckets) + len(self.boxes)

    def locate(self, p: Pt):
        cand = []
        for i in self.buckets[self._bucket(p.x)]:
            b = self.boxes[i]
            if b[0] <= p.x <= b[2] and b[1] <= p.y <= b[3]:
                if point_in_poly(p, self.spm.cells[i].polygon) > 0:
                    cand.append(i)
        if not cand:
            return None
        return min(cand, key=lambda i: (self.spm.cells[i].value_at(p),
                                        self.spm.cells[i].root.x,
                                        self.spm.cells[i].root.y))


@dataclass
class SpmMap:
    """A built shortest path map with everything needed for queries."""
    domain: object
    cs: CorridorStructure
    spm: Spm
    locator: LocatorIndex = None

    def __post_init__(self):
        if self.locator is None:
            self.locator = LocatorIndex(self.spm)


def build_map(domain, strict=False) -> SpmMap:
    cs = build_corridor_structure(domain)
    spm = build_spm_free_space(cs, strict=strict)
    return SpmMap(domain, cs, spm)


def distance(m: SpmMap, t: Pt):
    """Exact L1 geodesic distance from the source to t."""
    if not m.domain.free_space_contains(t):
        raise DomainError(f"{t} is inside an obstacle or outside the rectangle")
    i = m.locator.locate(t)
    if i is None:
        raise DomainError(f"{t} not covered by the map")
    return m.spm.cells[i].value_at(t)


def _corridor_polyline(prop, i, j):
    for a, b, _l, path in prop.corridor_edges:
        if (a, b) == (i, j):
            return list(path)
        if (b, a) == (i, j):
            return list(reversed(path))
    raise AssertionError("missing corridor path for predecessor edge")


def path(m: SpmMap, t: Pt):
    """Shortest path polyline from the source to t, of exactly distance(t)."""
    if not m.domain.free_space_contains(t):
        raise DomainError(f"{t} is inside an obstacle or outside the rectangle")
    spm = m.spm
    i = m.locator.locate(t)
    if i is None:
        raise DomainError(f"{t} not covered by the map")
    out = [t]          # built backwards (t .. s), reversed at the end
    guard = len(spm.cells) + len(spm.prop.sites) + 16

    cell = spm.cells[i]
    while True:
        guard -= 1
        if guard < 0:
            raise AssertionError("path walk-back diverged")
        st = spm.structs[cell.struct]
        # climb the window tree of this structure
        w = cell.root
        if out[-1] != w:
            out.append(w)
        while st.parents.get(w) is not None:
            w = st.parents[w]
            if out[-1] != w:
                out.append(w)
        if st.kind == "pocket":
            r = st.anchor_root
            if out[-1] != r:
                out.append(r)
            cell = spm.cells[st.anchor_cell]
            continue
        # site structure: w is either the site itself or a cascade seed
        site_i = st.site
        site_pt = spm.prop.sites[site_i] if site_i is not None else None
        if site_pt is not None and w != site_pt:
            # cascade seed: continue in the minimal cell of another structure
            best = None
            for j2 in spm.cells_containing(w):
                c2 = spm.cells[j2]
                if c2.struct == cell.struct:
                    continue
                key = (c2.value_at(w), c2.root.x, c2.root.y)
                if best is None or key < best[0]:
                    best = (key, j2)
            if best is None:
                raise AssertionError(f"cascade seed {w} has no serving cell")
            cell = spm.cells[best[1]]
            continue
        break

    # core-level predecessor chain with ear detours and corridor splices
    prop = spm.prop
    i2 = st.site
    while i2 is not None and prop.pred[i2] is not None:
        j2 = prop.pred[i2]
        if prop.via_corridor[i2]:
            pl = _corridor_polyline(prop, i2, j2)
            for q in pl:
                if out[-1] != q:
                    out.append(q)
        else:
            chord = convert_path([prop.sites[i2], prop.sites[j2]],
                                 spm.pieces, spm.ears)
            for q in chord:
                if out[-1] != q:
                    out.append(q)
        i2 = j2
    result = list(reversed(out))
    want = distance(m, t)
    got = sum(l1_dist(a, b) for a, b in zip(result, result[1:]))
    if got != want:
        raise AssertionError(f"path length {got} != distance {want}")
    return result


def shortest_path(domain, s: Pt, t: Pt):
    """(length, polyline) for a single pair; skips pocket expansion when t is
    in the ocean."""
    from .instance import PolygonalDomain
    dom = PolygonalDomain(domain.rect, domain.obstacles, s, [])
    if not dom.free_space_contains(s) or not dom.free_space_contains(t):
        raise DomainError("endpoints must lie in the free space")
    if s == t:
        return fr(0), [s]
    cs = build_corridor_structure(dom)
    in_pocket = None
    for b in cs.bays:
        if point_in_poly(t, b.polygon) == 2:
            in_pocket = ("bay", b)
            break
    if in_pocket is None:
        for c in cs.canals:
            if point_in_poly(t, c.polygon) == 2:
                in_pocket = ("canal", c)
                break
    from .spm_ocean import build_spm_ocean
    if in_pocket is None:
        # t in the ocean: distances via cores + corridor shortcuts only
        spm_m = build_spm_ocean(cs)
        mm = SpmMap(dom, cs, spm_m)
        return distance(mm, t), path(mm, t)
    # expand only the pocket that holds t
    from .spm_expand import gate_front, expand_bay, expand_canal, assemble_spm
    spm_m = build_spm_ocean(cs)
    kind, pocket = in_pocket
    if kind == "bay":
        front = gate_front(spm_m, pocket.gate)
        _r, cells, structs, _tr = expand_bay(pocket.polygon, front, spm_m)
    else:
        cells, structs, _tr = expand_canal(pocket, spm_m)
    spm_f = assemble_spm(spm_m, [(cells, structs)])
    mm = SpmMap(dom, cs, spm_f)
    return distance(mm, t), path(mm, t)
