"""Corridor structure: junction triangles, corridors, hourglasses, ocean, bays, canals.

The triangulation dual (with the source inserted as a point obstacle) is
reduced to a 3-regular graph; its nodes are junction triangles and its edges
corridors.  Each corridor carries an hourglass computed by the funnel
algorithm; closed hourglasses contribute corridor paths acting as shortcuts.
The pockets of the free space left outside the ocean are bays (one gate) and
canals (two gates, containing a corridor path).
"""
from __future__ import annotations

import collections
from dataclasses import dataclass, field
from typing import Optional

from .geom import Pt, l1_dist
from .polygons import (TriMesh, boundary_of_triangle_set, dissolve, ensure_ccw,
                       point_in_poly, poly_area2, split_polygon, convex_partition,
                       simplify_collinear, triangulate)
from .polygon_spm import shortest_path_tree
from .freespace import Triangulation, triangulate_free_space


class CorridorDegeneracy(Exception):
    """Wrap-around or pinched corridor: the reduction does not apply cleanly."""


@dataclass
class Hourglass:
    closed: bool
    side1: list                      # geodesic between the chain-A endpoints
    side2: list                      # geodesic between the chain-B endpoints
    corridor_path: Optional[list]    # x..y for closed hourglasses
    length: object = 0

    @property
    def terminals(self):
        if not self.closed:
            return None
        return (self.corridor_path[0], self.corridor_path[-1])


@dataclass
class Corridor:
    doors: tuple                     # ((f,a), (b,e)) oriented along the CCW cycle
    polygon: Optional[list]
    chainA: list                     # a .. b along the boundary
    chainB: list                     # e .. f along the boundary
    hourglass: Optional[Hourglass] = None
    junctions: tuple = ()


@dataclass
class Bay:
    gate: tuple                      # (c, d) consecutive on an hourglass side
    polygon: list


@dataclass
class Canal:
    gates: tuple                     # ((w1, x), (w2, y)); x, y corridor path terminals
    polygon: list
    corridor_path: list
    length: object


@dataclass
class CorridorStructure:
    domain: object
    tri: Triangulation
    junction_ids: list
    corridors: list
    ocean_pieces: list               # disjoint polygons whose union is the ocean M
    pieces: list                     # P': convex polygons partitioning R \ M
    bays: list
    canals: list
    fallback: bool = False
    owner: dict = field(default_factory=dict)
    components: list = field(default_factory=list)  # (outer, holes) of R \ M
    gate_walls: list = field(default_factory=list)

    @property
    def corridor_paths(self):
        out = []
        for c in self.corridors:
            hg = c.hourglass
            if hg is not None and hg.closed and hg.corridor_path[0] != hg.corridor_path[-1]:
                out.append((hg.corridor_path, hg.length))
        return out

    def ocean_area2(self):
        return sum(poly_area2(p) for p in self.ocean_pieces)


def _vertex_owner(domain, source):
    own = {}
    for oi, poly in enumerate(domain.obstacles):
        for p in poly:
            own[p] = ("obstacle", oi)
    for p in domain.rect.corners():
        own[p] = ("rect", 0)
    own[source] = ("source", 0)
    for si, p in enumerate(domain.sites):
        own.setdefault(p, ("site", si))
    return own


def path_l1_length(path):
    return sum(l1_dist(a, b) for a, b in zip(path, path[1:]))


def geodesic_in_polygon(poly, a: Pt, b: Pt, mesh=None):
    """Vertex sequence of the geodesic between two boundary points of a polygon."""
    if a == b:
        return [a]
    parent, mesh = shortest_path_tree(poly, a, mesh)
    path = [b]
    while path[-1] != a:
        nxt = parent.get(path[-1])
        if nxt is None and path[-1] != a:
            raise ValueError("geodesic endpoints not connected")
        path.append(nxt)
    return list(reversed(path))


def _common_subpath(p1, p2):
    s2 = set(p2)
    run = [v for v in p1 if v in s2]
    if not run:
        return None
    i0 = p1.index(run[0])
    if p1[i0:i0 + len(run)] != run:
        raise ValueError("hourglass overlap is not contiguous")
    return run


def build_corridor_structure(domain, tri: Optional[Triangulation] = None) -> CorridorStructure:
    """Corridor decomposition with the source treated as a point obstacle."""
    source = domain.source
    if tri is None:
        extra = [source] + [s for s in domain.sites if s != source]
        tri = triangulate_free_space(domain, extra)
    mesh = tri.mesh
    nt = len(mesh.tris)
    deg = [len(mesh.neighbors[i]) for i in range(nt)]
    alive = [True] * nt

    dq = collections.deque(i for i in range(nt) if deg[i] <= 1)
    while dq:
        i = dq.popleft()
        if not alive[i] or deg[i] > 1:
            continue
        alive[i] = False
        for j, _e in mesh.neighbors[i]:
            if alive[j]:
                deg[j] -= 1
                if deg[j] <= 1:
                    dq.append(j)

    junctions = [i for i in range(nt) if alive[i] and deg[i] == 3]
    own = _vertex_owner(domain, source)
    if not junctions:
        return _fallback_structure(domain, tri, own)
    jset = set(junctions)
    try:
        return _structure_from_junctions(domain, tri, mesh, alive, junctions, jset, own)
    except CorridorDegeneracy:
        return _fallback_structure(domain, tri, own)


def _structure_from_junctions(domain, tri, mesh, alive, junctions, jset, own):

    corridors = []
    seen = set()
    for j in junctions:
        for nb, door in mesh.neighbors[j]:
            if not alive[nb]:
                continue
            key = (j, frozenset(door))
            if key in seen:
                continue
            chain = []
            prev, cur = j, nb
            while cur not in jset:
                chain.append(cur)
                nxts = [(t, e) for t, e in mesh.neighbors[cur] if alive[t] and t != prev]
                if len(nxts) != 1:
                    raise RuntimeError("corridor walk found a non-chain triangle")
                prev, cur = cur, nxts[0][0]
            if chain:
                last_door = next(e for t, e in mesh.neighbors[cur] if t == prev)
            else:
                last_door = door
            seen.add(key)
            seen.add((cur, frozenset(last_door)))
            corridors.append(_make_corridor(mesh, alive, jset, j, cur,
                                            door, last_door, chain))

    ocean_pieces = [list(mesh.tris[j]) for j in junctions]
    bays, canals = [], []
    for c in corridors:
        pieces, b, cn = _hourglass_regions(c)
        ocean_pieces.extend(pieces)
        bays.extend(b)
        canals.extend(cn)

    pieces, components = _convex_pieces(domain, bays, canals)
    cs = CorridorStructure(domain, tri, junctions, corridors, ocean_pieces,
                           pieces, bays, canals, fallback=False, owner=own)
    cs.components = components
    cs.gate_walls = [tuple(b.gate) for b in bays] + \
        [tuple(g) for c in canals for g in c.gates]
    audit_structure(cs)
    return cs


def _fallback_structure(domain, tri, own) -> CorridorStructure:
    """h <= 1 or chain-like layouts: the whole free space is the ocean."""
    ocean = [list(t) for t in tri.mesh.tris]
    pieces = []
    for poly in domain.obstacles:
        pieces.extend(convex_partition(poly))
    cs = CorridorStructure(domain, tri, [], [], ocean, pieces, [], [],
                           fallback=True, owner=own)
    cs.components = [(list(o), []) for o in domain.obstacles]
    cs.gate_walls = []
    audit_structure(cs)
    return cs


def _make_corridor(mesh, alive, jset, j1, j2, door1, door2, chain):
    if not chain:
        # two junction triangles sharing a diagonal: zero-area corridor
        return Corridor((door1, door2), None, [], [],
                        Hourglass(False, [door1[0]], [door1[1]], None), (j1, j2))
    region = set(chain)
    stack = list(chain)
    while stack:
        t = stack.pop()
        for nb, _e in mesh.neighbors[t]:
            if not alive[nb] and nb not in region:
                region.add(nb)
                stack.append(nb)
    outers, holes = boundary_of_triangle_set([mesh.tris[t] for t in region])
    if len(outers) != 1 or holes:
        raise CorridorDegeneracy("corridor region is not a simple polygon")
    poly = ensure_ccw(outers[0])
    n = len(poly)

    def locate_edge(door):
        a, b = door
        for i in range(n):
            if {poly[i], poly[(i + 1) % n]} == {a, b}:
                return i
        raise RuntimeError("door not on corridor boundary")

    i1, i2 = locate_edge(door1), locate_edge(door2)
    # cycle: door1=(f,a) at i1, chain A = a..b, door2=(b,e) at i2, chain B = e..f
    chA = []
    k = (i1 + 1) % n
    while True:
        chA.append(poly[k])
        if k == i2:
            break
        k = (k + 1) % n
    chB = []
    k = (i2 + 1) % n
    while True:
        chB.append(poly[k])
        if k == i1:
            break
        k = (k + 1) % n
    c = Corridor(((poly[i1], poly[(i1 + 1) % n]), (poly[i2], poly[(i2 + 1) % n])),
                 poly, chA, chB, None, (j1, j2))
    _compute_hourglass(c)
    return c


def _compute_hourglass(c: Corridor):
    poly = c.polygon
    mesh = TriMesh(triangulate(poly))
    a, b = c.chainA[0], c.chainA[-1]
    e, f = c.chainB[0], c.chainB[-1]
    p1 = geodesic_in_polygon(poly, a, b, mesh)       # pi(a, b)
    p2 = geodesic_in_polygon(poly, e, f, mesh)       # pi(e, f)
    shared = _common_subpath(p1, p2)
    if not shared:
        c.hourglass = Hourglass(False, p1, p2, None)
    else:
        # p2 traverses the shared run reversed (it meets y first)
        if len(shared) > 1 and p2.index(shared[0]) < p2.index(shared[-1]):
            raise RuntimeError("corridor path orientation mismatch")
        c.hourglass = Hourglass(True, p1, p2, shared, path_l1_length(shared))
    return c.hourglass


def _hourglass_regions(c: Corridor):
    """(ocean pieces, bays, canals) contributed by one corridor.

    The corridor polygon is subdivided by the hourglass geodesics (minus the
    shared corridor path); faces holding a door are ocean, the rest are
    pockets whose chord runs are gates: one gate makes a bay, two a canal.
    """
    from .geom import orient, on_segment
    from .polygons import PSLG
    hg = c.hourglass
    poly = c.polygon
    if poly is None:
        return [], [], []
    p1, p2 = hg.side1, hg.side2
    n = len(poly)
    boundary_edges = {frozenset((poly[i], poly[(i + 1) % n])) for i in range(n)}

    shared_edges = set()
    if hg.closed and len(hg.corridor_path) > 1:
        cp = hg.corridor_path
        shared_edges = {frozenset((u, v)) for u, v in zip(cp, cp[1:])}
    chords = []
    seen = set()
    for path in (p1, p2):
        for u, v in zip(path, path[1:]):
            fs = frozenset((u, v))
            if fs in shared_edges or fs in boundary_edges or fs in seen:
                continue
            seen.add(fs)
            chords.append((u, v))

    if not chords:
        return [ensure_ccw(poly)], [], []

    # split chords at any vertex lying in their interior (keeps the PSLG planar)
    verts = set(poly) | {w for ch in chords for w in ch} | set(p1) | set(p2)
    pieces = []
    sub_chords = []
    for u, v in chords:
        cuts = [u, v] + [w for w in verts if w != u and w != v and on_segment(w, u, v)]
        if v.x != u.x:
            cuts.sort(key=lambda p: p.x, reverse=u.x > v.x)
        else:
            cuts.sort(key=lambda p: p.y, reverse=u.y > v.y)
        for a, b in zip(cuts, cuts[1:]):
            sub_chords.append((a, b))
    chord_set = {frozenset(e) for e in sub_chords}

    pslg = PSLG()
    for i in range(n):
        pslg.add_edge(poly[i], poly[(i + 1) % n])
    for a, b in sub_chords:
        pslg.add_edge(a, b)
        pslg.add_edge(b, a)
    faces = pslg.faces()

    door_edges = {frozenset(c.doors[0]), frozenset(c.doors[1])}
    ocean, bays, canals = [], [], []
    terminals = set(hg.terminals) if hg.closed else set()
    for cyc in faces:
        m = len(cyc)
        has_door = any(frozenset((cyc[i], cyc[(i + 1) % m])) in door_edges for i in range(m))
        if has_door:
            ocean.append(ensure_ccw(simplify_collinear(cyc)))
            continue
        # gate runs: maximal collinear runs of chord edges along the face cycle
        kinds = [frozenset((cyc[i], cyc[(i + 1) % m])) in chord_set for i in range(m)]
        if not any(kinds):
            raise RuntimeError("doorless face without a gate")
        start = next(i for i in range(m) if not kinds[i] and kinds[(i + 1) % m])
        runs = []
        i = (start + 1) % m
        cur = None
        for _ in range(m):
            if kinds[i]:
                a, b = cyc[i], cyc[(i + 1) % m]
                if cur and orient(cur[0], cur[-1], b) == 0 and cur[-1] == a:
                    cur.append(b)
                else:
                    if cur:
                        runs.append(cur)
                    cur = [a, b]
            else:
                if cur:
                    runs.append(cur)
                    cur = None
            i = (i + 1) % m
        if cur:
            runs.append(cur)
        face_poly = ensure_ccw(simplify_collinear(cyc))
        if len(runs) == 1:
            g = runs[0]
            bays.append(Bay((g[0], g[-1]), face_poly))
        elif len(runs) == 2:
            if not hg.closed:
                raise RuntimeError("two-gate pocket in an open hourglass")
            g1, g2 = runs
            # orient gates as (w, terminal)
            def as_gate(run):
                a, b = run[0], run[-1]
                return (a, b) if b in terminals else (b, a)
            canals.append(Canal((as_gate(g1), as_gate(g2)), face_poly,
                                hg.corridor_path, hg.length))
        else:
            raise RuntimeError(f"pocket with {len(runs)} gates")
    return ocean, bays, canals


def _convex_pieces(domain, bays, canals):
    """P': convex partition of R \\ M (obstacles glued with bays and canals).

    Returns (pieces, components): components are the dissolved outer cycles
    (plus holes) of the union; their boundaries are exactly the ocean
    boundary, so ear obstacle paths ride true free-space boundary.
    """
    parts = [list(o) for o in domain.obstacles]
    parts += [b.polygon for b in bays]
    parts += [c.polygon for c in canals]
    if not parts:
        return [], []
    outers, holes = dissolve(parts)
    hole_of = {i: [] for i in range(len(outers))}
    for h in holes:
        for i, o in enumerate(outers):
            if point_in_poly(h[0], o) > 0:
                hole_of[i].append(list(reversed(h)))
                break
    pieces = []
    for i, o in enumerate(outers):
        pieces.extend(convex_partition(o, hole_of[i]))
    return pieces, [(o, hole_of[i]) for i, o in enumerate(outers)]


def extract_bays_and_canals(cs: CorridorStructure):
    return cs.bays, cs.canals


def audit_structure(cs: CorridorStructure):
    """Exact area identity: ocean + bays + canals = free space."""
    dom = cs.domain
    r = dom.rect
    free2 = (r.xmax - r.xmin) * (r.ymax - r.ymin) * 2 - sum(poly_area2(o) for o in dom.obstacles)
    got = cs.ocean_area2() + sum(poly_area2(b.polygon) for b in cs.bays) \
        + sum(poly_area2(c.polygon) for c in cs.canals)
    if got != free2:
        raise ArithmeticError(f"area audit failed: ocean+bays+canals={got} vs free={free2}")
    pieces2 = sum(poly_area2(p) for p in cs.pieces)
    want = sum(poly_area2(o) for o in dom.obstacles) \
        + sum(poly_area2(b.polygon) for b in cs.bays) \
        + sum(poly_area2(c.polygon) for c in cs.canals)
    if cs.fallback:
        want = sum(poly_area2(o) for o in dom.obstacles)
    if pieces2 != want:
        raise ArithmeticError(f"piece partition audit failed: {pieces2} vs {want}")
    for path, _l in cs.corridor_paths:
        for t in (path[0], path[-1]):
            if not any(t in p for p in cs.pieces):
                raise AssertionError(f"corridor path terminal {t} is not a piece vertex")
