"""Generators and corpus loaders shared by the test suite."""
import json
import math
import random
from pathlib import Path
from fractions import Fraction

from l1pm.geom import Pt, Rect, fr, l1_dist, WeightedSite, site_dist
from l1pm.instance import PolygonalDomain, validate_domain, parse_instance, InstanceError

CORPUS = Path(__file__).parent / "corpus"


def load_corpus(name):
    return parse_instance((CORPUS / f"{name}.json").read_bytes())


def random_domain(seed, hmax=8, nmax=64, coord=1000, nsites=0, convex=False):
    """Random valid domain: star-shaped obstacles in disjoint grid slots."""
    rng = random.Random(seed)
    h = rng.randint(1, hmax)
    gs = math.ceil(math.sqrt(h + 1 + nsites))
    slots = [(i, j) for i in range(gs) for j in range(gs)]
    rng.shuffle(slots)
    cell = coord // gs
    used_x, used_y = set(), set()
    obstacles = []
    budget = nmax
    for k in range(h):
        i, j = slots[k]
        nv = rng.randint(3, min(8, max(3, budget - 3 * (h - k - 1))))
        budget -= nv
        cx = i * cell + cell // 2
        cy = j * cell + cell // 2
        rad = cell * 0.38
        angs = sorted(rng.uniform(0, 2 * math.pi) for _ in range(nv))
        ok = True
        pts = []
        for a in angs:
            r = rad if convex else rng.uniform(0.35, 1.0) * rad
            for _try in range(60):
                x = int(round(cx + r * math.cos(a)))
                y = int(round(cy + r * math.sin(a)))
                if x not in used_x and y not in used_y and 1 <= x < coord and 1 <= y < coord:
                    break
                x += rng.randint(-3, 3)
                y += rng.randint(-3, 3)
                x = min(max(x, 1), coord - 1)
                y = min(max(y, 1), coord - 1)
            else:
                ok = False
                break
            used_x.add(x)
            used_y.add(y)
            pts.append(Pt(x, y))
        if not ok or len(pts) < 3:
            continue
        obstacles.append(pts)
    si, sj = slots[h]
    rngpt = lambda ii, jj: Pt(rng.randint(ii * cell + 2, ii * cell + cell - 2),
                              rng.randint(jj * cell + 2, jj * cell + cell - 2))
    src = rngpt(si, sj)
    sites = []
    for k in range(nsites):
        ii, jj = slots[(h + 1 + k) % len(slots)]
        sites.append(rngpt(ii, jj))
    rect = Rect(Pt(0, 0), Pt(coord, coord))
    try:
        return validate_domain(rect, obstacles, src, sites)
    except InstanceError:
        return None


def hourglass_domain(seed=0, coord=100):
    """Interlocking bars with a closed hourglass; jittered but structured."""
    rng = random.Random(seed)
    j = lambda: rng.randint(0, 2)
    A = [(10, 55), (34, 54), (36, 27), (44, 26), (42, 53), (70, 52), (71, 64), (11, 66)]
    B = [(20, 8), (85, 9), (84, 16), (63, 15), (61, 49), (55, 48), (57, 14), (21, 13)]
    scale = fr(coord, 100)
    mk = lambda pts: [Pt(x * scale, y * scale) for x, y in pts]
    rect = Rect(Pt(0, 0), Pt(coord, coord))
    return validate_domain(rect, [mk(A), mk(B)], Pt(3 * scale, 40 * scale), [])


def synthetic_front(seed, kmax=12, nmax=40):
    """A synthetic canonical gate front plus a bay polygon, or None.

    Random weighted sites northwest of the gate induce an exact 1D envelope
    on the gate; its runs form a genuine front (the weighted Voronoi of free
    sites is an SPM).  Returns (bay_polygon, roots, vertices) in canonical
    orientation, or None when the draw degenerates.
    """
    rng = random.Random(seed)
    c = Pt(fr(0), fr(0))
    d = Pt(fr(-60), fr(-100))

    def at(t):
        return Pt(c.x + t * (d.x - c.x), c.y + t * (d.y - c.y))

    m = rng.randint(2, kmax + 3)
    sites = []
    for _ in range(m):
        # strictly northwest of the gate line y = (100/60) x
        x = fr(rng.randint(-140, 30)) + fr(rng.randint(1, 7), 8)
        ymin = fr(100, 60) * x
        y = ymin + fr(rng.randint(8, 120)) + fr(rng.randint(1, 7), 8)
        w = fr(rng.randint(0, 80)) + fr(rng.randint(0, 7), 8)
        sites.append(WeightedSite(Pt(x, y), w))

    # exact envelope on the gate: refine params at kinks and pair crossings
    ts = {fr(0), fr(1)}
    for s2 in sites:
        for t in _gate_kinks(c, d, s2.point):
            ts.add(t)
    work = sorted(ts)
    for _ in range(3):
        newts = set(work)
        for t0, t1 in zip(work, work[1:]):
            # within (t0,t1) every f_i is linear; add pairwise crossings
            for i in range(len(sites)):
                for j2 in range(i + 1, len(sites)):
                    t = _linear_cross(c, d, sites[i], sites[j2], t0, t1)
                    if t is not None:
                        newts.add(t)
        if len(newts) == len(work):
            break
        work = sorted(newts)
    runs = []
    for t0, t1 in zip(work, work[1:]):
        tm = fr(t0 + t1, 2)
        p = at(tm)
        vals = [(site_dist(s2, p), s2.point.x, s2.point.y, i) for i, s2 in enumerate(sites)]
        vals.sort()
        if len(vals) > 1 and vals[0][:1] == vals[1][:1]:
            return None  # tie on an interval: degenerate draw
        w = vals[0][3]
        if runs and runs[-1][0] == w:
            runs[-1][2] = t1
        else:
            runs.append([w, t0, t1])
    if len(runs) < 2 or len(runs) > kmax:
        return None
    roots = [sites[w] for w, _t0, _t1 in runs]
    verts = [at(runs[0][1])] + [at(t1) for _w, _t0, t1 in runs]

    # bay polygon: a fan of staircase points southeast of the gate
    nq = rng.randint(2, max(2, min(10, nmax - 2)))
    qs = []
    for i in range(nq):
        t = fr(2 * i + 1, 2 * nq) + fr(rng.randint(0, 7), 100 * nq)
        base = at(t)
        off = fr(rng.randint(15, 90)) + fr(rng.randint(1, 7), 8)
        # push along the southeast normal (100, -60)/gcd -> (5, -3)
        qs.append(Pt(base.x + 5 * off, base.y - 3 * off))
    poly = [c, d] + list(reversed(qs))
    from l1pm.polygons import poly_area2
    from l1pm.geom import segments_cross
    n = len(poly)
    if len(set(poly)) != n or poly_area2(poly) <= 0:
        return None
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if a.x == b.x or a.y == b.y:
            return None
        for j2 in range(i + 1, n):
            if j2 == i or (j2 + 1) % n == i or (i + 1) % n == j2:
                continue
            if segments_cross(a, b, poly[j2], poly[(j2 + 1) % n]):
                return None
    # genuineness: every root influences the bay only through the gate
    for r in roots:
        for b in poly:
            if b in (c, d):
                continue
            if not segments_cross(r.point, b, c, d):
                return None
    return poly, roots, verts


def _gate_kinks(c, d, p):
    out = []
    if d.x != c.x and min(c.x, d.x) < p.x < max(c.x, d.x):
        out.append(fr(p.x - c.x, d.x - c.x))
    if d.y != c.y and min(c.y, d.y) < p.y < max(c.y, d.y):
        out.append(fr(p.y - c.y, d.y - c.y))
    return out


def _linear_cross(c, d, s1, s2, t0, t1):
    """Crossing of two site distance functions inside (t0, t1), if linear there."""
    tm0, tm1 = t0 + fr(t1 - t0, 100), t1 - fr(t1 - t0, 100)
    def at(t):
        return Pt(c.x + t * (d.x - c.x), c.y + t * (d.y - c.y))
    g0 = site_dist(s1, at(t0)) - site_dist(s2, at(t0))
    g1 = site_dist(s1, at(t1)) - site_dist(s2, at(t1))
    if g0 == g1 or (g0 > 0) == (g1 > 0):
        return None
    t = t0 + (t1 - t0) * fr(abs(g0), abs(g0) + abs(g1))
    if t0 < t < t1:
        return t
    return None
