"""Command line front end: build, query, path, gvd, render, check, bench."""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction

from .geom import Pt, fr
from .instance import parse_instance, perturb_to_general_position, render_svg, InstanceError
from .oracle import VisOracle
from . import mapio


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(64)


def _num_str(v) -> str:
    f = Fraction(v)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _parse_point(s: str) -> Pt:
    x, y = s.split(",")

    def one(t):
        t = t.strip()
        if "/" in t:
            n, d = t.split("/")
            return fr(int(n), int(d))
        return int(t)

    return Pt(one(x), one(y))


def _load_domain(args):
    with open(args.instance, "rb") as f:
        data = f.read()
    dom = parse_instance(data)
    if getattr(args, "perturb", False):
        dom, _offsets = perturb_to_general_position(dom, getattr(args, "seed", 0) or 0)
    return dom


def cmd_build(args):
    dom = _load_domain(args)
    from .query import build_map
    m = build_map(dom)
    with open(args.output, "wb") as f:
        f.write(mapio.dump_map(m))
    print(f"built map: {len(m.spm.cells)} cells, {len(m.spm.pseudo_cells)} pseudo-cells")
    return 0


def cmd_query(args):
    with open(args.map, "rb") as f:
        m = mapio.load_map(f.read())
    t = _parse_point(args.point)
    from .query import distance, path
    print(_num_str(distance(m, t)))
    if args.path:
        pl = path(m, t)
        print(" ".join(f"{_num_str(p.x)},{_num_str(p.y)}" for p in pl))
    return 0


def cmd_check(args):
    dom = _load_domain(args)
    from .query import build_map, distance
    m = build_map(dom, strict=True)
    oracle = VisOracle(dom.obstacles)
    rng = random.Random(args.seed)
    r = dom.rect
    ok = total = 0
    while total < args.samples:
        p = Pt(rng.randint(int(r.xmin), int(r.xmax)),
               rng.randint(int(r.ymin), int(r.ymax)))
        if not dom.free_space_contains(p):
            continue
        total += 1
        got = distance(m, p)
        want = oracle.query(dom.source, p)
        if got == want:
            ok += 1
        else:
            print(f"mismatch at {p}: map={_num_str(got)} oracle={_num_str(want)}")
    print(f"{ok}/{total} exact matches")
    return 0 if ok == total else 2


def cmd_bench(args):
    dom = _load_domain(args)
    from .query import build_map, distance
    t0 = time.perf_counter()
    m = build_map(dom)
    build_ms = (time.perf_counter() - t0) * 1000.0
    rng = random.Random(args.seed)
    r = dom.rect
    times = []
    done = 0
    while done < args.queries:
        p = Pt(rng.randint(int(r.xmin), int(r.xmax)),
               rng.randint(int(r.ymin), int(r.ymax)))
        if not dom.free_space_contains(p):
            continue
        t1 = time.perf_counter()
        distance(m, p)
        times.append((time.perf_counter() - t1) * 1e6)
        done += 1
    times.sort()
    p50 = times[len(times) // 2] if times else 0.0
    report = {"n": dom.n, "h": dom.h, "build_ms": round(build_ms, 3),
              "query_us_p50": round(p50, 3), "cells": len(m.spm.cells)}
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_gvd(args):
    dom = _load_domain(args)
    from .extensions import gvd
    res = gvd(dom)
    cells = [(c.polygon, c.label) for c in res.map.spm.cells]
    svg = render_svg(dom, "gvd", cells=cells)
    with open(args.output, "wb") as f:
        f.write(svg)
    print(f"gvd: {len(res.sites)} sites, {len(res.map.spm.cells)} cells -> {args.output}")
    return 0


def cmd_render(args):
    dom = _load_domain(args)
    overlay = args.overlay
    kw = {}
    if overlay in ("spm", "gvd"):
        from .query import build_map
        m = build_map(dom)
        key = (lambda c: c.label) if overlay == "gvd" else (lambda c: (c.root, c.weight))
        kw["cells"] = [(c.polygon, key(c)) for c in m.spm.cells]
    elif overlay == "corridors":
        from .corridors import build_corridor_structure
        cs = build_corridor_structure(dom)
        kw["corridor_data"] = {
            "junctions": [cs.tri.mesh.tris[j] for j in cs.junction_ids],
            "corridor_paths": [p for p, _l in cs.corridor_paths],
            "gates": [list(b.gate) for b in cs.bays]
                      + [list(g) for c in cs.canals for g in c.gates],
        }
    if args.path_to:
        from .query import build_map, path
        m = build_map(dom)
        kw["path"] = path(m, _parse_point(args.path_to))
    svg = render_svg(dom, overlay if overlay != "path" else "none", **kw)
    with open(args.output, "wb") as f:
        f.write(svg)
    print(f"rendered -> {args.output}")
    return 0


def cmd_path(args):
    dom = _load_domain(args)
    t = _parse_point(args.to)
    if args.delta is not None:
        from .extensions import approx_euclidean
        length, pl, c = approx_euclidean(dom, dom.source, t, Fraction(args.delta))
        print(f"{float(length)} (certificate: {c} orientations)")
    elif args.orientations:
        from .extensions import OrientationSet, c_oriented_shortest_path
        length, pl = c_oriented_shortest_path(dom, dom.source, t,
                                              OrientationSet(args.orientations))
        print(_num_str(length) if isinstance(length, (int, Fraction)) else float(length))
    else:
        from .query import shortest_path
        length, pl = shortest_path(dom, dom.source, t)
        print(_num_str(length))
    print(" ".join(f"{_num_str(p.x)},{_num_str(p.y)}" for p in pl))
    return 0


def main(argv=None) -> int:
    ap = _Parser(prog="l1pm", description="Exact L1 shortest path maps")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("build")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--perturb", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("query")
    p.add_argument("-m", "--map", required=True)
    p.add_argument("-p", "--point", required=True)
    p.add_argument("--path", action="store_true")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("check")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perturb", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("bench")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--queries", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("gvd")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_gvd)

    p = sub.add_parser("render")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--overlay", default="none",
                   choices=["none", "spm", "gvd", "corridors"])
    p.add_argument("--path-to", default=None)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("path")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--orientations", type=int, default=None)
    p.add_argument("--delta", default=None)
    p.set_defaults(fn=cmd_path)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except InstanceError as e:
        print(f"invalid instance: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"cannot open: {e}", file=sys.stderr)
        return 1
    except (AssertionError, ArithmeticError) as e:
        print(f"internal invariant failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
