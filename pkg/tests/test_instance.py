import json

import pytest

from l1pm.geom import Pt, Rect
from l1pm.instance import (parse_instance, perturb_to_general_position, render_svg,
                           InstanceError, PolygonalDomain, validate_domain)
from helpers import load_corpus


def _inst(**kw):
    base = {"rect": [0, 0, 100, 100], "source": [1, 1], "obstacles": []}
    base.update(kw)
    return json.dumps(base).encode()


def test_parse_empty_domain():
    dom = parse_instance(_inst())
    assert dom.h == 0 and dom.source == Pt(1, 1)


def test_general_position_rejection_names_both_vertices():
    data = _inst(obstacles=[[[10, 10], [30, 15], [20, 32]], [[10, 40], [85, 47], [70, 65]]])
    with pytest.raises(InstanceError) as e:
        parse_instance(data)
    assert e.value.invariant == "general-position"
    assert "(10,10)" in str(e.value) and "(10,40)" in str(e.value)


def test_corpus_tri_pair_counts():
    dom = load_corpus("tri_pair")
    assert dom.h == 2 and dom.n == 6


def test_parse_rejects_floats():
    with pytest.raises(InstanceError) as e:
        parse_instance(json.dumps({"rect": [0, 0, 10, 10], "source": [1.5, 1],
                                   "obstacles": []}).encode())
    assert e.value.invariant == "syntax"


def test_self_intersecting_obstacle_rejected():
    data = _inst(obstacles=[[[10, 10], [30, 30], [30, 11], [11, 29]]])
    with pytest.raises(InstanceError) as e:
        parse_instance(data)
    assert e.value.invariant == "obstacle-simple"


def test_source_inside_obstacle_rejected():
    data = _inst(source=[20, 21], obstacles=[[[10, 10], [31, 12], [22, 33]]])
    with pytest.raises(InstanceError) as e:
        parse_instance(data)
    assert e.value.invariant == "source-in-free-space"


def test_perturb_square():
    rect = Rect(Pt(0, 0), Pt(100, 100))
    polys = [[Pt(10, 10), Pt(20, 10), Pt(20, 20), Pt(10, 20)]]
    dom0 = PolygonalDomain(rect, polys, Pt(1, 1), [])
    dom, offsets = perturb_to_general_position(dom0, seed=7)
    assert offsets
    validate_domain(dom.rect, dom.obstacles, dom.source, dom.sites)
    for _oi, _vi, _axis, off in offsets:
        assert 0 < off < 1  # below a quarter of the minimum gap (10/4)


def test_perturb_idempotent():
    dom = load_corpus("tri_pair")
    same, offsets = perturb_to_general_position(dom, seed=3)
    assert offsets == [] and same.obstacles == dom.obstacles


def test_perturb_two_stacked_rectangles():
    rect = Rect(Pt(0, 0), Pt(100, 100))
    polys = [[Pt(10, 10), Pt(30, 10), Pt(30, 20), Pt(10, 20)],
             [Pt(10, 40), Pt(30, 40), Pt(30, 50), Pt(10, 50)]]
    dom0 = PolygonalDomain(rect, polys, Pt(1, 1), [])
    dom, offsets = perturb_to_general_position(dom0, seed=1)
    validate_domain(dom.rect, dom.obstacles, dom.source, dom.sites)
    assert len(offsets) >= 6


def test_roundtrip_serialization():
    dom = load_corpus("closed_hourglass")
    again = parse_instance(dom.to_json())
    assert again.obstacles == dom.obstacles and again.source == dom.source
    assert parse_instance(again.to_json()).to_json() == dom.to_json()


def test_render_svg_basics():
    dom = load_corpus("tri_pair")
    svg = render_svg(dom)
    assert svg.startswith(b"<?xml") and svg.count(b"<polygon") == 2
    svg2 = render_svg(dom, path=[Pt(5, 50), Pt(40, 50), Pt(90, 90), Pt(95, 95)])
    assert b"<polyline" in svg2 and svg2.count(b",") >= 4


def test_render_svg_spm_regions():
    from l1pm.query import build_map
    dom = parse_instance(_inst(source=[5, 50],
                               obstacles=[[[30, 30], [60, 25], [45, 62]]]))
    m = build_map(dom)
    cells = [(c.polygon, (c.root, c.weight)) for c in m.spm.cells]
    svg = render_svg(dom, "spm", cells=cells)
    assert svg.count(b"<polygon") == len(cells) + dom.h
