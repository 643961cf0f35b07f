import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import json
from fractions import Fraction

import pytest

from l1pm.geom import Pt, fr, WeightedSite


def parse_front_obj(obj):
    num = lambda v: fr(Fraction(v)) if isinstance(v, str) else fr(v)
    pt = lambda p: Pt(num(p[0]), num(p[1]))
    roots = [WeightedSite(pt(p), num(w)) for p, w in zip(obj["roots"], obj["weights"])]
    verts = [pt(p) for p in obj["vertices"]]
    bay = [pt(p) for p in obj["bay"]]
    return bay, roots, verts


@pytest.fixture(scope="session")
def fronts_corpus():
    path = Path(__file__).parent / "corpus" / "fronts.json"
    return json.loads(path.read_text())
