"""Versioned binary map format with length-prefixed sections.

Layout: magic ``L1PM`` + u32 version + sections.  Each section is a u8 name
length, the name bytes, a u64 payload length, and the payload (canonical
UTF-8 text, rationals as ``n`` or ``n/d``).  Writing is canonical, so a
load/save round-trip is bit-exact.
"""
from __future__ import annotations

import struct
from fractions import Fraction

from .geom import Pt, fr
from .instance import PolygonalDomain, parse_instance
from .spm_ocean import Spm, SpmCell, StructInfo, Propagation
from .cores import Ear

MAGIC = b"L1PM"
VERSION = 1


def _num(v) -> str:
    f = Fraction(v)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _pt(p: Pt) -> str:
    return f"{_num(p.x)},{_num(p.y)}"


def _parse_num(s: str):
    if "/" in s:
        n, d = s.split("/")
        return fr(int(n), int(d))
    return int(s)


def _parse_pt(s: str) -> Pt:
    x, y = s.split(",")
    return Pt(_parse_num(x), _parse_num(y))


def _poly(poly) -> str:
    return ";".join(_pt(p) for p in poly)


def _parse_poly(s: str):
    return [_parse_pt(t) for t in s.split(";")] if s else []


def dump_map(m) -> bytes:
    """Serialize an SpmMap."""
    spm = m.spm
    sections = []
    sections.append(("domain", m.domain.to_json().decode()))
    lines = []
    for c in spm.cells:
        par = _pt(c.parent) if c.parent is not None else "-"
        lines.append(f"{_pt(c.root)}|{_num(c.weight)}|{par}|{c.struct}|{c.label}|{_poly(c.polygon)}")
    sections.append(("cells", "\n".join(lines)))
    lines = []
    for st in spm.structs:
        pars = ";".join(f"{_pt(k)}>{_pt(v) if v is not None else '-'}"
                        for k, v in st.parents.items())
        site = st.site if st.site is not None else "-"
        anc = st.anchor_cell if st.anchor_cell is not None else "-"
        ar = _pt(st.anchor_root) if st.anchor_root is not None else "-"
        lines.append(f"{st.kind}|{site}|{anc}|{ar}|{pars}")
    sections.append(("structs", "\n".join(lines)))
    p = spm.prop
    lines = [
        ";".join(_pt(q) for q in p.sites),
        ";".join(_num(d) if d is not None else "-" for d in p.d),
        ";".join(str(x) if x is not None else "-" for x in p.pred),
        ";".join("1" if x else "0" for x in p.via_corridor),
        ";".join(str(x) if x is not None else "-" for x in p.label),
    ]
    for i, j, ln, pathpl in p.corridor_edges:
        lines.append(f"{i}|{j}|{_num(ln)}|{_poly(pathpl)}")
    sections.append(("prop", "\n".join(lines)))
    sections.append(("pieces", "\n".join(_poly(q) for q in spm.pieces)))
    lines = []
    for e in spm.ears:
        lines.append(f"{e.piece_index}|{_pt(e.core_edge[0])}|{_pt(e.core_edge[1])}|{_poly(e.obstacle_path)}")
    sections.append(("ears", "\n".join(lines)))
    lines = []
    for root, member, pathpl, dr, dm in spm.pseudo_cells:
        lines.append(f"{_pt(root)}|{_pt(member)}|{_num(dr)}|{_num(dm)}|{_poly(pathpl)}")
    sections.append(("pseudo", "\n".join(lines)))

    out = [MAGIC, struct.pack("<I", VERSION)]
    for name, payload in sections:
        nb = name.encode()
        pb = payload.encode()
        out.append(struct.pack("<B", len(nb)))
        out.append(nb)
        out.append(struct.pack("<Q", len(pb)))
        out.append(pb)
    return b"".join(out)


def load_map(data: bytes):
    """Reconstruct an SpmMap from bytes (inverse of dump_map)."""
    from .query import SpmMap
    from .corridors import build_corridor_structure
    if data[:4] != MAGIC:
        raise ValueError("not an l1pm map file")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise ValueError(f"unsupported map version {version}")
    pos = 8
    sections = {}
    while pos < len(data):
        (nl,) = struct.unpack_from("<B", data, pos)
        pos += 1
        name = data[pos:pos + nl].decode()
        pos += nl
        (pl,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        sections[name] = data[pos:pos + pl].decode()
        pos += pl

    domain = parse_instance(sections["domain"].encode())
    cells = []
    if sections["cells"]:
        for line in sections["cells"].split("\n"):
            root, w, par, stid, lab, poly = line.split("|")
            cells.append(SpmCell(_parse_poly(poly), _parse_pt(root), _parse_num(w),
                                 None if par == "-" else _parse_pt(par),
                                 int(stid), int(lab)))
    structs = []
    if sections["structs"]:
        for line in sections["structs"].split("\n"):
            kind, site, anc, ar, pars = (line.split("|") + [""])[:5]
            parents = {}
            if pars:
                for kv in pars.split(";"):
                    k, v = kv.split(">")
                    parents[_parse_pt(k)] = None if v == "-" else _parse_pt(v)
            structs.append(StructInfo(kind,
                                      site=None if site == "-" else int(site),
                                      parents=parents,
                                      anchor_cell=None if anc == "-" else int(anc),
                                      anchor_root=None if ar == "-" else _parse_pt(ar)))
    plines = sections["prop"].split("\n")
    sites = [_parse_pt(t) for t in plines[0].split(";")] if plines[0] else []
    dvals = [None if t == "-" else _parse_num(t) for t in plines[1].split(";")] if plines[1] else []
    preds = [None if t == "-" else int(t) for t in plines[2].split(";")] if plines[2] else []
    vias = [t == "1" for t in plines[3].split(";")] if plines[3] else []
    labels = [None if t == "-" else int(t) for t in plines[4].split(";")] if plines[4] else []
    cedges = []
    for line in plines[5:]:
        if not line:
            continue
        i, j, ln, poly = line.split("|")
        cedges.append((int(i), int(j), _parse_num(ln), _parse_poly(poly)))
    prop = Propagation(sites, [None] * len(sites), [None] * len(sites), dvals,
                       preds, vias, labels, [], {}, cedges)
    pieces = [_parse_poly(t) for t in sections["pieces"].split("\n")] \
        if sections["pieces"] else []
    ears = []
    if sections["ears"]:
        for line in sections["ears"].split("\n"):
            pi, a, b, poly = line.split("|")
            chain = _parse_poly(poly)
            from .polygons import ensure_ccw
            ears.append(Ear(int(pi), (_parse_pt(a), _parse_pt(b)), chain,
                            ensure_ccw(list(chain))))
    pseudo = []
    if sections["pseudo"]:
        for line in sections["pseudo"].split("\n"):
            root, member, dr, dm, poly = line.split("|")
            pseudo.append((_parse_pt(root), _parse_pt(member), _parse_poly(poly),
                           _parse_num(dr), _parse_num(dm)))
    spm = Spm(cells, structs, pseudo, prop=prop, cores=[], ears=ears, pieces=pieces)
    return SpmMap(domain, None, spm)
