"""JSON assembly documents, verification reports and Wavefront OBJ export.

Floats are written with Python's shortest round-trip repr, so a write/read
cycle reproduces every coordinate bit for bit.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .assembly import Assembly, Contact
from .geometry import EPS_DIR, EPS_GEO, ConvexPolytope, HalfSpace, Polygon2, plane_frame
from .hyper import Contact4, Layer4, Poly4, hyperplane_section
from .lockcheck import MARGIN_TOL
from .reconstruct import Element
from .tilings import TilingFamily

SCHEMA_VERSION = "1.0"


class DocumentError(ValueError):
    pass


def _f(x) -> float:
    return float(x)


def _rows(a) -> list[list[float]]:
    return [[_f(v) for v in row] for row in np.asarray(a, dtype=float)]


def _hs_rows(hs: list[HalfSpace]) -> list[list[float]]:
    return [[_f(v) for v in h.normal] + [_f(h.offset)] for h in hs]


def assembly_to_doc(asm: Assembly, family: str | None = None) -> dict:
    fam = family or (asm.family.value if asm.family else "custom")
    geom = asm.geometry
    elements = []
    for k, e in enumerate(asm.elements):
        elements.append({
            "id": int(asm.ids[k]),
            "shape_tag": e.shape_tag,
            "interior": bool(asm.interior[k]),
            "cell_ref": [int(x) for x in e.cell_ref],
            "center": [_f(x) for x in e.center],
            "halfspaces": _hs_rows(e.body.halfspaces),
            "vertices": _rows(e.body.vertices),
            "faces": [[int(i) for i in f] for f in e.body.faces],
            "contact_face_ids": [int(i) for i in e.contact_face_ids],
            "edge_faces": {str(k2): int(v) for k2, v in sorted(e.edge_faces.items())},
        })
    contacts = [{
        "i": int(c.i), "j": int(c.j), "face_i": int(c.face_i), "face_j": int(c.face_j),
        "plane": [_f(v) for v in c.normal] + [_f(asm.elements[c.i].body.halfspaces[c.face_i].offset)],
        "overlap_vertices": _rows(c.polygon.lift()),
    } for c in asm.contacts]
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": 3,
        "family": fam,
        "alpha": None if geom is None else _f(geom.alpha),
        "half_thickness": None if geom is None else _f(geom.half_thickness),
        "elements": elements,
        "contacts": contacts,
    }


def _polygon_from_3d(points: np.ndarray, normal: np.ndarray) -> Polygon2:
    frame = plane_frame(normal, points.mean(axis=0))
    o, u, v = frame
    local = np.column_stack([(points - o) @ u, (points - o) @ v])
    return Polygon2(local, frame, points)


def doc_to_assembly(doc: dict) -> Assembly:
    if doc.get("dim", 3) != 3:
        raise DocumentError("not a 3-D assembly document")
    from .reconstruct import LayerGeometry
    elements, interior, ids = [], [], []
    for e in doc["elements"]:
        hs = [HalfSpace(np.array(r[:-1], dtype=float), float(r[-1])) for r in e["halfspaces"]]
        verts = np.array(e["vertices"], dtype=float).reshape(-1, 3)
        body = ConvexPolytope(hs, verts, [list(f) for f in e["faces"]], True)
        elements.append(Element(body, tuple(e.get("cell_ref", (0, 0))), list(e.get("contact_face_ids", [])),
                                e.get("shape_tag", "Prismatoid"),
                                {int(k): int(v) for k, v in e.get("edge_faces", {}).items()},
                                np.array(e.get("center", verts.mean(axis=0)), dtype=float)))
        interior.append(bool(e.get("interior", True)))
        ids.append(int(e["id"]))
    contacts = []
    for c in doc["contacts"]:
        n = np.array(c["plane"][:3], dtype=float)
        pts = np.array(c["overlap_vertices"], dtype=float)
        contacts.append(Contact(int(c["i"]), int(c["j"]), int(c["face_i"]), int(c["face_j"]), n,
                                _polygon_from_3d(pts, n)))
    family = None
    try:
        family = TilingFamily.parse(doc.get("family", ""))
    except (ValueError, KeyError):
        pass
    geom = None
    if family is not None and doc.get("alpha") is not None and doc.get("half_thickness") is not None:
        geom = LayerGeometry(float(doc["half_thickness"]), float(doc["alpha"]), family)
    return Assembly(elements, contacts, interior, family, geom, ids)


def layer4_to_doc(layer: Layer4) -> dict:
    elements = [{
        "id": k, "site": [int(s) for s in layer.sites[k]], "interior": bool(layer.interior[k]),
        "shape_tag": "Tesseract", "center": [_f(x) for x in e.center],
        "halfspaces": _hs_rows(e.halfspaces), "vertices": _rows(e.vertices()),
    } for k, e in enumerate(layer.elements)]
    contacts = [{"i": int(c.i), "j": int(c.j), "plane": [_f(v) for v in c.normal] + [_f(c.offset)],
                 "overlap_vertices": _rows(c.overlap)} for c in layer.contacts]
    return {"schema_version": SCHEMA_VERSION, "dim": 4, "family": "tesseract-octa", "alpha": None,
            "half_thickness": None, "elements": elements, "contacts": contacts}


def doc_to_layer4(doc: dict) -> Layer4:
    if doc.get("dim") != 4:
        raise DocumentError("not a 4-D assembly document")
    elements, sites, interior = [], [], []
    for e in doc["elements"]:
        hs = [HalfSpace(np.array(r[:-1], dtype=float), float(r[-1])) for r in e["halfspaces"]]
        elements.append(Poly4(hs, np.array(e["center"], dtype=float)))
        sites.append(tuple(e.get("site", (0, 0, 0))))
        interior.append(bool(e.get("interior", True)))
    contacts = [Contact4(int(c["i"]), int(c["j"]), np.array(c["plane"][:4], dtype=float), float(c["plane"][4]),
                         np.array(c["overlap_vertices"], dtype=float).reshape(-1, 3)) for c in doc["contacts"]]
    return Layer4(elements, contacts, sites, interior)


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def write_json(doc, path) -> None:
    Path(path).write_text(dumps(doc))


def read_json(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict) or "elements" not in doc or "contacts" not in doc:
        raise DocumentError(f"{path} is not an assembly document")
    return doc


def report_doc(report: dict, mode: str, tol: float = EPS_GEO) -> dict:
    out = dict(report)
    out["version"] = __version__
    out["schema_version"] = SCHEMA_VERSION
    out["mode"] = mode
    out["tolerances"] = {"eps_geo": tol, "eps_dir": EPS_DIR, "margin": MARGIN_TOL}
    return out


# ------------------------------------------------------------ OBJ

def _fmt(x: float) -> str:
    return repr(float(x) + 0.0)


def obj_text(meshes) -> str:
    """``meshes`` is a sequence of ``(name, vertices, faces)``; faces are fan-triangulated."""
    lines = []
    base = 1
    for name, verts, faces in meshes:
        lines.append(f"o {name}")
        for v in verts:
            lines.append("v " + " ".join(_fmt(x) for x in v))
        for f in faces:
            for k in range(1, len(f) - 1):
                lines.append(f"f {f[0] + base} {f[k] + base} {f[k + 1] + base}")
        base += len(verts)
    return "\n".join(lines) + "\n"


def assembly_meshes(asm: Assembly):
    return [(f"element_{asm.ids[k]}", e.body.vertices, e.body.faces) for k, e in enumerate(asm.elements)]


def layer4_section_meshes(layer: Layer4, w: float):
    out = []
    for k, e in enumerate(layer.elements):
        sec = hyperplane_section(e, w)
        if sec is None or not sec.bounded or len(sec.vertices) < 4:
            continue
        out.append((f"element_{k}", sec.vertices, sec.faces))
    return out
