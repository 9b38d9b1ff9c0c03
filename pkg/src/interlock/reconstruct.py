"""Moving cross-section reconstruction of layer elements.

Tetrahedra, cubes and octahedra are rebuilt purely from the tilted planes
through their middle-section edges (octahedra additionally need the slab).
Dodecahedra and icosahedra are placed from canonical coordinates because the
edge planes alone only give their belt faces.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .geometry import (EPS_GEO, ConvexPolytope, EmptyRegion, GeometryError, HalfSpace,
                       hrep_to_vrep, polygon_area)
from .solids import placed_halfspaces
from .tilings import ArrowDiagram, Cell, TilingFamily

SHAPES = ("Tetrahedron", "Cube", "Octahedron", "Dodecahedron", "Icosahedron", "Prismatoid")


class ReconstructError(GeometryError):
    pass


class DegenerateEdge(ReconstructError):
    pass


class EmptyBody(ReconstructError):
    pass


class SectionMismatch(ReconstructError):
    pass


@dataclass(frozen=True)
class LayerGeometry:
    half_thickness: float
    alpha: float
    family: TilingFamily


@dataclass(eq=False)
class Element:
    body: ConvexPolytope
    cell_ref: tuple[int, int]
    contact_face_ids: list[int]
    shape_tag: str
    edge_faces: dict[int, int] = field(default_factory=dict)
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def translated(self, t) -> "Element":
        t = np.asarray(t, dtype=float)
        return Element(self.body.translated(t), self.cell_ref, list(self.contact_face_ids),
                       self.shape_tag, dict(self.edge_faces), self.center + t)


def edge_plane(a, b, sigma: int, alpha: float, outward=None) -> HalfSpace:
    """Tilted plane through the z = 0 edge ``a -> b`` keeping the cell side.

    The outward in-plane normal ``m`` defaults to the right-hand normal of a
    counter-clockwise edge. The resulting unit normal is
    ``(cos(alpha) m, -sigma sin(alpha))`` so the trace at height ``d`` sits
    ``d tan(alpha)`` out of the cell when ``sigma = +1``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    if np.linalg.norm(d) <= EPS_GEO:
        raise DegenerateEdge("edge has zero length")
    if outward is None:
        m = np.array([d[1], -d[0]]) / np.linalg.norm(d)
    else:
        m = np.asarray(outward, dtype=float) / np.linalg.norm(outward)
    ca, sa = np.cos(alpha), np.sin(alpha)
    normal = np.array([ca * m[0], ca * m[1], -sigma * sa])
    return HalfSpace(normal, float(ca * (m @ a)))


def slab(h: float) -> list[HalfSpace]:
    return [HalfSpace(np.array([0.0, 0.0, 1.0]), h), HalfSpace(np.array([0.0, 0.0, -1.0]), h)]


def _match_face(body: ConvexPolytope, h: HalfSpace, tol: float = 1e-9) -> int | None:
    for k, g in enumerate(body.halfspaces):
        if np.allclose(g.normal, h.normal, atol=tol) and abs(g.offset - h.offset) <= tol * 10:
            return k
    return None


def _edge_halfspaces(cell: Cell, signs, alpha: float) -> dict[int, HalfSpace]:
    return {k: edge_plane(*cell.edge(k), s, alpha) for k, s in enumerate(signs) if s != 0}


def default_half_thickness(cell: Cell, signs, family: TilingFamily, alpha: float) -> float:
    """Slab half-thickness per family: apex height, octahedron face height, or solid height."""
    if family in (TilingFamily.SquareTetra, TilingFamily.HexCube):
        body = hrep_to_vrep(list(_edge_halfspaces(cell, signs, alpha).values()), 3)
        if not body.bounded:
            raise EmptyBody("edge planes do not close; give an explicit half-thickness")
        return float(np.abs(body.vertices[:, 2] - 0.0).max())
    if family is TilingFamily.HexOcta:
        body = hrep_to_vrep(list(_edge_halfspaces(cell, signs, alpha).values()), 3)
        z = body.vertices[:, 2]
        return float(z[z > EPS_GEO].min())
    shape, order = _canonical_axis(family)
    hs = _canonical_prototype(shape, order, round(_apothem(cell), 12), round(_rotation(cell), 12))
    return float(hrep_to_vrep(list(hs), 3).vertices[:, 2].max())


def _canonical_axis(family: TilingFamily) -> tuple[str, int]:
    return {
        TilingFamily.HexDodeca: ("Dodecahedron", 3),
        TilingFamily.DecagonIcosa: ("Icosahedron", 5),
        TilingFamily.DecagonDodeca: ("Dodecahedron", 5),
    }[family]


def _apothem(cell: Cell) -> float:
    a, b = cell.edge(0)
    return float(cell.edge_normal(0) @ (a - cell.center))


def _rotation(cell: Cell) -> float:
    n = cell.edge_normal(0)
    return float(np.arctan2(n[1], n[0]))


@lru_cache(maxsize=64)
def _canonical_prototype(shape: str, order: int, apothem: float, rotation: float) -> tuple[HalfSpace, ...]:
    return tuple(placed_halfspaces(shape, order, apothem, rotation))


def reconstruct_element(cell: Cell, diagram: ArrowDiagram, geom: LayerGeometry,
                        cell_index: int | None = None) -> Element:
    """Intersect the tilted edge planes of ``cell`` with the slab ``|z| <= h``."""
    if cell_index is None:
        cell_index = next(i for i, c in enumerate(diagram.cells) if c is cell)
    signs = diagram.signs[cell_index]
    if geom.family in (TilingFamily.HexDodeca, TilingFamily.DecagonIcosa, TilingFamily.DecagonDodeca):
        shape, order = _canonical_axis(geom.family)
        return place_canonical(shape, cell, order, signs)
    planes = _edge_halfspaces(cell, signs, geom.alpha)
    try:
        body = hrep_to_vrep(list(planes.values()) + slab(geom.half_thickness), 3)
    except EmptyRegion as exc:
        raise EmptyBody(str(exc)) from exc
    if not body.bounded:
        raise EmptyBody("reconstructed body is unbounded")
    edge_faces = {}
    for k, h in planes.items():
        idx = _match_face(body, h)
        if idx is not None:
            edge_faces[k] = idx
    center = np.array([cell.center[0], cell.center[1], 0.0])
    return Element(body, cell.lattice_index, sorted(edge_faces.values()), identify_shape(body),
                   edge_faces, center)


def place_canonical(shape: str, cell: Cell, axis_order: int, signs=None) -> Element:
    """Scale and turn a canonical solid so its central section is ``cell``.

    ``contact_face_ids`` are the belt faces through the edges that carry
    arrows (all edges when ``signs`` is None).

    Raises:
        SectionMismatch: the solid's z = 0 section differs from the cell.
    """
    if cell.n_edges != 2 * axis_order:
        raise SectionMismatch(f"a {axis_order}-fold section has {2 * axis_order} edges, cell has {cell.n_edges}")
    proto = _canonical_prototype(shape, axis_order, round(_apothem(cell), 12), round(_rotation(cell), 12))
    shift = np.array([cell.center[0], cell.center[1], 0.0])
    body = hrep_to_vrep([h.translated(shift) for h in proto], 3)
    section = body_section(body, 0.0)
    if section is None or abs(polygon_area(section) - cell.area()) > EPS_GEO * max(1.0, cell.area()) * 10:
        raise SectionMismatch("central section does not match the cell polygon")
    edge_faces = {}
    for k in range(cell.n_edges):
        if signs is not None and signs[k] == 0:
            continue
        a, b = cell.edge(k)
        mid = np.array([(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, 0.0])
        for f, h in enumerate(body.halfspaces):
            if abs(h.normal @ mid - h.offset) < 1e-9 and abs(h.normal[2]) < 1 - 1e-9:
                edge_faces[k] = f
                break
        else:
            raise SectionMismatch(f"no face passes through edge {k}")
        if signs is not None:
            lean = -np.sign(body.halfspaces[edge_faces[k]].normal[2])
            if lean != signs[k]:
                raise SectionMismatch(f"face through edge {k} leans against its arrow")
    return Element(body, cell.lattice_index, sorted(edge_faces.values()), identify_shape(body),
                   edge_faces, shift)


def body_section(body: ConvexPolytope, z: float) -> np.ndarray | None:
    """Counter-clockwise polygon ``body ∩ {z = const}``, or None if empty or degenerate."""
    lines = []
    for h in body.halfspaces:
        nxy = h.normal[:2]
        nn = np.linalg.norm(nxy)
        off = h.offset - h.normal[2] * z
        if nn < 1e-12:
            if off < -EPS_GEO:
                return None
            continue
        lines.append(HalfSpace(nxy / nn, off / nn))
    try:
        poly = hrep_to_vrep(lines, 2)
    except EmptyRegion:
        return None
    if not poly.bounded or len(poly.vertices) < 3:
        return None
    return poly.vertices


def _edge_lengths(body: ConvexPolytope) -> np.ndarray:
    return np.array([np.linalg.norm(body.vertices[a] - body.vertices[b]) for a, b in body.edges()])


def _adjacent_face_pairs(body: ConvexPolytope):
    for i, j in itertools.combinations(range(len(body.faces)), 2):
        if len(set(body.faces[i]) & set(body.faces[j])) >= 2:
            yield i, j


def dihedral_angles(body: ConvexPolytope) -> np.ndarray:
    """Interior dihedral angles (radians) along every edge."""
    out = []
    for i, j in _adjacent_face_pairs(body):
        c = float(np.clip(body.halfspaces[i].normal @ body.halfspaces[j].normal, -1.0, 1.0))
        out.append(np.pi - np.arccos(c))
    return np.array(out)


def identify_shape(body: ConvexPolytope, tol: float = 1e-6) -> str:
    """Classify a bounded body as one of the platonic solids, else Prismatoid."""
    if not body.bounded:
        return "Prismatoid"
    nf, nv = len(body.faces), len(body.vertices)
    counts = {(4, 4): "Tetrahedron", (6, 8): "Cube", (8, 6): "Octahedron",
              (12, 20): "Dodecahedron", (20, 12): "Icosahedron"}
    name = counts.get((nf, nv))
    if name is None:
        return "Prismatoid"
    lengths = _edge_lengths(body)
    if lengths.max() - lengths.min() > tol * lengths.mean():
        return "Prismatoid"
    ang = dihedral_angles(body)
    if ang.max() - ang.min() > tol:
        return "Prismatoid"
    expected = {"Tetrahedron": np.arccos(1 / 3), "Cube": np.pi / 2, "Octahedron": np.arccos(-1 / 3),
                "Dodecahedron": np.arccos(-1 / np.sqrt(5)), "Icosahedron": np.arccos(-np.sqrt(5) / 3)}[name]
    if abs(ang.mean() - expected) > tol:
        return "Prismatoid"
    return name
