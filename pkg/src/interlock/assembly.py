"""Layers of reconstructed elements and their planar face contacts."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import EPS_GEO, Polygon2, coplanar_overlap
from .reconstruct import Element, LayerGeometry, default_half_thickness, reconstruct_element
from .tilings import TilingFamily, assign_arrows, generate_cells, neighbor_vectors


class UnknownElement(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class Contact:
    """Face ``face_i`` of element ``i`` flush against face ``face_j`` of ``j``.

    ``normal`` is the outward normal of ``face_i`` and so points from ``i`` into ``j``.
    """

    i: int
    j: int
    face_i: int
    face_j: int
    normal: np.ndarray
    polygon: Polygon2

    @property
    def area(self) -> float:
        return self.polygon.area


@dataclass(eq=False)
class Assembly:
    elements: list[Element]
    contacts: list[Contact]
    interior: list[bool]
    family: TilingFamily | None = None
    geometry: LayerGeometry | None = None
    ids: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.ids:
            self.ids = list(range(len(self.elements)))

    def __len__(self) -> int:
        return len(self.elements)

    def index_of(self, element_id: int) -> int:
        try:
            return self.ids.index(element_id)
        except ValueError:
            raise UnknownElement(element_id) from None

    def contacts_of(self, k: int) -> list[tuple[int, np.ndarray, Contact]]:
        """``(other, outward normal of k, contact)`` for every contact of element ``k``."""
        out = []
        for c in self.contacts:
            if c.i == k:
                out.append((c.j, c.normal, c))
            elif c.j == k:
                out.append((c.i, -c.normal, c))
        return out

    def neighbors(self, k: int) -> list[int]:
        return sorted({o for o, _, _ in self.contacts_of(k)})


def _radius(e: Element) -> float:
    return float(np.linalg.norm(e.body.vertices - e.center, axis=1).max())


def detect_contacts(elements: list[Element], tol: float = EPS_GEO) -> list[Contact]:
    """All coplanar, oppositely oriented face pairs with overlap area above ``tol**2``."""
    radii = [_radius(e) for e in elements]
    out = []
    for i, ei in enumerate(elements):
        for j in range(i + 1, len(elements)):
            ej = elements[j]
            if np.linalg.norm(ei.center - ej.center) > radii[i] + radii[j] + tol:
                continue
            for fi, hi in enumerate(ei.body.halfspaces):
                for fj, hj in enumerate(ej.body.halfspaces):
                    if hi.normal @ hj.normal > -1.0 + 1e-9 or abs(hi.offset + hj.offset) > 1e-7:
                        continue
                    poly = coplanar_overlap(ei.body.face_polygon(fi), ej.body.face_polygon(fj), max(tol, 1e-9))
                    if poly is not None:
                        out.append(Contact(i, j, fi, fj, hi.normal.copy(), poly))
    return out


def interior_flags(elements: list[Element], family: TilingFamily, tol: float = 1e-6) -> list[bool]:
    """An element is interior when every lattice neighbour position is occupied."""
    centers = np.array([e.center[:2] for e in elements])
    vecs = neighbor_vectors(family)
    flags = []
    for c in centers:
        ok = all(np.min(np.linalg.norm(centers - (c + v), axis=1)) < tol for v in vecs)
        flags.append(bool(ok))
    return flags


def build_layer(family: TilingFamily | str, nx: int, ny: int, alpha: float | None = None,
                half_thickness: float | None = None, tol: float = EPS_GEO) -> Assembly:
    """Generate the tiling, reconstruct every cell and detect the contacts."""
    if isinstance(family, str):
        family = TilingFamily.parse(family)
    if alpha is None:
        alpha = family.default_alpha
    cells = generate_cells(family, nx, ny)
    diagram = assign_arrows(cells, family, alpha)
    if half_thickness is None:
        half_thickness = default_half_thickness(cells[0], diagram.signs[0], family, alpha)
    geom = LayerGeometry(float(half_thickness), float(alpha), family)
    elements = [reconstruct_element(c, diagram, geom, k) for k, c in enumerate(cells)]
    return Assembly(elements, detect_contacts(elements, tol), interior_flags(elements, family),
                    family, geom)


def remove_elements(assembly: Assembly, element_ids) -> Assembly:
    """A copy without the given elements; contacts touching them are dropped.

    Raises:
        UnknownElement: an id is not part of the assembly.
    """
    drop = {assembly.index_of(i) for i in element_ids}
    keep = [k for k in range(len(assembly)) if k not in drop]
    remap = {old: new for new, old in enumerate(keep)}
    contacts = [Contact(remap[c.i], remap[c.j], c.face_i, c.face_j, c.normal, c.polygon)
                for c in assembly.contacts if c.i in remap and c.j in remap]
    return Assembly([assembly.elements[k] for k in keep], contacts,
                    [assembly.interior[k] for k in keep], assembly.family, assembly.geometry,
                    [assembly.ids[k] for k in keep])
