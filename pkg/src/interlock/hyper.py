"""Four-dimensional layer of tesseracts over an octahedron contact lattice.

The tesseract is turned so its principal diagonal is the w axis. With the
orthogonal map ``Q`` whose rows are ``(1,-1,1,-1)/2``, ``(1,1,-1,-1)/2``,
``(1,-1,-1,1)/2`` and ``(1,1,1,1)/2`` the facet normals become
``+-(a_i, 1/2)`` for ``a_i`` in ``{(1,1,1), (-1,1,-1), (1,-1,-1), (-1,-1,1)} / 2``
and the section ``w = 0`` is the octahedron ``|x| + |y| + |z| <= edge``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .assembly import detect_contacts
from .geometry import EPS_GEO, ConvexPolytope, EmptyRegion, HalfSpace, hrep_to_vrep, interior_margin
from .lockcheck import (NO_DEGENERATION, EvolutionResult, InvalidAtStart, LockError,
                        MotionCone, _cone, simplex_events)
from .reconstruct import Element
from .tilings import LatticeSearchFailed

PARALLEL_PLANES = "ParallelPlanes"
PRISM_PARALLEL_TO_LINE = "PrismParallelToLine"
TRIANGULAR_PRISM_COLLAPSE = "TriangularPrismCollapse"

DIAGONAL_FRAME = np.array([
    [0.5, -0.5, 0.5, -0.5],
    [0.5, 0.5, -0.5, -0.5],
    [0.5, -0.5, -0.5, 0.5],
    [0.5, 0.5, 0.5, 0.5],
])

# face-contact lattice of the octahedron |x| + |y| + |z| <= 1
OCTA_LATTICE = np.array([
    [1.0, 1.0 / 3.0, 2.0 / 3.0],
    [1.0 / 3.0, -2.0 / 3.0, -1.0],
    [-2.0 / 3.0, 1.0, -1.0 / 3.0],
])
OCTA_NEIGHBORS = [np.array(v) for v in (
    (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1))]
OCTA_NEIGHBORS = OCTA_NEIGHBORS + [-v for v in OCTA_NEIGHBORS]


class DimensionUnsupported(ValueError):
    pass


class EquivalenceViolation(LockError):
    pass


@dataclass(frozen=True, eq=False)
class Poly4:
    halfspaces: list[HalfSpace]
    center: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def translated(self, t) -> "Poly4":
        t = np.asarray(t, dtype=float)
        return Poly4([h.translated(t) for h in self.halfspaces], self.center + t)

    def vertices(self) -> np.ndarray:
        return hrep_to_vrep(self.halfspaces, 4).vertices


def tesseract_diagonal_frame(edge: float = 1.0) -> Poly4:
    if not edge > 0:
        raise ValueError("edge must be positive")
    hs = []
    for i in range(4):
        col = DIAGONAL_FRAME[:, i]
        hs += [HalfSpace(col.copy(), edge / 2.0), HalfSpace(-col, edge / 2.0)]
    return Poly4(hs)


def hyperplane_section(poly: Poly4, w: float) -> ConvexPolytope | None:
    """``{x : (x, w) in poly}``; None when the section is empty."""
    hs = []
    for h in poly.halfspaces:
        n3 = h.normal[:3]
        off = h.offset - h.normal[3] * w
        r = np.linalg.norm(n3)
        if r < EPS_GEO:
            if off < -EPS_GEO:
                return None
            continue
        hs.append(HalfSpace(n3 / r, off / r))
    try:
        return hrep_to_vrep(hs, 3)
    except EmptyRegion:
        return None


# ------------------------------------------------------------ evolution

@dataclass(frozen=True, eq=False)
class MovingPolyhedron:
    """Half-spaces ``m . x <= c + t s`` in R^3."""

    normals: np.ndarray
    offsets: np.ndarray
    speeds: np.ndarray

    @classmethod
    def make(cls, faces) -> "MovingPolyhedron":
        m = np.array([f[0] for f in faces], dtype=float).reshape(-1, 3)
        m = m / np.linalg.norm(m, axis=1, keepdims=True)
        return cls(m, np.array([f[1] for f in faces], dtype=float),
                   np.array([f[2] for f in faces], dtype=float))

    def at(self, t: float) -> list[HalfSpace]:
        return [HalfSpace(m, float(c + t * s)) for m, c, s in zip(self.normals, self.offsets, self.speeds)]

    def reversed(self) -> "MovingPolyhedron":
        return MovingPolyhedron(self.normals, self.offsets, -self.speeds)


_NAMES_3D = {2: PARALLEL_PLANES, 3: PRISM_PARALLEL_TO_LINE, 4: TRIANGULAR_PRISM_COLLAPSE}


def polyhedron_evolution(poly: MovingPolyhedron, t_max: float = np.inf) -> EvolutionResult:
    """Exact degeneration time of a moving polyhedron.

    Events: a closing pair of parallel planes, three planes parallel to a
    line closing a prism, or four planes closing a tetrahedron.

    Raises:
        InvalidAtStart: the polyhedron is degenerate at ``t = 0``.
    """
    hs = poly.at(0.0)
    margin, _ = interior_margin(hs) if hs else (np.inf, None)
    if margin <= EPS_GEO:
        raise InvalidAtStart("polyhedron is degenerate at t = 0")
    if not hs or not hrep_to_vrep(hs, 3).bounded:
        return EvolutionResult(np.inf, NO_DEGENERATION, ())
    best = (np.inf, NO_DEGENERATION, ())
    for t, sub in simplex_events(poly.normals, poly.offsets, poly.speeds):
        if t < best[0] - 1e-12 or (abs(t - best[0]) <= 1e-12 and len(sub) < len(best[2])):
            best = (t, _NAMES_3D[len(sub)], sub)
    if best[0] > t_max:
        return EvolutionResult(np.inf, NO_DEGENERATION, ())
    return EvolutionResult(float(best[0]), best[1], tuple(best[2]))


def simplex_collapse_time(hyperplanes, n: int) -> float:
    """Earliest positive time at which some subset of moving hyperplanes closes a simplex."""
    if n > 4:
        raise DimensionUnsupported(f"n = {n} is not supported")
    if n < 2:
        raise DimensionUnsupported("n must be at least 2")
    N = np.array([h[0] for h in hyperplanes], dtype=float).reshape(-1, n)
    N = N / np.linalg.norm(N, axis=1, keepdims=True)
    c = np.array([h[1] for h in hyperplanes], dtype=float)
    s = np.array([h[2] for h in hyperplanes], dtype=float)
    times = [t for t, _ in simplex_events(N, c, s) if t > 0]
    return min(times) if times else np.inf


def simplex_collapse_check(hyperplanes, n: int) -> bool:
    """Whether ``k + 1`` of the moving hyperplanes, parallel to an ``(n-1-k)``-subspace, close a simplex."""
    return bool(np.isfinite(simplex_collapse_time(hyperplanes, n)))


def moving_hypersection(halfspaces: list[HalfSpace]) -> MovingPolyhedron:
    """Section ``w = t`` of 4-D half-spaces as a polyhedron moving with ``t``."""
    faces = []
    for h in halfspaces:
        r = float(np.linalg.norm(h.normal[:3]))
        faces.append((h.normal[:3] / r, h.offset / r, -h.normal[3] / r))
    return MovingPolyhedron.make(faces)


# ------------------------------------------------------------ the layer

@dataclass(frozen=True, eq=False)
class Contact4:
    i: int
    j: int
    normal: np.ndarray          # outward facet normal of i, 4-D
    offset: float
    overlap: np.ndarray         # 3-D overlap polygon on the w = 0 section

    @property
    def area(self) -> float:
        return _polygon_area_3d(self.overlap)


@dataclass(eq=False)
class Layer4:
    elements: list[Poly4]
    contacts: list[Contact4]
    sites: list[tuple[int, int, int]]
    interior: list[bool]

    def __len__(self) -> int:
        return len(self.elements)

    def contacts_of(self, k: int) -> list[tuple[int, np.ndarray, Contact4]]:
        out = []
        for c in self.contacts:
            if c.i == k:
                out.append((c.j, c.normal, c))
            elif c.j == k:
                out.append((c.i, -c.normal, c))
        return out

    def contact_halfspaces(self, k: int) -> list[HalfSpace]:
        seen, out = set(), []
        for _, n, c in self.contacts_of(k):
            off = c.offset if c.i == k else -c.offset
            key = tuple(np.round(n, 9))
            if key not in seen:
                seen.add(key)
                out.append(HalfSpace(n, off))
        return out


def _polygon_area_3d(pts: np.ndarray) -> float:
    if len(pts) < 3:
        return 0.0
    s = np.zeros(3)
    for a, b in zip(pts, np.roll(pts, -1, axis=0)):
        s += np.cross(a, b)
    return float(np.linalg.norm(s) / 2.0)


def _octahedron() -> ConvexPolytope:
    return hrep_to_vrep([HalfSpace(np.array(s, dtype=float) / np.sqrt(3.0), 1.0 / np.sqrt(3.0))
                         for s in itertools.product((1.0, -1.0), repeat=3)], 3)


def check_octa_lattice(basis: np.ndarray = OCTA_LATTICE) -> None:
    """Neighbours must meet face to face and never overlap.

    Raises:
        LatticeSearchFailed: some translate overlaps or a face stays uncovered.
    """
    covered = set()
    for coef in itertools.product(range(-2, 3), repeat=3):
        if coef == (0, 0, 0):
            continue
        g = np.array(coef, dtype=float) @ basis
        # separation along the best face normal: 2 means touching, less means overlap
        sep = np.abs(g).sum()
        if sep < 2.0 - 1e-9:
            raise LatticeSearchFailed(f"translate {coef} overlaps")
        if abs(sep - 2.0) <= 1e-9:
            s = tuple(np.sign(np.round(g, 12)))
            if 0 in s:
                raise LatticeSearchFailed(f"translate {coef} touches along an edge")
            covered.add(s)
    if len(covered) != 8:
        raise LatticeSearchFailed("not every octahedron face has a neighbour")


def build_4d_layer(extent=(4, 4, 4), edge: float = 1.0) -> Layer4:
    """Tesseracts attached to octahedra on the face-contact lattice, with their facet contacts."""
    extent = tuple(int(e) for e in extent)
    if len(extent) != 3 or min(extent) < 1:
        raise ValueError("extent must be three positive integers")
    check_octa_lattice()
    basis = OCTA_LATTICE * edge
    proto = tesseract_diagonal_frame(edge)
    octa = _octahedron()
    sites = list(itertools.product(*(range(e) for e in extent)))
    centers = [np.array(s, dtype=float) @ basis for s in sites]
    elements = [proto.translated(np.r_[c, 0.0]) for c in centers]
    octas = []
    for c in centers:
        body = ConvexPolytope([h.translated(c) for h in _scaled(octa, edge).halfspaces],
                              _scaled(octa, edge).vertices + c, [list(f) for f in octa.faces], True)
        octas.append(Element(body, (0, 0), [], "Octahedron", {}, np.asarray(c)))
    contacts = []
    for c3 in detect_contacts(octas):
        n3 = c3.normal
        i = c3.i
        n4 = _facet_for(elements[i], n3)
        contacts.append(Contact4(c3.i, c3.j, n4.normal, n4.offset, c3.polygon.lift()))
    index = {s: k for k, s in enumerate(sites)}
    interior = [all(tuple(np.array(s) + v) in index for v in OCTA_NEIGHBORS) for s in sites]
    return Layer4(elements, contacts, sites, interior)


def _scaled(octa: ConvexPolytope, edge: float) -> ConvexPolytope:
    if edge == 1.0:
        return octa
    return ConvexPolytope([HalfSpace(h.normal, h.offset * edge) for h in octa.halfspaces],
                          octa.vertices * edge, [list(f) for f in octa.faces], True)


def _facet_for(poly: Poly4, n3: np.ndarray) -> HalfSpace:
    """The tesseract facet whose w = 0 trace has outward normal ``n3``."""
    for h in poly.halfspaces:
        r = np.linalg.norm(h.normal[:3])
        if np.allclose(h.normal[:3] / r, n3, atol=1e-9):
            return h
    raise LatticeSearchFailed("no tesseract facet matches the octahedron face")


def lock_4d(element_id: int, layer: Layer4) -> MotionCone:
    """Translational lock in R^4, cross-checked against the moving hypersection.

    Raises:
        EquivalenceViolation: the cone verdict and the degeneration verdict differ.
    """
    normals = [n for _, n, _ in layer.contacts_of(element_id)]
    cone = _cone(np.array(normals).reshape(-1, 4), 4)
    up, down = hypersection_lock(element_id, layer)
    if cone.locked != (up and down) and not cone.marginal:
        raise EquivalenceViolation(f"element {element_id}: cone {cone.locked}, sections {up}/{down}")
    return cone


def hypersection_lock(element_id: int, layer: Layer4) -> tuple[bool, bool]:
    hs = layer.contact_halfspaces(element_id)
    if not hs:
        return False, False
    c = layer.elements[element_id].center
    poly = moving_hypersection([h.translated(-c) for h in hs])
    up = polyhedron_evolution(poly)
    down = polyhedron_evolution(poly.reversed())
    return bool(np.isfinite(up.vanish_time)), bool(np.isfinite(down.vanish_time))
