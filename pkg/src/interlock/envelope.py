"""Finite interlocking envelopes over even-faced convex polyhedra approximating the sphere.

The mesh family is the polar dual of the geodesic octahedron: every face of
the octahedron is cut into ``f**2`` triangles, their corners are pushed out
to the unit sphere, and each corner ``u`` becomes the face plane
``u . x = 1``. Every node then has degree 3, faces are exactly planar,
squares sit at the six octahedron corners and all other faces are hexagons.
Nodes are finally scaled so the farthest lies on the unit sphere.

``sphere_mesh(s)`` uses frequency ``f = s + 2``: subdivision 0 is the
chamfered cube (6 squares, 12 hexagons), the first member with both cell
types. Frequency 1 (the cube) is reachable through ``polar_geodesic_mesh``.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .assembly import Assembly, detect_contacts
from .geometry import EPS_GEO, HalfSpace, NonPlanarFace, hrep_to_vrep, newell_normal, unit
from .reconstruct import Element, identify_shape
from .tilings import TETRA_ALPHA, ParityObstruction

MESH_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class SphereMesh:
    nodes: np.ndarray
    faces: list[list[int]]      # counter-clockwise seen from outside

    def edges(self) -> dict[tuple[int, int], list[tuple[int, int]]]:
        """Undirected edge -> ``[(face, slot), ...]`` with slot ``k`` joining nodes ``k`` and ``k + 1``."""
        out: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for f, face in enumerate(self.faces):
            for k in range(len(face)):
                a, b = face[k], face[(k + 1) % len(face)]
                out.setdefault((min(a, b), max(a, b)), []).append((f, k))
        return out

    def face_normal(self, f: int) -> np.ndarray:
        return newell_normal(self.nodes[self.faces[f]])

    def face_center(self, f: int) -> np.ndarray:
        return self.nodes[self.faces[f]].mean(axis=0)

    def validate(self, eps: float = MESH_EPS) -> None:
        for f, face in enumerate(self.faces):
            pts = self.nodes[face]
            n = newell_normal(pts)
            dev = np.abs((pts - pts.mean(axis=0)) @ n).max()
            if dev > eps:
                raise NonPlanarFace(f"face {f} deviates by {dev:.3g}")
        for e, users in self.edges().items():
            if len(users) > 2:
                raise ValueError(f"edge {e} borders {len(users)} faces")


def geodesic_octahedron(frequency: int) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Unit-sphere corners and outward-oriented triangles of the subdivided octahedron."""
    eye = np.eye(3)
    verts: list[np.ndarray] = []
    index: dict[tuple, int] = {}

    def vid(p):
        p = p / np.linalg.norm(p)
        key = tuple(np.round(p, 9) + 0.0)
        if key not in index:
            index[key] = len(verts)
            verts.append(p)
        return index[key]

    m = frequency
    tris = []
    for sx, sy, sz in itertools.product((1, -1), repeat=3):
        a, b, c = sx * eye[0], sy * eye[1], sz * eye[2]
        if sx * sy * sz < 0:
            b, c = c, b

        def at(i, j, a=a, b=b, c=c):
            return a + (b - a) * i / m + (c - a) * j / m

        for i in range(m):
            for j in range(m - i):
                tris.append((vid(at(i, j)), vid(at(i + 1, j)), vid(at(i, j + 1))))
                if i + j < m - 1:
                    tris.append((vid(at(i + 1, j)), vid(at(i + 1, j + 1)), vid(at(i, j + 1))))
    return np.array(verts), tris


def polar_geodesic_mesh(frequency: int) -> SphereMesh:
    if frequency < 1:
        raise ValueError("frequency must be at least 1")
    corners, tris = geodesic_octahedron(frequency)
    nodes = np.array([np.linalg.solve(corners[list(t)], np.ones(3)) for t in tris])
    incident: dict[int, list[int]] = {}
    for k, t in enumerate(tris):
        for v in t:
            incident.setdefault(v, []).append(k)
    faces = []
    for f, u in enumerate(corners):
        e1 = unit(np.cross(u, [0.3, 0.5, 0.7]))
        e2 = np.cross(u, e1)
        faces.append(sorted(incident[f], key=lambda k: np.arctan2(nodes[k] @ e2, nodes[k] @ e1)))
    nodes = nodes / np.linalg.norm(nodes, axis=1).max()
    mesh = SphereMesh(nodes, faces)
    mesh.validate()
    return mesh


def sphere_mesh(subdivision: int) -> SphereMesh:
    if subdivision < 0:
        raise ValueError("subdivision must be non-negative")
    return polar_geodesic_mesh(subdivision + 2)


def mesh_from_polygons(polygons, tol: float = 1e-9) -> SphereMesh:
    """Merge coincident corners of counter-clockwise 3-D polygons into a mesh."""
    nodes: list[np.ndarray] = []
    faces = []
    for poly in polygons:
        face = []
        for p in np.asarray(poly, dtype=float):
            for n, q in enumerate(nodes):
                if np.linalg.norm(p - q) <= tol:
                    face.append(n)
                    break
            else:
                nodes.append(p)
                face.append(len(nodes) - 1)
        faces.append(face)
    return SphereMesh(np.array(nodes).reshape(-1, 3), faces)


def assign_alternating_arrows(mesh: SphereMesh) -> list[tuple[int, ...]]:
    """Signs per face slot, alternating around faces and opposite across edges.

    Raises:
        ParityObstruction: no such assignment exists; ``cycle`` lists the
            ``(face, slot)`` nodes of an odd cycle.
    """
    adj: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for f, face in enumerate(mesh.faces):
        n = len(face)
        for k in range(n):
            adj.setdefault((f, k), []).append((f, (k + 1) % n))
            adj.setdefault((f, (k + 1) % n), []).append((f, k))
    for users in mesh.edges().values():
        if len(users) == 2:
            a, b = users
            adj[a].append(b)
            adj[b].append(a)
    color: dict[tuple[int, int], int] = {}
    parent: dict[tuple[int, int], tuple[int, int] | None] = {}
    for start in sorted(adj):
        if start in color:
            continue
        color[start] = 1
        parent[start] = None
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in color:
                    color[v] = -color[u]
                    parent[v] = u
                    queue.append(v)
                elif color[v] == color[u]:
                    raise ParityObstruction("arrow signs cannot alternate consistently",
                                            _odd_cycle(parent, u, v))
    return [tuple(color[(f, k)] for k in range(len(face))) for f, face in enumerate(mesh.faces)]


def _odd_cycle(parent, u, v):
    def chain(x):
        out = []
        while x is not None:
            out.append(x)
            x = parent[x]
        return out
    pu, pv = chain(u), chain(v)
    common = next(x for x in pu if x in set(pv))
    left = pu[:pu.index(common) + 1]
    right = pv[:pv.index(common)]
    return left + right[::-1]


def envelope_plane(mesh: SphereMesh, f: int, k: int, sigma: int, alpha: float,
                   edge_users=None) -> HalfSpace:
    """Tilted plane through edge slot ``k`` of face ``f``.

    The tilt is measured from the bisector of the two face normals at the
    edge, so both neighbours build the same plane with opposite orientation.
    """
    face = mesh.faces[f]
    a, b = mesh.nodes[face[k]], mesh.nodes[face[(k + 1) % len(face)]]
    n_f = mesh.face_normal(f)
    users = (edge_users or mesh.edges())[(min(face[k], face[(k + 1) % len(face)]),
                                             max(face[k], face[(k + 1) % len(face)]))]
    other = [g for g, _ in users if g != f]
    bis = unit(n_f + mesh.face_normal(other[0])) if other else n_f
    m = unit(np.cross(b - a, bis))
    normal = np.cos(alpha) * m - sigma * np.sin(alpha) * bis
    return HalfSpace(normal, float(normal @ a))


def build_envelope(mesh: SphereMesh, alpha: float = TETRA_ALPHA, halve: bool = False,
                   signs=None, tol: float = EPS_GEO) -> Assembly:
    """One element per mesh face from the tilted edge planes; optionally keep only the inner halves."""
    mesh.validate()
    if signs is None:
        signs = assign_alternating_arrows(mesh)
    users = mesh.edges()
    scale = float(np.linalg.norm(mesh.nodes - mesh.nodes.mean(axis=0), axis=1).max()) or 1.0
    elements, interior = [], []
    for f, face in enumerate(mesh.faces):
        n_f = mesh.face_normal(f)
        c_f = mesh.face_center(f)
        planes = {k: envelope_plane(mesh, f, k, signs[f][k], alpha, users) for k in range(len(face))}
        extra = [HalfSpace(-n_f, float(-n_f @ c_f) + 4 * scale)]
        extra.append(HalfSpace(n_f, float(n_f @ c_f) + (0.0 if halve else 4 * scale)))
        body = hrep_to_vrep(list(planes.values()) + extra, 3)
        edge_faces = {}
        for k, h in planes.items():
            for j, g in enumerate(body.halfspaces):
                if np.allclose(g.normal, h.normal, atol=1e-9) and abs(g.offset - h.offset) < 1e-8:
                    edge_faces[k] = j
        elements.append(Element(body, (f, 0), sorted(edge_faces.values()), identify_shape(body),
                                edge_faces, c_f))
        interior.append(all(len(users[(min(a, b), max(a, b))]) == 2
                            for a, b in zip(face, face[1:] + face[:1])))
    return Assembly(elements, detect_contacts(elements, tol), interior, None, None)


def frequency_scan(max_frequency: int = 5, alpha: float = TETRA_ALPHA, halve: bool = False):
    """``(frequency, all elements locked)`` for the polar geodesic meshes up to ``max_frequency``."""
    from .lockcheck import translational_lock
    out = []
    for s in range(1, max_frequency + 1):
        env = build_envelope(polar_geodesic_mesh(s), alpha, halve)
        out.append((s, all(translational_lock(k, env).locked for k in range(len(env)))))
    return out
