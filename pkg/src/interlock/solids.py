"""Canonical platonic solids and their placements about a symmetry axis.

Coordinates (golden ratio ``PHI = (1 + sqrt 5) / 2``):

* icosahedron: cyclic permutations of ``(0, +-1, +-PHI)``
* dodecahedron: ``(+-1, +-1, +-1)`` and cyclic permutations of ``(0, +-1/PHI, +-PHI)``

For the decagon and hexagon layer families a solid is turned so the chosen
symmetry axis is vertical; the faces crossing ``z = 0`` then form the "belt"
whose traces are the middle section, and their common tilt from the vertical
is the interlocking angle of that family.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .geometry import HalfSpace, vrep_to_hrep_3d

PHI = (1.0 + 5.0 ** 0.5) / 2.0


def icosahedron_vertices() -> np.ndarray:
    pts = []
    for a, b in itertools.product((1.0, -1.0), repeat=2):
        pts += [(0.0, a, b * PHI), (a, b * PHI, 0.0), (b * PHI, 0.0, a)]
    return np.array(pts)


def dodecahedron_vertices() -> np.ndarray:
    pts = [p for p in itertools.product((1.0, -1.0), repeat=3)]
    for a, b in itertools.product((1.0, -1.0), repeat=2):
        pts += [(0.0, a / PHI, b * PHI), (a / PHI, b * PHI, 0.0), (b * PHI, 0.0, a / PHI)]
    return np.array(pts, dtype=float)


def _rotation_to_z(axis: np.ndarray) -> np.ndarray:
    a = axis / np.linalg.norm(axis)
    z = np.array([0.0, 0.0, 1.0])
    v = np.cross(a, z)
    s = np.linalg.norm(v)
    c = float(a @ z)
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    K = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + K + K @ K * (1 - c) / s ** 2


def _rot_z(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _axis(shape: str, order: int) -> np.ndarray:
    if shape == "Icosahedron" and order == 5:
        return np.array([0.0, 1.0, PHI])       # through a vertex
    if shape == "Dodecahedron" and order == 5:
        return np.array([0.0, PHI, 1.0])       # through a face centre
    if shape == "Dodecahedron" and order == 3:
        return np.array([1.0, 1.0, 1.0])       # through a vertex
    raise ValueError(f"no {order}-fold placement implemented for {shape}")


@lru_cache(maxsize=None)
def _belt_placement(shape: str, order: int):
    verts = icosahedron_vertices() if shape == "Icosahedron" else dodecahedron_vertices()
    R = _rotation_to_z(_axis(shape, order))
    V = verts @ R.T
    hs = vrep_to_hrep_3d(V)
    belt = []
    for h in hs:
        on = V[np.abs(V @ h.normal - h.offset) < 1e-9]
        if on[:, 2].min() < -1e-9 and on[:, 2].max() > 1e-9:
            belt.append(h)
    nedge = 2 * order
    if len(belt) != nedge:
        raise RuntimeError(f"expected {nedge} belt faces, found {len(belt)}")
    # turn about z so a downward-leaning belt face sits at angle 0
    first = min((h for h in belt if h.normal[2] < 0),
                key=lambda h: np.arctan2(h.normal[1], h.normal[0]) % (2 * np.pi))
    theta = -np.arctan2(first.normal[1], first.normal[0])
    V = V @ _rot_z(theta).T
    sin_alpha = float(abs(first.normal[2]))
    apothem = float(first.offset / np.linalg.norm(first.normal[:2]))
    return V, sin_alpha, apothem


def belt_tilt(shape: str, order: int) -> float:
    """Tilt from the vertical of the belt faces, in radians."""
    return float(np.arcsin(_belt_placement(shape, order)[1]))


def placed_solid(shape: str, order: int, section_apothem: float, rotation: float = 0.0,
                 center=(0.0, 0.0)) -> np.ndarray:
    """Vertices of ``shape`` with its ``order``-fold axis vertical.

    The solid is scaled so its central section has apothem ``section_apothem``,
    rotated by ``rotation`` about z and shifted horizontally to ``center``.
    Belt face ``k`` (counted counter-clockwise from angle ``rotation``) leans
    outward going up for even ``k``.
    """
    V, _, apothem = _belt_placement(shape, order)
    V = V * (section_apothem / apothem)
    V = V @ _rot_z(rotation).T
    return V + np.array([center[0], center[1], 0.0])


def placed_halfspaces(shape: str, order: int, section_apothem: float, rotation: float = 0.0,
                      center=(0.0, 0.0)) -> list[HalfSpace]:
    return vrep_to_hrep_3d(placed_solid(shape, order, section_apothem, rotation, center))
