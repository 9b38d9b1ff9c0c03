"""Middle-section tilings and their arrow diagrams.

Three planar arrangements feed the layer builders: the unit-square chessboard,
the unit-edge honeycomb, and a lattice of unit-edge regular decagons.  Each
cell edge carries a sign: ``+1`` when the face through that edge leans outward
going up (its trace moves out of the cell as the section plane rises), ``-1``
when it leans inward, ``0`` when the edge has no arrow.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import clip_convex, polygon_area
from .solids import belt_tilt

TETRA_ALPHA = float(np.arcsin(np.sqrt(3.0) / 3.0))
OCTA_ALPHA = float(np.arcsin(1.0 / 3.0))

DECAGON_APOTHEM = 1.0 / (2.0 * np.tan(np.pi / 10.0))
HEX_APOTHEM = np.sqrt(3.0) / 2.0


class TilingError(Exception):
    pass


class ParityObstruction(TilingError):
    """No sign assignment alternates around every cell and flips across every edge."""

    def __init__(self, message: str, cycle=None):
        super().__init__(message)
        self.cycle = cycle or []


class LatticeSearchFailed(TilingError):
    pass


class TilingFamily(enum.Enum):
    SquareTetra = "square-tetra"
    HexCube = "hex-cube"
    HexOcta = "hex-octa"
    HexDodeca = "hex-dodeca"
    DecagonIcosa = "decagon-icosa"
    DecagonDodeca = "decagon-dodeca"

    @property
    def default_alpha(self) -> float:
        return {
            TilingFamily.SquareTetra: TETRA_ALPHA,
            TilingFamily.HexCube: TETRA_ALPHA,
            TilingFamily.HexOcta: OCTA_ALPHA,
            TilingFamily.HexDodeca: belt_tilt("Dodecahedron", 3),
            TilingFamily.DecagonIcosa: belt_tilt("Icosahedron", 5),
            TilingFamily.DecagonDodeca: belt_tilt("Dodecahedron", 5),
        }[self]

    @property
    def cell_kind(self) -> str:
        if self is TilingFamily.SquareTetra:
            return "square"
        if self.value.startswith("hex"):
            return "hex"
        return "decagon"

    @classmethod
    def parse(cls, name: str) -> "TilingFamily":
        for fam in cls:
            if name in (fam.value, fam.name):
                return fam
        raise ValueError(f"unknown family {name!r}")


@dataclass(frozen=True, eq=False)
class Cell:
    """One middle-section polygon (vertices counter-clockwise)."""

    vertices: np.ndarray
    center: np.ndarray
    color: str
    lattice_index: tuple[int, int]

    @property
    def n_edges(self) -> int:
        return len(self.vertices)

    def edge(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices[k], self.vertices[(k + 1) % self.n_edges]

    def edge_normal(self, k: int) -> np.ndarray:
        a, b = self.edge(k)
        d = b - a
        n = np.array([d[1], -d[0]])
        return n / np.linalg.norm(n)

    def area(self) -> float:
        return polygon_area(self.vertices)

    def translated(self, t) -> "Cell":
        t = np.asarray(t, dtype=float)
        return Cell(self.vertices + t, self.center + t, self.color, self.lattice_index)


@dataclass(frozen=True, eq=False)
class ArrowDiagram:
    cells: list[Cell]
    signs: list[tuple[int, ...]]
    slope: float
    family: TilingFamily

    def sign(self, cell: int, edge: int) -> int:
        return self.signs[cell][edge]


def regular_polygon(n: int, circumradius: float, phase: float, center=(0.0, 0.0)) -> np.ndarray:
    ang = phase + 2 * np.pi * np.arange(n) / n
    return np.column_stack([center[0] + circumradius * np.cos(ang),
                            center[1] + circumradius * np.sin(ang)])


def square_tiling(nx: int, ny: int) -> list[Cell]:
    """Unit squares centred on the integer points; colour A when ``i + j`` is even.

    Edges run bottom, right, top, left.
    """
    _check_extent(nx, ny)
    base = np.array([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])
    cells = []
    for j in range(ny):
        for i in range(nx):
            c = np.array([float(i), float(j)])
            cells.append(Cell(base + c, c, "A" if (i + j) % 2 == 0 else "B", (i, j)))
    return cells


def hex_center(q: int, r: int) -> np.ndarray:
    return np.array([1.5 * q, np.sqrt(3.0) * (r + 0.5 * (q % 2))])


def hex_tiling(nx: int, ny: int) -> list[Cell]:
    """Unit-edge regular hexagons with a horizontal flat axis (vertices at 60k degrees).

    Columns use odd-q offset coordinates; edge ``k`` has outward normal at
    ``30 + 60k`` degrees.
    """
    _check_extent(nx, ny)
    base = regular_polygon(6, 1.0, 0.0)
    cells = []
    for r in range(ny):
        for q in range(nx):
            c = hex_center(q, r)
            cells.append(Cell(base + c, c, "A", (q, r)))
    return cells


@dataclass(frozen=True)
class DecagonLattice:
    basis: tuple[np.ndarray, np.ndarray]
    contact_edges: tuple[int, ...]
    neighbor_vectors: tuple[np.ndarray, ...]


def _edge_dir(k: int) -> np.ndarray:
    a = np.pi * k / 5.0
    return np.array([np.cos(a), np.sin(a)])


def _segment_overlap(k: int, t: np.ndarray) -> float:
    """Overlap length between edge ``k`` of the base decagon and edge ``k+5`` of its translate."""
    half = np.tan(np.pi / 10.0) * DECAGON_APOTHEM
    perp = np.array([-_edge_dir(k)[1], _edge_dir(k)[0]])
    shift = float(perp @ t)
    return max(0.0, 2 * half - abs(shift))


@lru_cache(maxsize=1)
def derive_decagon_lattice() -> DecagonLattice:
    """Solve for a decagon lattice with three pairs of full-plane edge contacts.

    Fix ``t1 = 2r u_0`` (contact through edges 0 and 5, the c-f axis).  For each
    choice of edges ``k2`` and ``k3`` the conditions ``u_k2 . t2 = 2r`` and
    ``u_k3 . (t2 - t1) = 2r`` pin ``t2``.  A candidate is kept when all three
    contacts overlap over a positive length, no two decagons overlap, and the
    contact set is mirror-symmetric about the c-f axis.
    """
    r = DECAGON_APOTHEM
    t1 = 2 * r * _edge_dir(0)
    base = regular_polygon(10, r / np.cos(np.pi / 10), np.pi / 10)
    for k2 in range(1, 5):
        for k3 in range(k2 + 1, 5):
            M = np.array([_edge_dir(k2), _edge_dir(k3)])
            rhs = np.array([2 * r, 2 * r + _edge_dir(k3) @ t1])
            try:
                t2 = np.linalg.solve(M, rhs)
            except np.linalg.LinAlgError:
                continue
            contacts = {0, 5, k2, k2 + 5, k3, (k3 + 5) % 10}
            if {(-k) % 10 for k in contacts} != contacts:
                continue
            if min(_segment_overlap(0, t1), _segment_overlap(k2, t2), _segment_overlap(k3, t2 - t1)) <= 1e-9:
                continue
            if not _decagon_packing_ok(base, t1, t2):
                continue
            nb = (t1, -t1, t2, -t2, t2 - t1, t1 - t2)
            return DecagonLattice((t1, t2), tuple(sorted(contacts)), nb)
    raise LatticeSearchFailed("no decagon lattice satisfies the contact constraints")


def _decagon_packing_ok(base: np.ndarray, t1: np.ndarray, t2: np.ndarray) -> bool:
    for i in range(-3, 4):
        for j in range(-3, 4):
            if i == 0 and j == 0:
                continue
            moved = base + i * t1 + j * t2
            if polygon_area(clip_convex(base, moved)) > 1e-9:
                return False
    return True


def decagon_center(i: int, j: int) -> np.ndarray:
    t1, t2 = derive_decagon_lattice().basis
    return i * t1 + j * t2 - (j // 2) * t1


def decagon_arrangement(nx: int, ny: int) -> list[Cell]:
    """Unit-edge regular decagons on the derived lattice; edge ``k`` faces angle ``36k``.

    Rows are shifted back every second step so the block stays roughly
    rectangular.  Gaps between decagons are expected.
    """
    _check_extent(nx, ny)
    base = regular_polygon(10, DECAGON_APOTHEM / np.cos(np.pi / 10), -np.pi / 10)
    cells = []
    for j in range(ny):
        for i in range(nx):
            c = decagon_center(i, j)
            cells.append(Cell(base + c, c, "A", (i, j)))
    return cells


def generate_cells(family: TilingFamily, nx: int, ny: int) -> list[Cell]:
    kind = family.cell_kind
    if kind == "square":
        return square_tiling(nx, ny)
    if kind == "hex":
        return hex_tiling(nx, ny)
    return decagon_arrangement(nx, ny)


def neighbor_vectors(family: TilingFamily) -> list[np.ndarray]:
    """Centre offsets of every contacting neighbour in the infinite layer."""
    kind = family.cell_kind
    if kind == "square":
        return [np.array(v, dtype=float) for v in ((1, 0), (-1, 0), (0, 1), (0, -1))]
    if kind == "hex":
        return [2 * HEX_APOTHEM * np.array([np.cos(a), np.sin(a)])
                for a in np.pi / 6 + np.pi / 3 * np.arange(6)]
    return list(derive_decagon_lattice().neighbor_vectors)


def assign_arrows(cells: list[Cell], family: TilingFamily, alpha: float | None = None) -> ArrowDiagram:
    """Attach edge signs per family rule and check every shared edge flips sign.

    Raises:
        ParityObstruction: two cells disagree on a shared edge.
    """
    if alpha is None:
        alpha = family.default_alpha
    if not 0.0 < alpha < np.pi / 2:
        raise ValueError("alpha must lie in (0, pi/2)")
    kind = family.cell_kind
    signs = []
    for cell in cells:
        n = cell.n_edges
        if kind == "square":
            base = tuple((-1) ** k for k in range(4))
            signs.append(base if cell.color == "A" else tuple(-s for s in base))
        elif kind == "hex":
            signs.append(tuple((-1) ** k for k in range(n)))
        else:
            contact = set(derive_decagon_lattice().contact_edges)
            signs.append(tuple((-1) ** k if k in contact else 0 for k in range(n)))
    diagram = ArrowDiagram(list(cells), signs, float(np.tan(alpha)), family)
    check_shared_edges(diagram)
    return diagram


def shared_edges(cells: list[Cell], tol: float = 1e-9):
    """Yield ``(ci, ki, cj, kj)`` for collinear, antiparallel edges that overlap."""
    index = {}
    for ci, cell in enumerate(cells):
        for k in range(cell.n_edges):
            n = cell.edge_normal(k)
            a, _ = cell.edge(k)
            key = (round(float(np.degrees(np.arctan2(n[1], n[0]))) % 360), )
            index.setdefault(key, []).append((ci, k, n, float(n @ a)))
    for (ang,), items in index.items():
        opp = index.get(((ang + 180) % 360,), [])
        for ci, ki, n, off in items:
            for cj, kj, n2, off2 in opp:
                if cj <= ci or abs(off + off2) > tol:
                    continue
                a, b = cells[ci].edge(ki)
                c, d = cells[cj].edge(kj)
                tdir = (b - a) / np.linalg.norm(b - a)
                lo = max(min(a @ tdir, b @ tdir), min(c @ tdir, d @ tdir))
                hi = min(max(a @ tdir, b @ tdir), max(c @ tdir, d @ tdir))
                if hi - lo > tol:
                    yield ci, ki, cj, kj


def check_shared_edges(diagram: ArrowDiagram) -> None:
    for ci, ki, cj, kj in shared_edges(diagram.cells):
        si, sj = diagram.signs[ci][ki], diagram.signs[cj][kj]
        if si == 0 and sj == 0:
            continue
        if si != -sj:
            raise ParityObstruction(
                f"cells {ci} and {cj} assign {si} and {sj} to a shared edge", [(ci, ki), (cj, kj)])


def _check_extent(nx: int, ny: int) -> None:
    if nx < 1 or ny < 1:
        raise ValueError("tiling extents must be at least 1")
