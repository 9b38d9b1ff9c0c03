import numpy as np
import pytest

from interlock.tilings import (OCTA_ALPHA, TETRA_ALPHA, ParityObstruction, TilingFamily, assign_arrows,
                               check_shared_edges, decagon_arrangement, derive_decagon_lattice,
                               hex_tiling, neighbor_vectors, shared_edges, square_tiling)
from interlock.geometry import clip_convex, polygon_area


def test_default_alphas():
    assert TilingFamily.SquareTetra.default_alpha == TilingFamily.HexCube.default_alpha == TETRA_ALPHA
    assert np.sin(TETRA_ALPHA) == pytest.approx(np.sqrt(3) / 3)
    assert np.sin(TilingFamily.HexOcta.default_alpha) == pytest.approx(1 / 3)
    assert OCTA_ALPHA < TETRA_ALPHA
    for fam in TilingFamily:
        assert 0 < fam.default_alpha < np.pi / 2


def test_parse_names():
    assert TilingFamily.parse("hex-cube") is TilingFamily.HexCube
    with pytest.raises(ValueError):
        TilingFamily.parse("penrose")


def test_square_single():
    (c,) = square_tiling(1, 1)
    assert c.color == "A" and np.allclose(c.center, 0)


def test_square_pair():
    a, b = square_tiling(2, 1)
    assert (a.color, b.color) == ("A", "B")
    assert np.linalg.norm(b.center - a.center) == pytest.approx(1.0)


def test_square_parity_count():
    cells = square_tiling(3, 3)
    assert len(cells) == 9 and sum(c.color == "A" for c in cells) == 5


@pytest.mark.parametrize("bad", [(0, 1), (1, 0)])
def test_extent_errors(bad):
    with pytest.raises(ValueError):
        square_tiling(*bad)
    with pytest.raises(ValueError):
        hex_tiling(*bad)


def test_hex_single():
    (c,) = hex_tiling(1, 1)
    assert c.n_edges == 6
    assert c.area() == pytest.approx(3 * np.sqrt(3) / 2)
    lengths = np.linalg.norm(np.roll(c.vertices, -1, axis=0) - c.vertices, axis=1)
    assert np.allclose(lengths, 1.0)


def test_hex_pair_shares_one_edge():
    assert len(list(shared_edges(hex_tiling(2, 1)))) == 1


def test_hex_interior_has_six_neighbors():
    cells = hex_tiling(3, 3)
    counts = np.zeros(len(cells), dtype=int)
    for ci, _, cj, _ in shared_edges(cells):
        counts[ci] += 1
        counts[cj] += 1
    assert counts.max() == 6
    assert sum(counts == 6) >= 1


@pytest.mark.parametrize("gen", [square_tiling, hex_tiling, decagon_arrangement])
def test_cells_do_not_overlap(gen):
    cells = gen(3, 3)
    for i, a in enumerate(cells):
        for b in cells[i + 1:]:
            if np.linalg.norm(a.center - b.center) < 4:
                assert polygon_area(clip_convex(a.vertices, b.vertices)) < 1e-9


def test_decagon_single():
    (c,) = decagon_arrangement(1, 1)
    v = c.vertices
    e1, e2 = v[0] - v[1], v[2] - v[1]
    angle = np.degrees(np.arccos(e1 @ e2 / np.linalg.norm(e1) / np.linalg.norm(e2)))
    assert angle == pytest.approx(144.0)


def test_decagon_lattice_contacts():
    lat = derive_decagon_lattice()
    edges = set(lat.contact_edges)
    assert len(edges) >= 4
    assert all((k + 5) % 10 in edges for k in edges)     # opposite pairs
    assert len(lat.neighbor_vectors) == len(edges)


def test_decagon_contact_edges():
    cells = decagon_arrangement(3, 3)
    centre = next(k for k, c in enumerate(cells) if c.lattice_index == (1, 1))
    overlap = {}
    for ci, ki, cj, kj in shared_edges(cells):
        if centre not in (ci, cj):
            continue
        k, other, kk = (ki, cells[cj], kj) if ci == centre else (kj, cells[ci], ki)
        a, b = cells[centre].edge(k)
        c, d = other.edge(kk)
        u = (b - a) / np.linalg.norm(b - a)
        overlap[k] = min(max(a @ u, b @ u), max(c @ u, d @ u)) - max(min(a @ u, b @ u), min(c @ u, d @ u))
    assert set(overlap) == set(derive_decagon_lattice().contact_edges)
    # c and f (edges 0 and 5) meet edge to edge; the oblique pairs overlap by 1/phi**2
    assert overlap[0] == pytest.approx(1.0) and overlap[5] == pytest.approx(1.0)
    for k in (2, 3, 7, 8):
        assert overlap[k] == pytest.approx((3 - np.sqrt(5)) / 2)


def test_square_arrow_pair():
    d = assign_arrows(square_tiling(2, 1), TilingFamily.SquareTetra, 0.3)
    (ci, ki, cj, kj), = list(shared_edges(d.cells))
    a_sign = d.sign(ci, ki) if d.cells[ci].color == "A" else d.sign(cj, kj)
    b_sign = d.sign(cj, kj) if d.cells[ci].color == "A" else d.sign(ci, ki)
    assert (a_sign, b_sign) == (-1, 1)
    # top and bottom outward on A cells
    assert d.signs[0][0] == 1 and d.signs[0][2] == 1


def test_hex_arrows_alternate():
    d = assign_arrows(hex_tiling(1, 1), TilingFamily.HexCube, TETRA_ALPHA)
    assert d.signs[0] in [(1, -1, 1, -1, 1, -1), (-1, 1, -1, 1, -1, 1)]
    assert d.slope == pytest.approx(np.tan(TETRA_ALPHA))


@pytest.mark.parametrize("fam", list(TilingFamily))
def test_shared_edges_flip(fam):
    from interlock.tilings import generate_cells
    d = assign_arrows(generate_cells(fam, 4, 4), fam)
    pairs = list(shared_edges(d.cells))
    assert pairs
    for ci, ki, cj, kj in pairs:
        assert d.sign(ci, ki) == -d.sign(cj, kj) != 0


def test_hex_weighted_normals_cancel():
    d = assign_arrows(hex_tiling(2, 2), TilingFamily.HexOcta)
    for cell, signs in zip(d.cells, d.signs):
        total = sum(s * cell.edge_normal(k) * np.linalg.norm(np.subtract(*cell.edge(k)))
                    for k, s in enumerate(signs))
        assert np.allclose(total, 0, atol=1e-12)


def test_translation_invariance():
    cells = hex_tiling(3, 3)
    d = assign_arrows(cells, TilingFamily.HexCube)
    shift = neighbor_vectors(TilingFamily.HexCube)[0]
    moved = [c.translated(shift) for c in cells]
    assert assign_arrows(moved, TilingFamily.HexCube).signs == d.signs


def test_parity_obstruction_on_bad_diagram():
    from interlock.tilings import ArrowDiagram
    cells = square_tiling(2, 1)
    d = ArrowDiagram(cells, [(1, -1, 1, -1)] * 2, 1.0, TilingFamily.SquareTetra)
    with pytest.raises(ParityObstruction) as info:
        check_shared_edges(d)
    assert len(info.value.cycle) == 2


def test_alpha_range():
    with pytest.raises(ValueError):
        assign_arrows(square_tiling(1, 1), TilingFamily.SquareTetra, 0.0)
