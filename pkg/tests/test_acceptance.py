"""Acceptance criteria, one printed PASS/FAIL line each."""
import time

import numpy as np
import pytest

from interlock.assembly import build_layer
from interlock.cli import main
from interlock.envelope import assign_alternating_arrows, build_envelope, frequency_scan, sphere_mesh
from interlock.geometry import EmptyRegion, hrep_to_vrep
from interlock.hyper import (MovingPolyhedron, build_4d_layer, hypersection_lock, hyperplane_section,
                             lock_4d, polyhedron_evolution, simplex_collapse_time,
                             tesseract_diagonal_frame)
from interlock.io import read_json, doc_to_assembly
from interlock.lockcheck import (InvalidAtStart, MovingPolygon, admissible, contact_faces, face_catchup_speed,
                                 full_lock, lock_by_section, moving_section, screw_rows, section_evolution,
                                 sphere_certificate, translational_lock)
from interlock.lp import linprog
from interlock.reconstruct import LayerGeometry, dihedral_angles, identify_shape, reconstruct_element
from interlock.tilings import (OCTA_ALPHA, TETRA_ALPHA, TilingFamily, assign_arrows, hex_tiling,
                               square_tiling)

from conftest import FAMILIES, mc_escape, random_unit
from test_cli_io import FIXTURES


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail
    return emit


def _edges(body):
    return [np.linalg.norm(body.vertices[a] - body.vertices[b]) for a, b in body.edges()]


def _face_area(pts):
    pts = np.asarray(pts)
    return 0.5 * np.linalg.norm(sum(np.cross(pts[k], pts[(k + 1) % len(pts)]) for k in range(len(pts))))


def test_01_shape_recovery(verdict):
    t0 = time.perf_counter()
    cells = hex_tiling(1, 1)
    cube = reconstruct_element(cells[0], assign_arrows(cells, TilingFamily.HexCube, TETRA_ALPHA),
                               LayerGeometry(10.0, TETRA_ALPHA, TilingFamily.HexCube), 0).body
    ok_cube = (len(cube.faces), len(cube.vertices)) == (6, 8) and \
        np.allclose(dihedral_angles(cube), np.pi / 2, atol=1e-9)
    h = build_layer("hex-octa", 1, 1).geometry.half_thickness
    octa = reconstruct_element(cells[0], assign_arrows(cells, TilingFamily.HexOcta, OCTA_ALPHA),
                               LayerGeometry(h, OCTA_ALPHA, TilingFamily.HexOcta), 0).body
    areas = [_face_area(octa.face_polygon(f)) for f in range(len(octa.faces))]
    lengths = _edges(octa)
    ok_octa = len(octa.faces) == 8 and max(areas) - min(areas) <= 1e-9 and \
        max(lengths) - min(lengths) <= 1e-9 and all(len(f) == 3 for f in octa.faces)
    dt = time.perf_counter() - t0
    verdict(1, "hexagon -> cube and octahedron", ok_cube and ok_octa and dt < 1.0,
            f"cube {ok_cube}, octahedron {ok_octa}, {dt:.2f} s")


def test_02_square_tetrahedra(verdict):
    cells = square_tiling(2, 1)
    asm = build_layer("square-tetra", 2, 1)
    body = asm.elements[0].body
    lengths = _edges(body)
    regular = identify_shape(body) == "Tetrahedron" and max(lengths) - min(lengths) <= 1e-9
    v = body.vertices
    top = v[v[:, 2] > 0]
    bottom = v[v[:, 2] < 0]
    d_top, d_bot = top[1] - top[0], bottom[1] - bottom[0]
    perpendicular = abs(d_top @ d_bot) <= 1e-9
    edge = float(np.linalg.norm(d_top))
    unit_edge = abs(edge - 1.0) <= 1e-9
    dist = float(np.linalg.norm(cells[1].center - cells[0].center))
    unit_dist = abs(dist - 1.0) <= 1e-9
    verdict(2, "square -> regular tetrahedra, unit perpendicular edges, unit centre distance",
            regular and perpendicular and unit_edge and unit_dist,
            f"regular {regular}, perpendicular {perpendicular}, opposite edge {edge:.12g}, "
            f"centre distance {dist:.12g}")


def test_03_all_families_interlock(verdict):
    t0 = time.perf_counter()
    bad = []
    for fam in FAMILIES:
        asm = build_layer(fam, 5, 5)
        for k in range(len(asm)):
            cone = translational_lock(k, asm)
            normals = [n for _, n, _ in asm.contacts_of(k)]
            if asm.interior[k] != cone.locked:
                bad.append((fam, k, "verdict"))
            elif not cone.locked and not (cone.witness is not None and admissible(normals, cone.witness)):
                bad.append((fam, k, "witness"))
    dt = time.perf_counter() - t0
    verdict(3, "interior locked, boundary escapes, six families", not bad and dt < 10.0,
            f"{len(bad)} failures, {dt:.2f} s")


_BIG = {}


def big_layers():
    if not _BIG:
        for fam in FAMILIES:
            _BIG[fam] = build_layer(fam, 10, 10)
    return _BIG


def test_04_section_equivalence(verdict):
    total, disagree = 0, 0
    for asm in big_layers().values():
        for k in range(len(asm)):
            up, down, _, _ = lock_by_section(k, asm)
            total += 1
            disagree += (up and down) != translational_lock(k, asm).locked
    verdict(4, "section evolution verdict equals cone verdict", total >= 500 and disagree == 0,
            f"{disagree} disagreements over {total} elements")


def test_05_pa_consistency(verdict):
    total, disagree = 0, 0
    for asm in big_layers().values():
        for k in range(len(asm)):
            cone = translational_lock(k, asm)
            faces = contact_faces(asm, k)
            try:
                bounded = bool(faces) and hrep_to_vrep(faces, 3).bounded
            except EmptyRegion:
                bounded = True
            total += 1
            disagree += bounded != cone.locked
    verdict(5, "cone triviality equals bounded P(A)", disagree == 0,
            f"{disagree} disagreements over {total} elements")


def test_06_monte_carlo(verdict):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    bad, checked = [], 0
    for fam in FAMILIES:
        asm = build_layer(fam, 5, 5)
        for k in range(len(asm)):
            for rows, dim, cone in (([n for _, n, _ in asm.contacts_of(k)], 3, translational_lock(k, asm)),
                                    (screw_rows(asm, k), 6, full_lock(k, asm))):
                found = mc_escape(rows, dim, 100_000, rng)
                checked += 1
                if (found is None) != cone.locked:
                    bad.append((fam, k, dim))
    dt = time.perf_counter() - t0
    verdict(6, "Monte-Carlo oracle agrees with LP", not bad and dt < 60.0,
            f"{checked} cones, {len(bad)} disagreements, {dt:.1f} s")


def test_07_full_interlocking(verdict):
    details, ok = [], True
    for fam in ("square-tetra", "hex-cube"):
        asm = build_layer(fam, 5, 5)
        for k in range(len(asm)):
            if not asm.interior[k]:
                continue
            cert = sphere_certificate(k, asm)
            full = full_lock(k, asm).locked
            ok &= full and cert is not None
    for fam in FAMILIES:
        asm = build_layer(fam, 5, 5)
        for k in range(len(asm)):
            if translational_lock(k, asm).locked and sphere_certificate(k, asm) is not None:
                ok &= full_lock(k, asm).locked
    asm = build_layer("decagon-icosa", 5, 5)
    ico = all(full_lock(k, asm).locked for k in range(len(asm)) if asm.interior[k])
    details.append(f"icosahedra full {ico}")
    verdict(7, "full lock with sphere certificates; icosahedra fully locked", ok and ico, ", ".join(details))


def test_08_decagon_velocity(verdict):
    asm = build_layer("decagon-icosa", 5, 5)
    k = next(i for i in range(len(asm)) if asm.interior[i])
    poly = moving_section([h.translated(-asm.elements[k].center) for h in contact_faces(asm, k)])
    res = section_evolution(poly)
    c_edge = next(i for i in res.witness_edges
                  if not any(np.allclose(poly.normals[i] * [1, -1], poly.normals[j]) for j in res.witness_edges if j != i))
    e, g = [i for i in res.witness_edges if i != c_edge]
    axis = poly.normals[c_edge]
    v = abs(poly.speeds[e])

    def meet(t):
        return np.linalg.solve(poly.normals[[e, g]], poly.offsets[[e, g]] + t * poly.speeds[[e, g]])

    velocity = (meet(0.5) - meet(0.0)) / 0.5
    direction = np.array([-poly.normals[e][1], poly.normals[e][0]])
    phi_e = np.arccos(min(1.0, abs(direction @ axis)))
    predicted = face_catchup_speed(phi_e, v)
    speed = float(np.linalg.norm(velocity))
    ok = abs(speed - predicted) <= 1e-9 and speed > v and velocity @ axis > 0
    verdict(8, "e-g meeting point moves at v / sin(phi_e) > v",
            ok, f"observed {speed:.12f}, predicted {predicted:.12f}, v {v:.6f}")


def test_09_four_d(verdict):
    t0 = time.perf_counter()
    sec = hyperplane_section(tesseract_diagonal_frame(1.0), 0.0)
    lengths = _edges(sec)
    octa = identify_shape(sec) == "Octahedron" and len(sec.vertices) == 6 and len(sec.faces) == 8 and \
        max(lengths) - min(lengths) <= 1e-9
    lay = build_4d_layer((4, 4, 4))
    inner = [k for k in range(len(lay)) if lay.interior[k]]
    locked = all(lock_4d(k, lay).locked and all(hypersection_lock(k, lay)) for k in inner)
    agree = all(lock_4d(k, lay).locked == all(hypersection_lock(k, lay)) for k in range(len(lay)))
    dt = time.perf_counter() - t0
    verdict(9, "tesseract octahedral section; 4-D layer locked per cone and hypersection",
            octa and locked and agree and bool(inner) and dt < 30.0,
            f"octahedron {octa}, {len(inner)} interior locked {locked}, agreement {agree}, {dt:.1f} s")


def test_10_lemma_consistency(verdict):
    rng = np.random.default_rng(77)
    done2 = done3 = bad = 0
    while done2 < 50:
        n = rng.integers(3, 8)
        ang = np.sort(rng.uniform(0, 2 * np.pi, n))
        edges = [((np.cos(a), np.sin(a)), rng.uniform(0.5, 1.5), rng.uniform(-1, 0.5)) for a in ang]
        poly = MovingPolygon.make(edges)
        if poly.polygon(0.0) is None:
            continue
        try:
            r = section_evolution(poly)
        except InvalidAtStart:
            continue
        t = simplex_collapse_time(edges, 2)
        bad += np.isfinite(t) != np.isfinite(r.vanish_time) or (np.isfinite(t) and abs(t - r.vanish_time) > 1e-9)
        done2 += 1
    while done3 < 50:
        m = rng.integers(4, 10)
        normals = random_unit(rng, m, 3)
        faces = [(normals[k], rng.uniform(0.5, 1.5), rng.uniform(-1, 0.5)) for k in range(m)]
        poly = MovingPolyhedron.make(faces)
        try:
            if not hrep_to_vrep(poly.at(0.0), 3).bounded:
                continue
            r = polyhedron_evolution(poly)
        except (InvalidAtStart, EmptyRegion):
            continue
        t = simplex_collapse_time(faces, 3)
        bad += np.isfinite(t) != np.isfinite(r.vanish_time) or (np.isfinite(t) and abs(t - r.vanish_time) > 1e-9)
        done3 += 1
    verdict(10, "simplex collapse check agrees with 2-D and 3-D evolvers", bad == 0,
            f"{done2} polygons, {done3} polyhedra, {bad} disagreements")


def test_11_negative_control(verdict, tmp_path):
    path = FIXTURES / "cubic_packing.json"
    code = main(["verify", str(path), "--out", str(tmp_path / "r.json")])
    asm = doc_to_assembly(read_json(path))
    upward = 0
    for k in range(len(asm)):
        N = np.array([n for _, n, _ in asm.contacts_of(k)]).reshape(-1, 3)
        res = linprog([0, 0, -1], N if len(N) else None, np.zeros(len(N)) if len(N) else None,
                      bounds=[(-1, 1)] * 3)
        upward += res.ok and res.x[2] > 1e-9
    verdict(11, "cubic packing is not interlocked", code == 1 and upward == len(asm),
            f"exit {code}, {upward}/{len(asm)} elements escape upward")


def test_12_envelope(verdict):
    mesh = sphere_mesh(0)
    assign_alternating_arrows(mesh)
    results = {}
    for halve in (False, True):
        env = build_envelope(mesh, TETRA_ALPHA, halve)
        results[halve] = all(translational_lock(k, env).locked for k in range(len(env)))
    scan = frequency_scan(4)
    verdict(12, "envelope locked at the base mesh, whole and halved", all(results.values()),
            f"{len(mesh.faces)} faces, whole {results[False]}, halved {results[True]}, "
            f"frequency scan {scan}")


def test_13_determinism(verdict, tmp_path):
    digests = []
    for run in ("a", "b"):
        d = tmp_path / run
        d.mkdir()
        files = {}
        for fam in ("square-tetra", "decagon-dodeca"):
            src = d / f"{fam}.json"
            main(["generate", "--family", fam, "--nx", "4", "--ny", "4", "-o", str(src)])
            main(["verify", str(src), "--mode", "full"])
            main(["export", str(src), "-o", str(d / f"{fam}.obj")])
        for p in sorted(d.iterdir()):
            files[p.name] = p.read_bytes()
        digests.append(files)
    same = digests[0] == digests[1] and len(digests[0]) == 6
    verdict(13, "generate, verify and export are byte-identical across runs", same,
            f"{len(digests[0])} files compared")
