import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from interlock import io
from interlock.cli import main

from conftest import layer

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(*args):
    return main([str(a) for a in args])


def read(path):
    return json.loads(Path(path).read_text())


def test_generate_square(tmp_path):
    out = tmp_path / "a.json"
    assert run("generate", "--family", "square-tetra", "--nx", 5, "--ny", 5, "-o", out) == 0
    doc = read(out)
    assert len(doc["elements"]) == 25 and len(doc["contacts"]) == 40
    assert doc["schema_version"] == io.SCHEMA_VERSION and doc["dim"] == 3


def test_generate_single_cube(tmp_path):
    out = tmp_path / "c.json"
    assert run("generate", "--family", "hex-cube", "--nx", 1, "--ny", 1, "-o", out) == 0
    (e,) = read(out)["elements"]
    assert e["shape_tag"] == "Cube"


@pytest.mark.parametrize("args", [
    ["generate", "--family", "square-tetra", "--nx", 0, "--ny", 1, "-o", "x.json"],
    ["generate", "--family", "penrose", "--nx", 1, "--ny", 1, "-o", "x.json"],
    ["frobnicate"],
    [],
])
def test_usage_errors(tmp_path, args):
    assert run(*args) == 2


def test_round_trip_lossless(tmp_path):
    asm = layer("decagon-icosa", 3)
    doc = io.assembly_to_doc(asm)
    path = tmp_path / "r.json"
    io.write_json(doc, path)
    again = io.assembly_to_doc(io.doc_to_assembly(io.read_json(path)))
    assert again == doc
    back = io.doc_to_assembly(doc)
    for a, b in zip(asm.elements, back.elements):
        assert np.array_equal(a.body.vertices, b.body.vertices)
        assert all(np.array_equal(g.normal, h.normal) and g.offset == h.offset
                   for g, h in zip(a.body.halfspaces, b.body.halfspaces))
    for a, b in zip(asm.contacts, back.contacts):
        assert np.array_equal(a.polygon.lift(), b.polygon.lift())


def test_round_trip_4d():
    from interlock.hyper import build_4d_layer
    doc = io.layer4_to_doc(build_4d_layer((2, 2, 2)))
    assert io.layer4_to_doc(io.doc_to_layer4(json.loads(io.dumps(doc)))) == doc


def test_dumps_rejects_nan():
    with pytest.raises(ValueError):
        io.dumps({"x": float("nan")})


def test_verify_square(tmp_path):
    src = tmp_path / "a.json"
    run("generate", "--family", "square-tetra", "--nx", 5, "--ny", 5, "-o", src)
    assert run("verify", src) == 0
    rep = read(tmp_path / "a.translational.report.json")
    s = rep["summary"]["translational"]
    assert s["interior_locked"] == 9 and len(s["boundary_unlocked"]) == 16
    assert s["locked"] == sum(e["translational"]["locked"] for e in rep["elements"])
    assert "version" in rep and "tolerances" in rep


def test_verify_section_and_full(tmp_path):
    src = tmp_path / "h.json"
    run("generate", "--family", "hex-cube", "--nx", 4, "--ny", 4, "-o", src)
    for mode in ("section", "full"):
        out = tmp_path / f"{mode}.json"
        assert run("verify", src, "--mode", mode, "--out", out) == 0
        assert out.exists()


def test_verify_cubic_fixture_negative():
    assert run("verify", FIXTURES / "cubic_packing.json", "--out", "/dev/null") == 1


@pytest.mark.parametrize("name", ["single_tetra.json", "single_cube.json"])
def test_single_fixtures(name):
    assert run("verify", FIXTURES / name, "--out", "/dev/null") == 0


def test_verify_corrupt(tmp_path):
    bad = tmp_path / "bad.json"
    src = tmp_path / "a.json"
    run("generate", "--family", "square-tetra", "--nx", 2, "--ny", 2, "-o", src)
    bad.write_text(src.read_text()[:200])
    assert run("verify", bad) == 2
    missing = tmp_path / "m.json"
    missing.write_text(json.dumps({"schema_version": "1.0", "dim": 3}))
    assert run("verify", missing) == 2
    assert run("verify", tmp_path / "nope.json") == 2


def obj_stats(text):
    objects, tris = 0, []
    for line in text.splitlines():
        if line.startswith("o "):
            objects += 1
            tris.append(0)
        elif line.startswith("f "):
            tris[-1] += 1
    return objects, tris


def test_export_tetra_and_cube(tmp_path):
    for fam, n, per in (("square-tetra", 5, 4), ("hex-cube", 4, 12)):
        src, out = tmp_path / f"{fam}.json", tmp_path / f"{fam}.obj"
        run("generate", "--family", fam, "--nx", n, "--ny", n, "-o", src)
        assert run("export", src, "-o", out) == 0
        objects, tris = obj_stats(out.read_text())
        assert objects == n * n and set(tris) == {per}


def test_export_deterministic(tmp_path):
    src = tmp_path / "a.json"
    run("generate", "--family", "hex-octa", "--nx", 3, "--ny", 3, "-o", src)
    run("export", src, "-o", tmp_path / "1.obj")
    run("export", src, "-o", tmp_path / "2.obj")
    assert (tmp_path / "1.obj").read_bytes() == (tmp_path / "2.obj").read_bytes()
    run("generate", "--family", "hex-octa", "--nx", 3, "--ny", 3, "-o", tmp_path / "b.json")
    assert (tmp_path / "b.json").read_bytes() == src.read_bytes()


def test_obj_indices_valid(tmp_path):
    text = io.obj_text(io.assembly_meshes(layer("hex-dodeca", 3)))
    nv = sum(1 for line in text.splitlines() if line.startswith("v "))
    idx = [int(t) for line in text.splitlines() if line.startswith("f ") for t in line.split()[1:]]
    assert min(idx) == 1 and max(idx) == nv


def test_hyper4_export(tmp_path):
    src = tmp_path / "h4.json"
    assert run("hyper4", "--nx", 2, "--ny", 2, "--nz", 2, "-o", src) == 0
    assert run("export", src, "-o", tmp_path / "x.obj") == 2
    assert run("export", src, "-o", tmp_path / "x.obj", "--section", 0.0) == 0
    objects, tris = obj_stats((tmp_path / "x.obj").read_text())
    assert objects == 8 and set(tris) == {8}
    assert run("verify", src, "--out", tmp_path / "r.json") == 0


def test_evolve_hex_cube(tmp_path):
    src = tmp_path / "h.json"
    run("generate", "--family", "hex-cube", "--nx", 3, "--ny", 3, "-o", src)
    k = next(e["id"] for e in read(src)["elements"] if e["interior"])
    prefix = tmp_path / "ev"
    assert run("evolve", src, "--element", k, "--samples", 10, "--out-prefix", prefix) == 0
    log = read(tmp_path / "ev_events.json")
    assert [e["mechanism"] for e in log["events"]] == ["TriangleCollapse", "TriangleCollapse"]
    assert len(log["frames"]) == 20
    first = (tmp_path / log["frames"][0]).read_text()
    assert sum(1 for line in first.splitlines() if line.startswith("v ")) == 6


def test_evolve_square_and_no_samples(tmp_path):
    src = tmp_path / "s.json"
    run("generate", "--family", "square-tetra", "--nx", 3, "--ny", 3, "-o", src)
    prefix = tmp_path / "sq"
    assert run("evolve", src, "--element", 4, "--samples", 0, "--out-prefix", prefix) == 0
    log = read(tmp_path / "sq_events.json")
    assert {e["mechanism"] for e in log["events"]} <= {"ParallelPairCollapse", "TriangleCollapse"}
    assert log["frames"] == []
    assert not list(tmp_path.glob("sq_*.obj"))
    assert run("evolve", src, "--element", 99, "--out-prefix", prefix) == 2


def test_envelope_commands(tmp_path):
    out = tmp_path / "env.json"
    assert run("envelope", "--subdivision", 0, "--halve", "-o", out) == 0
    assert len(read(out)["elements"]) == 18
    assert run("verify", out, "--out", tmp_path / "r.json") == 0
    assert run("envelope", "--subdivision", -1, "-o", out) == 2


def test_threads_env(tmp_path, monkeypatch):
    from interlock.lockcheck import thread_count
    monkeypatch.setenv("INTERLOCK_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("INTERLOCK_THREADS", "junk")
    assert thread_count() >= 1


def test_module_entry():
    proc = subprocess.run([sys.executable, "-m", "interlock.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "generate" in proc.stdout
