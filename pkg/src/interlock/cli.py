"""``interlock`` command line: generate, verify, export, evolve, hyper4, envelope."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .assembly import build_layer
from .envelope import build_envelope, frequency_scan, sphere_mesh
from .geometry import EPS_GEO, GeometryError
from .hyper import build_4d_layer, hypersection_lock, lock_4d
from .lockcheck import (MODES, LockError, all_interior_locked, contact_faces,
                        moving_section, section_evolution, verify_assembly)
from .tilings import TilingError, TilingFamily

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(name: str, value: int) -> int:
    if value < 1:
        raise UsageError(f"{name} must be at least 1")
    return value


def cmd_generate(args) -> int:
    family = TilingFamily.parse(args.family)
    asm = build_layer(family, _positive("--nx", args.nx), _positive("--ny", args.ny), args.alpha,
                      args.half_thickness, args.tol)
    io.write_json(io.assembly_to_doc(asm), args.out)
    print(f"{len(asm)} elements, {len(asm.contacts)} contacts -> {args.out}")
    return EXIT_OK


def cmd_hyper4(args) -> int:
    layer = build_4d_layer((_positive("--nx", args.nx), _positive("--ny", args.ny), _positive("--nz", args.nz)))
    io.write_json(io.layer4_to_doc(layer), args.out)
    print(f"{len(layer)} elements, {len(layer.contacts)} contacts -> {args.out}")
    return EXIT_OK


def cmd_envelope(args) -> int:
    if args.scan:
        for freq, ok in frequency_scan(args.scan, args.alpha_or_default, args.halve):
            print(f"frequency {freq}: {'locked' if ok else 'not locked'}")
        return EXIT_OK
    if args.subdivision < 0:
        raise UsageError("--subdivision must be non-negative")
    asm = build_envelope(sphere_mesh(args.subdivision), args.alpha_or_default, args.halve, tol=args.tol)
    io.write_json(io.assembly_to_doc(asm, "envelope"), args.out)
    print(f"{len(asm)} elements, {len(asm.contacts)} contacts -> {args.out}")
    return EXIT_OK


def _report_path(args) -> Path:
    if args.out:
        return Path(args.out)
    src = Path(args.input)
    return src.with_name(src.stem + f".{args.mode}.report.json")


def _verify_4d(doc) -> tuple[dict, bool]:
    layer = io.doc_to_layer4(doc)
    elements = []
    for k in range(len(layer)):
        cone = lock_4d(k, layer)
        up, down = hypersection_lock(k, layer)
        elements.append({
            "id": k, "interior": bool(layer.interior[k]), "marginal": bool(cone.marginal),
            "translational": {"locked": cone.locked, "margin": cone.margin,
                              "witness": None if cone.witness is None else [float(x) for x in cone.witness]},
            "section": {"up": up, "down": down, "locked": bool(up and down)},
        })
    locked = [e for e in elements if e["translational"]["locked"]]
    summary = {"translational": {
        "locked": len(locked), "unlocked": len(elements) - len(locked),
        "interior_locked": sum(1 for e in locked if e["interior"]),
        "interior_unlocked": [e["id"] for e in elements if e["interior"] and not e["translational"]["locked"]],
        "boundary_unlocked": [e["id"] for e in elements if not e["interior"] and not e["translational"]["locked"]],
    }}
    agree = sum(1 for e in elements if e["translational"]["locked"] == e["section"]["locked"])
    report = {"elements": elements, "summary": summary, "modes": ["translational", "section"],
              "agreement": {"translational": {"section": agree}},
              "marginal": [e["id"] for e in elements if e["marginal"]]}
    return report, all_interior_locked(report, "translational")


def cmd_verify(args) -> int:
    doc = io.read_json(args.input)
    if doc.get("dim", 3) == 4:
        report, ok = _verify_4d(doc)
    else:
        try:
            asm = io.doc_to_assembly(doc)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise io.DocumentError(f"malformed document: {exc}") from exc
        report = verify_assembly(asm, (args.mode,))
        ok = all_interior_locked(report, args.mode)
    out = _report_path(args)
    io.write_json(io.report_doc(report, args.mode, args.tol), out)
    s = report["summary"][args.mode if args.mode in report["summary"] else "translational"]
    print(f"{s['interior_locked']} interior locked, {len(s['interior_unlocked'])} interior unlocked, "
          f"{len(s['boundary_unlocked'])} boundary unlocked -> {out}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_export(args) -> int:
    doc = io.read_json(args.input)
    if doc.get("dim", 3) == 4:
        if args.section is None:
            raise UsageError("4-D documents need --section W")
        meshes = io.layer4_section_meshes(io.doc_to_layer4(doc), args.section)
    else:
        meshes = io.assembly_meshes(io.doc_to_assembly(doc))
    Path(args.out).write_text(io.obj_text(meshes))
    print(f"{len(meshes)} objects -> {args.out}")
    return EXIT_OK


def cmd_evolve(args) -> int:
    doc = io.read_json(args.input)
    asm = io.doc_to_assembly(doc)
    k = asm.index_of(args.element)
    faces = contact_faces(asm, k)
    if not faces:
        raise UsageError(f"element {args.element} has no contacts")
    center = asm.elements[k].center
    up = moving_section([h.translated(-center) for h in faces])
    prefix = Path(args.out_prefix)
    events, frames = [], []
    for name, poly, sign in (("up", up, 1.0), ("down", up.reversed(), -1.0)):
        res = section_evolution(poly)
        finite = bool(np.isfinite(res.vanish_time))
        events.append({"direction": name, "mechanism": res.mechanism,
                       "witness_edges": [int(i) for i in res.witness_edges],
                       "event_time": float(res.vanish_time) if finite else None})
        if not finite or args.samples <= 0:
            continue
        for s in range(args.samples):
            t = res.vanish_time * s / args.samples
            pts = poly.polygon(t)
            if pts is None:
                continue
            verts = np.column_stack([pts + center[:2], np.full(len(pts), center[2] + sign * t)])
            path = prefix.with_name(f"{prefix.name}_{name}_{s:03d}.obj")
            path.write_text(io.obj_text([(f"{name}_{s:03d}", verts, [list(range(len(verts)))])]))
            frames.append(path.name)
    log = prefix.with_name(prefix.name + "_events.json")
    io.write_json({"element": int(args.element), "events": events, "frames": frames}, log)
    for e in events:
        print(f"{e['direction']}: {e['mechanism']} at t = {e['event_time']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="interlock", description=__doc__)
    p.add_argument("--tol", type=float, default=EPS_GEO, help="geometric tolerance (default %(default)s)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a planar layer")
    g.add_argument("--family", required=True, choices=[f.value for f in TilingFamily])
    g.add_argument("--nx", type=int, required=True)
    g.add_argument("--ny", type=int, required=True)
    g.add_argument("--alpha", type=float, default=None, help="tilt in radians")
    g.add_argument("--half-thickness", type=float, default=None)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="check an assembly document")
    v.add_argument("input")
    v.add_argument("--mode", choices=MODES, default="translational")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", help="write a Wavefront OBJ")
    e.add_argument("input")
    e.add_argument("-o", "--out", required=True)
    e.add_argument("--format", choices=["obj"], default="obj")
    e.add_argument("--section", type=float, default=None, help="w of the hypersection for 4-D input")
    e.set_defaults(func=cmd_export)

    ev = sub.add_parser("evolve", help="section evolution frames and events of one element")
    ev.add_argument("input")
    ev.add_argument("--element", type=int, required=True)
    ev.add_argument("--samples", type=int, default=10)
    ev.add_argument("--out-prefix", required=True)
    ev.set_defaults(func=cmd_evolve)

    h = sub.add_parser("hyper4", help="build the 4-D tesseract layer")
    h.add_argument("--nx", type=int, default=4)
    h.add_argument("--ny", type=int, default=4)
    h.add_argument("--nz", type=int, default=4)
    h.add_argument("-o", "--out", required=True)
    h.set_defaults(func=cmd_hyper4)

    en = sub.add_parser("envelope", help="build a finite envelope over a sphere mesh")
    en.add_argument("--subdivision", type=int, default=1)
    en.add_argument("--alpha", type=float, default=None, help="tilt in radians")
    en.add_argument("--halve", action="store_true", help="keep only the inner halves")
    en.add_argument("--scan", type=int, default=0, metavar="F",
                    help="report lock status for mesh frequencies 1..F instead of writing a file")
    en.add_argument("-o", "--out", default="envelope.json")
    en.set_defaults(func=cmd_envelope)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    if getattr(args, "command", None) == "envelope":
        from .tilings import TETRA_ALPHA
        args.alpha_or_default = TETRA_ALPHA if args.alpha is None else args.alpha
    try:
        return args.func(args)
    except (UsageError, io.DocumentError, TilingError, GeometryError, LockError, KeyError, ValueError,
            OSError) as exc:
        print(f"interlock: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
