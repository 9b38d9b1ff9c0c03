"""Lock verification: translational cone, section evolution, 6-D screw cone, sphere certificate."""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .assembly import Assembly
from .geometry import (EPS_DIR, EPS_GEO, EmptyRegion, HalfSpace, cone_is_trivial, hrep_to_vrep,
                       interior_margin)
from .lp import linprog

MARGIN_TOL = 1e-9

PARALLEL_PAIR = "ParallelPairCollapse"
TRIANGLE = "TriangleCollapse"
CAP = "CapCollapse"
NO_DEGENERATION = "NoDegeneration"


class LockError(Exception):
    pass


class InvalidAtStart(LockError):
    pass


class DegenerateAngle(LockError):
    pass


class NotLocked(LockError):
    pass


@dataclass(frozen=True, eq=False)
class MotionCone:
    dim: int
    locked: bool
    witness: np.ndarray | None
    certificate: np.ndarray | None
    margin: float = 0.0
    marginal: bool = False
    bounded_pa: bool | None = None


def _cone(normals, dim: int) -> MotionCone:
    normals = np.asarray(normals, dtype=float).reshape(-1, dim)
    res = cone_is_trivial(normals, dim, MARGIN_TOL)
    return MotionCone(dim, res.locked, res.witness, res.certificate, res.margin, res.marginal)


def contact_faces(assembly: Assembly, k: int) -> list[HalfSpace]:
    """Distinct face planes of element ``k`` that touch a neighbour, in face order."""
    body = assembly.elements[k].body
    ids = set()
    for c in assembly.contacts:
        if c.i == k:
            ids.add(c.face_i)
        elif c.j == k:
            ids.add(c.face_j)
    return [body.halfspaces[f] for f in sorted(ids)]


def contact_face_ids(assembly: Assembly, k: int) -> list[int]:
    ids = set()
    for c in assembly.contacts:
        if c.i == k:
            ids.add(c.face_i)
        elif c.j == k:
            ids.add(c.face_j)
    return sorted(ids)


def pa_bounded(halfspaces: list[HalfSpace], dim: int = 3) -> bool:
    """Whether the intersection of the contact half-spaces has finite volume."""
    if not halfspaces:
        return False
    try:
        return hrep_to_vrep(halfspaces, dim).bounded
    except EmptyRegion:
        return True


def translational_lock(element_id: int, assembly: Assembly) -> MotionCone:
    _, normals, _ = zip(*assembly.contacts_of(element_id)) if assembly.contacts_of(element_id) else ((), (), ())
    cone = _cone(list(normals), 3) if normals else _cone(np.zeros((0, 3)), 3)
    bounded = pa_bounded(contact_faces(assembly, element_id))
    return MotionCone(3, cone.locked, cone.witness, cone.certificate, cone.margin, cone.marginal, bounded)


def admissible(normals, v, tol: float = 1e-9) -> bool:
    """``n . v <= tol`` for every constraint row."""
    N = np.asarray(normals, dtype=float)
    return bool(len(N) == 0 or np.all(N @ np.asarray(v, dtype=float) <= tol))


# ------------------------------------------------------------ section evolution

@dataclass(frozen=True, eq=False)
class MovingPolygon:
    """Half-planes ``m . x <= c + t s``; ``caps`` are ``(c, s)`` rows ``0 <= c + t s``."""

    normals: np.ndarray
    offsets: np.ndarray
    speeds: np.ndarray
    caps: tuple[tuple[float, float], ...] = ()

    @classmethod
    def make(cls, edges, caps=()) -> "MovingPolygon":
        m = np.array([e[0] for e in edges], dtype=float).reshape(-1, 2)
        m = m / np.linalg.norm(m, axis=1, keepdims=True)
        return cls(m, np.array([e[1] for e in edges], dtype=float),
                   np.array([e[2] for e in edges], dtype=float), tuple(caps))

    def at(self, t: float) -> list[HalfSpace]:
        return [HalfSpace(m, float(c + t * s)) for m, c, s in zip(self.normals, self.offsets, self.speeds)]

    def reversed(self) -> "MovingPolygon":
        return MovingPolygon(self.normals, self.offsets, -self.speeds,
                             tuple((c, -s) for c, s in self.caps))

    def polygon(self, t: float) -> np.ndarray | None:
        if any(c + t * s < -EPS_GEO for c, s in self.caps):
            return None
        try:
            p = hrep_to_vrep(self.at(t), 2)
        except EmptyRegion:
            return None
        if not p.bounded or len(p.vertices) < 3:
            return None
        return p.vertices


@dataclass(frozen=True)
class EvolutionResult:
    vanish_time: float
    mechanism: str
    witness_edges: tuple[int, ...] = ()


def _positive_null(M: np.ndarray, tol: float = 1e-10) -> np.ndarray | None:
    """Strictly positive ``lam`` with ``M.T @ lam = 0``, unique up to scale, or None."""
    _, s, vh = np.linalg.svd(M.T)
    rank = int(np.sum(s > tol * max(1.0, s[0] if len(s) else 1.0)))
    if M.shape[0] - rank != 1:
        return None
    lam = vh[-1]
    if lam.sum() < 0:
        lam = -lam
    if np.all(lam > tol):
        return lam / lam.sum()
    return None


def simplex_events(normals, offsets, speeds, tol: float = 1e-12):
    """Yield ``(t, subset)`` where a positively dependent subset becomes empty.

    Subsets of size 2 .. d+1 whose normals admit a unique strictly positive
    null combination ``lam``; the subset region is empty exactly when
    ``lam . (c + t s) < 0``.
    """
    N = np.asarray(normals, dtype=float)
    c = np.asarray(offsets, dtype=float)
    s = np.asarray(speeds, dtype=float)
    d = N.shape[1]
    for size in range(2, d + 2):
        for sub in itertools.combinations(range(len(N)), size):
            lam = _positive_null(N[list(sub)])
            if lam is None:
                continue
            rate = float(lam @ s[list(sub)])
            if rate >= -tol:
                continue
            yield -float(lam @ c[list(sub)]) / rate, sub


def section_evolution(poly: MovingPolygon, t_max: float = np.inf) -> EvolutionResult:
    """Exact time at which the moving polygon degenerates, from event enumeration.

    Raises:
        InvalidAtStart: the polygon is empty or degenerate at ``t = 0``.
    """
    hs = poly.at(0.0)
    margin, _ = interior_margin(hs) if hs else (np.inf, None)
    if margin <= EPS_GEO or any(c <= EPS_GEO for c, _ in poly.caps):
        raise InvalidAtStart("polygon is degenerate at t = 0")
    best = (np.inf, NO_DEGENERATION, ())
    if not hs or not hrep_to_vrep(hs, 2).bounded:
        # a strip or wedge is not a polygon; collapsing it to a line is not vanishing
        return EvolutionResult(*best)
    for t, sub in simplex_events(poly.normals, poly.offsets, poly.speeds):
        mech = PARALLEL_PAIR if len(sub) == 2 else TRIANGLE
        if t < best[0] - 1e-12 or (abs(t - best[0]) <= 1e-12 and len(sub) < len(best[2])):
            best = (t, mech, sub)
    for k, (c, s) in enumerate(poly.caps):
        if s < 0:
            t = -c / s
            if t < best[0] - 1e-12:
                best = (t, CAP, (len(poly.normals) + k,))
    if best[0] > t_max:
        return EvolutionResult(np.inf, NO_DEGENERATION, ())
    return EvolutionResult(float(best[0]), best[1], tuple(best[2]))


def moving_section(halfspaces: list[HalfSpace]) -> MovingPolygon:
    """Section ``z = t`` of the half-spaces as a polygon moving with ``t``."""
    edges, caps = [], []
    for h in halfspaces:
        nxy = h.normal[:2]
        r = float(np.linalg.norm(nxy))
        if r < EPS_DIR:
            caps.append((h.offset / abs(h.normal[2]), -float(np.sign(h.normal[2]))))
            continue
        edges.append((nxy / r, h.offset / r, -h.normal[2] / r))
    return MovingPolygon.make(edges, caps)


def lock_by_section(element_id: int, assembly: Assembly) -> tuple[bool, bool, EvolutionResult, EvolutionResult]:
    """Evolve the section of the contact-plane region upward and downward."""
    faces = contact_faces(assembly, element_id)
    if not faces:
        none = EvolutionResult(np.inf, NO_DEGENERATION, ())
        return False, False, none, none
    c = assembly.elements[element_id].center
    local = [h.translated(-c) for h in faces]
    up = moving_section(local)
    r_up = section_evolution(up)
    r_down = section_evolution(up.reversed())
    return np.isfinite(r_up.vanish_time), np.isfinite(r_down.vanish_time), r_up, r_down


def face_catchup_speed(phi_e: float, v: float) -> float:
    """Speed of the meeting point of two symmetric faces closing on a third."""
    s = np.sin(phi_e)
    if s <= EPS_DIR:
        raise DegenerateAngle("sin(phi_e) vanishes")
    return float(v / s)


# ------------------------------------------------------------ rotations

def screw_rows(assembly: Assembly, element_id: int) -> np.ndarray:
    """Constraint rows ``(n, p x n)`` at every overlap vertex, ``p`` relative to the centroid."""
    centroid = assembly.elements[element_id].body.centroid()
    rows = []
    for _, n, c in assembly.contacts_of(element_id):
        for p in c.polygon.lift():
            rows.append(np.concatenate([n, np.cross(p - centroid, n)]))
    return np.array(rows).reshape(-1, 6)


def full_lock(element_id: int, assembly: Assembly) -> MotionCone:
    return _cone(screw_rows(assembly, element_id), 6)


@dataclass(frozen=True, eq=False)
class SphereCertificate:
    s1: tuple[np.ndarray, float]
    s2: tuple[np.ndarray, float]
    c1_faces: list[int]
    c2_faces: list[int]


def _blocks(normals: np.ndarray, up: float) -> bool:
    """No ``v`` with ``N v <= 0`` and ``v_z = up``."""
    if len(normals) == 0:
        return False
    res = linprog(np.zeros(3), normals, np.zeros(len(normals)),
                  np.array([[0.0, 0.0, 1.0]]), np.array([up]), bounds=[(None, None)] * 3)
    return not res.ok


def minimal_blocking_set(faces: list[int], normals: np.ndarray, up: float) -> list[int] | None:
    """Greedy removal in face order down to a minimal set blocking ``sign(v_z) = up``."""
    keep = list(range(len(faces)))
    if not _blocks(normals[keep], up):
        return None
    for k in range(len(faces)):
        trial = [x for x in keep if x != k]
        if _blocks(normals[trial], up):
            keep = trial
    return [faces[k] for k in keep]


def _touching_sphere(body, face_ids: list[int], side: float):
    """Largest sphere inside ``body`` at equal distance from ``face_ids`` with centre on ``side`` of z = 0."""
    H = body.halfspaces
    A_ub, b_ub = [], []
    for h in H:
        A_ub.append(np.concatenate([h.normal, [1.0, 0.0]]))
        b_ub.append(h.offset)
    A_ub.append([0.0, 0.0, 0.0, -1.0, 1.0])      # s <= r
    b_ub.append(0.0)
    A_ub.append([0.0, 0.0, -side, 0.0, 1.0])     # s <= side * z
    b_ub.append(0.0)
    A_eq = [np.concatenate([H[f].normal, [1.0, 0.0]]) for f in face_ids]
    b_eq = [H[f].offset for f in face_ids]
    c = np.array([0.0, 0.0, 0.0, 0.0, -1.0])
    big = 1e3
    res = linprog(c, np.array(A_ub), np.array(b_ub), np.array(A_eq), np.array(b_eq),
                  bounds=[(-big, big)] * 3 + [(0.0, big), (None, big)])
    if not res.ok or res.x[4] <= MARGIN_TOL:
        return None
    return res.x[:3].copy(), float(res.x[3])


def sphere_certificate(element_id: int, assembly: Assembly) -> SphereCertificate | None:
    """Two spheres touching the minimal upward and downward blocking face sets.

    ``S1`` touches the faces blocking upward motion and sits above the middle
    plane; ``S2`` mirrors it below.

    Raises:
        NotLocked: the element is not translationally locked.
    """
    if not translational_lock(element_id, assembly).locked:
        raise NotLocked(f"element {element_id} is not translationally locked")
    e = assembly.elements[element_id]
    faces = contact_face_ids(assembly, element_id)
    local = e.body.translated(-e.center)
    normals = np.array([local.halfspaces[f].normal for f in faces])
    c1 = minimal_blocking_set(faces, normals, 1.0)
    c2 = minimal_blocking_set(faces, normals, -1.0)
    if c1 is None or c2 is None:
        return None
    s1 = _touching_sphere(local, c1, 1.0)
    s2 = _touching_sphere(local, c2, -1.0)
    if s1 is None or s2 is None:
        return None
    return SphereCertificate((s1[0] + e.center, s1[1]), (s2[0] + e.center, s2[1]), c1, c2)


# ------------------------------------------------------------ whole assemblies

MODES = ("translational", "section", "full")


def thread_count() -> int:
    raw = os.environ.get("INTERLOCK_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def _vec(v):
    return None if v is None else [float(x) for x in v]


def verify_element(k: int, assembly: Assembly, modes=MODES) -> dict:
    out = {"id": assembly.ids[k], "interior": bool(assembly.interior[k])}
    marginal = False
    if "translational" in modes:
        cone = translational_lock(k, assembly)
        marginal |= cone.marginal
        out["translational"] = {"locked": cone.locked, "margin": cone.margin,
                                "witness": _vec(cone.witness), "pa_bounded": cone.bounded_pa}
    if "section" in modes:
        up, down, r_up, r_down = lock_by_section(k, assembly)
        out["section"] = {"up": bool(up), "down": bool(down),
                          "mechanism": [r_up.mechanism, r_down.mechanism],
                          "vanish_time": [r_up.vanish_time if up else None,
                                          r_down.vanish_time if down else None],
                          "locked": bool(up and down)}
    if "full" in modes:
        cone = full_lock(k, assembly)
        marginal |= cone.marginal
        out["full"] = {"locked": cone.locked, "margin": cone.margin, "witness": _vec(cone.witness)}
    out["marginal"] = bool(marginal)
    return out


def verify_assembly(assembly: Assembly, modes=("translational",), threads: int | None = None) -> dict:
    """Per-element verdicts, summary counts and the pairwise mode agreement matrix."""
    unknown = set(modes) - set(MODES)
    if unknown:
        raise ValueError(f"unknown modes {sorted(unknown)}")
    modes = tuple(m for m in MODES if m in modes)
    n = len(assembly)
    threads = threads or thread_count()
    if threads > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            elements = list(pool.map(lambda k: verify_element(k, assembly, modes), range(n)))
    else:
        elements = [verify_element(k, assembly, modes) for k in range(n)]
    summary = {}
    for m in modes:
        locked = [e for e in elements if e[m]["locked"]]
        summary[m] = {
            "locked": len(locked),
            "unlocked": n - len(locked),
            "interior_locked": sum(1 for e in locked if e["interior"]),
            "interior_unlocked": [e["id"] for e in elements if e["interior"] and not e[m]["locked"]],
            "boundary_unlocked": [e["id"] for e in elements if not e["interior"] and not e[m]["locked"]],
        }
    agreement = {a: {b: sum(1 for e in elements if e[a]["locked"] == e[b]["locked"]) for b in modes}
                 for a in modes}
    return {"elements": elements, "summary": summary, "agreement": agreement, "modes": list(modes),
            "marginal": [e["id"] for e in elements if e["marginal"]]}


def all_interior_locked(report: dict, mode: str) -> bool:
    return all(e[mode]["locked"] and not e["marginal"] for e in report["elements"] if e["interior"])
