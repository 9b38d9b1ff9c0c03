"""Convex-geometry primitives shared by every lock test.

Half-space intersections in 2-D/3-D/4-D, vertex enumeration, Sutherland-Hodgman
clipping of coplanar faces, and the positive-spanning (cone triviality) test.
All values are plain float64 numpy arrays; nothing here mutates its inputs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .lp import linprog

EPS_GEO = 1e-9
EPS_DIR = 1e-10
COND_LIMIT = 1e12


class GeometryError(Exception):
    """Base class for geometric failures."""


class EmptyRegion(GeometryError):
    pass


class NumericallyIllConditioned(GeometryError):
    pass


class NonPlanarFace(GeometryError):
    pass


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return v / n


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The set ``{x : normal . x <= offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float

    @classmethod
    def make(cls, normal, offset) -> "HalfSpace":
        normal = np.asarray(normal, dtype=float)
        n = np.linalg.norm(normal)
        if n == 0.0:
            raise ValueError("half-space normal must be non-zero")
        return cls(normal / n, float(offset) / n)

    @property
    def dim(self) -> int:
        return self.normal.size

    def contains(self, x, tol: float = EPS_GEO) -> bool:
        return float(self.normal @ np.asarray(x, dtype=float)) <= self.offset + tol

    def translated(self, t) -> "HalfSpace":
        return HalfSpace(self.normal, self.offset + float(self.normal @ np.asarray(t, dtype=float)))

    def flipped(self) -> "HalfSpace":
        return HalfSpace(-self.normal, -self.offset)

    def as_row(self) -> list[float]:
        return [float(v) for v in self.normal] + [float(self.offset)]


def stack(halfspaces) -> tuple[np.ndarray, np.ndarray]:
    halfspaces = list(halfspaces)
    A = np.array([h.normal for h in halfspaces], dtype=float)
    b = np.array([h.offset for h in halfspaces], dtype=float)
    return A, b


@dataclass(eq=False)
class ConvexPolytope:
    """H-representation plus the derived vertices, rays and facet incidence.

    ``faces[k]`` lists the vertex indices tight on ``halfspaces[k]``; for 3-D
    polytopes the list is ordered counter-clockwise seen from outside.
    """

    halfspaces: list[HalfSpace]
    vertices: np.ndarray
    faces: list[list[int]]
    bounded: bool
    rays: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    @property
    def dim(self) -> int:
        return self.halfspaces[0].dim

    @property
    def A(self) -> np.ndarray:
        return stack(self.halfspaces)[0]

    @property
    def b(self) -> np.ndarray:
        return stack(self.halfspaces)[1]

    def contains(self, x, tol: float = EPS_GEO) -> bool:
        A, b = stack(self.halfspaces)
        return bool(np.all(A @ np.asarray(x, dtype=float) <= b + tol))

    def face_polygon(self, k: int) -> np.ndarray:
        return self.vertices[self.faces[k]]

    def centroid(self) -> np.ndarray:
        if self.dim == 3 and self.bounded:
            c, vol = _volume_centroid_3d(self)
            if vol > 0:
                return c
        return self.vertices.mean(axis=0)

    def volume(self) -> float:
        if not self.bounded:
            return float("inf")
        if self.dim == 3:
            return _volume_centroid_3d(self)[1]
        if self.dim == 2:
            return polygon_area(self.vertices)
        raise NotImplementedError("volume is only needed for 2-D and 3-D bodies")

    def translated(self, t) -> "ConvexPolytope":
        t = np.asarray(t, dtype=float)
        return ConvexPolytope([h.translated(t) for h in self.halfspaces], self.vertices + t,
                              [list(f) for f in self.faces], self.bounded, self.rays.copy())

    def edges(self) -> list[tuple[int, int]]:
        """Vertex pairs adjacent along facet boundaries (3-D only)."""
        out = set()
        for f in self.faces:
            for a, b in zip(f, f[1:] + f[:1]):
                out.add((min(a, b), max(a, b)))
        return sorted(out)


def _volume_centroid_3d(poly: ConvexPolytope) -> tuple[np.ndarray, float]:
    ref = poly.vertices.mean(axis=0)
    total, acc = 0.0, np.zeros(3)
    for f in poly.faces:
        pts = poly.vertices[f]
        for i in range(1, len(pts) - 1):
            a, b, c = pts[0] - ref, pts[i] - ref, pts[i + 1] - ref
            v = float(np.dot(a, np.cross(b, c))) / 6.0
            total += v
            acc += v * (a + b + c) / 4.0
    if total <= 0:
        return ref, 0.0
    return ref + acc / total, total


def _cluster(points: np.ndarray, tol: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in points[np.lexsort(points.T[::-1])]:
        if not any(np.max(np.abs(p - q)) <= tol for q in kept):
            kept.append(p)
    return np.array(kept).reshape(-1, points.shape[1])


def _order_face_3d(pts: np.ndarray, normal: np.ndarray) -> np.ndarray:
    c = pts.mean(axis=0)
    u = pts[0] - c
    if np.linalg.norm(u) < 1e-15:
        return np.arange(len(pts))
    u = u / np.linalg.norm(u)
    w = np.cross(normal, u)
    ang = np.arctan2((pts - c) @ w, (pts - c) @ u)
    return np.argsort(ang, kind="stable")


def _order_ccw_2d(pts: np.ndarray) -> np.ndarray:
    c = pts.mean(axis=0)
    return np.argsort(np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0]), kind="stable")


def _affine_rank(vecs: np.ndarray, tol: float = 1e-9) -> int:
    if len(vecs) == 0:
        return 0
    s = np.linalg.svd(vecs, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def _is_feasible(A: np.ndarray, b: np.ndarray) -> bool:
    d = A.shape[1]
    res = linprog(np.zeros(d), A, b, bounds=[(None, None)] * d)
    return res.ok


def hrep_to_vrep(halfspaces, dim: int, tol: float = EPS_GEO) -> ConvexPolytope:
    """Enumerate vertices (and extreme rays) of an intersection of half-spaces.

    Brute force over every ``dim``-subset of constraints; at desk scale
    (tens of constraints in at most four dimensions) this is quick and needs
    no degeneracy handling beyond clustering coincident vertices.

    Raises:
        EmptyRegion: the half-spaces have no common point.
        NumericallyIllConditioned: a feasible vertex comes from a near-singular
            system (condition number above 1e12 but not exactly singular).
    """
    if dim not in (2, 3, 4):
        raise ValueError(f"dimension {dim} not supported")
    halfspaces = list(halfspaces)
    if not halfspaces:
        raise ValueError("need at least one half-space")
    A, b = stack(halfspaces)
    if A.shape[1] != dim:
        raise ValueError("half-space dimension mismatch")
    m = len(halfspaces)
    scale = max(1.0, float(np.abs(b).max()))
    ftol = tol * scale

    rank = _affine_rank(A, 1e-12)
    if rank < dim:
        # not pointed: report the lineality directions only
        if not _is_feasible(A, b):
            raise EmptyRegion("half-spaces have empty intersection")
        _, _, vh = np.linalg.svd(A) if m else (None, None, np.eye(dim))
        null = vh[rank:]
        rays = np.vstack([null, -null])
        return ConvexPolytope(halfspaces, np.zeros((0, dim)), [[] for _ in halfspaces], False, rays)

    verts = np.zeros((0, dim))
    if m >= dim:
        idx = np.array(list(itertools.combinations(range(m), dim)))
        M = A[idx]
        cond = np.linalg.cond(M)
        ok = np.isfinite(cond) & (cond <= 1e15)
        idx, M, cond = idx[ok], M[ok], cond[ok]
        if len(idx):
            X = np.linalg.solve(M, b[idx][..., None])[..., 0]
            feas = np.all(X @ A.T <= b + ftol, axis=1)
            if np.any(feas & (cond > COND_LIMIT)):
                raise NumericallyIllConditioned("vertex system condition number exceeds 1e12")
            verts = _cluster(X[feas], tol * scale)
    if len(verts) == 0:
        raise EmptyRegion("half-spaces have empty intersection")

    rays = np.zeros((0, dim))
    if dim >= 2:
        idx = np.array(list(itertools.combinations(range(m), dim - 1)))
        if len(idx):
            M = A[idx]
            _, s, vh = np.linalg.svd(M)
            good = s[:, -1] > 1e-9 * s[:, 0]
            cand = vh[good, -1, :]
            cand = np.vstack([cand, -cand])
            ok = np.all(cand @ A.T <= 1e-10, axis=1)
            if np.any(ok):
                rays = _cluster(cand[ok], 1e-9)
    bounded = len(rays) == 0

    # facet incidence; drop redundant and duplicate half-spaces
    slack = b[None, :] - verts @ A.T
    tight = np.abs(slack) <= ftol * 10
    ray_tight = np.abs(rays @ A.T) <= 1e-9 if len(rays) else np.zeros((0, m), dtype=bool)
    full = _affine_rank(np.vstack([verts[1:] - verts[0], rays]) if len(verts) > 1 or len(rays)
                        else np.zeros((0, dim))) == dim
    kept, faces, seen = [], [], set()
    for k in range(m):
        vk = np.nonzero(tight[:, k])[0]
        if full:
            span = [verts[vk[1:]] - verts[vk[0]]] if len(vk) else []
            rk = rays[ray_tight[:, k]] if len(rays) else np.zeros((0, dim))
            if len(vk) == 0 or _affine_rank(np.vstack(span + [rk])) < dim - 1:
                continue
        key = (tuple(vk), tuple(np.round(A[k], 9)))
        if key in seen:
            continue
        seen.add(key)
        if dim == 3 and len(vk) > 2:
            vk = vk[_order_face_3d(verts[vk], A[k])]
        kept.append(halfspaces[k])
        faces.append([int(i) for i in vk])
    if dim == 2 and bounded:
        order = _order_ccw_2d(verts)
        inv = np.empty_like(order)
        inv[order] = np.arange(len(order))
        verts = verts[order]
        faces = [sorted(int(inv[i]) for i in f) for f in faces]
    return ConvexPolytope(kept, verts, faces, bounded, rays)


def interior_margin(halfspaces, bounds: float = 1e3) -> tuple[float, np.ndarray | None]:
    """Largest ``s`` such that a point satisfies every constraint with slack ``s``."""
    A, b = stack(halfspaces)
    d = A.shape[1]
    nrm = np.linalg.norm(A, axis=1)
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = linprog(c, np.hstack([A, nrm[:, None]]), b,
                  bounds=[(-bounds, bounds)] * d + [(None, 10.0)])
    if not res.ok:
        return -np.inf, None
    return float(res.x[-1]), res.x[:d]


@dataclass(frozen=True)
class ConeResult:
    """Outcome of a positive-spanning test on a set of constraint normals."""

    locked: bool
    witness: np.ndarray | None
    certificate: np.ndarray | None
    margin: float
    marginal: bool = False


def cone_is_trivial(normals, dim: int, margin_tol: float = EPS_GEO) -> ConeResult:
    """Decide whether ``{v : n_k . v <= 0 for all k}`` is the single point 0.

    Solves ``max t`` s.t. ``sum lam_k n_k = 0``, ``sum lam_k = 1``,
    ``lam_k >= t``; the cone is trivial exactly when the normals span the
    space and the optimum is positive. When it is not trivial, a unit escape
    direction is returned instead of a certificate.
    """
    if dim not in (2, 3, 4, 6):
        raise ValueError(f"dimension {dim} not supported")
    N = np.asarray(normals, dtype=float).reshape(-1, dim)
    m = len(N)
    if m:
        N = N / np.linalg.norm(N, axis=1, keepdims=True)
    rank = _affine_rank(N, 1e-10) if m else 0

    t_opt = -np.inf
    lam = None
    if m and rank == dim:
        # variables: mu_1..mu_m >= 0, t free ; lam_k = mu_k + t
        A_eq = np.zeros((dim + 1, m + 1))
        A_eq[:dim, :m] = N.T
        A_eq[:dim, m] = N.sum(axis=0)
        A_eq[dim, :m] = 1.0
        A_eq[dim, m] = m
        b_eq = np.zeros(dim + 1)
        b_eq[dim] = 1.0
        c = np.zeros(m + 1)
        c[-1] = -1.0
        res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=[(0.0, None)] * m + [(None, None)])
        if res.ok:
            t_opt = float(res.x[-1])
            lam = res.x[:m] + t_opt
    if t_opt > margin_tol:
        return ConeResult(True, None, lam, t_opt)

    marginal = abs(t_opt) <= margin_tol
    return ConeResult(False, escape_direction(N, dim), None, t_opt if np.isfinite(t_opt) else -1.0, marginal)


def escape_direction(N: np.ndarray, dim: int) -> np.ndarray | None:
    """A unit vector ``v`` with ``N @ v <= 0``, or None when only ``v = 0`` qualifies."""
    m = len(N)
    if m == 0:
        v = np.zeros(dim)
        v[-1] = 1.0
        return v
    res = linprog(N.sum(axis=0), N, np.zeros(m), bounds=[(-1.0, 1.0)] * dim)
    if res.ok and res.fun < -1e-9 and np.linalg.norm(res.x) > 1e-9:
        return res.x / np.linalg.norm(res.x)
    # lower-dimensional cone: push along each axis inside it
    for i in range(dim):
        for sign in (1.0, -1.0):
            c = np.zeros(dim)
            c[i] = -sign
            res = linprog(c, N, np.zeros(m), bounds=[(-1.0, 1.0)] * dim)
            if res.ok and -res.fun > 1e-9:
                return res.x / np.linalg.norm(res.x)
    return None


# ---------------------------------------------------------------- 2-D polygons

def polygon_area(pts) -> float:
    pts = np.asarray(pts, dtype=float)
    if len(pts) < 3:
        return 0.0
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True, eq=False)
class Polygon2:
    """Counter-clockwise convex polygon, optionally embedded in 3-D via ``frame``.

    ``frame`` is ``(origin, u, v)``; the 3-D point of local ``(a, b)`` is
    ``origin + a*u + b*v``. When ``points`` is given, ``lift`` returns it as is
    (used for polygons read back from files).
    """

    vertices: np.ndarray
    frame: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    points: np.ndarray | None = None

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def lift(self) -> np.ndarray:
        if self.points is not None:
            return self.points
        if self.frame is None:
            raise ValueError("polygon has no embedding frame")
        o, u, v = self.frame
        return o + self.vertices[:, :1] * u + self.vertices[:, 1:2] * v


def clip_convex(subject: np.ndarray, clipper: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman: clip polygon ``subject`` by convex CCW ``clipper``."""
    out = [np.asarray(p, dtype=float) for p in subject]
    clipper = np.asarray(clipper, dtype=float)
    for i in range(len(clipper)):
        if not out:
            break
        a, b = clipper[i], clipper[(i + 1) % len(clipper)]
        edge = b - a

        def side(p):
            return edge[0] * (p[1] - a[1]) - edge[1] * (p[0] - a[0])

        inp, out = out, []
        for j in range(len(inp)):
            p, q = inp[j], inp[(j + 1) % len(inp)]
            sp, sq = side(p), side(q)
            if sp >= 0:
                out.append(p)
            if (sp >= 0) != (sq >= 0):
                out.append(p + (q - p) * (sp / (sp - sq)))
    if not out:
        return np.zeros((0, 2))
    return _dedupe_ring(np.array(out))


def _dedupe_ring(pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    keep = []
    for p in pts:
        if not keep or np.max(np.abs(p - keep[-1])) > tol:
            keep.append(p)
    if len(keep) > 1 and np.max(np.abs(keep[0] - keep[-1])) <= tol:
        keep.pop()
    return np.array(keep).reshape(-1, 2)


def newell_normal(pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    nxt = np.roll(pts, -1, axis=0)
    n = np.array([
        np.sum((pts[:, 1] - nxt[:, 1]) * (pts[:, 2] + nxt[:, 2])),
        np.sum((pts[:, 2] - nxt[:, 2]) * (pts[:, 0] + nxt[:, 0])),
        np.sum((pts[:, 0] - nxt[:, 0]) * (pts[:, 1] + nxt[:, 1])),
    ])
    return unit(n)


def plane_frame(normal: np.ndarray, origin: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    normal = unit(normal)
    helper = np.eye(3)[int(np.argmin(np.abs(normal)))]
    u = unit(np.cross(helper, normal))
    v = np.cross(normal, u)
    return np.asarray(origin, dtype=float), u, v


def coplanar_overlap(face_a, face_b, tol: float = EPS_GEO) -> Polygon2 | None:
    """Overlap of two planar 3-D faces lying in one plane with opposite orientations.

    Faces are vertex loops ordered counter-clockwise about their outward normal.
    Returns the overlap in the 2-D frame of ``face_a`` (CCW about ``face_a``'s
    normal), or None when the faces are not coplanar-antiparallel or the
    overlap has area at most ``tol**2``.
    """
    fa = np.asarray(face_a, dtype=float)
    fb = np.asarray(face_b, dtype=float)
    na, nb = newell_normal(fa), newell_normal(fb)
    for f, n in ((fa, na), (fb, nb)):
        dev = np.abs((f - f.mean(axis=0)) @ n)
        if dev.max() > tol:
            raise NonPlanarFace(f"face deviates from its plane by {dev.max():.3g}")
    if na @ nb > -1.0 + tol:
        return None
    ca = float(na @ fa.mean(axis=0))
    if np.abs(fb @ na - ca).max() > tol:
        return None
    frame = plane_frame(na, fa.mean(axis=0))
    o, u, v = frame
    pa = np.column_stack([(fa - o) @ u, (fa - o) @ v])
    pb = np.column_stack([(fb - o) @ u, (fb - o) @ v])
    if polygon_area(pa) < 0:
        pa = pa[::-1]
    if polygon_area(pb) < 0:
        pb = pb[::-1]
    clipped = clip_convex(pa, pb)
    if len(clipped) < 3 or polygon_area(clipped) <= tol * tol:
        return None
    return Polygon2(clipped, frame)


def convex_hull_2d(points) -> np.ndarray:
    """Monotone chain; returns hull vertices counter-clockwise."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=float))))
    if len(pts) <= 2:
        return np.array(pts).reshape(-1, 2)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def vrep_to_hrep_3d(points, tol: float = 1e-9) -> list[HalfSpace]:
    """Facet half-spaces of the hull of 3-D points (brute force over triples)."""
    P = np.asarray(points, dtype=float)
    c = P.mean(axis=0)
    out: list[HalfSpace] = []
    for i, j, k in itertools.combinations(range(len(P)), 3):
        n = np.cross(P[j] - P[i], P[k] - P[i])
        if np.linalg.norm(n) < 1e-12:
            continue
        n = n / np.linalg.norm(n)
        off = float(n @ P[i])
        if n @ c > off:
            n, off = -n, -off
        s = P @ n - off
        if s.max() <= tol and not any(np.allclose(n, h.normal, atol=1e-9) for h in out):
            out.append(HalfSpace(n, off))
    return out
