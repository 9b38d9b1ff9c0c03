import numpy as np
import pytest

from interlock.assembly import build_layer

FAMILIES = ["square-tetra", "hex-cube", "hex-octa", "hex-dodeca", "decagon-icosa", "decagon-dodeca"]

_CACHE = {}


def layer(family: str, n: int = 5):
    key = (family, n)
    if key not in _CACHE:
        _CACHE[key] = build_layer(family, n, n)
    return _CACHE[key]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unit(rng, n, dim):
    v = rng.normal(size=(n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def mc_escape(N, dim, samples, rng, tol=1e-9):
    """Monte-Carlo search for a unit ``v`` with ``N v <= tol``.

    Plain sampling never hits lower-dimensional cones, so half the samples are
    projected onto the orthogonal complement of a random subset of rows.
    """
    N = np.asarray(N, dtype=float).reshape(-1, dim)
    if len(N) == 0:
        return np.eye(dim)[0]
    V = random_unit(rng, samples, dim)
    hits = np.all(N @ V.T <= tol, axis=0)
    if hits.any():
        return V[np.argmax(hits)]
    rows = np.unique(np.round(N / np.linalg.norm(N, axis=1, keepdims=True), 9), axis=0)
    for _ in range(max(1, samples // 200)):
        k = rng.integers(1, min(len(rows), dim - 1) + 1)
        sub = rows[rng.choice(len(rows), size=k, replace=False)]
        _, s, vh = np.linalg.svd(sub)
        rank = int(np.sum(s > 1e-9))
        basis = vh[rank:]
        if len(basis) == 0:
            continue
        W = rng.normal(size=(100, len(basis))) @ basis
        W /= np.linalg.norm(W, axis=1, keepdims=True)
        ok = np.all(N @ W.T <= tol, axis=0)
        if ok.any():
            return W[np.argmax(ok)]
    return None
