"""Dense two-phase simplex for the small linear programs used by the lock tests.

Problems here have at most a few hundred rows and a handful of columns, so a
plain tableau with Bland's anti-cycling rule is fast enough and easy to audit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: np.ndarray | None = None
    fun: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    col_vals = T[:, col].copy()
    col_vals[row] = 0.0
    T -= np.outer(col_vals, T[row])


def _simplex(T: np.ndarray, basis: list[int], ncols: int, tol: float, max_iter: int) -> str:
    """Run Bland's rule on tableau ``T`` (objective in the last row)."""
    m = T.shape[0] - 1
    for _ in range(max_iter):
        obj = T[-1, :ncols]
        entering = next((j for j in range(ncols) if obj[j] < -tol), None)
        if entering is None:
            return OPTIMAL
        col = T[:m, entering]
        best, leave = np.inf, None
        for i in range(m):
            if col[i] > tol:
                ratio = T[i, -1] / col[i]
                if ratio < best - 1e-14 or (abs(ratio - best) <= 1e-14 and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return UNBOUNDED
        _pivot(T, leave, entering)
        basis[leave] = entering
    raise RuntimeError("simplex iteration limit reached")


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
            tol: float = 1e-9, feas_tol: float = 1e-9, max_iter: int = 20000) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_ub @ x <= b_ub``, ``A_eq @ x == b_eq`` and bounds.

    ``bounds`` is a sequence of ``(lo, hi)`` pairs (``None`` for no bound); the
    default is ``x >= 0`` for every variable, matching ``scipy.optimize.linprog``.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if bounds is None:
        bounds = [(0.0, None)] * n

    # x = T @ y + offset with y >= 0
    cols, offset, extra_rows, extra_rhs = [], np.zeros(n), [], []
    for j, (lo, hi) in enumerate(bounds):
        e = np.zeros(n)
        e[j] = 1.0
        if lo is not None:
            offset[j] = lo
            cols.append(e)
            if hi is not None:
                extra_rows.append(len(cols) - 1)
                extra_rhs.append(hi - lo)
        elif hi is not None:
            offset[j] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    T_map = np.array(cols).T
    ny = T_map.shape[1]

    Aub_y = A_ub @ T_map
    bub_y = b_ub - A_ub @ offset
    if extra_rows:
        rows = np.zeros((len(extra_rows), ny))
        rows[np.arange(len(extra_rows)), extra_rows] = 1.0
        Aub_y = np.vstack([Aub_y, rows])
        bub_y = np.concatenate([bub_y, extra_rhs])
    Aeq_y = A_eq @ T_map
    beq_y = b_eq - A_eq @ offset

    m_ub, m_eq = Aub_y.shape[0], Aeq_y.shape[0]
    m = m_ub + m_eq
    cost_y = c @ T_map
    const = float(c @ offset)
    if m == 0:
        if np.any(cost_y < -tol):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, offset.copy(), const)

    nvar = ny + m_ub
    A = np.zeros((m, nvar))
    A[:m_ub, :ny] = Aub_y
    A[:m_ub, ny:] = np.eye(m_ub)
    A[m_ub:, :ny] = Aeq_y
    b = np.concatenate([bub_y, beq_y])
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase 1: artificial per row
    T = np.zeros((m + 1, nvar + m + 1))
    T[:m, :nvar] = A
    T[:m, nvar:nvar + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :nvar] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(nvar, nvar + m))
    _simplex(T, basis, nvar + m, tol, max_iter)
    if -T[-1, -1] > feas_tol * max(1.0, float(np.abs(b).max())):
        return LPResult(INFEASIBLE)

    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= nvar:
            j = next((j for j in range(nvar) if abs(T[i, j]) > 1e-9), None)
            if j is None:
                continue
            _pivot(T, i, j)
            basis[i] = j
        keep.append(i)
    T = np.vstack([T[keep][:, list(range(nvar)) + [-1]], np.zeros(nvar + 1)])
    basis = [basis[i] for i in keep]

    cost = np.concatenate([cost_y, np.zeros(m_ub)])
    T[-1, :nvar] = cost
    for i, bi in enumerate(basis):
        if cost[bi] != 0.0:
            T[-1] -= cost[bi] * T[i]
    status = _simplex(T, basis, nvar, tol, max_iter)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    z = np.zeros(nvar)
    for i, bi in enumerate(basis):
        z[bi] = T[i, -1]
    x = T_map @ z[:ny] + offset
    resid = max(float(np.max(A_ub @ x - b_ub, initial=0.0)), float(np.max(np.abs(A_eq @ x - b_eq), initial=0.0)))
    if resid > 1e-7 * max(1.0, float(np.abs(b).max())):
        raise ArithmeticError(f"simplex lost feasibility (residual {resid:.3g})")
    return LPResult(OPTIMAL, x, float(c @ x))
