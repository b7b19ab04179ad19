"""Dense two-phase revised simplex with Bland's rule as the anti-cycling guard.

Solves ``min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0``.
Problems here are small (tens of rows and columns), so dense basis solves
is simple and fast enough.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL = "numerical"


class LPError(RuntimeError):
    """The solver failed numerically (distinct from a proven infeasibility)."""


@dataclass
class LPResult:
    status: LPStatus
    x: np.ndarray | None
    fun: float
    iterations: int
    eq_duals: np.ndarray | None = None
    ub_duals: np.ndarray | None = None
    dual_infeasibility: float = np.nan
    duality_gap: float = np.nan

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


_PIVOT_TOL = 1e-7
_TINY = 1e-12


class _Revised:
    """Revised simplex over a fixed standard-form matrix.

    The basis solve is redone from the original columns at every iteration.
    That costs a few small dense solves per pivot but keeps round-off from
    accumulating, which matters on the heavily degenerate equilibrium LPs.
    """

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int], max_iter: int,
                 slack: float = 0.0):
        self.A = A
        self.b = b
        self.slack = slack
        self.basis = basis
        self.iterations = 0
        self.max_iter = max_iter

    def solve_basis(self, cost: np.ndarray):
        B = self.A[:, self.basis]
        xb = np.linalg.solve(B, self.b)
        y = np.linalg.solve(B.T, cost[self.basis])
        return B, xb, y

    def run(self, cost: np.ndarray, allowed: np.ndarray, opt_tol: float,
            bounded: bool = False) -> LPStatus:
        """Dantzig pricing, and the largest pivot among tied leaving rows.
        If a basis ever repeats, both rules switch to Bland's, which cannot
        cycle.

        ``bounded`` marks a phase whose objective cannot decrease without
        limit, so an apparent ray there is treated as round-off.
        """
        banned = np.zeros(len(cost), dtype=bool)
        seen: set[tuple[int, ...]] = set()
        strict = False
        col_scale = np.abs(self.A).sum(axis=0)
        while True:
            if self.iterations >= self.max_iter:
                return LPStatus.NUMERICAL
            try:
                B, xb, y = self.solve_basis(cost)
            except np.linalg.LinAlgError:
                return LPStatus.NUMERICAL
            r = cost - self.A.T @ y
            # reduced costs carry round-off proportional to |y| |A_j|
            tol = opt_tol * np.maximum(1.0, np.abs(y).max(initial=0.0) * col_scale)
            ok = allowed & ~banned
            ok[self.basis] = False
            cand = np.flatnonzero((r < -tol) & ok)
            if len(cand) == 0:
                return LPStatus.OPTIMAL
            key = tuple(sorted(self.basis))
            if key in seen:
                if strict:
                    # a cycle under full Bland means the remaining
                    # improvements are round-off
                    worst = float((r[cand] / tol[cand]).min())
                    return LPStatus.OPTIMAL if worst > -1e3 else LPStatus.NUMERICAL
                strict = True
                seen.clear()
            seen.add(key)
            if strict:
                col = int(cand[0])
            else:
                col = int(cand[np.argmin(r[cand] / tol[cand])])
            d = np.linalg.solve(B, self.A[:, col])
            pos = np.flatnonzero(d > _TINY)
            if len(pos) == 0 or d[pos].max() < _PIVOT_TOL:
                if bounded:
                    banned[col] = True
                    continue
                return LPStatus.UNBOUNDED
            ratios = np.clip(xb[pos], 0.0, None) / d[pos]
            if strict:
                best = ratios.min()
                ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
                row = int(min(ties, key=lambda i: self.basis[i]))
            else:
                # Harris: bound the step allowing a small infeasibility, then
                # take the largest pivot within that bound
                theta = ((xb[pos] + self.slack) / d[pos]).min()
                within = pos[ratios <= theta]
                within = within[d[within] >= _PIVOT_TOL] if np.any(d[within] >= _PIVOT_TOL) else within
                row = int(within[np.argmax(d[within])])
            self.basis[row] = col
            self.iterations += 1
            banned[:] = False


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *,
            feas_tol: float = 1e-9, opt_tol: float = 1e-9, max_iter: int = 20000) -> LPResult:
    c = np.asarray(c, dtype=np.float64)
    n = len(c)
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=np.float64).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=np.float64).reshape(-1)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=np.float64).reshape(-1, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=np.float64).reshape(-1)
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    n_std = n + m_ub
    # equilibrate rows; duals are mapped back at the end
    row_scale = np.abs(np.vstack([A_ub, A_eq])).max(axis=1, initial=0.0)
    row_scale[row_scale == 0] = 1.0
    A_ub = A_ub / row_scale[:m_ub, None]
    b_ub = b_ub / row_scale[:m_ub]
    A_eq = A_eq / row_scale[m_ub:, None]
    b_eq = b_eq / row_scale[m_ub:]

    A = np.zeros((m, n_std))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq])
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b = b * sign
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if m == 0:
        if np.any(c < -opt_tol):
            return LPResult(LPStatus.UNBOUNDED, None, -np.inf, 0)
        return LPResult(LPStatus.OPTIMAL, np.zeros(n), 0.0, 0, np.zeros(0), np.zeros(0), 0.0, 0.0)

    # rows whose slack can start basic need no artificial
    basis: list[int] = []
    art_rows = []
    for i in range(m):
        if i < m_ub and sign[i] > 0:
            basis.append(n + i)
        else:
            basis.append(-1)
            art_rows.append(i)
    n_art = len(art_rows)
    A1 = np.zeros((m, n_std + n_art))
    A1[:, :n_std] = A
    for k, i in enumerate(art_rows):
        A1[i, n_std + k] = 1.0
        basis[i] = n_std + k
    solver = _Revised(A1, b, basis, max_iter, 0.5 * feas_tol * scale)
    rows = np.arange(m)

    if n_art:
        cost1 = np.zeros(n_std + n_art)
        cost1[n_std:] = 1.0
        status = solver.run(cost1, np.ones(n_std + n_art, dtype=bool), opt_tol, bounded=True)
        if status is not LPStatus.OPTIMAL:
            return LPResult(LPStatus.NUMERICAL, None, np.nan, solver.iterations)
        _, xb, _ = solver.solve_basis(cost1)
        infeas = float(cost1[solver.basis] @ np.clip(xb, 0.0, None))
        if infeas > feas_tol * scale:
            return LPResult(LPStatus.INFEASIBLE, None, np.nan, solver.iterations)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if solver.basis[i] < n_std:
                continue
            B = A1[:, solver.basis]
            e = np.zeros(m)
            e[i] = 1.0
            try:
                alpha = np.linalg.solve(B.T, e) @ A
            except np.linalg.LinAlgError:
                return LPResult(LPStatus.NUMERICAL, None, np.nan, solver.iterations)
            alpha[[j for j in solver.basis if j < n_std]] = 0.0
            j = int(np.argmax(np.abs(alpha)))
            if abs(alpha[j]) > 1e-9:
                solver.basis[i] = j
            else:
                keep[i] = False
        rows = np.flatnonzero(keep)
        basis2 = [solver.basis[i] for i in rows]
        iters = solver.iterations
        solver = _Revised(A[rows], b[rows], basis2, max_iter, 0.5 * feas_tol * scale)
        solver.iterations = iters
    else:
        solver = _Revised(A, b, basis, max_iter, 0.5 * feas_tol * scale)

    cost2 = np.concatenate([c, np.zeros(m_ub)])
    status = solver.run(cost2, np.ones(n_std, dtype=bool), opt_tol)
    if status is LPStatus.UNBOUNDED:
        return LPResult(status, None, -np.inf, solver.iterations)
    if status is not LPStatus.OPTIMAL:
        return LPResult(status, None, np.nan, solver.iterations)

    try:
        _, xb, y = solver.solve_basis(cost2)
    except np.linalg.LinAlgError:
        return LPResult(LPStatus.NUMERICAL, None, np.nan, solver.iterations)
    if xb.min(initial=0.0) < -feas_tol * scale:
        return LPResult(LPStatus.NUMERICAL, None, np.nan, solver.iterations)
    x_std = np.zeros(n_std)
    x_std[solver.basis] = np.clip(xb, 0.0, None)
    x = x_std[:n]

    duals = np.zeros(m)
    duals[rows] = y
    duals *= sign / row_scale
    red = cost2 - (A[rows].T @ y)
    primal = float(c @ x)
    dual = float(duals @ (np.concatenate([b_ub, b_eq]) * row_scale))
    return LPResult(
        LPStatus.OPTIMAL, x, primal, solver.iterations,
        eq_duals=duals[m_ub:], ub_duals=duals[:m_ub],
        dual_infeasibility=float(max(0.0, -red.min(initial=0.0))),
        duality_gap=abs(primal - dual),
    )
