"""Minimum-force equilibrium LPs: lift capability and capped feasibility."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..contactmodel import (ContactFrame, GraspConfig, Wrench, contact_frames,
                            gravity_wrench)
from ..meshcore import TriangleMesh, center_of_mass
from .simplex import LPError, LPResult, LPStatus, linprog

log = logging.getLogger(__name__)

EQ_RESIDUAL_TOL = 1e-6
CONSTRAINT_TOL = 1e-9


@dataclass
class LiftSolution:
    feasible: bool
    min_max_normal_force: float
    lc_value: float
    per_contact_forces: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    per_contact_torsion: np.ndarray = field(default_factory=lambda: np.zeros(0))
    normal_forces: np.ndarray = field(default_factory=lambda: np.zeros(0))
    norm: str = "inf"
    lp: LPResult | None = None


class _Layout:
    """Column layout of the equilibrium LP.

    Per contact: ``m`` cone-edge coefficients then two torsion magnitudes
    (about +n and -n). Extra columns (``t`` or ``s``) are appended by callers.
    """

    def __init__(self, frames: Sequence[ContactFrame], centroid: np.ndarray):
        self.frames = list(frames)
        self.m = [len(f.edges) for f in frames]
        self.offsets = np.concatenate([[0], np.cumsum([k + 2 for k in self.m])]).astype(int)
        self.n = int(self.offsets[-1])
        A = np.zeros((6, self.n))
        fn = np.zeros((len(frames), self.n))  # normal-force rows
        tor = np.zeros((len(frames), self.n))  # torsion rows
        for i, f in enumerate(frames):
            o, m = self.offsets[i], self.m[i]
            e = f.edges
            A[:3, o:o + m] = e.T
            A[3:, o:o + m] = np.cross(f.position - centroid, e).T
            A[3:, o + m] = f.normal
            A[3:, o + m + 1] = -f.normal
            fn[i, o:o + m] = e @ f.normal
            tor[i, o + m:o + m + 2] = 1.0
        self.A_eq = A
        self.normal_rows = fn
        self.torsion_rows = tor

    def unpack(self, x: np.ndarray):
        forces, torsion = [], []
        for i, f in enumerate(self.frames):
            o, m = self.offsets[i], self.m[i]
            forces.append(x[o:o + m] @ f.edges)
            torsion.append(x[o + m] - x[o + m + 1])
        return np.array(forces).reshape(-1, 3), np.array(torsion), self.normal_rows @ x[: self.n]


def _check_solution(layout: _Layout, x: np.ndarray, rhs: np.ndarray, gamma: float,
                    extra_eq: np.ndarray | None = None) -> None:
    lhs = layout.A_eq @ x[: layout.n]
    if extra_eq is not None:
        lhs = lhs + extra_eq
    res = np.abs(lhs - rhs).max()
    if res > EQ_RESIDUAL_TOL:
        raise LPError(f"equilibrium residual {res:.3e} after solve")
    fn = layout.normal_rows @ x[: layout.n]
    over = (layout.torsion_rows @ x[: layout.n]) - gamma * fn
    if over.max(initial=0.0) > CONSTRAINT_TOL * max(1.0, fn.max(initial=0.0)):
        raise LPError("torsion bound violated after solve")


def solve_min_force(frames: Sequence[ContactFrame], gamma: float, external: Wrench,
                    centroid=np.zeros(3), norm: str = "inf") -> LiftSolution:
    """Smallest normal-force effort that balances ``external``.

    ``norm="inf"`` minimizes the largest per-contact normal force;
    ``norm="l1"`` minimizes their sum. ``lc_value`` is
    ``|external| / effort`` (infinite when no effort is needed).
    """
    if not frames:
        raise ValueError("need at least one contact")
    if norm not in ("inf", "l1"):
        raise ValueError(f"unknown norm {norm!r}")
    layout = _Layout(frames, np.asarray(centroid, dtype=np.float64))
    k = len(frames)
    rhs = -external.as_vector()
    if norm == "inf":
        n = layout.n + 1
        c = np.zeros(n)
        c[-1] = 1.0
        A_eq = np.hstack([layout.A_eq, np.zeros((6, 1))])
        A_ub = np.vstack([
            np.hstack([layout.normal_rows, -np.ones((k, 1))]),
            np.hstack([layout.torsion_rows - gamma * layout.normal_rows, np.zeros((k, 1))]),
        ])
    else:
        n = layout.n
        c = layout.normal_rows.sum(axis=0)
        A_eq = layout.A_eq
        A_ub = layout.torsion_rows - gamma * layout.normal_rows
    res = linprog(c, A_ub, np.zeros(len(A_ub)), A_eq, rhs)
    if res.status is LPStatus.INFEASIBLE:
        return LiftSolution(False, np.inf, 0.0, norm=norm, lp=res)
    if res.status is not LPStatus.OPTIMAL:
        raise LPError(f"minimum-force LP failed: {res.status.value}")
    _check_solution(layout, res.x, rhs, gamma)
    forces, torsion, fn = layout.unpack(res.x)
    fstar = float(res.fun) if norm == "l1" else float(fn.max())
    fstar = max(fstar, 0.0)
    ext = external.norm()
    lc = ext / fstar if fstar > 0 else np.inf
    return LiftSolution(True, fstar, lc, forces, torsion, fn, norm, res)


def feasible_with_cap(frames: Sequence[ContactFrame], gamma: float, cap: float,
                      external: Wrench, centroid=np.zeros(3)) -> bool:
    """Whether equilibrium holds with every normal force at most ``cap``."""
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    layout = _Layout(frames, np.asarray(centroid, dtype=np.float64))
    A_ub = np.vstack([layout.normal_rows, layout.torsion_rows - gamma * layout.normal_rows])
    b_ub = np.concatenate([np.full(len(frames), cap), np.zeros(len(frames))])
    rhs = -external.as_vector()
    res = linprog(np.zeros(layout.n), A_ub, b_ub, layout.A_eq, rhs)
    if res.status is LPStatus.INFEASIBLE:
        return False
    if res.status is not LPStatus.OPTIMAL:
        raise LPError(f"feasibility LP failed: {res.status.value}")
    _check_solution(layout, res.x, rhs, gamma)
    return True


def max_load_along(frames: Sequence[ContactFrame], gamma: float, cap: float, base: Wrench,
                   direction, centroid=np.zeros(3)) -> float | None:
    """Largest ``s >= 0`` such that ``base + s * (direction, 0)`` is balanced
    under the per-contact cap; ``None`` if even ``s = 0`` is infeasible."""
    layout = _Layout(frames, np.asarray(centroid, dtype=np.float64))
    d = np.zeros(6)
    d[:3] = direction
    k = len(frames)
    n = layout.n + 1
    c = np.zeros(n)
    c[-1] = -1.0
    A_eq = np.hstack([layout.A_eq, d[:, None]])
    A_ub = np.vstack([
        np.hstack([layout.normal_rows, np.zeros((k, 1))]),
        np.hstack([layout.torsion_rows - gamma * layout.normal_rows, np.zeros((k, 1))]),
    ])
    b_ub = np.concatenate([np.full(k, cap), np.zeros(k)])
    rhs = -base.as_vector()
    res = linprog(c, A_ub, b_ub, A_eq, rhs)
    if res.status is LPStatus.INFEASIBLE:
        return None
    if res.status is not LPStatus.OPTIMAL:
        raise LPError(f"max-load LP failed: {res.status.value}")
    _check_solution(layout, res.x, rhs, gamma, extra_eq=d * res.x[-1])
    return float(res.x[-1])


# --- mesh-level entry points ---------------------------------------------


def _scene(mesh: TriangleMesh, grasp: GraspConfig):
    return contact_frames(mesh, grasp), center_of_mass(mesh, grasp.centroid_method)


def lift_capability(mesh: TriangleMesh, grasp: GraspConfig, norm: str = "inf") -> LiftSolution:
    frames, z = _scene(mesh, grasp)
    return solve_min_force(frames, grasp.friction.gamma, gravity_wrench(grasp.mass), z, norm)


def feasible_under_cap(mesh: TriangleMesh, grasp: GraspConfig, per_contact_cap: float,
                       external: Wrench) -> bool:
    frames, z = _scene(mesh, grasp)
    return feasible_with_cap(frames, grasp.friction.gamma, per_contact_cap, external, z)
