"""Quasi-static grasp evaluation: minimal grip force, maximal liftable mass,
and maximal all-direction disturbance.

Each protocol steps a load and tests LP feasibility at every step. The
answers are located from the matching optimization LP and confirmed by
feasibility tests at the neighbouring steps, which gives the stepped result
without walking every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contactmodel import GRAVITY, GraspConfig, Wrench, contact_frames, gravity_wrench
from .meshcore import TriangleMesh, center_of_mass
from .quality.lift import feasible_with_cap, max_load_along, solve_min_force

FORCE_START = 50.0
FORCE_STEP_TENTHS = 2  # 0.2 N
MASS_START_TENTHS = 10  # 1.0 kg
MASS_MAX_TENTHS = 10000
DISTURBANCE_DIRECTIONS = 50


def fibonacci_directions(count: int) -> np.ndarray:
    """Fibonacci-sphere lattice; the first point is the +z pole."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        return np.array([[0.0, 0.0, 1.0]])
    i = np.arange(count)
    z = 1.0 - 2.0 * i / (count - 1)
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    d = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return d / np.linalg.norm(d, axis=1, keepdims=True)


@dataclass
class _Scene:
    frames: list
    gamma: float
    centroid: np.ndarray

    @classmethod
    def of(cls, mesh: TriangleMesh, grasp: GraspConfig) -> "_Scene":
        return cls(contact_frames(mesh, grasp), grasp.friction.gamma,
                   center_of_mass(mesh, grasp.centroid_method))

    def feasible(self, cap: float, external: Wrench) -> bool:
        return feasible_with_cap(self.frames, self.gamma, cap, external, self.centroid)


@dataclass
class EvalReport:
    min_grasp_force: float
    max_lift_mass: float
    max_external_disturbance: float
    per_direction_break_force: list[float] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "min_grasp_force": self.min_grasp_force,
            "max_lift_mass": self.max_lift_mass,
            "max_external_disturbance": self.max_external_disturbance,
            "per_direction_break_force": list(self.per_direction_break_force),
            "flags": list(self.flags),
        }


def _settle(feasible, k: int, lo: int, hi: int) -> int:
    """Largest ``j`` in ``[lo, hi]`` with ``feasible(j)``, for a predicate
    that holds on a prefix of the range, starting the search near ``k``."""
    k = min(max(k, lo), hi)
    while k > lo and not feasible(k):
        k -= 1
    while k < hi and feasible(k + 1):
        k += 1
    return k


def _min_force(scene: _Scene, mass: float, flags: list[str]) -> float:
    g = gravity_wrench(mass)
    n_steps = int(round(FORCE_START * 10)) // FORCE_STEP_TENTHS

    # step j is the cap 50 - 0.2 j; feasibility holds on a prefix of steps
    def ok(j: int) -> bool:
        return scene.feasible((n_steps - j) * FORCE_STEP_TENTHS / 10, g)

    if not ok(0):
        flags.append("min_grasp_force:infeasible_at_max")
        return FORCE_START
    sol = solve_min_force(scene.frames, scene.gamma, g, scene.centroid)
    guess = n_steps - math.ceil(sol.min_max_normal_force * 10 / FORCE_STEP_TENTHS - 1e-9) if sol.feasible else 0
    j = _settle(ok, guess, 0, n_steps)
    return (n_steps - j) * FORCE_STEP_TENTHS / 10


def min_grasp_force(mesh: TriangleMesh, grasp: GraspConfig, flags: list[str] | None = None) -> float:
    """Lowest per-finger cap, stepped down from 50 N by 0.2 N, that still
    holds the object against gravity."""
    return _min_force(_Scene.of(mesh, grasp), grasp.mass, flags if flags is not None else [])


def _max_mass(scene: _Scene, cap: float, flags: list[str]) -> float:
    # masses are whole tenths of a kilogram, kept as integers to avoid drift
    def ok(tenths: int) -> bool:
        return scene.feasible(cap, gravity_wrench(tenths / 10))

    if not ok(MASS_START_TENTHS):
        flags.append("max_lift_mass:infeasible_at_start")
        return 0.0
    down = np.array([0.0, 0.0, -GRAVITY])
    smax = max_load_along(scene.frames, scene.gamma, cap, Wrench.zero(), down, scene.centroid)
    guess = int(math.floor(smax * 10 + 1e-9)) if smax is not None else MASS_START_TENTHS
    k = _settle(ok, guess, MASS_START_TENTHS, MASS_MAX_TENTHS)
    if k == MASS_MAX_TENTHS:
        flags.append("max_lift_mass:limit_reached")
    return k / 10


def max_lift_mass(mesh: TriangleMesh, grasp: GraspConfig, flags: list[str] | None = None) -> float:
    """Heaviest mass, stepped up from 1 kg by 0.1 kg, held under the cap."""
    return _max_mass(_Scene.of(mesh, grasp), grasp.per_finger_cap, flags if flags is not None else [])


def _break_force(scene: _Scene, cap: float, base: Wrench, direction: np.ndarray,
                 limit: int = 100000) -> int:
    """First whole-newton force along ``direction`` that cannot be resisted.

    Feasibility is monotone in the force (the feasible loads form a convex
    set containing ``base``), so the largest sustainable load locates the
    first failing step; the neighbouring steps are then checked directly.
    """
    smax = max_load_along(scene.frames, scene.gamma, cap, base, direction, scene.centroid)
    if smax is None:
        return 0

    def ok(F: int) -> bool:
        return F == 0 or scene.feasible(cap, base + Wrench(F * direction, np.zeros(3)))

    return _settle(ok, int(math.floor(smax)), 0, limit) + 1


def _disturbance(scene: _Scene, mass: float, cap: float, count: int,
                 flags: list[str]) -> tuple[float, list[float]]:
    base = gravity_wrench(mass)
    if not scene.feasible(cap, base):
        flags.append("max_external_disturbance:infeasible_under_gravity")
        return 0.0, [0.0] * count
    breaks = [float(_break_force(scene, cap, base, d)) for d in fibonacci_directions(count)]
    return float(min(breaks) - 1), breaks


def max_external_disturbance(mesh: TriangleMesh, grasp: GraspConfig, count: int = DISTURBANCE_DIRECTIONS,
                             flags: list[str] | None = None) -> tuple[float, list[float]]:
    """Largest whole-newton force sustained in every sampled direction, with
    the per-direction first failing force."""
    return _disturbance(_Scene.of(mesh, grasp), grasp.mass, grasp.per_finger_cap, count,
                        flags if flags is not None else [])


def evaluate(mesh: TriangleMesh, grasp: GraspConfig, directions: int = DISTURBANCE_DIRECTIONS) -> EvalReport:
    scene = _Scene.of(mesh, grasp)
    flags: list[str] = []
    mingf = _min_force(scene, grasp.mass, flags)
    maxlm = _max_mass(scene, grasp.per_finger_cap, flags)
    maxed, breaks = _disturbance(scene, grasp.mass, grasp.per_finger_cap, directions, flags)
    return EvalReport(mingf, maxlm, maxed, breaks, flags)
