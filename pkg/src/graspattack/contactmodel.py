"""Friction cones, soft-finger torsion and 6D wrench primitives."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .meshcore import ContactBinding, TriangleMesh, center_of_mass, eval_contact

GRAVITY = 9.81  # m/s^2, +z up


@dataclass(frozen=True)
class FrictionParams:
    mu: float = 0.6
    gamma: float = 0.3
    cone_edges: int = 8

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if int(self.cone_edges) != self.cone_edges or self.cone_edges < 3:
            raise ValueError(f"cone_edges must be an integer >= 3, got {self.cone_edges}")


@dataclass(frozen=True)
class Wrench:
    force: np.ndarray
    torque: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.force, dtype=np.float64).reshape(3)
        t = np.asarray(self.torque, dtype=np.float64).reshape(3)
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(t))):
            raise ValueError("wrench components must be finite")
        object.__setattr__(self, "force", f)
        object.__setattr__(self, "torque", t)

    @classmethod
    def zero(cls) -> "Wrench":
        return cls(np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, w: ArrayLike) -> "Wrench":
        w = np.asarray(w, dtype=np.float64)
        return cls(w[:3], w[3:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.force, self.torque])

    def __add__(self, other: "Wrench") -> "Wrench":
        return Wrench(self.force + other.force, self.torque + other.torque)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_vector()))


@dataclass(frozen=True)
class WrenchPrimitiveSet:
    """Stacked primitives, one 6-vector ``(force, torque_scale * torque)`` per row."""

    primitives: np.ndarray
    origin: np.ndarray
    torque_scale: float

    def __post_init__(self):
        p = np.asarray(self.primitives, dtype=np.float64).reshape(-1, 6)
        if len(p) == 0:
            raise ValueError("empty primitive set")
        object.__setattr__(self, "primitives", p)
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=np.float64).reshape(3))

    def __len__(self) -> int:
        return len(self.primitives)


@dataclass(frozen=True)
class ContactFrame:
    """Evaluated contact: point, unit inward normal and its cone edges."""

    position: np.ndarray
    normal: np.ndarray
    edges: np.ndarray


@dataclass(frozen=True)
class GraspConfig:
    """The grasp held fixed during an attack.

    ``per_finger_cap`` is the maximum normal force per contact used by the
    evaluation protocols; ``centroid_method`` selects volume or surface
    centroid (see :func:`meshcore.center_of_mass`).
    """

    contacts: tuple[ContactBinding, ...]
    friction: FrictionParams = field(default_factory=FrictionParams)
    mass: float = 1.0
    per_finger_cap: float = 50.0
    centroid_method: str = "volume"

    def __post_init__(self):
        object.__setattr__(self, "contacts", tuple(self.contacts))
        if not self.contacts:
            raise ValueError("a grasp needs at least one contact")
        if self.mass < 0:
            raise ValueError("mass must be nonnegative")
        if self.per_finger_cap < 0:
            raise ValueError("per-finger cap must be nonnegative")


def _tangent_basis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    down = np.array([0.0, 0.0, -1.0])
    t = down - (down @ n) * n
    if np.linalg.norm(t) < 1e-9:
        # normal is (anti)parallel to gravity: fixed fallback tangent
        t = np.array([1.0, 0.0, 0.0])
        t = t - (t @ n) * n
    t /= np.linalg.norm(t)
    return t, np.cross(n, t)


def cone_edges(inward_normal: ArrayLike, params: FrictionParams) -> np.ndarray:
    """Unit edge directions of the linearized Coulomb cone, shape ``(m, 3)``.

    Edge ``k`` is ``normalize(n + mu * t_k)`` with ``t_k`` rotated by
    ``2 pi k / m`` from the tangential projection of gravity.
    """
    n = np.asarray(inward_normal, dtype=np.float64)
    t0, t1 = _tangent_basis(n)
    ang = 2.0 * np.pi * np.arange(params.cone_edges) / params.cone_edges
    tang = np.cos(ang)[:, None] * t0 + np.sin(ang)[:, None] * t1
    e = n + params.mu * tang
    return e / np.linalg.norm(e, axis=1, keepdims=True)


def gravity_wrench(mass: float) -> Wrench:
    """Gravity acting at the centroid, which is also the torque reference."""
    if mass < 0:
        raise ValueError("mass must be nonnegative")
    return Wrench(np.array([0.0, 0.0, -GRAVITY * mass]), np.zeros(3))


def contact_primitives(position, inward_normal, centroid, params: FrictionParams,
                       torque_scale: float) -> np.ndarray:
    """Soft-finger wrench primitives of one contact, shape ``(2m, 6)``.

    Rows come in pairs per cone edge ``e``: force ``e`` with torque
    ``torque_scale * ((c - z) x e +/- gamma (e . n) n)``.
    """
    if torque_scale <= 0:
        raise ValueError("torque_scale must be positive")
    c = np.asarray(position, dtype=np.float64)
    n = np.asarray(inward_normal, dtype=np.float64)
    z = np.asarray(centroid, dtype=np.float64)
    e = cone_edges(n, params)
    arm = np.cross(c - z, e)
    twist = params.gamma * (e @ n)[:, None] * n
    out = np.empty((2 * len(e), 6))
    out[0::2, :3] = e
    out[1::2, :3] = e
    out[0::2, 3:] = torque_scale * (arm + twist)
    out[1::2, 3:] = torque_scale * (arm - twist)
    return out


def characteristic_length(mesh: TriangleMesh, centroid: ArrayLike) -> float:
    """Largest vertex distance from the centroid; the torque normalizer."""
    return float(np.linalg.norm(mesh.vertices - np.asarray(centroid), axis=1).max())


def contact_frames(mesh: TriangleMesh, grasp: GraspConfig) -> list[ContactFrame]:
    frames = []
    for b in grasp.contacts:
        pos, n = eval_contact(mesh, b)
        frames.append(ContactFrame(pos, n, cone_edges(n, grasp.friction)))
    return frames


def grasp_primitives(mesh: TriangleMesh, grasp: GraspConfig) -> WrenchPrimitiveSet:
    """Union of all contacts' primitives about the current centroid."""
    z = center_of_mass(mesh, grasp.centroid_method)
    scale = 1.0 / characteristic_length(mesh, z)
    rows = [
        contact_primitives(*eval_contact(mesh, b), z, grasp.friction, scale)
        for b in grasp.contacts
    ]
    return WrenchPrimitiveSet(np.vstack(rows), z, scale)
