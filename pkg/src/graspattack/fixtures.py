"""Synthetic watertight objects and grasps used for testing and demos.

All three objects are centrally symmetric about the origin and their
two-contact grasps press on faces whose normals are exactly +/-x, so the
untouched grasps have closed-form lift forces.
"""

from __future__ import annotations

import numpy as np

from .cagedeform import box_grid
from .contactmodel import FrictionParams, GraspConfig
from .meshcore import ContactBinding, TriangleMesh, snap_to_surface


def box_mesh(size=(0.08, 0.06, 0.12), spacing: float = 0.01) -> TriangleMesh:
    size = np.asarray(size, dtype=np.float64)
    div = [max(1, int(round(s / spacing))) for s in size]
    pts, faces = box_grid(-size / 2, size / 2, div)
    return TriangleMesh(pts, faces)


def _rotation_to(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rotation matrix taking unit vector ``a`` onto unit vector ``b``."""
    v = np.cross(a, b)
    c = float(a @ b)
    if np.linalg.norm(v) < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    K = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + K + K @ K / (1 + c)


def icosphere_mesh(radius: float = 0.04, subdivisions: int = 3) -> TriangleMesh:
    """Subdivided icosahedron, rotated so one face has outward normal +x."""
    t = (1 + 5 ** 0.5) / 2
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
             (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
             (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    v = [np.array(p, dtype=np.float64) / np.linalg.norm(p) for p in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = v[i] + v[j]
                v.append(m / np.linalg.norm(m))
                cache[key] = len(v) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    V = np.array(v)
    F = np.array(faces)
    # put the face nearest the +x direction exactly on the x axis
    tri = V[F]
    n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    k = int(np.argmax(n[:, 0]))
    R = _rotation_to(n[k], np.array([1.0, 0.0, 0.0]))
    return TriangleMesh(radius * (V @ R.T), F)


def capsule_mesh(radius: float = 0.03, half_length: float = 0.04, n_az: int = 32,
                 n_cyl: int = 5, n_cap: int = 6) -> TriangleMesh:
    """Cylinder with hemispherical caps along z.

    Azimuths are offset by half a step, so the cylinder quads straddling
    the x axis are planar with normals exactly +/-x.
    """
    az = np.pi / n_az + 2 * np.pi * np.arange(n_az) / n_az
    rings = []  # (z, ring radius), top to bottom, poles excluded
    for k in range(1, n_cap + 1):
        phi = (np.pi / 2) * k / n_cap
        rings.append((half_length + radius * np.cos(phi), radius * np.sin(phi)))
    for k in range(1, n_cyl + 1):
        rings.append((half_length - 2 * half_length * k / n_cyl, radius))
    for k in range(n_cap - 1, 0, -1):
        phi = (np.pi / 2) * k / n_cap
        rings.append((-half_length - radius * np.cos(phi), radius * np.sin(phi)))
    pts = [(0.0, 0.0, half_length + radius)]
    for z, r in rings:
        pts += [(r * np.cos(a), r * np.sin(a), z) for a in az]
    pts.append((0.0, 0.0, -half_length - radius))
    bottom = len(pts) - 1

    def ring(i, j):
        return 1 + i * n_az + (j % n_az)

    faces = [(0, ring(0, j), ring(0, j + 1)) for j in range(n_az)]
    for i in range(len(rings) - 1):
        for j in range(n_az):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            faces += [(a, c, d), (a, d, b)]
    last = len(rings) - 1
    faces += [(bottom, ring(last, j + 1), ring(last, j)) for j in range(n_az)]
    return TriangleMesh(np.array(pts), np.array(faces))


def _interior(mesh: TriangleMesh, target) -> ContactBinding:
    """Snap, then move to the face centroid so the contact sits off edges."""
    b = snap_to_surface(mesh, target)
    return ContactBinding(b.face_index, (1 / 3, 1 / 3, 1 / 3))


def _reach(mesh: TriangleMesh) -> float:
    return 10 * float(np.abs(mesh.vertices).max())


def _axis_contacts(mesh: TriangleMesh, offset=(0.0, 0.0)) -> list[ContactBinding]:
    # offsets keep the snapped points off grid lines and quad diagonals
    r = _reach(mesh)
    y, z = offset
    return [snap_to_surface(mesh, (r, y, z)), snap_to_surface(mesh, (-r, y, z))]


def _ring_contacts(mesh: TriangleMesh, count: int = 3) -> list[ContactBinding]:
    r = _reach(mesh)
    ang = 2 * np.pi * np.arange(count) / count
    return [_interior(mesh, (r * np.cos(a), r * np.sin(a), 0.0)) for a in ang]


def _box_three(mesh: TriangleMesh) -> list[ContactBinding]:
    r = _reach(mesh)
    hz = 0.25 * np.ptp(mesh.vertices[:, 2])
    return [snap_to_surface(mesh, (r, 0.003, hz + 0.006)), snap_to_surface(mesh, (r, 0.003, -hz + 0.006)),
            snap_to_surface(mesh, (-r, 0.003, 0.006))]


def fixture_set(friction: FrictionParams | None = None, mass: float = 1.0,
                cap: float = 50.0) -> dict[str, tuple[TriangleMesh, dict[str, GraspConfig]]]:
    """``{object name: (mesh, {grasp name: config})}`` for the synthetic set."""
    friction = friction or FrictionParams()
    out = {}
    for name, mesh, offset, three in (
        ("box", box_mesh(), (0.003, 0.006), _box_three),
        ("icosphere", icosphere_mesh(), (0.0, 0.0), _ring_contacts),
        ("capsule", capsule_mesh(), (0.0, 0.003), _ring_contacts),
    ):
        grasps = {
            "2f": GraspConfig(tuple(_axis_contacts(mesh, offset)), friction, mass, cap),
            "3f": GraspConfig(tuple(three(mesh)), friction, mass, cap),
        }
        out[name] = (mesh, grasps)
    return out
