"""Box cages on a control-point grid and mean value coordinate deformation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .meshcore import MeshError, TriangleMesh, bounding_box

_EPS = 1e-12


@dataclass(frozen=True)
class CageRig:
    """Enclosing cage plus per-vertex weights over its control points.

    ``weights`` has shape ``(n_vertices, n_control)``; row ``i`` expresses
    object vertex ``i`` as an affine combination of the control points.
    """

    cage_mesh: TriangleMesh
    control_points: np.ndarray
    weights: np.ndarray
    cage_size: float
    base_vertices: np.ndarray
    divisions: tuple[int, int, int]

    @property
    def n_control(self) -> int:
        return len(self.control_points)


def box_grid(lo, hi, divisions) -> tuple[np.ndarray, np.ndarray]:
    """Closed triangulated surface of the box ``[lo, hi]``.

    Each face is an even grid with ``divisions[axis]`` cells along each axis;
    shared edge and corner vertices appear once. Faces wind outward.
    """
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    nd = [int(d) for d in divisions]
    index: dict[tuple[int, int, int], int] = {}
    points: list[np.ndarray] = []

    def vid(ijk):
        if ijk not in index:
            index[ijk] = len(points)
            frac = np.array(ijk, dtype=np.float64) / nd
            points.append(lo + frac * (hi - lo))
        return index[ijk]

    faces = []
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        for side in (0, nd[a]):
            for i in range(nd[b]):
                for j in range(nd[c]):
                    quad = []
                    for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        ijk = [0, 0, 0]
                        ijk[a], ijk[b], ijk[c] = side, i + di, j + dj
                        quad.append(vid(tuple(ijk)))
                    # (e_b, e_c) is counter-clockwise seen from +e_a
                    if side == 0:
                        quad = quad[::-1]
                    faces.append((quad[0], quad[1], quad[2]))
                    faces.append((quad[0], quad[2], quad[3]))
    return np.array(points), np.array(faces, dtype=np.int64)


def mean_value_weights(points: np.ndarray, cage: TriangleMesh, chunk: int = 16) -> np.ndarray:
    """Mean value coordinates of ``points`` w.r.t. a closed triangle cage.

    Points must lie strictly inside the cage. Uses the closed-form
    per-triangle integral of the mean value construction for triangle
    meshes, accumulated per cage vertex and normalized.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    cv = cage.vertices
    cf = cage.faces
    nt, nc = len(cf), len(cv)
    # scatter (triangle, corner) contributions to cage vertices
    scatter = sp.csr_matrix(
        (np.ones(3 * nt), (np.arange(3 * nt), cf.ravel())), shape=(3 * nt, nc)
    )
    out = np.empty((len(points), nc))
    for s in range(0, len(points), chunk):
        x = points[s:s + chunk]
        d_all = cv[None, :, :] - x[:, None, :]  # (p, nc, 3)
        dist_all = np.linalg.norm(d_all, axis=2)
        if dist_all.min() < _EPS:
            raise MeshError("point coincides with a cage vertex")
        u_all = d_all / dist_all[..., None]
        u = u_all[:, cf]  # (p, nt, 3, 3): corner k of each triangle
        dist = dist_all[:, cf]  # (p, nt, 3)
        u_next = np.roll(u, -1, axis=2)
        u_prev = np.roll(u, 1, axis=2)
        l = np.linalg.norm(u_next - u_prev, axis=3)
        theta = 2.0 * np.arcsin(np.clip(l / 2.0, 0.0, 1.0))
        h = theta.sum(axis=2) / 2.0
        # arcsin loses precision near pi, so edges are detected from the chord
        if np.any(np.pi - h < 1e-10) or np.any(l > 2.0 - 1e-13):
            raise MeshError("point lies on the cage surface")
        sin_t = np.sin(theta)
        sin_next = np.roll(sin_t, -1, axis=2)
        sin_prev = np.roll(sin_t, 1, axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            c = 2.0 * np.sin(h)[..., None] * np.sin(h[..., None] - theta) / (sin_next * sin_prev) - 1.0
        det = np.einsum("ptj,ptj->pt", u[:, :, 0], np.cross(u[:, :, 1], u[:, :, 2]))
        s_ = np.sign(det)[..., None] * np.sqrt(np.clip(1.0 - c * c, 0.0, None))
        # triangles whose plane contains x (outside the triangle) contribute nothing
        skip = np.any(np.abs(s_) <= 1e-10, axis=2) | ~np.all(np.isfinite(c), axis=2)
        c_next = np.roll(c, -1, axis=2)
        c_prev = np.roll(c, 1, axis=2)
        th_next = np.roll(theta, -1, axis=2)
        th_prev = np.roll(theta, 1, axis=2)
        s_prev = np.roll(s_, 1, axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = (theta - c_next * th_prev - c_prev * th_next) / (dist * sin_next * s_prev)
        w[skip] = 0.0
        acc = (scatter.T @ w.reshape(len(x), 3 * nt).T).T
        total = acc.sum(axis=1, keepdims=True)
        out[s:s + chunk] = acc / total
    return out


def build_cage(mesh: TriangleMesh, cage_size: float, inflation: float = 0.05) -> CageRig:
    """Cage on the inflated bounding box with grid spacing at most ``cage_size``."""
    if cage_size <= 0:
        raise ValueError("cage_size must be positive")
    if inflation <= 0:
        raise ValueError("inflation must be positive")
    lo, hi = bounding_box(mesh)
    ext = hi - lo
    lo = lo - inflation * ext
    hi = hi + inflation * ext
    ext = hi - lo
    if np.any(ext <= 0):
        raise MeshError("degenerate bounding box")
    divisions = tuple(max(1, math.ceil(e / cage_size - 1e-9)) for e in ext)
    pts, faces = box_grid(lo, hi, divisions)
    cage = TriangleMesh(pts, faces)
    W = mean_value_weights(mesh.vertices, cage)
    W.flags.writeable = False
    return CageRig(cage, cage.vertices, W, float(cage_size), mesh.vertices, divisions)


def apply_deformation(rig: CageRig, displacements: np.ndarray, mesh: TriangleMesh) -> TriangleMesh:
    """Deformed copy of ``mesh``; topology is untouched.

    Vertices are ``W (C + D)``. Since ``W C`` reproduces the base vertices,
    this is evaluated as ``base + W D``, which is exact for ``D = 0``.
    """
    d = np.asarray(displacements, dtype=np.float64)
    if d.shape != rig.control_points.shape:
        raise ValueError(f"expected displacements of shape {rig.control_points.shape}, got {d.shape}")
    return mesh.with_vertices(rig.base_vertices + rig.weights @ d)


def reconstruct(rig: CageRig, control_points: np.ndarray) -> np.ndarray:
    """Vertices generated directly from (possibly moved) control points."""
    return rig.weights @ np.asarray(control_points, dtype=np.float64)
