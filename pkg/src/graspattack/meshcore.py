"""Triangle meshes: OBJ IO, mass properties, smoothness energy and contact binding."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike


class MeshError(ValueError):
    """Raised for malformed meshes or geometry that a query cannot handle."""


class ObjParseError(MeshError):
    pass


class TriangleMesh:
    """Immutable triangle surface.

    Vertices are an ``(n, 3)`` float array in meters; faces an ``(m, 3)`` int
    array with counter-clockwise (outward) winding. Both arrays are made
    read-only so a mesh can be shared freely.
    """

    def __init__(self, vertices: ArrayLike, faces: ArrayLike):
        v = np.array(vertices, dtype=np.float64).reshape(-1, 3)
        f = np.array(faces, dtype=np.int64).reshape(-1, 3)
        if len(f) and (f.min() < 0 or f.max() >= len(v)):
            raise MeshError("face index out of range")
        if len(f) and np.any((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])):
            raise MeshError("degenerate face with repeated vertex index")
        if not np.all(np.isfinite(v)):
            raise MeshError("non-finite vertex coordinate")
        v.flags.writeable = False
        f.flags.writeable = False
        self.vertices = v
        self.faces = f

    def __repr__(self) -> str:
        return f"TriangleMesh(n_vertices={len(self.vertices)}, n_faces={len(self.faces)})"

    def with_vertices(self, vertices: ArrayLike) -> "TriangleMesh":
        """Same topology, new positions. The face array object is shared."""
        out = TriangleMesh.__new__(TriangleMesh)
        v = np.array(vertices, dtype=np.float64).reshape(self.vertices.shape)
        v.flags.writeable = False
        out.vertices = v
        out.faces = self.faces
        return out

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted ``(k, 2)`` index pairs."""
        e = np.sort(self.faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        return np.unique(e, axis=0)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        neigh: list[set[int]] = [set() for _ in range(len(self.vertices))]
        for a, b in self.edges:
            neigh[a].add(int(b))
            neigh[b].add(int(a))
        return tuple(frozenset(s) for s in neigh)

    @cached_property
    def is_watertight(self) -> bool:
        if len(self.faces) == 0:
            return False
        e = np.sort(self.faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        return bool(np.all(counts == 2))

    def triangles(self) -> np.ndarray:
        """Vertex coordinates per face, shape ``(m, 3, 3)``."""
        return self.vertices[self.faces]

    def face_normals(self) -> np.ndarray:
        """Unnormalized outward normals (length = twice the face area)."""
        t = self.triangles()
        return np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0])

    def volume(self) -> float:
        t = self.triangles()
        return float(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum() / 6.0)

    def translated(self, offset: ArrayLike) -> "TriangleMesh":
        return self.with_vertices(self.vertices + np.asarray(offset, dtype=np.float64))


@dataclass(frozen=True)
class ContactBinding:
    """A material point on the surface: a face plus barycentric weights."""

    face_index: int
    barycentric: tuple[float, float, float]

    def __post_init__(self):
        w = np.asarray(self.barycentric, dtype=np.float64)
        if w.shape != (3,) or not np.all(np.isfinite(w)):
            raise MeshError("barycentric weights must be three finite numbers")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise MeshError(f"barycentric weights {tuple(w)} must be >= 0 and sum to 1")
        if self.face_index < 0:
            raise MeshError("face index must be nonnegative")
        object.__setattr__(self, "face_index", int(self.face_index))
        object.__setattr__(self, "barycentric", tuple(float(x) for x in w))

    def check(self, mesh: TriangleMesh) -> None:
        if self.face_index >= len(mesh.faces):
            raise MeshError(f"contact face {self.face_index} out of range for {mesh!r}")


# --- file IO -------------------------------------------------------------


def load_mesh(path: str | Path) -> TriangleMesh:
    """Read an ASCII OBJ file; only ``v`` and triangular ``f`` records are used."""
    path = Path(path)
    verts: list[list[float]] = []
    faces: list[list[int]] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tag, *rest = line.split()
            if tag == "v":
                if len(rest) < 3:
                    raise ObjParseError(f"{path}:{lineno}: vertex needs 3 coordinates")
                try:
                    verts.append([float(x) for x in rest[:3]])
                except ValueError as exc:
                    raise ObjParseError(f"{path}:{lineno}: {exc}") from None
            elif tag == "f":
                if len(rest) != 3:
                    raise ObjParseError(f"{path}:{lineno}: non-triangular face ({len(rest)} vertices)")
                idx = []
                for tok in rest:
                    try:
                        i = int(tok.split("/", 1)[0])
                    except ValueError:
                        raise ObjParseError(f"{path}:{lineno}: bad face index {tok!r}") from None
                    # negative indices are relative to the current vertex count
                    i = i - 1 if i > 0 else len(verts) + i
                    idx.append(i)
                faces.append(idx)
    if not verts or not faces:
        raise ObjParseError(f"{path}: no geometry")
    f = np.asarray(faces, dtype=np.int64)
    if f.min() < 0 or f.max() >= len(verts):
        raise ObjParseError(f"{path}: face index out of range")
    try:
        return TriangleMesh(verts, f)
    except MeshError as exc:
        raise ObjParseError(f"{path}: {exc}") from None


def format_obj(mesh: TriangleMesh) -> str:
    lines = ["# triangle mesh"]
    lines += ["v {!r} {!r} {!r}".format(*map(float, v)) for v in mesh.vertices]
    lines += ["f {} {} {}".format(*(int(i) + 1 for i in f)) for f in mesh.faces]
    return "\n".join(lines) + "\n"


def save_mesh(mesh: TriangleMesh, path: str | Path) -> None:
    """Write ASCII OBJ with round-trip float precision."""
    Path(path).write_text(format_obj(mesh), encoding="utf-8")


# --- geometry queries ----------------------------------------------------


def bounding_box(mesh: TriangleMesh) -> tuple[np.ndarray, np.ndarray]:
    if len(mesh.vertices) == 0:
        raise MeshError("bounding box of an empty mesh")
    return mesh.vertices.min(axis=0), mesh.vertices.max(axis=0)


def center_of_mass(mesh: TriangleMesh, method: str = "volume") -> np.ndarray:
    """Centroid of the mesh.

    ``method="volume"`` (default) gives the centroid of the enclosed
    uniform-density solid, summing signed tetrahedra against a local
    reference point.
    ``method="surface"`` gives the area-weighted centroid of the shell.
    """
    if not mesh.is_watertight:
        raise MeshError("center of mass requires a watertight mesh")
    t = mesh.triangles()
    if method == "surface":
        area = 0.5 * np.linalg.norm(mesh.face_normals(), axis=1)
        total = area.sum()
        if total < 1e-18:
            raise MeshError("zero surface area")
        return (area[:, None] * t.mean(axis=1)).sum(axis=0) / total
    if method != "volume":
        raise ValueError(f"unknown centroid method {method!r}")
    # shift to a local origin to keep the tetra sums well conditioned
    ref = t.reshape(-1, 3).mean(axis=0)
    a, b, c = t[:, 0] - ref, t[:, 1] - ref, t[:, 2] - ref
    vol6 = np.einsum("ij,ij->i", a, np.cross(b, c))
    volume = vol6.sum() / 6.0
    if abs(volume) < 1e-12:
        raise MeshError(f"enclosed volume {volume:.3e} m^3 too small")
    return ref + (vol6[:, None] * (a + b + c)).sum(axis=0) / (4.0 * vol6.sum())


def laplacian_offsets(mesh: TriangleMesh) -> np.ndarray:
    """Per-vertex mean offset to the one-ring neighbors."""
    e = mesh.edges
    n = len(mesh.vertices)
    deg = np.bincount(e.ravel(), minlength=n).astype(np.float64)
    if np.any(deg == 0):
        raise MeshError("isolated vertex has no neighbors")
    v = mesh.vertices
    d = v[e[:, 1]] - v[e[:, 0]]
    acc = np.zeros_like(v)
    np.add.at(acc, e[:, 0], d)
    np.add.at(acc, e[:, 1], -d)
    return acc / deg[:, None]


def laplacian_energy(mesh: TriangleMesh) -> float:
    """Sum over vertices of the squared norm of the mean neighbor offset (m^2)."""
    off = laplacian_offsets(mesh)
    return float(np.einsum("ij,ij->", off, off))


def eval_contact(mesh: TriangleMesh, binding: ContactBinding) -> tuple[np.ndarray, np.ndarray]:
    """Current position and unit inward normal of a bound contact."""
    binding.check(mesh)
    tri = mesh.vertices[mesh.faces[binding.face_index]]
    position = np.asarray(binding.barycentric) @ tri
    n = np.cross(tri[1] - tri[0], tri[2] - tri[0])
    norm = np.linalg.norm(n)
    scale = max(np.linalg.norm(tri[1] - tri[0]), np.linalg.norm(tri[2] - tri[0]), 1e-300)
    if norm <= 1e-14 * scale * scale:
        raise MeshError(f"contact face {binding.face_index} is degenerate")
    return position, -n / norm


def closest_point_on_triangles(point: ArrayLike, tris: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closest points on each triangle of ``tris`` (m, 3, 3) to ``point``.

    Returns the points (m, 3) and their barycentric weights (m, 3).
    Region logic follows the usual Voronoi-region case split.
    """
    p = np.asarray(point, dtype=np.float64)
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, ac, ap = b - a, c - a, p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    m = len(tris)
    bary = np.zeros((m, 3))
    done = np.zeros(m, dtype=bool)

    def assign(mask, w):
        nonlocal done
        mask = mask & ~done
        bary[mask] = w[mask]
        done |= mask

    ones, zeros = np.ones(m), np.zeros(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        assign((d1 <= 0) & (d2 <= 0), np.stack([ones, zeros, zeros], 1))
        assign((d3 >= 0) & (d4 <= d3), np.stack([zeros, ones, zeros], 1))
        v = d1 / (d1 - d3)
        assign((vc <= 0) & (d1 >= 0) & (d3 <= 0), np.stack([1 - v, v, zeros], 1))
        assign((d6 >= 0) & (d5 <= d6), np.stack([zeros, zeros, ones], 1))
        w = d2 / (d2 - d6)
        assign((vb <= 0) & (d2 >= 0) & (d6 <= 0), np.stack([1 - w, zeros, w], 1))
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        assign((va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0), np.stack([zeros, 1 - w, w], 1))
        denom = va + vb + vc
        v, w = vb / denom, vc / denom
        assign(np.ones(m, dtype=bool), np.stack([1 - v - w, v, w], 1))
    bary = np.nan_to_num(bary, nan=1.0 / 3.0)
    bary = np.clip(bary, 0.0, None)
    bary /= bary.sum(axis=1, keepdims=True)
    pts = np.einsum("ij,ijk->ik", bary, tris)
    return pts, bary


def snap_to_surface(mesh: TriangleMesh, point: ArrayLike) -> ContactBinding:
    """Bind the surface point nearest to ``point``."""
    pts, bary = closest_point_on_triangles(point, mesh.triangles())
    d = np.linalg.norm(pts - np.asarray(point, dtype=np.float64), axis=1)
    i = int(np.argmin(d))
    w = bary[i] / bary[i].sum()
    return ContactBinding(i, tuple(float(x) for x in w))
