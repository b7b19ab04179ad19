"""Signed distance from the wrench-space origin to the primitive hull.

The margin is ``min_{|u|=1} max_i p_i . u``: positive when the origin is
interior (the classic epsilon quality), negative and equal to minus the
origin-to-hull distance when it is outside.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from scipy.optimize import nnls
from scipy.stats import norm as _normal
from scipy.stats import qmc

from ..contactmodel import GraspConfig, WrenchPrimitiveSet, grasp_primitives
from ..meshcore import TriangleMesh
from .simplex import linprog

DIM = 6
EXACT_MAX_POINTS = 40


@dataclass(frozen=True)
class StabilityMargin:
    signed_margin: float
    method: str
    degenerate: bool = False
    direction: np.ndarray | None = None

    @property
    def gs_value(self) -> float:
        return max(self.signed_margin, 0.0)


def _as_points(primitives) -> np.ndarray:
    if isinstance(primitives, WrenchPrimitiveSet):
        return primitives.primitives
    p = np.asarray(primitives, dtype=np.float64).reshape(-1, DIM)
    if len(p) == 0:
        raise ValueError("empty primitive set")
    return p


@lru_cache(maxsize=8)
def sphere_directions(count: int, seed: int = 0) -> np.ndarray:
    """Quasi-uniform unit 6-vectors: scrambled Sobol points pushed through
    the normal quantile and normalized, plus the 12 signed axes."""
    sob = qmc.Sobol(DIM, scramble=True, seed=seed)
    u = sob.random(count)
    g = _normal.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    axes = np.vstack([np.eye(DIM), -np.eye(DIM)])
    out = np.vstack([axes, g])
    out.flags.writeable = False
    return out


def _support(P: np.ndarray, U: np.ndarray) -> np.ndarray:
    return (P @ U.T).max(axis=0)


def _polar_vertex_walk(P: np.ndarray, u0: np.ndarray, max_iter: int = 500) -> np.ndarray | None:
    """Local refinement for an interior origin.

    Vertices of the polar polytope ``{y : P y <= 1}`` correspond to hull
    facets, a vertex ``y`` giving facet distance ``1 / |y|``. Starting from
    the vertex that maximizes ``u0 . y``, move along polytope edges while
    ``|y|`` grows. Returns a unit direction, or ``None`` when the polar is
    unbounded (origin not interior).
    """
    n = len(P)
    res = linprog(-np.concatenate([u0, -u0]), np.hstack([P, -P]), np.ones(n))
    if not res.optimal:
        return None
    y = res.x[:DIM] - res.x[DIM:]
    for _ in range(max_iter):
        move = _best_edge(P, y, _active_sets(P, y))
        if move is None:
            break
        y = move
    ny = np.linalg.norm(y)
    return y / ny if ny > 0 else None


def _active_sets(P: np.ndarray, y: np.ndarray, tol: float = 1e-9, limit: int = 2000) -> np.ndarray:
    """6-subsets of the constraints tight at ``y``, shape ``(k, 6)``.

    A degenerate vertex has more than six tight constraints and no single
    subset exposes all of its edges, so several are tried.
    """
    slack = 1.0 - P @ y
    tight = np.flatnonzero(slack <= tol)
    if len(tight) < DIM:
        tight = np.argsort(slack, kind="stable")[:DIM]
    combos = itertools.islice(itertools.combinations(tight, DIM), limit)
    return np.array(list(combos), dtype=np.int64)


def _best_edge(P: np.ndarray, y: np.ndarray, sets: np.ndarray) -> np.ndarray | None:
    """Adjacent vertex of largest norm reachable from ``y`` along an edge of
    any of the given bases, if it beats ``|y|``."""
    M = P[sets]  # (k, 6, 6)
    ok = np.abs(np.linalg.det(M)) > 1e-12
    if not ok.any():
        return None
    sets, inv = sets[ok], np.linalg.inv(M[ok])
    # edge i of a basis releases its constraint i: direction -inv[:, :, i]
    Pd = -np.einsum("nj,kji->kni", P, inv)  # (k, n, 6)
    slack = np.clip(1.0 - P @ y, 0.0, None)
    blocked = Pd > 1e-12
    rows = np.arange(len(sets))[:, None]
    blocked[rows, sets, :] = False
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(blocked, slack[None, :, None] / Pd, np.inf)
    t = ratio.min(axis=1)  # (k, 6)
    finite = np.isfinite(t)
    if not finite.any():
        return None
    cand = y[None, None, :] - np.where(finite, t, 0.0)[..., None] * inv.transpose(0, 2, 1)
    norms = np.where(finite, np.einsum("kij,kij->ki", cand, cand), -np.inf)
    kb, ib = np.unravel_index(int(np.argmax(norms)), norms.shape)
    if norms[kb, ib] > (y @ y) * (1 + 1e-12):
        return cand[kb, ib]
    return None


def _exterior_direction(P: np.ndarray, weight: float = 1e4) -> np.ndarray | None:
    """Direction away from the hull's min-norm point (origin outside)."""
    A = np.vstack([P.T, weight * np.ones((1, len(P)))])
    b = np.zeros(DIM + 1)
    b[-1] = weight
    lam, _ = nnls(A, b)
    x = lam @ P
    nx = np.linalg.norm(x)
    return -x / nx if nx > 1e-15 else None


def _coordinate_descent(P: np.ndarray, u: np.ndarray, steps: int, step0: float = 0.25):
    """Projected coordinate descent with step halving; keeps u on the sphere."""
    best = float((P @ u).max())
    h = step0
    basis = np.vstack([np.eye(DIM), -np.eye(DIM)])
    for _ in range(steps):
        cand = u + h * basis
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        vals = _support(P, cand)
        j = int(np.argmin(vals))
        if vals[j] < best:
            best, u = float(vals[j]), cand[j]
        else:
            h *= 0.5
            if h < 1e-12:
                break
    return u, best


def signed_hull_margin(primitives, directions: int = 8192, refine_steps: int = 200,
                       seeds: int = 4, sample_seed: int = 0) -> StabilityMargin:
    """Sampled support-function minimum with local refinement.

    The best ``seeds`` sampled directions are refined by projected coordinate
    descent and then by an active-set step (polar vertex walk when the origin
    looks interior, min-norm point otherwise). Every candidate is scored by
    the support function at a genuine unit vector, so the result never
    undercuts the exact margin.
    """
    P = _as_points(primitives)
    U = sphere_directions(int(directions), sample_seed)
    h = _support(P, U)
    order = np.argsort(h, kind="stable")[:seeds]
    cands = [U[order[0]]]
    for i in order:
        u, _ = _coordinate_descent(P, U[i].copy(), refine_steps)
        cands.append(u)
        if h[i] > 0:
            w = _polar_vertex_walk(P, u)
            if w is not None:
                cands.append(w)
    if h[order[0]] <= 0 or len(cands) == 1 + len(order):
        w = _exterior_direction(P)
        if w is not None:
            cands.append(w)
    C = np.array(cands)
    vals = _support(P, C)
    j = int(np.argmin(vals))
    return StabilityMargin(float(vals[j]), "sampled", direction=C[j])


def unique_rows(P: np.ndarray) -> np.ndarray:
    key = np.round(P, 12)
    _, idx = np.unique(key, axis=0, return_index=True)
    return P[np.sort(idx)]


def _facets(P: np.ndarray, chunk: int = 20000, tol: float = 1e-9):
    """Supporting hyperplanes ``a . x <= b`` (unit ``a``) through affinely
    independent 6-subsets, by brute-force enumeration."""
    n = len(P)
    normals, offsets = [], []
    combos = itertools.combinations(range(n), DIM)
    scale = max(1.0, float(np.abs(P).max()))
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64)
        if len(block) == 0:
            break
        S = P[block]  # (k, 6, 6)
        D = S[:, 1:] - S[:, :1]  # (k, 5, 6)
        _, sv, vt = np.linalg.svd(D)
        ok = sv[:, -1] > 1e-10 * scale
        a = vt[ok, -1]
        b = np.einsum("ij,ij->i", a, S[ok, 0])
        side = P @ a.T - b  # (n, k)
        below = side.max(axis=0) <= tol * scale
        above = side.min(axis=0) >= -tol * scale
        a = np.where(above[:, None] & ~below[:, None], -a, a)
        b = np.where(above & ~below, -b, b)
        keep = below | above
        normals.append(a[keep])
        offsets.append(b[keep])
    if not normals:
        return np.zeros((0, DIM)), np.zeros(0)
    return np.vstack(normals), np.concatenate(offsets)


def _distance_to_hull(P: np.ndarray, chunk: int = 20000) -> float:
    """Exact origin-to-hull distance: the min-norm point of the hull lies in
    the relative interior of some simplex of at most six points."""
    best = np.inf
    n = len(P)
    for k in range(1, min(DIM, n) + 1):
        combos = itertools.combinations(range(n), k)
        while True:
            block = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64)
            if len(block) == 0:
                break
            Q = P[block]  # (c, k, 6)
            K = np.zeros((len(block), k + 1, k + 1))
            K[:, :k, :k] = Q @ Q.transpose(0, 2, 1)
            K[:, :k, k] = 1.0
            K[:, k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            sol = np.einsum("cij,j->ci", np.linalg.pinv(K), rhs)
            lam = sol[:, :k]
            ok = (lam.min(axis=1) >= -1e-12) & (np.abs(lam.sum(axis=1) - 1.0) < 1e-9)
            if not np.any(ok):
                continue
            lam = np.clip(lam[ok], 0.0, None)
            lam /= lam.sum(axis=1, keepdims=True)
            x = np.einsum("ck,ckj->cj", lam, Q[ok])
            best = min(best, float(np.linalg.norm(x, axis=1).min()))
    return best


def exact_hull_margin(primitives) -> StabilityMargin:
    """Brute-force facet enumeration. Cost grows as C(n, 6); n <= 40."""
    P = unique_rows(_as_points(primitives))
    if len(P) > EXACT_MAX_POINTS:
        raise ValueError(f"exact margin limited to {EXACT_MAX_POINTS} points, got {len(P)}")
    full_dim = len(P) > DIM and np.linalg.matrix_rank(P[1:] - P[0], tol=1e-10) == DIM
    if not full_dim:
        d = _distance_to_hull(P)
        return StabilityMargin(-d if d > 1e-12 else 0.0, "exact", degenerate=True)
    a, b = _facets(P)
    if len(b) and b.min() >= -1e-12:
        return StabilityMargin(float(b.min()), "exact", direction=a[int(np.argmin(b))])
    return StabilityMargin(-_distance_to_hull(P), "exact")


def exact_cost(n_points: int) -> int:
    return comb(n_points, DIM)


def grasp_stability(mesh: TriangleMesh, grasp: GraspConfig, exact: bool = False,
                    directions: int = 8192, refine_steps: int = 200) -> StabilityMargin:
    """Margin of the grasp's primitive hull about the current centroid.

    With ``exact=True`` the brute-force path is used when the deduplicated
    primitive count allows it; otherwise the sampled path.
    """
    prims = grasp_primitives(mesh, grasp)
    if exact and len(unique_rows(prims.primitives)) <= EXACT_MAX_POINTS:
        return exact_hull_margin(prims)
    return signed_hull_margin(prims, directions, refine_steps)
