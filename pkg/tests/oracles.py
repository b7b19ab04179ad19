"""Independent reference computations used by the tests."""

import math

import numpy as np

from graspattack.contactmodel import Wrench, contact_frames, gravity_wrench
from graspattack.evalharness import fibonacci_directions
from graspattack.meshcore import center_of_mass
from graspattack.quality.lift import feasible_with_cap


def tetra_centroid(vertices, faces):
    """Signed tetrahedra against the origin, summed one face at a time."""
    vol = 0.0
    acc = [0.0, 0.0, 0.0]
    for i, j, k in faces:
        a, b, c = vertices[i], vertices[j], vertices[k]
        v = (a[0] * (b[1] * c[2] - b[2] * c[1])
             - a[1] * (b[0] * c[2] - b[2] * c[0])
             + a[2] * (b[0] * c[1] - b[1] * c[0])) / 6.0
        vol += v
        for d in range(3):
            acc[d] += v * (a[d] + b[d] + c[d]) / 4.0
    return np.array(acc) / vol


def bisect_min_force(frames, gamma, external, centroid, hi=1e3, iters=80):
    """Smallest cap at which the capped equilibrium LP is feasible."""
    lo = 0.0
    if not feasible_with_cap(frames, gamma, hi, external, centroid):
        return math.inf
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if feasible_with_cap(frames, gamma, mid, external, centroid):
            hi = mid
        else:
            lo = mid
    return hi


def _scene(mesh, grasp):
    return contact_frames(mesh, grasp), grasp.friction.gamma, center_of_mass(mesh)


def stepped_min_force(mesh, grasp):
    frames, gamma, z = _scene(mesh, grasp)
    g = gravity_wrench(grasp.mass)
    if not feasible_with_cap(frames, gamma, 50.0, g, z):
        return 50.0
    last = 250
    for k in range(249, -1, -1):
        if not feasible_with_cap(frames, gamma, k / 5, g, z):
            break
        last = k
    return last / 5


def stepped_max_mass(mesh, grasp, limit=2000):
    frames, gamma, z = _scene(mesh, grasp)
    cap = grasp.per_finger_cap
    if not feasible_with_cap(frames, gamma, cap, gravity_wrench(1.0), z):
        return 0.0
    last = 10
    for k in range(11, limit):
        if not feasible_with_cap(frames, gamma, cap, gravity_wrench(k / 10), z):
            break
        last = k
    return last / 10


def stepped_disturbance(mesh, grasp, count=50, limit=1000):
    """Raise the force 1 N at a time until some direction fails."""
    frames, gamma, z = _scene(mesh, grasp)
    cap = grasp.per_finger_cap
    base = gravity_wrench(grasp.mass)
    if not feasible_with_cap(frames, gamma, cap, base, z):
        return 0.0
    dirs = fibonacci_directions(count)
    for F in range(1, limit):
        for d in dirs:
            if not feasible_with_cap(frames, gamma, cap, base + Wrench(F * d, np.zeros(3)), z):
                return float(F - 1)
    return float(limit)
