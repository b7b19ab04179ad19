import numpy as np
import pytest

from graspattack.contactmodel import ContactFrame, FrictionParams, cone_edges
from graspattack.fixtures import fixture_set, icosphere_mesh
from graspattack.meshcore import TriangleMesh

CUBE_V = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
                   [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], dtype=float)
CUBE_F = np.array([[0, 2, 1], [0, 3, 2], [4, 5, 6], [4, 6, 7],
                   [0, 1, 5], [0, 5, 4], [1, 2, 6], [1, 6, 5],
                   [2, 3, 7], [2, 7, 6], [3, 0, 4], [3, 4, 7]])


def unit_cube() -> TriangleMesh:
    return TriangleMesh(CUBE_V, CUBE_F)


def random_blob(seed: int, subdivisions: int = 2) -> TriangleMesh:
    """Star-shaped watertight mesh: an icosphere with random radii, shifted."""
    rng = np.random.default_rng(seed)
    base = icosphere_mesh(1.0, subdivisions)
    r = rng.uniform(0.6, 1.4, size=len(base.vertices))
    scale = rng.uniform(0.05, 2.0, size=3)
    return TriangleMesh(base.vertices * r[:, None] * scale + rng.normal(size=3), base.faces)


def antipodal_frames(params: FrictionParams = FrictionParams(), radius: float = 1.0):
    """Two contacts on a sphere pressing along x, centroid at the origin."""
    frames = []
    for s in (1.0, -1.0):
        n = np.array([-s, 0.0, 0.0])
        frames.append(ContactFrame(np.array([s * radius, 0.0, 0.0]), n, cone_edges(n, params)))
    return frames


@pytest.fixture(scope="session")
def fixtures():
    return fixture_set()


@pytest.fixture
def cube():
    return unit_cube()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
