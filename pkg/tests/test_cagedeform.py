import numpy as np
import pytest

from graspattack.cagedeform import (apply_deformation, box_grid, build_cage, mean_value_weights,
                                    reconstruct)
from graspattack.meshcore import MeshError, TriangleMesh

from conftest import unit_cube


@pytest.fixture(scope="module")
def rigs(fixtures):
    return {name: (mesh, build_cage(mesh, 0.04)) for name, (mesh, _) in fixtures.items()}


def test_cage_is_closed_and_encloses(rigs):
    for mesh, rig in rigs.values():
        assert rig.cage_mesh.is_watertight
        assert rig.cage_mesh.volume() > 0
        lo, hi = rig.control_points.min(0), rig.control_points.max(0)
        assert np.all(mesh.vertices > lo) and np.all(mesh.vertices < hi)


def test_divisions_follow_cage_size():
    rig = build_cage(unit_cube(), 0.5)
    assert rig.divisions == (3, 3, 3)
    assert rig.n_control == 56
    assert len(box_grid([0, 0, 0], [1, 1, 1], (1, 1, 1))[0]) == 8


def test_halving_cage_size_adds_control_points(fixtures):
    mesh = fixtures["box"][0]
    counts = [build_cage(mesh, 0.04 / 2 ** r).n_control for r in range(3)]
    assert counts[0] < counts[1] < counts[2]


def test_weights_partition_of_unity_and_positive(rigs):
    for _, rig in rigs.values():
        assert np.allclose(rig.weights.sum(axis=1), 1.0, atol=1e-12)
        assert rig.weights.min() > 0


def test_identity_reconstruction(rigs):
    for mesh, rig in rigs.values():
        assert np.abs(reconstruct(rig, rig.control_points) - mesh.vertices).max() < 1e-9
        same = apply_deformation(rig, np.zeros_like(rig.control_points), mesh)
        assert np.array_equal(same.vertices, mesh.vertices)


def test_translation_reproduced(rigs):
    t = np.array([0.01, -0.02, 0.005])
    for mesh, rig in rigs.values():
        moved = apply_deformation(rig, np.tile(t, (rig.n_control, 1)), mesh)
        assert np.abs(moved.vertices - (mesh.vertices + t)).max() < 1e-6


def test_affine_reproduced(rigs):
    A = np.array([[1.1, 0.05, 0.0], [-0.03, 0.9, 0.02], [0.01, 0.0, 1.2]])
    b = np.array([0.003, 0.001, -0.002])
    for mesh, rig in rigs.values():
        target = rig.control_points @ A.T + b
        out = reconstruct(rig, target)
        assert np.abs(out - (mesh.vertices @ A.T + b)).max() < 1e-6
        via = apply_deformation(rig, target - rig.control_points, mesh)
        assert np.abs(via.vertices - out).max() < 1e-9


def test_topology_untouched(rigs):
    rng = np.random.default_rng(0)
    for mesh, rig in rigs.values():
        out = apply_deformation(rig, 1e-3 * rng.normal(size=rig.control_points.shape), mesh)
        assert out.faces is mesh.faces


def test_displacement_shape_checked(rigs):
    mesh, rig = rigs["box"]
    with pytest.raises(ValueError):
        apply_deformation(rig, np.zeros((3, 3)), mesh)


def test_points_on_cage_rejected():
    cage = TriangleMesh(*box_grid([0, 0, 0], [1, 1, 1], (1, 1, 1)))
    with pytest.raises(MeshError):
        mean_value_weights([[0, 0, 0]], cage)
    with pytest.raises(MeshError):
        mean_value_weights([[0.5, 0.5, 0.0]], cage)


def test_interior_point_of_cube_cage():
    cage = TriangleMesh(*box_grid([0, 0, 0], [1, 1, 1], (1, 1, 1)))
    w = mean_value_weights([[0.5, 0.5, 0.5]], cage)
    assert np.allclose(w @ cage.vertices, [[0.5, 0.5, 0.5]])
    # the centre is symmetric; corners the triangulation treats alike get equal weight
    assert w.min() > 0


def test_bad_parameters():
    with pytest.raises(ValueError):
        build_cage(unit_cube(), 0.0)
    with pytest.raises(ValueError):
        build_cage(unit_cube(), 0.1, inflation=0.0)
