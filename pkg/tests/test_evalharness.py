import numpy as np
import pytest

from graspattack.contactmodel import FrictionParams, GraspConfig
from graspattack.evalharness import (evaluate, fibonacci_directions, max_external_disturbance,
                                     max_lift_mass, min_grasp_force)

from oracles import stepped_disturbance, stepped_max_mass, stepped_min_force


def _variant(grasp, **kw):
    fr = grasp.friction
    friction = FrictionParams(kw.pop("mu", fr.mu), kw.pop("gamma", fr.gamma), fr.cone_edges)
    return GraspConfig(grasp.contacts, friction, kw.pop("mass", grasp.mass),
                       kw.pop("cap", grasp.per_finger_cap))


def test_fibonacci_directions():
    d = fibonacci_directions(50)
    assert d.shape == (50, 3)
    assert np.abs(np.linalg.norm(d, axis=1) - 1).max() <= 1e-12
    assert fibonacci_directions(1).tolist() == [[0.0, 0.0, 1.0]]
    assert np.array_equal(d, fibonacci_directions(50))
    with pytest.raises(ValueError):
        fibonacci_directions(0)


def test_sphere_fixture_protocols(fixtures):
    mesh, grasps = fixtures["icosphere"]
    g = grasps["2f"]
    assert min_grasp_force(mesh, g) == 8.2
    assert max_lift_mass(mesh, g) == 6.1
    assert max_lift_mass(mesh, _variant(g, cap=25.0)) == 3.0


def test_doubling_mu_halves_min_force(fixtures):
    mesh, grasps = fixtures["icosphere"]
    g = grasps["2f"]
    a = min_grasp_force(mesh, g)
    b = min_grasp_force(mesh, _variant(g, mu=1.2))
    assert abs(b - a / 2) <= 0.2


def test_matches_literal_stepping(fixtures):
    for mesh, grasps in fixtures.values():
        for grasp in grasps.values():
            assert min_grasp_force(mesh, grasp) == stepped_min_force(mesh, grasp)
            assert max_lift_mass(mesh, grasp) == stepped_max_mass(mesh, grasp)


def test_disturbance_matches_literal_stepping(fixtures):
    for name in ("box", "capsule"):
        mesh, grasps = fixtures[name]
        g = grasps["2f"]
        maxed, breaks = max_external_disturbance(mesh, g)
        assert maxed == stepped_disturbance(mesh, g)
        assert len(breaks) == 50
        assert min(breaks) == maxed + 1


def test_sphere_disturbance_regression(fixtures):
    mesh, grasps = fixtures["icosphere"]
    maxed, _ = max_external_disturbance(mesh, grasps["2f"])
    assert maxed == 31.0


def test_infeasible_grasp_flags(fixtures):
    mesh, grasps = fixtures["icosphere"]
    g = grasps["2f"]
    one = GraspConfig(g.contacts[:1], FrictionParams(gamma=0.0))
    flags = []
    assert min_grasp_force(mesh, one, flags) == 50.0
    assert max_lift_mass(mesh, one, flags) == 0.0
    maxed, breaks = max_external_disturbance(mesh, one, flags=flags)
    assert maxed == 0.0
    assert flags == ["min_grasp_force:infeasible_at_max", "max_lift_mass:infeasible_at_start",
                     "max_external_disturbance:infeasible_under_gravity"]


def test_min_force_brackets_lp_optimum(fixtures):
    from graspattack.quality.lift import lift_capability
    for mesh, grasps in fixtures.values():
        for grasp in grasps.values():
            fstar = lift_capability(mesh, grasp).min_max_normal_force
            mingf = min_grasp_force(mesh, grasp)
            assert fstar <= mingf < fstar + 0.2 + 1e-9


def test_max_mass_monotone_in_cap_and_mu(fixtures):
    mesh, grasps = fixtures["capsule"]
    g = grasps["3f"]
    caps = [max_lift_mass(mesh, _variant(g, cap=c)) for c in (20, 35, 50)]
    mus = [max_lift_mass(mesh, _variant(g, mu=m)) for m in (0.4, 0.6, 0.8)]
    assert caps == sorted(caps) and mus == sorted(mus)


def test_disturbance_homogeneity(fixtures):
    mesh, grasps = fixtures["box"]
    g = grasps["2f"]
    a, _ = max_external_disturbance(mesh, g)
    b, _ = max_external_disturbance(mesh, _variant(g, mass=2.0, cap=100.0))
    assert abs(b - 2 * a) <= 2


def test_evaluate_report(fixtures):
    mesh, grasps = fixtures["icosphere"]
    r = evaluate(mesh, grasps["2f"])
    d = r.to_dict()
    assert d["min_grasp_force"] == 8.2 and d["max_lift_mass"] == 6.1
    assert d["flags"] == []
    assert r.max_external_disturbance == min(r.per_direction_break_force) - 1
