import math
from types import SimpleNamespace

import numpy as np
import pytest

import graspattack.attack as atk
from graspattack.attack import (AttackConfig, Mode, accept, anneal_round, objective, propose,
                                run_attack)
from graspattack.cagedeform import build_cage

# a short schedule keeps these tests fast: 100 * 0.5**k >= 1 for 7 steps
FAST = dict(t0=100.0, t_min=1.0, alpha=0.5, gs_directions=512, gs_refine_steps=40)


@pytest.fixture
def fake_metrics(monkeypatch):
    monkeypatch.setattr(atk, "lift_capability",
                        lambda *a, **k: SimpleNamespace(feasible=True, lc_value=1.0))
    monkeypatch.setattr(atk, "grasp_stability",
                        lambda *a, **k: SimpleNamespace(signed_margin=0.03))
    monkeypatch.setattr(atk, "laplacian_energy", lambda mesh: 0.005)


def test_objective_arithmetic(fake_metrics, cube):
    g = object()
    assert objective(cube, g, AttackConfig()).energy == pytest.approx(301.25)
    assert objective(cube, g, AttackConfig(mode=Mode.ALC)).energy == pytest.approx(1.25)
    assert objective(cube, g, AttackConfig(mode=Mode.AGS)).energy == pytest.approx(300.25)
    alc = objective(cube, g, AttackConfig(mode="alc"))
    assert alc.gs_signed is None
    assert objective(cube, g, AttackConfig(mode="alc"), need_all=True).gs_signed == 0.03


def test_infeasible_lift_counts_as_zero(monkeypatch, fake_metrics, cube):
    monkeypatch.setattr(atk, "lift_capability",
                        lambda *a, **k: SimpleNamespace(feasible=False, lc_value=float("nan")))
    t = objective(cube, object(), AttackConfig(mode=Mode.ALC))
    assert t.lc == 0.0 and not t.lc_feasible and t.energy == pytest.approx(0.25)


def test_weights_per_mode():
    assert AttackConfig().weights == {"lc": 1.0, "gs": 10000.0, "lap": 50.0}
    assert AttackConfig(mode=Mode.ALC).weights["gs"] == 0.0
    assert AttackConfig(mode=Mode.AGS).weights["lc"] == 0.0


def test_config_validation():
    for bad in (dict(alpha=1.0), dict(alpha=0.0), dict(t_min=2000.0), dict(t_min=0.0),
                dict(rounds=0), dict(perturb_scale=0.0), dict(proposals_per_step=0)):
        with pytest.raises(ValueError):
            AttackConfig(**bad)
    with pytest.raises(ValueError):
        AttackConfig(mode="nope")


def test_schedule_length():
    assert abs(AttackConfig().steps_per_round() - 912) <= 1
    assert AttackConfig(t0=1.0, t_min=1.0).steps_per_round() == 1
    assert AttackConfig(**FAST).steps_per_round() == 7


def test_propose_moves_one_point(cube):
    rig = build_cage(cube, 0.5)
    eps = AttackConfig().perturb_scale * 0.04
    assert eps == pytest.approx(0.002)
    disp = np.zeros_like(rig.control_points)
    rng = np.random.default_rng(3)
    for _ in range(200):
        j, delta, cand = propose(disp, rig, rng, eps)
        changed = np.flatnonzero(np.any(cand != disp, axis=1))
        assert changed.tolist() == [j]
        assert np.abs(delta).max() <= eps
        assert np.array_equal(cand[j] - disp[j], delta)
    a = propose(disp, rig, np.random.default_rng(9), eps)
    b = propose(disp, rig, np.random.default_rng(9), eps)
    assert a[0] == b[0] and np.array_equal(a[2], b[2])
    _, delta, cand = propose(disp, rig, rng, eps, single_point=False)
    assert delta.shape == disp.shape and np.abs(cand).max() <= eps


def test_metropolis_rule():
    rng = np.random.default_rng(0)
    assert all(accept(0.0, 1e-9, rng) for _ in range(100))
    assert all(accept(-5.0, 1e-9, rng) for _ in range(100))
    rate = np.mean([accept(10.0, 1000.0, rng) for _ in range(1000)])
    assert rate >= 0.98
    assert not any(accept(1.0, 1e-5, rng) for _ in range(100))
    rate = np.mean([accept(1.0, 1.0, rng) for _ in range(4000)])
    assert abs(rate - math.exp(-1)) < 0.03


@pytest.fixture(scope="module")
def box_2f(fixtures):
    mesh, grasps = fixtures["box"]
    return mesh, grasps["2f"]


def test_round_improves_and_keeps_topology(box_2f):
    mesh, grasp = box_2f
    cfg = AttackConfig(seed=1, **FAST)
    out, rep = anneal_round(mesh, grasp, cfg, 0.04, np.random.default_rng(1))
    assert rep.steps == 7 and rep.aborted is None
    assert rep.best.energy < rep.initial.energy
    assert out.faces is mesh.faces and out.vertices.shape == mesh.vertices.shape
    assert objective(out, grasp, cfg).energy == pytest.approx(rep.best.energy, rel=1e-9, abs=1e-12)


def test_greedy_schedule_never_accepts_uphill(box_2f):
    mesh, grasp = box_2f
    cfg = AttackConfig(seed=2, t0=1e-5, t_min=1e-5, proposals_per_step=6,
                       gs_directions=512, gs_refine_steps=40)
    _, rep = anneal_round(mesh, grasp, cfg, 0.04, np.random.default_rng(2))
    assert rep.steps == 1
    assert rep.best.energy <= rep.initial.energy


def test_run_attack_rounds_and_determinism(box_2f):
    mesh, grasp = box_2f
    cfg = AttackConfig(seed=5, rounds=2, **FAST)
    a = run_attack(mesh, grasp, cfg)
    b = run_attack(mesh, grasp, cfg)
    assert [r.cage_size for r in a.rounds] == [0.04, 0.02]
    assert a.rounds[1].n_control > a.rounds[0].n_control
    assert a.rounds[1].best.energy <= a.rounds[0].best.energy
    assert a.rounds[1].initial.energy == pytest.approx(a.rounds[0].best.energy, rel=1e-9)
    assert a.final.energy <= a.original.energy
    assert np.array_equal(a.mesh.vertices, b.mesh.vertices)
    assert a.final == b.final
    assert a.mesh.faces is mesh.faces
    assert a.original.gs_signed is not None and a.final.gs_signed is not None


def test_metric_failure_aborts_round(monkeypatch, box_2f):
    mesh, grasp = box_2f
    cfg = AttackConfig(seed=0, **FAST)
    real = atk.objective
    calls = {"n": 0}

    def flaky(m, g, c, need_all=False):
        calls["n"] += 1
        if calls["n"] == 4:
            raise atk.LPError("boom")
        return real(m, g, c, need_all)

    monkeypatch.setattr(atk, "objective", flaky)
    out, rep = anneal_round(mesh, grasp, cfg, 0.04, np.random.default_rng(0))
    assert rep.aborted and "boom" in rep.aborted
    assert rep.best.energy <= rep.initial.energy
    assert out.faces is mesh.faces
