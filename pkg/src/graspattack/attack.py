"""Simulated-annealing shape attack over cage control-point displacements."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .cagedeform import CageRig, build_cage
from .contactmodel import GraspConfig
from .meshcore import MeshError, TriangleMesh, laplacian_energy
from .quality.lift import lift_capability
from .quality.margin import grasp_stability
from .quality.simplex import LPError

log = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    ALC = "alc"
    AGS = "ags"
    ADVGRASP = "advgrasp"


@dataclass(frozen=True)
class AttackConfig:
    mode: Mode = Mode.ADVGRASP
    lambda1: float = 10000.0
    lambda2: float = 50.0
    t0: float = 1000.0
    t_min: float = 1e-5
    alpha: float = 0.98
    cage_size0: float = 0.04
    rounds: int = 5
    perturb_scale: float = 0.05
    seed: int = 0
    proposals_per_step: int = 1
    single_point_moves: bool = True
    inflation: float = 0.05
    gs_directions: int = 8192
    gs_refine_steps: int = 200
    lc_norm: str = "inf"

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not self.t_min <= self.t0:
            raise ValueError("t_min must not exceed t0")
        if self.t_min <= 0:
            raise ValueError("t_min must be positive")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.perturb_scale <= 0 or self.cage_size0 <= 0:
            raise ValueError("perturb_scale and cage_size0 must be positive")
        if self.proposals_per_step < 1:
            raise ValueError("proposals_per_step must be >= 1")

    @property
    def weights(self) -> dict[str, float]:
        """Coefficients on (LC, signed GS, Lap) for the configured mode."""
        lc = 0.0 if self.mode is Mode.AGS else 1.0
        gs = 0.0 if self.mode is Mode.ALC else self.lambda1
        return {"lc": lc, "gs": gs, "lap": self.lambda2}

    def steps_per_round(self) -> int:
        """Temperature steps while ``T >= t_min``."""
        n, t = 0, self.t0
        while t >= self.t_min:
            n += 1
            t *= self.alpha
        return n

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d


@dataclass(frozen=True)
class ObjectiveTerms:
    energy: float
    lc: float
    gs_signed: float | None
    lap: float
    lc_feasible: bool = True

    def to_dict(self) -> dict:
        return {"energy": self.energy, "lc": self.lc, "gs_signed": self.gs_signed,
                "gs": None if self.gs_signed is None else max(self.gs_signed, 0.0),
                "lap": self.lap, "lc_feasible": self.lc_feasible}


def objective(mesh: TriangleMesh, grasp: GraspConfig, config: AttackConfig,
              need_all: bool = False) -> ObjectiveTerms:
    """Weighted energy ``w_lc LC + w_gs GS_signed + lambda2 Lap``.

    Terms with zero weight are skipped unless ``need_all``. An infeasible
    lift LP counts as ``LC = 0``: the grasp already cannot lift the object.
    """
    w = config.weights
    lc, feasible = 0.0, True
    if w["lc"] or need_all:
        sol = lift_capability(mesh, grasp, config.lc_norm)
        feasible = sol.feasible
        lc = sol.lc_value if feasible else 0.0
        if not np.isfinite(lc):
            raise LPError("lift capability is unbounded for a zero load")
    gs = None
    if w["gs"] or need_all:
        gs = grasp_stability(mesh, grasp, directions=config.gs_directions,
                             refine_steps=config.gs_refine_steps).signed_margin
    lap = laplacian_energy(mesh)
    energy = w["lc"] * lc + (w["gs"] * gs if w["gs"] else 0.0) + w["lap"] * lap
    return ObjectiveTerms(float(energy), float(lc), gs, float(lap), feasible)


def perturbation_bound(config: AttackConfig, cage_size: float) -> float:
    return config.perturb_scale * cage_size


def propose(displacements: np.ndarray, rig: CageRig, rng: np.random.Generator,
            epsilon: float, single_point: bool = True):
    """Candidate displacements.

    Single-point moves pick one control point uniformly and add a uniform
    offset in ``[-epsilon, epsilon]^3``. Returns ``(index, delta, candidate)``;
    ``index`` is ``None`` for all-point moves.
    """
    cand = displacements.copy()
    if single_point:
        j = int(rng.integers(rig.n_control))
        delta = rng.uniform(-epsilon, epsilon, size=3)
        cand[j] += delta
        return j, delta, cand
    delta = rng.uniform(-epsilon, epsilon, size=displacements.shape)
    return None, delta, cand + delta


def accept(delta_e: float, temperature: float, rng: np.random.Generator) -> bool:
    """Metropolis rule."""
    if delta_e <= 0:
        return True
    return bool(rng.random() < math.exp(-delta_e / temperature))


@dataclass
class RoundReport:
    round: int
    cage_size: float
    n_control: int
    steps: int
    accepted: int
    initial: ObjectiveTerms
    best: ObjectiveTerms
    aborted: str | None = None

    def to_dict(self) -> dict:
        return {"round": self.round, "cage_size": self.cage_size, "n_control": self.n_control,
                "steps": self.steps, "accepted": self.accepted, "aborted": self.aborted,
                "initial": self.initial.to_dict(), "best": self.best.to_dict()}


@dataclass
class AttackResult:
    mesh: TriangleMesh
    rounds: list[RoundReport] = field(default_factory=list)
    original: ObjectiveTerms | None = None
    final: ObjectiveTerms | None = None


@dataclass
class AttackState:
    """Annealing chain state. ``best_energy <= current_energy`` always."""

    displacements: np.ndarray
    vertices: np.ndarray
    temperature: float
    current: ObjectiveTerms
    best: ObjectiveTerms
    best_mesh: TriangleMesh

    @property
    def current_energy(self) -> float:
        return self.current.energy

    @property
    def best_energy(self) -> float:
        return self.best.energy


def anneal_round(mesh: TriangleMesh, grasp: GraspConfig, config: AttackConfig,
                 cage_size: float, rng: np.random.Generator, round_index: int = 0):
    """One annealing chain at a fixed cage resolution.

    Returns ``(best_mesh, RoundReport)``; the report's ``best.energy`` is the
    best energy seen. A metric failure on a candidate ends the round early
    and keeps the best found so far.
    """
    rig = build_cage(mesh, cage_size, config.inflation)
    eps = perturbation_bound(config, cage_size)
    start = objective(mesh, grasp, config)
    state = AttackState(np.zeros_like(rig.control_points), np.array(mesh.vertices),
                        config.t0, start, start, mesh)
    steps = accepted = 0
    aborted = None
    while state.temperature >= config.t_min and aborted is None:
        for _ in range(config.proposals_per_step):
            j, delta, cand_disp = propose(state.displacements, rig, rng, eps,
                                          config.single_point_moves)
            if j is None:
                cand_v = state.vertices + rig.weights @ delta
            else:
                cand_v = state.vertices + np.outer(rig.weights[:, j], delta)
            cand_mesh = mesh.with_vertices(cand_v)
            try:
                terms = objective(cand_mesh, grasp, config)
            except (MeshError, LPError) as exc:
                aborted = f"{type(exc).__name__}: {exc}"
                log.warning("round %d aborted at step %d: %s", round_index, steps, aborted)
                break
            if accept(terms.energy - state.current_energy, state.temperature, rng):
                accepted += 1
                state.current, state.vertices, state.displacements = terms, cand_v, cand_disp
                if terms.energy < state.best_energy:
                    state.best, state.best_mesh = terms, cand_mesh
        steps += 1
        state.temperature *= config.alpha
    report = RoundReport(round_index, cage_size, rig.n_control, steps, accepted,
                         _full_terms(mesh, grasp, config, start),
                         _full_terms(state.best_mesh, grasp, config, state.best), aborted)
    return state.best_mesh, report


def _full_terms(mesh, grasp, config, terms: ObjectiveTerms) -> ObjectiveTerms:
    """Fill in components the mode skipped, keeping the mode's energy."""
    if terms.gs_signed is not None and config.weights["lc"]:
        return terms
    full = objective(mesh, grasp, config, need_all=True)
    return replace(full, energy=terms.energy)


def run_attack(mesh: TriangleMesh, grasp: GraspConfig, config: AttackConfig) -> AttackResult:
    """Multi-resolution attack: the cage spacing halves each round and the
    best mesh of a round seeds the next."""
    rng = np.random.default_rng(config.seed)
    result = AttackResult(mesh)
    result.original = objective(mesh, grasp, config, need_all=True)
    current = mesh
    for r in range(config.rounds):
        cage_size = config.cage_size0 / 2 ** r
        current, report = anneal_round(current, grasp, config, cage_size, rng, r)
        log.info("round %d cage %.4g: energy %.6g -> %.6g (%d/%d accepted)", r, cage_size,
                 report.initial.energy, report.best.energy, report.accepted, report.steps)
        result.rounds.append(report)
    result.mesh = current
    result.final = result.rounds[-1].best
    return result
