"""Command-line front end.

Exit status: 0 on success, 2 for usage, configuration or file errors, 3 for
numerical failures inside the metrics.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .attack import AttackConfig, Mode, run_attack
from .config import ConfigError, LoadedConfig, dump_config, grasp_document, load_config
from .contactmodel import GraspConfig, grasp_primitives, gravity_wrench
from .evalharness import evaluate
from .fixtures import fixture_set
from .meshcore import MeshError, TriangleMesh, format_obj, load_mesh, save_mesh
from .quality.lift import feasible_under_cap, lift_capability
from .quality.margin import EXACT_MAX_POINTS, unique_rows, grasp_stability
from .quality.simplex import LPError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

AUTO_EXACT_POINTS = 24  # C(24, 6) subsets keeps the exact margin around a second

log = logging.getLogger("graspattack")


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n"


def _json_default(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _finite(x: float) -> float | None:
    return float(x) if x == x and abs(x) != float("inf") else None


def _stability(mesh: TriangleMesh, grasp: GraspConfig, exact: bool) -> dict:
    n_unique = len(unique_rows(grasp_primitives(mesh, grasp).primitives))
    use_exact = n_unique <= EXACT_MAX_POINTS if exact else n_unique <= AUTO_EXACT_POINTS
    gs = grasp_stability(mesh, grasp, exact=use_exact)
    return {"gs_signed": gs.signed_margin, "gs": gs.gs_value, "gs_method": gs.method,
            "gs_degenerate": gs.degenerate}


def quality_report(mesh: TriangleMesh, grasp: GraspConfig, exact: bool = False) -> dict:
    lift = lift_capability(mesh, grasp)
    doc = {
        "lc": _finite(lift.lc_value),
        "lc_feasible": lift.feasible,
        "min_max_normal_force": _finite(lift.min_max_normal_force),
    }
    doc.update(_stability(mesh, grasp, exact))
    doc["evaluation"] = evaluate(mesh, grasp).to_dict()
    return doc


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise _Failure(EXIT_CONFIG, f"cannot write {path}: {exc}") from None


def cmd_quality(args) -> dict:
    cfg = load_config(args.config)
    return {"config": cfg.echo(), "quality": quality_report(cfg.mesh, cfg.grasp, args.exact_gs),
            "version": __version__}


def cmd_evaluate(args) -> dict:
    cfg = load_config(args.config)
    mesh = cfg.mesh
    if args.mesh:
        try:
            mesh = load_mesh(args.mesh)
        except FileNotFoundError:
            raise ConfigError(f"mesh file not found: {args.mesh}") from None
        except (OSError, MeshError) as exc:
            raise ConfigError(f"invalid mesh {args.mesh}: {exc}") from None
        if mesh.faces.shape != cfg.mesh.faces.shape or (mesh.faces != cfg.mesh.faces).any():
            raise ConfigError("evaluated mesh must share the configured mesh's faces")
    report = evaluate(mesh, cfg.grasp, args.directions)
    return {"config": cfg.echo(), "mesh": str(args.mesh) if args.mesh else cfg.object_path,
            "evaluation": report.to_dict(), "version": __version__}


def attack_config(args) -> AttackConfig:
    try:
        return AttackConfig(
            mode=Mode(args.mode), lambda1=args.lambda1, lambda2=args.lambda2, t0=args.t0,
            t_min=args.t_min, alpha=args.alpha, cage_size0=args.cage_size, rounds=args.rounds,
            perturb_scale=args.perturb_scale, seed=args.seed,
            proposals_per_step=args.proposals_per_step,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def attack_report(cfg: LoadedConfig, acfg: AttackConfig, exact: bool = False):
    result = run_attack(cfg.mesh, cfg.grasp, acfg)
    before, after = cfg.mesh, result.mesh
    doc = {
        "version": __version__,
        "seed": acfg.seed,
        "config": cfg.echo(),
        "attack": acfg.to_dict(),
        "objective_weights": acfg.weights,
        "rounds": [r.to_dict() for r in result.rounds],
        "original": result.original.to_dict(),
        "final": result.final.to_dict(),
        "quality": {"before": quality_report(before, cfg.grasp, exact),
                    "after": quality_report(after, cfg.grasp, exact)},
    }
    return result, doc


def cmd_attack(args) -> dict:
    cfg = load_config(args.config)
    acfg = attack_config(args)
    result, doc = attack_report(cfg, acfg, args.exact_gs)
    _write_text(Path(args.out), format_obj(result.mesh))
    doc["output_mesh"] = str(args.out)
    if args.report:
        _write_text(Path(args.report), _dumps(doc))
        return {}
    return doc


def write_fixtures(out_dir: Path) -> list[Path]:
    """Write the synthetic meshes and their 2- and 3-contact grasp configs."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (mesh, grasps) in fixture_set().items():
        obj = out_dir / f"{name}.obj"
        if not mesh.is_watertight:
            raise _Failure(EXIT_NUMERICAL, f"fixture {name} is not watertight")
        save_mesh(mesh, obj)
        written.append(obj)
        for gname, grasp in grasps.items():
            if not feasible_under_cap(mesh, grasp, grasp.per_finger_cap, gravity_wrench(grasp.mass)):
                raise _Failure(EXIT_NUMERICAL, f"fixture grasp {name}_{gname} fails at the force cap")
            path = out_dir / f"{name}_{gname}.json"
            dump_config(grasp_document(obj.name, grasp), path)
            written.append(path)
    return written


def cmd_fixtures(args) -> dict:
    try:
        paths = write_fixtures(Path(args.out_dir))
    except OSError as exc:
        raise _Failure(EXIT_CONFIG, f"cannot write fixtures: {exc}") from None
    return {"written": [str(p) for p in paths]}


def build_parser() -> argparse.ArgumentParser:
    d = AttackConfig()
    p = argparse.ArgumentParser(prog="graspattack", description="Adversarial shape attacks on fixed grasps.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quality", help="lift capability, stability margin and evaluation metrics")
    q.add_argument("config")
    q.add_argument("--exact-gs", action="store_true", help="use the exact margin whenever feasible")
    q.set_defaults(func=cmd_quality)

    e = sub.add_parser("evaluate", help="MinGF / MaxLM / MaxED for a grasp")
    e.add_argument("config")
    e.add_argument("--mesh", help="evaluate this mesh (same faces) instead of the configured one")
    e.add_argument("--directions", type=int, default=50)
    e.set_defaults(func=cmd_evaluate)

    a = sub.add_parser("attack", help="deform the object to weaken the grasp")
    a.add_argument("config")
    a.add_argument("--mode", choices=[m.value for m in Mode], default=d.mode.value)
    a.add_argument("--seed", type=int, default=d.seed)
    a.add_argument("--rounds", type=int, default=d.rounds)
    a.add_argument("--cage-size", type=float, default=d.cage_size0)
    a.add_argument("--lambda1", type=float, default=d.lambda1)
    a.add_argument("--lambda2", type=float, default=d.lambda2)
    a.add_argument("--t0", type=float, default=d.t0)
    a.add_argument("--t-min", type=float, default=d.t_min)
    a.add_argument("--alpha", type=float, default=d.alpha)
    a.add_argument("--perturb-scale", type=float, default=d.perturb_scale)
    a.add_argument("--proposals-per-step", type=int, default=d.proposals_per_step)
    a.add_argument("--exact-gs", action="store_true", help="exact margin in the before/after report")
    a.add_argument("--out", required=True, help="adversarial mesh (OBJ)")
    a.add_argument("--report", help="report path (JSON); standard output if omitted")
    a.set_defaults(func=cmd_attack)

    f = sub.add_parser("fixtures", help="write the synthetic objects and grasp configs")
    f.add_argument("out_dir")
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        doc = args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LPError, MeshError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    if doc:
        sys.stdout.write(_dumps(doc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
