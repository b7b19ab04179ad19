"""JSON grasp configuration files.

A document names a mesh (relative paths resolve against the config file's
directory), the friction and load parameters, and the contacts. A contact
is either ``{"face_index": i, "barycentric": [a, b, c]}`` or
``{"position": [x, y, z], "snap": true}``; snapped contacts are projected
onto the nearest surface point and rewritten to face form on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .contactmodel import FrictionParams, GraspConfig
from .meshcore import ContactBinding, MeshError, TriangleMesh, load_mesh, snap_to_surface

DEFAULTS = {
    "mass_kg": 1.0,
    "mu": 0.6,
    "gamma": 0.3,
    "cone_edges": 8,
    "per_finger_cap_n": 50.0,
    "centroid_method": "volume",
}
_KEYS = {"object_path", "contacts", *DEFAULTS}


class ConfigError(ValueError):
    """Malformed or unusable configuration."""


@dataclass(frozen=True)
class LoadedConfig:
    source: Path | None
    object_path: str
    mesh_path: Path
    mesh: TriangleMesh
    grasp: GraspConfig

    def echo(self) -> dict[str, Any]:
        """Normalized document: every field explicit, contacts in face form."""
        return grasp_document(self.object_path, self.grasp)


def _number(doc: dict, key: str) -> float:
    v = doc.get(key, DEFAULTS[key])
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{key} must be a finite number, got {v!r}")
    return float(v)


def _contact(mesh: TriangleMesh, item: Any, k: int) -> ContactBinding:
    if not isinstance(item, dict):
        raise ConfigError(f"contact {k} must be an object")
    try:
        if item.get("snap"):
            pos = item["position"]
            if len(pos) != 3:
                raise ConfigError(f"contact {k}: position needs 3 coordinates")
            return snap_to_surface(mesh, [float(x) for x in pos])
        b = ContactBinding(int(item["face_index"]), tuple(float(x) for x in item["barycentric"]))
        b.check(mesh)
        return b
    except KeyError as exc:
        raise ConfigError(f"contact {k}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"contact {k}: {exc}") from None


def parse_config(doc: Any, base_dir: Path, source: Path | None = None) -> LoadedConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - _KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "object_path" not in doc or not isinstance(doc["object_path"], str):
        raise ConfigError("object_path (string) is required")
    object_path = doc["object_path"]
    mesh_path = Path(object_path)
    if not mesh_path.is_absolute():
        mesh_path = base_dir / mesh_path
    if not mesh_path.is_file():
        raise ConfigError(f"mesh file not found: {mesh_path}")
    try:
        mesh = load_mesh(mesh_path)
    except OSError as exc:
        raise ConfigError(f"cannot read mesh {mesh_path}: {exc}") from None
    except MeshError as exc:
        raise ConfigError(f"invalid mesh {mesh_path}: {exc}") from None
    contacts = doc.get("contacts")
    if not isinstance(contacts, list) or not contacts:
        raise ConfigError("contacts must be a non-empty list")
    bindings = tuple(_contact(mesh, c, k) for k, c in enumerate(contacts))
    cone = doc.get("cone_edges", DEFAULTS["cone_edges"])
    if isinstance(cone, bool) or not isinstance(cone, int):
        raise ConfigError(f"cone_edges must be an integer, got {cone!r}")
    method = doc.get("centroid_method", DEFAULTS["centroid_method"])
    if method not in ("volume", "surface"):
        raise ConfigError(f"centroid_method must be 'volume' or 'surface', got {method!r}")
    try:
        friction = FrictionParams(_number(doc, "mu"), _number(doc, "gamma"), cone)
        grasp = GraspConfig(bindings, friction, _number(doc, "mass_kg"),
                            _number(doc, "per_finger_cap_n"), method)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return LoadedConfig(source, object_path, mesh_path, mesh, grasp)


def load_config(path: str | Path) -> LoadedConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(doc, path.parent, path)


def dump_config(doc: dict[str, Any], path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def grasp_document(object_path: str, grasp: GraspConfig) -> dict[str, Any]:
    """Document for an in-memory grasp (used when writing fixtures)."""
    return {
        "object_path": object_path,
        "mass_kg": grasp.mass,
        "mu": grasp.friction.mu,
        "gamma": grasp.friction.gamma,
        "cone_edges": grasp.friction.cone_edges,
        "per_finger_cap_n": grasp.per_finger_cap,
        "centroid_method": grasp.centroid_method,
        "contacts": [{"face_index": c.face_index, "barycentric": list(c.barycentric)}
                     for c in grasp.contacts],
    }
