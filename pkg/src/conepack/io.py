"""JSON formats for instances, refinement families, labels and reports."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .angles import AngleSpec, parse_angle
from .limit import ExhaustionFamily
from .mesh import Triangulation
from .solver import Label


class InputError(ValueError):
    """Malformed or unreadable input file."""


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def write_json(path, data) -> None:
    text = json.dumps(data, indent=2, sort_keys=False, allow_nan=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def instance_from_dict(data: dict) -> tuple[Triangulation, AngleSpec]:
    try:
        faces = [tuple(int(v) for v in f) for f in data["faces"]]
        ids, marks, angles = [], [], {}
        for entry in data["vertices"]:
            v = int(entry["id"])
            ids.append(v)
            th = entry.get("cone_angle")
            if th is not None:
                marks.append(v)
                angles[v] = parse_angle(th)
        genus = data.get("genus")
        genus = None if genus is None else int(genus)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed triangulation: {exc!r}") from exc
    if any(len(f) != 3 for f in faces):
        raise InputError("every face needs exactly three vertices")
    if len(set(ids)) != len(ids):
        raise InputError("repeated vertex id")
    if {v for f in faces for v in f} - set(ids):
        raise InputError("face uses an undeclared vertex")
    try:
        spec = AngleSpec(angles)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return Triangulation(tuple(ids), tuple(faces), tuple(marks), genus), spec


def instance_to_dict(T: Triangulation, spec: AngleSpec | None = None) -> dict:
    spec = spec or AngleSpec()
    verts = []
    for v in T.vertices:
        verts.append({"id": v, "cone_angle": spec.cone_angles.get(v)})
    return {
        "genus": T.genus if T.genus is not None else T.inferred_genus,
        "vertices": verts,
        "faces": [list(f) for f in T.faces],
    }


def load_instance(path) -> tuple[Triangulation, AngleSpec]:
    return instance_from_dict(read_json(path))


def family_from_dict(data: dict, allow_large_angles: bool = False) -> ExhaustionFamily:
    try:
        T, spec = instance_from_dict(data["base"])
        P = tuple(int(v) for v in data["refine_at"])
        if "depths" in data:
            depths = tuple(int(d) for d in data["depths"])
        else:
            depths = tuple(range(1, int(data["depth"]) + 1))
        if "theta" in data:
            theta = tuple(parse_angle(t) for t in data["theta"])
        else:
            missing = [p for p in P if p not in spec.cone_angles]
            if missing:
                raise InputError(f"no cone angle given for punctures {missing}")
            theta = tuple(spec.cone_angles[p] for p in P)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed refinement family: {exc!r}") from exc
    return ExhaustionFamily(T.with_marks(P), depths, theta, P, allow_large_angles=allow_large_angles)


def family_to_dict(fam: ExhaustionFamily) -> dict:
    spec = AngleSpec(dict(zip(fam.punctures, fam.theta)))
    base = fam.base.with_marks(fam.punctures)
    return {"base": instance_to_dict(base, spec), "refine_at": list(fam.punctures), "depth": max(fam.depths)}


def load_label(path) -> Label:
    try:
        return Label.from_dict(read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed label: {exc!r}") from exc


def format_pi(x: float) -> str:
    q = x / math.pi
    return f"{q:.6g}π" if q != 0 else "0"
