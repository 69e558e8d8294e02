"""Triangulated surfaces: data model, subdivision, coning off, generators."""

from __future__ import annotations

import math
from typing import Iterable

from .generate import GENERATORS, generate
from .refine import PeripheralSystem, barycentric_subdivide, cone_off, puncture_refine, stars_disjoint
from .triangulation import Face, MeshError, Triangulation, ValidationReport


def validate(T: Triangulation) -> ValidationReport:
    return T.validate()


def star_faces(T: Triangulation, V: Iterable[int]) -> set[Face]:
    return T.star_faces(V)


def face_excess(T: Triangulation, spec, V: Iterable[int]) -> float:
    """pi * F_V - sum of target angles over V, where F_V counts faces meeting V.

    Positive for every nonempty proper V whenever a hyperbolic cone metric
    with the prescribed angles exists.
    """
    V = set(V)
    if not V:
        raise MeshError("vertex subset must be nonempty")
    return math.pi * len(T.star_faces(V)) - sum(spec.target(v) for v in V)


__all__ = [
    "Face", "GENERATORS", "MeshError", "PeripheralSystem", "Triangulation", "ValidationReport",
    "barycentric_subdivide", "cone_off", "face_excess", "generate", "puncture_refine",
    "star_faces", "stars_disjoint", "validate",
]
