"""Subdivision schemes, peripheral systems and coned-off triangulations.

Vertex ids are stable: every operation here keeps the ids of surviving
vertices and appends new ids above the current maximum, so labels computed at
different refinement depths can be compared vertex by vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .triangulation import MeshError, Triangulation


@dataclass(frozen=True)
class PeripheralSystem:
    """Disjoint simple edge-loops, ``loops[i]`` enclosing ``punctures[i]``.

    ``levels`` keeps the nested loops produced by :func:`puncture_refine`:
    ``levels[k][i]`` is the link of ``punctures[i]`` after ``k`` refinement
    steps.  ``loops`` is always the deepest level.
    """

    punctures: tuple[int, ...]
    loops: tuple[tuple[int, ...], ...]
    levels: tuple[tuple[tuple[int, ...], ...], ...] = ()

    def __post_init__(self):
        if len(self.punctures) != len(self.loops):
            raise MeshError("need exactly one loop per puncture")
        seen: set[int] = set()
        for loop in self.loops:
            if len(set(loop)) != len(loop):
                raise MeshError(f"peripheral loop {list(loop)} is not simple")
            if seen & set(loop):
                raise MeshError("peripheral loops are not vertex-disjoint")
            seen |= set(loop)

    @property
    def depth(self) -> int:
        return max(len(self.levels) - 1, 0)

    def at_level(self, k: int) -> "PeripheralSystem":
        if not 0 <= k < len(self.levels):
            raise MeshError(f"no peripheral level {k}")
        return PeripheralSystem(self.punctures, self.levels[k], self.levels[: k + 1])


def _next_id(T: Triangulation) -> int:
    return max(T.vertices) + 1


def barycentric_subdivide(T: Triangulation) -> Triangulation:
    """First barycentric subdivision: V' = V + E + F, F' = 6F.

    Edge midpoints get ids in sorted-edge order, then face barycenters in face
    order.
    """
    T.require_valid()
    nid = _next_id(T)
    mid = {}
    for e in T.edges:
        mid[e] = nid
        nid += 1
    faces = []
    for a, b, c in T.faces:
        g = nid
        nid += 1
        mab = mid[tuple(sorted((a, b)))]
        mbc = mid[tuple(sorted((b, c)))]
        mca = mid[tuple(sorted((c, a)))]
        faces += [
            (a, mab, g), (mab, b, g),
            (b, mbc, g), (mbc, c, g),
            (c, mca, g), (mca, a, g),
        ]
    verts = tuple(T.vertices) + tuple(range(max(T.vertices) + 1, nid))
    return Triangulation(verts, tuple(faces), T.marks, T.genus)


def stars_disjoint(T: Triangulation, P: Sequence[int]) -> bool:
    """True if the open stars of the vertices in ``P`` are pairwise disjoint."""
    P = list(P)
    return not any(T.adjacent(p, q) for i, p in enumerate(P) for q in P[i + 1:])


def _refine_once(T: Triangulation, P: Sequence[int]) -> Triangulation:
    # each star face (p, a, b) becomes (p, ma, mb), (ma, a, b), (ma, b, mb)
    nid = _next_id(T)
    star_faces = set()
    new_faces = []
    verts = list(T.vertices)
    for p in P:
        spoke = {}
        for a in T.link(p):
            spoke[a] = nid
            verts.append(nid)
            nid += 1
        for fi in T.vertex_faces[p]:
            f = T.faces[fi]
            i = f.index(p)
            a, b = f[(i + 1) % 3], f[(i + 2) % 3]
            ma, mb = spoke[a], spoke[b]
            star_faces.add(fi)
            new_faces += [(p, ma, mb), (ma, a, b), (ma, b, mb)]
    kept = [f for fi, f in enumerate(T.faces) if fi not in star_faces]
    return Triangulation(tuple(verts), tuple(kept + new_faces), T.marks, T.genus)


def puncture_refine(
    T: Triangulation, P: Iterable[int] | None = None, depth: int = 1
) -> tuple[Triangulation, PeripheralSystem]:
    """Refine the stars of the vertices in ``P`` self-similarly ``depth`` times.

    The star of each p keeps its combinatorial type, so its link length is the
    same at every depth.  If the stars of ``P`` overlap, ``T`` is first replaced
    by its barycentric subdivision (original ids survive).

    Returns the refined triangulation (with ``P`` marked) and the peripheral
    system whose ``levels`` are the links of each p after 0..depth steps.
    """
    P = tuple(T.marks if P is None else P)
    if depth < 0:
        raise MeshError("depth must be non-negative")
    T.require_valid()
    for p in P:
        T._check_vertex(p)
    if len(set(P)) != len(P):
        raise MeshError("repeated puncture vertex")
    if depth > 0 and not stars_disjoint(T, P):
        T = barycentric_subdivide(T)
        if not stars_disjoint(T, P):
            raise MeshError("stars of the punctures overlap after barycentric subdivision")
    marks = tuple(T.marks) + tuple(p for p in P if p not in T.marks)
    T = T.with_marks(marks)

    levels = [tuple(T.link(p) for p in P)]
    for _ in range(depth):
        T = _refine_once(T, P)
        levels.append(tuple(T.link(p) for p in P))
    return T, PeripheralSystem(P, levels[-1], tuple(levels))


def _region_faces(T: Triangulation, p: int, loop: Sequence[int]) -> set[int]:
    n = len(loop)
    barrier = {tuple(sorted((loop[i], loop[(i + 1) % n]))) for i in range(n)}
    for e in barrier:
        if e not in T.edge_faces:
            raise MeshError(f"peripheral loop uses a non-edge {list(e)}")
    start = set(T.vertex_faces[p])
    seen = set(start)
    stack = list(start)
    while stack:
        fi = stack.pop()
        f = T.faces[fi]
        for i in range(3):
            e = tuple(sorted((f[i], f[(i + 1) % 3])))
            if e in barrier:
                continue
            for g in T.edge_faces[e]:
                if g not in seen:
                    seen.add(g)
                    stack.append(g)
    return seen


def cone_off(T: Triangulation, C: PeripheralSystem) -> Triangulation:
    """Collapse the disk bounded by each peripheral loop to its puncture.

    Every vertex strictly inside loop ``c_i`` is deleted together with the
    faces of the disk, and the puncture ``p_i`` (same id) is re-inserted as
    the apex of a triangle fan over ``c_i``.  Outside the disks the output
    agrees with ``T``.
    """
    T.require_valid()
    drop_faces: set[int] = set()
    drop_verts: set[int] = set()
    fans = []
    for p, loop in zip(C.punctures, C.loops):
        T._check_vertex(p)
        for v in loop:
            T._check_vertex(v)
        if len(loop) < 3:
            raise MeshError(f"peripheral loop around {p} has length {len(loop)} < 3")
        if p in loop:
            raise MeshError(f"puncture {p} lies on its own peripheral loop")
        region = _region_faces(T, p, loop)
        if region & drop_faces:
            raise MeshError("peripheral disks overlap")
        rverts = {v for fi in region for v in T.faces[fi]}
        redges = {
            tuple(sorted((T.faces[fi][i], T.faces[fi][(i + 1) % 3])))
            for fi in region for i in range(3)
        }
        if not set(loop) <= rverts or len(rverts) - len(redges) + len(region) != 1:
            raise MeshError(f"loop around {p} does not bound a disk containing it")
        if len(region) == len(T.faces):
            raise MeshError(f"loop around {p} does not separate the surface")
        n = len(loop)
        for i in range(n):
            a, b = loop[i], loop[(i + 1) % n]
            fi = T.directed_edges.get((a, b))
            if fi in region:
                fans.append((p, a, b))
            elif T.directed_edges.get((b, a)) in region:
                fans.append((p, b, a))
            else:
                raise MeshError(f"loop edge {[a, b]} is not on the boundary of the disk around {p}")
        drop_faces |= region
        drop_verts |= rverts - set(loop)

    faces = [f for fi, f in enumerate(T.faces) if fi not in drop_faces] + fans
    verts = [v for v in T.vertices if v not in drop_verts] + list(C.punctures)
    marks = [m for m in T.marks if m not in drop_verts or m in C.punctures]
    marks += [p for p in C.punctures if p not in marks]
    out = Triangulation(tuple(verts), tuple(faces), tuple(marks), T.genus)
    rep = out.validate()
    if not rep.valid:
        raise MeshError("coned-off complex is not simplicial: " + "; ".join(rep.violations))
    return out
