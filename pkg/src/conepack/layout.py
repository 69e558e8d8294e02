"""Development of a solved packing into the Poincare disk.

Faces are laid out along a breadth-first spanning tree of the dual graph.
Each developed face carries a frame: an orientation-preserving disk isometry
taking the face's canonical picture (first vertex at 0, second on the
positive real axis) to its position in the disk.  Crossing a tree edge
composes frames, so no coordinates are ever propagated point by point.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .hypgeom import INF, tangency_angle
from .mesh import Triangulation

Mobius = tuple[complex, complex]  # (a, b) for z -> (a z + b) / (conj(b) z + conj(a)), |a|^2 - |b|^2 = 1

IDENTITY: Mobius = (1 + 0j, 0j)
COPY_TOL = 1e-6
PLACEMENT_TOL = 1e-6
EDGE_DIGITS = 6


class LayoutError(RuntimeError):
    pass


def mob_apply(m: Mobius, z: complex) -> complex:
    a, b = m
    return (a * z + b) / (b.conjugate() * z + a.conjugate())


def mob_compose(m: Mobius, n: Mobius) -> Mobius:
    """m after n, renormalized to |a|^2 - |b|^2 = 1."""
    a1, b1 = m
    a2, b2 = n
    a = a1 * a2 + b1 * b2.conjugate()
    b = a1 * b2 + b1 * a2.conjugate()
    s = math.sqrt(abs(a) ** 2 - abs(b) ** 2)
    return a / s, b / s


def mob_inverse(m: Mobius) -> Mobius:
    a, b = m
    return a.conjugate(), -b


def mob_translate(p: complex) -> Mobius:
    """Isometry taking 0 to p along the geodesic through them."""
    s = math.sqrt(1.0 - abs(p) ** 2)
    return 1.0 / s + 0j, p / s


def mob_rotate(phi: float) -> Mobius:
    return cmath.exp(0.5j * phi), 0j


def edge_frame(p: complex, q: complex) -> Mobius:
    """Isometry taking 0 to p and the positive real axis to the ray from p towards q."""
    t = mob_translate(p)
    w = mob_apply(mob_inverse(t), q)
    return mob_compose(t, mob_rotate(cmath.phase(w)))


def hyp_dist(z: complex, w: complex) -> float:
    num = abs(z - w)
    den = abs(1 - w.conjugate() * z)
    return 2.0 * math.atanh(min(num / den, 1.0 - 1e-16))


def angle_at(c: complex, a: complex, b: complex) -> float:
    """Counterclockwise angle at c from the geodesic towards a to the one towards b, in (-pi, pi]."""
    t = mob_inverse(mob_translate(c))
    return cmath.phase(mob_apply(t, b) / mob_apply(t, a))


def euclidean_circle(c: complex, R: float) -> tuple[complex, float]:
    """Euclidean center and radius of the hyperbolic circle of radius R about c."""
    t = math.tanh(0.5 * R)
    c2 = abs(c) ** 2
    den = 1.0 - c2 * t * t
    return c * (1.0 - t * t) / den, t * (1.0 - c2) / den


def _canonical_face(radii3) -> tuple[complex, complex, complex]:
    r0, r1, r2 = radii3
    alpha = tangency_angle(r0, r1, r2)
    return 0j, complex(math.tanh(0.5 * (r0 + r1))), math.tanh(0.5 * (r0 + r2)) * cmath.exp(1j * alpha)


@dataclass
class Circle:
    vertex: int
    copy: int
    center: complex
    hyp_radius: float
    euc_center: complex
    euc_radius: float

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "copy": self.copy,
            "center": [self.center.real, self.center.imag],
            "hyp_radius": self.hyp_radius,
            "euc_center": [self.euc_center.real, self.euc_center.imag],
            "euc_radius": self.euc_radius,
        }


@dataclass
class PackingLayout:
    circles: list[Circle] = field(default_factory=list)
    # face index -> (circle index per corner), in the face's stored vertex order
    faces: dict[int, tuple[int, int, int]] = field(default_factory=dict)
    tree_edges: list[tuple[int, int, tuple[int, int]]] = field(default_factory=list)
    residuals: dict[tuple[int, int], float] = field(default_factory=dict)
    holonomy: dict[tuple[int, int], float] = field(default_factory=dict)
    root_face: int | None = None
    excluded: list[int] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def first_copies(self) -> dict[int, Circle]:
        out = {}
        for c in self.circles:
            if c.copy == 0:
                out[c.vertex] = c
        return out

    def to_dict(self) -> dict:
        return {
            "circles": [c.to_dict() for c in self.circles],
            "faces": [{"face": fi, "circles": list(cs)} for fi, cs in sorted(self.faces.items())],
            "tree_edges": [
                {"from": a, "to": b, "edge": list(e)} for a, b, e in self.tree_edges
            ],
            "max_residual": self.max_residual,
            "holonomy_mismatch": [
                {"edge": list(e), "mismatch": h} for e, h in sorted(self.holonomy.items())
            ],
            "root_face": self.root_face,
            "excluded_vertices": self.excluded,
        }


def dual_tree(T: Triangulation, root_face: int = 0) -> list[tuple[int, int, tuple[int, int]]]:
    """Breadth-first spanning tree of the dual graph; lower face ids are visited first."""
    seen = {root_face}
    order = []
    queue = deque([root_face])
    while queue:
        fi = queue.popleft()
        f = T.faces[fi]
        nbrs = []
        for i in range(3):
            a, b = f[i], f[(i + 1) % 3]
            g = T.directed_edges[(b, a)]
            nbrs.append((g, (a, b)))
        for g, e in sorted(nbrs):
            if g not in seen:
                seen.add(g)
                order.append((fi, g, e))
                queue.append(g)
    return order


def develop(
    T: Triangulation,
    radii,
    root_face: int = 0,
    tree: list[tuple[int, int, tuple[int, int]]] | None = None,
) -> PackingLayout:
    """Lay out every face of ``T`` along a dual spanning tree rooted at ``root_face``.

    ``radii`` maps vertex -> hyperbolic radius (a :class:`~conepack.solver.Label`
    works too).  A vertex reached through different branches at different
    positions gets one circle per position (``copy`` 0, 1, ...).
    """
    radii = getattr(radii, "radii", radii)
    inf_vertices = sorted(v for v in T.vertices if radii[v] == INF)
    if inf_vertices:
        raise LayoutError(f"horocyclic circles are not laid out (vertices {inf_vertices})")
    for v in T.vertices:
        if not radii[v] > 0 or math.isnan(radii[v]):
            raise LayoutError(f"non-finite or non-positive radius at vertex {v}")
    if not 0 <= root_face < T.num_faces:
        raise LayoutError(f"root face {root_face} out of range")
    if tree is None:
        tree = dual_tree(T, root_face)

    layout = PackingLayout(root_face=root_face)
    local = {}
    frames: dict[int, Mobius] = {root_face: IDENTITY}
    copies: dict[int, list[int]] = {}

    def local_pts(fi):
        if fi not in local:
            local[fi] = _canonical_face([radii[v] for v in T.faces[fi]])
        return local[fi]

    def place(fi):
        f = T.faces[fi]
        pts = [mob_apply(frames[fi], p) for p in local_pts(fi)]
        ids = []
        for v, z in zip(f, pts):
            if abs(z) >= 1.0:
                raise LayoutError(f"vertex {v} developed outside the disk")
            match = None
            for ci in copies.get(v, []):
                if hyp_dist(layout.circles[ci].center, z) < COPY_TOL:
                    match = ci
                    break
            if match is None:
                match = len(layout.circles)
                ec, er = euclidean_circle(z, radii[v])
                layout.circles.append(Circle(v, len(copies.get(v, [])), z, radii[v], ec, er))
                copies.setdefault(v, []).append(match)
            ids.append(match)
        layout.faces[fi] = tuple(ids)
        for i in range(3):
            u, w = f[i], f[(i + 1) % 3]
            d = hyp_dist(pts[i], pts[(i + 1) % 3])
            key = (min(u, w), max(u, w))
            layout.residuals[key] = max(layout.residuals.get(key, 0.0), abs(d - radii[u] - radii[w]))

    place(root_face)
    tree_set = set()
    for fi, g, (a, b) in tree:
        f, h = T.faces[fi], T.faces[g]
        pf, ph = local_pts(fi), local_pts(g)
        # frame of g: match the edge frame at b pointing to a in both faces
        ef = edge_frame(pf[f.index(b)], pf[f.index(a)])
        eg = edge_frame(ph[h.index(b)], ph[h.index(a)])
        frames[g] = mob_compose(frames[fi], mob_compose(ef, mob_inverse(eg)))
        for v in (a, b):
            z_old = mob_apply(frames[fi], pf[f.index(v)])
            z_new = mob_apply(frames[g], ph[h.index(v)])
            if hyp_dist(z_old, z_new) > PLACEMENT_TOL:
                raise LayoutError(f"placement residual {hyp_dist(z_old, z_new):.3e} at vertex {v}")
        place(g)
        layout.tree_edges.append((fi, g, (a, b)))
        tree_set.add((min(a, b), max(a, b)))

    for e, (f1, f2) in T.edge_faces.items():
        if e in tree_set or f1 not in layout.faces or f2 not in layout.faces:
            continue
        worst = 0.0
        for v in e:
            c1 = layout.circles[layout.faces[f1][T.faces[f1].index(v)]].center
            c2 = layout.circles[layout.faces[f2][T.faces[f2].index(v)]].center
            worst = max(worst, hyp_dist(c1, c2))
        layout.holonomy[e] = worst
    return layout


@dataclass
class VerificationReport:
    max_residual: float = 0.0
    angle_closure: dict[int, tuple[float, float]] = field(default_factory=dict)
    radii_in_disk: bool = True
    positively_oriented: bool = True
    flagged: list[str] = field(default_factory=list)

    @property
    def max_angle_error(self) -> float:
        return max((abs(a - t) for a, t in self.angle_closure.values()), default=0.0)

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "max_angle_error": self.max_angle_error,
            "angle_closure": {str(v): {"developed": a, "target": t} for v, (a, t) in sorted(self.angle_closure.items())},
            "radii_in_disk": self.radii_in_disk,
            "positively_oriented": self.positively_oriented,
            "flagged": self.flagged,
        }


def verify_layout(layout: PackingLayout, T: Triangulation, radii, spec, tol: float = 1e-8) -> VerificationReport:
    """Tangency residuals, developed angle sums around vertices whose whole star
    shares one circle copy, and disk/orientation sanity checks."""
    rep = VerificationReport()
    if not layout.circles:
        return rep
    rep.max_residual = layout.max_residual
    if rep.max_residual > tol:
        rep.flagged.append(f"tangency residual {rep.max_residual:.3e} exceeds {tol:g}")
    rep.radii_in_disk = all(0.0 < c.euc_radius < 1.0 for c in layout.circles)
    corner_angles: dict[int, list[float]] = {}
    corner_copy: dict[int, set[int]] = {}
    for fi, ids in layout.faces.items():
        f = T.faces[fi]
        cs = [layout.circles[i].center for i in ids]
        for i in range(3):
            ang = angle_at(cs[i], cs[(i + 1) % 3], cs[(i + 2) % 3])
            if ang <= 0.0:
                rep.positively_oriented = False
            corner_angles.setdefault(f[i], []).append(ang)
            corner_copy.setdefault(f[i], set()).add(ids[i])
    for v in T.vertices:
        if len(corner_copy.get(v, ())) == 1 and len(corner_angles[v]) == len(T.vertex_faces[v]):
            total = math.fsum(corner_angles[v])
            rep.angle_closure[v] = (total, spec.target(v))
            if abs(total - spec.target(v)) > tol:
                rep.flagged.append(f"angle closure at {v}: {total:.12g} vs {spec.target(v):.12g}")
    if not rep.radii_in_disk:
        rep.flagged.append("Euclidean radius outside (0, 1)")
    if not rep.positively_oriented:
        rep.flagged.append("negatively oriented developed face")
    return rep


def render_svg(layout: PackingLayout, style: dict | None = None) -> str:
    style = {"edges": False, "stroke": "#1f4e79", "fill": "none", "width": 0.003, "size": 800, **(style or {})}
    fmt = f".{EDGE_DIGITS}f"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style["size"]}" height="{style["size"]}" '
        'viewBox="-1.05 -1.05 2.1 2.1">',
        '<g transform="scale(1,-1)">',
        f'<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="{style["width"]}"/>',
    ]
    for c in layout.circles:
        out.append(
            f'<circle cx="{c.euc_center.real:{fmt}}" cy="{c.euc_center.imag:{fmt}}" r="{c.euc_radius:{fmt}}" '
            f'fill="{style["fill"]}" stroke="{style["stroke"]}" stroke-width="{style["width"]}" '
            f'data-vertex="{c.vertex}" data-copy="{c.copy}"/>'
        )
    if style["edges"]:
        seen = set()
        for fi, ids in sorted(layout.faces.items()):
            for i in range(3):
                e = tuple(sorted((ids[i], ids[(i + 1) % 3])))
                if e in seen:
                    continue
                seen.add(e)
                p, q = layout.circles[e[0]].center, layout.circles[e[1]].center
                out.append(
                    f'<line x1="{p.real:{fmt}}" y1="{p.imag:{fmt}}" x2="{q.real:{fmt}}" y2="{q.imag:{fmt}}" '
                    f'stroke="gray" stroke-width="{0.5 * style["width"]}"/>'
                )
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def export_svg(layout: PackingLayout, path, style: dict | None = None) -> Path:
    path = Path(path)
    try:
        path.write_text(render_svg(layout, style), encoding="utf-8")
    except OSError as exc:
        raise LayoutError(f"cannot write {path}: {exc}") from exc
    return path
