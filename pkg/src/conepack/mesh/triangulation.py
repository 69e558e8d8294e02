"""Oriented simplicial triangulations of closed surfaces."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable


Face = tuple[int, int, int]


class MeshError(ValueError):
    """Raised for malformed or unsupported triangulations."""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]
    genus: int | None
    euler_characteristic: int
    max_degree: int

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "violations": list(self.violations),
            "genus": self.genus,
            "euler_characteristic": self.euler_characteristic,
            "max_degree": self.max_degree,
        }


def _rotate_min_first(face: Face) -> Face:
    i = face.index(min(face))
    return face[i:] + face[:i]  # type: ignore[return-value]


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Closed oriented triangulated surface.

    ``faces`` are ordered triples; orientation matters.  ``marks`` lists the
    cone/puncture vertices p_1..p_n in order.  ``genus`` is the declared genus
    (``None`` means: infer from the Euler characteristic).

    Instances are treated as immutable; combinatorial queries are cached.
    """

    vertices: tuple[int, ...]
    faces: tuple[Face, ...]
    marks: tuple[int, ...] = ()
    genus: int | None = None
    _vset: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        object.__setattr__(self, "faces", tuple(tuple(int(x) for x in f) for f in self.faces))
        object.__setattr__(self, "marks", tuple(int(m) for m in self.marks))
        object.__setattr__(self, "_vset", frozenset(self.vertices))

    @classmethod
    def from_faces(cls, faces: Iterable[Iterable[int]], marks=(), genus=None) -> "Triangulation":
        faces = [tuple(f) for f in faces]
        verts = {v for f in faces for v in f}
        return cls(tuple(verts), tuple(faces), tuple(marks), genus)

    def with_marks(self, marks: Iterable[int]) -> "Triangulation":
        marks = tuple(marks)
        for m in marks:
            self._check_vertex(m)
        return Triangulation(self.vertices, self.faces, marks, self.genus)

    # ------------------------------------------------------------------
    # basic counts

    def __contains__(self, v) -> bool:
        return v in self._vset

    def __eq__(self, other) -> bool:
        if not isinstance(other, Triangulation):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.canonical_faces == other.canonical_faces
            and self.marks == other.marks
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.canonical_faces, self.marks))

    @cached_property
    def canonical_faces(self) -> frozenset:
        return frozenset(_rotate_min_first(f) for f in self.faces)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        es = {tuple(sorted((f[i], f[(i + 1) % 3]))) for f in self.faces for i in range(3)}
        return tuple(sorted(es))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_faces

    @cached_property
    def edge_faces(self) -> dict[tuple[int, int], list[int]]:
        """Undirected edge -> indices of incident faces."""
        out: dict[tuple[int, int], list[int]] = defaultdict(list)
        for fi, f in enumerate(self.faces):
            for i in range(3):
                out[tuple(sorted((f[i], f[(i + 1) % 3])))].append(fi)
        return dict(out)

    @cached_property
    def directed_edges(self) -> dict[tuple[int, int], int]:
        """Directed edge (a, b) -> index of the face that traverses a -> b."""
        out = {}
        for fi, f in enumerate(self.faces):
            for i in range(3):
                out.setdefault((f[i], f[(i + 1) % 3]), fi)
        return out

    @cached_property
    def vertex_faces(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {v: [] for v in self.vertices}
        for fi, f in enumerate(self.faces):
            for v in f:
                out[v].append(fi)
        return {v: tuple(fs) for v, fs in out.items()}

    @cached_property
    def neighbors(self) -> dict[int, frozenset]:
        out: dict[int, set] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            out[a].add(b)
            out[b].add(a)
        return {v: frozenset(s) for v, s in out.items()}

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self.neighbors[v])

    @property
    def max_degree(self) -> int:
        return max((len(n) for n in self.neighbors.values()), default=0)

    def adjacent(self, u: int, v: int) -> bool:
        return v in self.neighbors.get(u, ())

    # ------------------------------------------------------------------
    # stars and links

    def star_faces(self, vs: Iterable[int]) -> set[Face]:
        """Faces with at least one vertex in ``vs``."""
        out = set()
        for v in vs:
            self._check_vertex(v)
            out.update(self.faces[fi] for fi in self.vertex_faces[v])
        return out

    def link(self, v: int) -> tuple[int, ...]:
        """Link of ``v`` as a cyclic vertex sequence, counterclockwise, starting at its minimum.

        Requires the link to be a single cycle (checked by :meth:`validate`).
        """
        self._check_vertex(v)
        nxt = {}
        for fi in self.vertex_faces[v]:
            f = self.faces[fi]
            i = f.index(v)
            nxt[f[(i + 1) % 3]] = f[(i + 2) % 3]
        if not nxt:
            return ()
        start = min(nxt)
        cycle = [start]
        cur = nxt[start]
        while cur != start:
            cycle.append(cur)
            if len(cycle) > len(nxt) or cur not in nxt:
                raise MeshError(f"link of vertex {v} is not a simple cycle")
            cur = nxt[cur]
        if len(cycle) != len(nxt):
            raise MeshError(f"link of vertex {v} is not a single cycle")
        return tuple(cycle)

    # ------------------------------------------------------------------
    # validation

    def _check_vertex(self, v) -> None:
        if v not in self._vset:
            raise MeshError(f"unknown vertex id {v!r}")

    def validate(self) -> ValidationReport:
        problems: list[str] = []
        for f in self.faces:
            if len(set(f)) != 3:
                problems.append(f"degenerate face {list(f)}")
        if len(self.canonical_faces) != len(self.faces):
            problems.append("duplicate face")
        if set(self.marks) - self._vset:
            problems.append("marked vertex not in triangulation")
        if len(set(self.marks)) != len(self.marks):
            problems.append("repeated marked vertex")

        if not problems:
            for e, fs in sorted(self.edge_faces.items()):
                if len(fs) != 2:
                    problems.append(f"edge {list(e)} with {len(fs)} incident face{'s' if len(fs) != 1 else ''}")
            seen: dict[tuple[int, int], int] = defaultdict(int)
            for f in self.faces:
                for i in range(3):
                    seen[(f[i], f[(i + 1) % 3])] += 1
            for (a, b), n in sorted(seen.items()):
                if n > 1 or (b, a) not in seen:
                    problems.append(f"incoherent orientation along edge {[a, b]}")
                    break
            for v in self.vertices:
                if not self.vertex_faces[v]:
                    problems.append(f"isolated vertex {v}")
                    continue
                try:
                    cyc = self.link(v)
                except MeshError:
                    problems.append(f"link of vertex {v} is not a single simple cycle")
                    continue
                if len(cyc) < 3:
                    problems.append(f"link of vertex {v} has length {len(cyc)} < 3")
            if not self._connected():
                problems.append("triangulation is not connected")

        chi = self.euler_characteristic
        genus = None
        if chi % 2 == 0 and chi <= 2:
            genus = (2 - chi) // 2
        else:
            problems.append(f"Euler characteristic {chi} is not that of a closed orientable surface")
        if self.genus is not None and genus is not None and genus != self.genus:
            problems.append(f"declared genus {self.genus} but Euler characteristic gives {genus}")
        return ValidationReport(tuple(problems), genus, chi, self.max_degree)

    def _connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for w in self.neighbors[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def require_valid(self) -> "Triangulation":
        rep = self.validate()
        if not rep.valid:
            raise MeshError("invalid triangulation: " + "; ".join(rep.violations))
        return self

    @property
    def inferred_genus(self) -> int:
        return (2 - self.euler_characteristic) // 2
