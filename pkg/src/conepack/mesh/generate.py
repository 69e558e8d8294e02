"""Named instances used by the tests, the CLI and the examples."""

from __future__ import annotations

from .triangulation import MeshError, Triangulation


def octahedron() -> Triangulation:
    # 0 north, 1 south, 2..5 equator counterclockwise seen from the north
    faces = [(0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 2),
             (1, 3, 2), (1, 4, 3), (1, 5, 4), (1, 2, 5)]
    return Triangulation.from_faces(faces, genus=0)


def icosahedron() -> Triangulation:
    # 0 north, 1..5 upper ring, 6..10 lower ring (6+i sits between 1+i and 1+(i+1)%5), 11 south
    faces = []
    for i in range(5):
        u0, u1 = 1 + i, 1 + (i + 1) % 5
        l0, l1 = 6 + i, 6 + (i + 1) % 5
        faces += [(0, u0, u1), (u0, l0, u1), (u1, l0, l1), (11, l1, l0)]
    return Triangulation.from_faces(faces, genus=0)


def double_tetrahedron() -> Triangulation:
    """Triangular bipyramid: apexes 0 and 4 (degree 3), equator 1, 2, 3 (degree 4)."""
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (4, 2, 1), (4, 3, 2), (4, 1, 3)]
    return Triangulation.from_faces(faces, genus=0)


def _torus7(offset: int = 0) -> list[tuple[int, int, int]]:
    faces = []
    for i in range(7):
        faces.append((i, (i + 1) % 7, (i + 3) % 7))
        faces.append((i, (i + 3) % 7, (i + 2) % 7))
    return [tuple(v + offset for v in f) for f in faces]


def genus2_minimal() -> Triangulation:
    """Genus-2 surface: connected sum of two 7-vertex tori along a triangular tube.

    14 vertices, 42 edges, 26 faces.
    """
    a = [f for f in _torus7() if f != (0, 1, 3)]
    b = [f for f in _torus7(7) if f != (7, 8, 10)]
    ring_a, ring_b = (0, 1, 3), (7, 10, 8)
    tube = []
    for i in range(3):
        a0, a1 = ring_a[i], ring_a[(i + 1) % 3]
        b0, b1 = ring_b[i], ring_b[(i + 1) % 3]
        tube += [(a0, a1, b1), (a0, b1, b0)]
    return Triangulation.from_faces(a + b + tube, genus=2)


def three_punctured_sphere_base() -> Triangulation:
    """Barycentric subdivision of a triangle doubled along its boundary.

    Marks 0, 1, 2 are the corners (degree 4, pairwise non-adjacent); 3, 4, 5
    are the edge midpoints of 01, 12, 20 and 6, 7 the two barycenters.
    """
    front = [(0, 3, 6), (3, 1, 6), (1, 4, 6), (4, 2, 6), (2, 5, 6), (5, 0, 6)]
    back = [(0, 5, 7), (5, 2, 7), (2, 4, 7), (4, 1, 7), (1, 3, 7), (3, 0, 7)]
    return Triangulation.from_faces(front + back, marks=(0, 1, 2), genus=0)


GENERATORS = {
    "octahedron": octahedron,
    "icosahedron": icosahedron,
    "double_tetrahedron": double_tetrahedron,
    "genus2_minimal": genus2_minimal,
    "three_punctured_sphere_base": three_punctured_sphere_base,
}


def generate(name: str, marks=None) -> Triangulation:
    """Build a named instance; ``marks`` overrides its default marked vertices
    (``"all"`` marks every vertex)."""
    try:
        T = GENERATORS[name]()
    except KeyError:
        raise MeshError(f"unknown instance {name!r}; choose from {sorted(GENERATORS)}") from None
    if marks == "all":
        marks = T.vertices
    if marks is not None:
        T = T.with_marks(marks)
    return T
