import math

import pytest

from conepack.angles import AngleSpec
from conepack.mesh import generate, puncture_refine
from conepack.solver import solve

PI = math.pi


def _corpus():
    oc = generate("octahedron")
    ico = generate("icosahedron")
    g2 = generate("genus2_minimal")
    tp = generate("three_punctured_sphere_base")
    dt = generate("double_tetrahedron")
    tp3, _ = puncture_refine(tp, depth=3)
    return {
        "octahedron_pi/2": (oc, AngleSpec.uniform(oc.vertices, PI / 2)),
        "icosahedron_pi/2": (ico, AngleSpec.uniform(ico.vertices, PI / 2)),
        "icosahedron_pi": (ico, AngleSpec.uniform(ico.vertices, PI)),
        "double_tetrahedron_pi/2": (dt, AngleSpec.uniform(dt.vertices, PI / 2)),
        "genus2_unmarked": (g2, AngleSpec()),
        "genus2_three_cones": (g2, AngleSpec({0: PI, 5: PI / 3, 9: 1.0})),
        "genus2_big_cone": (g2, AngleSpec({0: 3 * PI})),
        "thrice_marked_pi/2": (tp, AngleSpec.uniform(tp.marks, PI / 2)),
        "thrice_marked_mixed": (tp, AngleSpec(dict(zip(tp.marks, (PI / 2, PI / 3, PI / 4))))),
        "thrice_cusped": (tp, AngleSpec.uniform(tp.marks, 0.0)),
        "octahedron_three_cusps": (oc, AngleSpec({0: 0.0, 1: 0.0, 2: 0.0})),
        "genus2_cusp": (g2, AngleSpec({3: 0.0})),
        "thrice_refined_depth3": (tp3, AngleSpec.uniform(tp.marks, PI / 2)),
    }


CORPUS = _corpus()


@pytest.fixture(scope="session")
def solved_corpus():
    return {name: (T, spec, solve(T, spec)) for name, (T, spec) in CORPUS.items()}


@pytest.fixture(scope="session")
def octahedron_solution():
    T = generate("octahedron")
    spec = AngleSpec.uniform(T.vertices, PI / 2)
    return T, spec, solve(T, spec)


def symmetric_radius(degree: int, theta: float) -> float:
    """Equal radius r of a vertex-transitive instance, found by bisection on
    degree * alpha(r) = theta with cos(alpha) = cosh(2r) / (cosh(2r) + 1)."""
    def total(r):
        c = math.cosh(2 * r)
        return degree * math.acos(c / (c + 1))

    lo, hi = 1e-9, 50.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if total(mid) > theta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


_acceptance_lines = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
