import cmath
import math
import random

import pytest
from conftest import CORPUS

from conepack.angles import AngleSpec
from conepack.hypgeom import INF, euc_to_hyp_radius
from conepack.layout import (
    LayoutError, PackingLayout, develop, dual_tree, euclidean_circle, export_svg, hyp_dist,
    mob_apply, mob_compose, mob_inverse, mob_translate, render_svg, verify_layout,
)
from conepack.mesh import Triangulation
from conepack.solver import solve

PI = math.pi


def test_single_face():
    T = Triangulation.from_faces([(0, 1, 2), (0, 2, 1)])
    radii = {0: 0.5, 1: 0.8, 2: 1.1}
    lay = develop(T, radii)
    c = {ci.vertex: ci.center for ci in lay.circles if ci.copy == 0}
    assert c[0] == 0
    assert hyp_dist(c[0], c[1]) == pytest.approx(1.3, abs=1e-12)
    assert hyp_dist(c[1], c[2]) == pytest.approx(1.9, abs=1e-12)
    r = 0.9
    lay = develop(T, {0: r, 1: r, 2: r})
    pts = [ci.center for ci in lay.circles]
    for i in range(3):
        assert hyp_dist(pts[i], pts[(i + 1) % 3]) == pytest.approx(2 * r, abs=1e-12)


def test_octahedron_layout(octahedron_solution):
    T, spec, L = octahedron_solution
    lay = develop(T, L)
    rep = verify_layout(lay, T, L, spec)
    assert lay.max_residual < 1e-8
    assert len(lay.tree_edges) == T.num_faces - 1
    assert rep.angle_closure and rep.max_angle_error < 1e-8
    assert rep.positively_oriented and rep.radii_in_disk and not rep.flagged


@pytest.mark.parametrize("name", ["genus2_unmarked", "genus2_three_cones", "genus2_big_cone", "thrice_refined_depth3"])
def test_corpus_layouts(solved_corpus, name):
    T, spec, L = solved_corpus[name]
    lay = develop(T, L)
    rep = verify_layout(lay, T, L, spec)
    assert rep.max_residual < 1e-8 and rep.max_angle_error < 1e-8
    assert not rep.flagged


def test_perturbation_is_flagged(octahedron_solution):
    T, spec, L = octahedron_solution
    bad = dict(L.radii)
    bad[0] += 1e-3
    rep = verify_layout(develop(T, bad), T, bad, spec)
    assert rep.flagged
    assert rep.max_angle_error > 1e-4


def test_horocycles_refused(solved_corpus):
    T, spec, L = solved_corpus["thrice_cusped"]
    with pytest.raises(LayoutError, match="horocyclic"):
        develop(T, L)


def test_svg_output(octahedron_solution, tmp_path):
    T, _, L = octahedron_solution
    lay = develop(T, L)
    svg = render_svg(lay)
    assert svg.count("<circle") == len(lay.circles) + 1
    assert render_svg(develop(T, L)) == svg
    path = export_svg(lay, tmp_path / "o.svg", {"edges": True})
    text = path.read_text()
    assert "<line" in text and text.startswith("<?xml")
    with pytest.raises(LayoutError):
        export_svg(lay, tmp_path / "missing" / "o.svg")


def test_empty_layout():
    empty = PackingLayout()
    assert render_svg(empty).count("<circle") == 1
    rep = verify_layout(empty, None, {}, AngleSpec())
    assert rep.max_residual == 0.0 and not rep.flagged


def test_isometry_invariance(solved_corpus):
    T, spec, L = solved_corpus["genus2_three_cones"]
    a = develop(T, L, root_face=0)
    b = develop(T, L, root_face=0, tree=dual_tree(T, 0))
    assert [c.center for c in a.circles] == [c.center for c in b.circles]
    c = develop(T, L, root_face=5)
    # a different root moves every face by an isometry: side lengths and
    # developed angle sums are unchanged
    for fi in range(T.num_faces):
        pa = [a.circles[i].center for i in a.faces[fi]]
        pc = [c.circles[i].center for i in c.faces[fi]]
        for i in range(3):
            assert hyp_dist(pa[i], pa[i - 1]) == pytest.approx(hyp_dist(pc[i], pc[i - 1]), abs=1e-9)
    ra, rc = verify_layout(a, T, L, spec), verify_layout(c, T, L, spec)
    for v in set(ra.angle_closure) & set(rc.angle_closure):
        assert ra.angle_closure[v][0] == pytest.approx(rc.angle_closure[v][0], abs=1e-9)


def test_mobius_helpers():
    m = mob_translate(0.3 + 0.2j)
    n = mob_translate(-0.1 + 0.5j)
    z = 0.1 - 0.4j
    w = mob_apply(mob_compose(m, n), z)
    assert w == pytest.approx(mob_apply(m, mob_apply(n, z)), abs=1e-14)
    assert mob_apply(mob_inverse(m), mob_apply(m, z)) == pytest.approx(z, abs=1e-14)
    assert hyp_dist(mob_apply(m, z), mob_apply(m, 0j)) == pytest.approx(hyp_dist(z, 0j), abs=1e-12)


def test_euclidean_circle_spot_check():
    rng = random.Random(3)
    for _ in range(8):
        c = 0.8 * rng.random() * cmath.exp(2j * PI * rng.random())
        R = 0.1 + 2 * rng.random()
        ec, er = euclidean_circle(c, R)
        for k in range(6):
            p = ec + er * cmath.exp(2j * PI * k / 6)
            assert hyp_dist(c, p) == pytest.approx(R, abs=1e-9)
    ec, er = euclidean_circle(0j, 1.0)
    assert euc_to_hyp_radius(er) == pytest.approx(1.0, abs=1e-12) and ec == 0


def test_bad_inputs():
    T, spec = CORPUS["octahedron_pi/2"]
    L = solve(T, spec)
    with pytest.raises(LayoutError):
        develop(T, L, root_face=99)
    bad = dict(L.radii)
    bad[0] = INF
    with pytest.raises(LayoutError):
        develop(T, bad)
