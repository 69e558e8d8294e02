"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are repeated in the
``acceptance criteria`` section of the pytest terminal summary.
"""

import math
import subprocess
import sys
import time

import pytest
from conftest import CORPUS, record_acceptance, symmetric_radius
from test_solver import rotations

from conepack.angles import AngleSpec
from conepack.cli import main
from conepack.hypgeom import INF, max_completed_degree, ring_bound_H
from conepack.io import instance_to_dict, write_json
from conepack.layout import develop, verify_layout
from conepack.limit import ExhaustionFamily, eventually_decreasing, run_exhaustion
from conepack.mesh import Triangulation, generate
from conepack.solver import InfeasibleError, angle_residuals, metric_area, solve

PI = math.pi
pytestmark = pytest.mark.acceptance


def report(k: int, ok: bool, detail: str) -> None:
    record_acceptance(f"ACCEPTANCE {k:>2} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def closed_form_radius(deg: int) -> float:
    c = math.cos(PI / (2 * deg))
    return 0.5 * math.acosh(c / (1 - c))


def symmetric_check(k: int, name: str, deg: int, stated: float) -> None:
    T = generate(name)
    t0 = time.perf_counter()
    L = solve(T, AngleSpec.uniform(T.vertices, PI / 2))
    dt = time.perf_counter() - t0
    oracle = symmetric_radius(deg, PI / 2)
    err = max(abs(r - oracle) for r in L.radii.values())
    ok = err <= 1e-7 and abs(oracle - closed_form_radius(deg)) <= 1e-12 and dt < 1.0
    report(
        k, ok,
        f"{name} pi/2: r = {L[0]:.10f}, |r - bisection oracle| = {err:.1e} (tol 1e-7), {dt:.3f}s; "
        f"stated constant {stated} is off the closed form by {abs(oracle - stated):.1e}",
    )


def test_criterion_1_octahedron():
    symmetric_check(1, "octahedron", 4, 1.593838)


def test_criterion_2_icosahedron():
    symmetric_check(2, "icosahedron", 5, 1.829727)


@pytest.mark.xfail(strict=True, reason="the quoted decimals disagree with the defining closed form")
@pytest.mark.parametrize("deg,stated", [(4, 1.593838), (5, 1.829727)])
def test_quoted_symmetric_constants(deg, stated):
    assert abs(closed_form_radius(deg) - stated) <= 1e-7


def test_criterion_3_gauss_bonnet(solved_corpus):
    worst, where = 0.0, ""
    for name, (T, spec, L) in solved_corpus.items():
        e = abs(metric_area(T, L) + spec.orbchar(T.euler_characteristic))
        if e >= worst:
            worst, where = e, name
    T, spec, L = solved_corpus["octahedron_pi/2"]
    octa = metric_area(T, L)
    has = {
        "genus 0 cones": "octahedron_pi/2" in solved_corpus,
        "genus 2 unmarked": "genus2_unmarked" in solved_corpus,
        "cusps": any(any(s.is_cusp(v) for v in s.marked) for _, s, _ in solved_corpus.values()),
    }
    ok = len(solved_corpus) >= 10 and all(has.values()) and worst <= 1e-6 and abs(octa - 5 * PI) <= 1e-6
    report(
        3, ok,
        f"{len(solved_corpus)} instances, max |area + orbchar| = {worst:.1e} ({where}); "
        f"octahedron area = {octa / PI:.12f}*pi",
    )


def test_criterion_4_feasibility_gate(tmp_path, capsys):
    T = generate("octahedron")
    path = tmp_path / "octa.json"
    write_json(path, instance_to_dict(T))
    rc = main(["solve", str(path)])
    out = capsys.readouterr().out
    with pytest.raises(InfeasibleError) as info:
        solve(T, AngleSpec())
    verdict = info.value.verdict
    ok = rc == 1 and "4π" in out and verdict.orbchar == pytest.approx(4 * PI)
    report(4, ok, f"unmarked octahedron: orbchar = {verdict.orbchar / PI:g}*pi, exit code {rc}")


def test_criterion_5_angle_residuals(solved_corpus):
    worst, where, count = 0.0, "", 0
    for name, (T, spec, L) in solved_corpus.items():
        for v, e in angle_residuals(T, L, spec).items():
            count += 1
            if abs(e) >= worst:
                worst, where = abs(e), f"{name} vertex {v}"
    report(5, worst <= 1e-10, f"{count} finite vertices, max |angle sum - target| = {worst:.1e} ({where})")


def test_criterion_6_ring_ceiling(solved_corpus):
    checked, violations, margin = 0, [], INF
    for name, (T, spec, L) in solved_corpus.items():
        for v in T.vertices:
            th = spec.target(v)
            if not 0 < th <= 2 * PI:
                continue
            H = ring_bound_H(max_completed_degree(T.degree(v), th))
            checked += 1
            margin = min(margin, H - L[v])
            if L[v] > H:
                violations.append(f"{name}:{v}")
    ok = checked > 0 and not violations
    report(6, ok, f"{checked} radii checked against H(d(deg, theta)), {len(violations)} violations, min margin {margin:.3f}")


def test_criterion_7_exhaustion():
    T = generate("three_punctured_sphere_base")
    fam = ExhaustionFamily(T, range(1, 9), (PI / 2,) * 3)
    t0 = time.perf_counter()
    rep = run_exhaustion(fam)
    dt = time.perf_counter() - t0
    cone = max(abs(e) for r in rep.results for e in r.cone_errors.values())
    decreasing = eventually_decreasing(rep.deltas)
    floor = min(rep.base_min_radius)
    ok = (
        decreasing and rep.deltas[-1] <= 1e-2 and cone <= 1e-10 and dt < 60
        and floor >= rep.base_min_radius[0] / 10 and rep.verdict == "converged"
    )
    report(
        7, ok,
        f"depths 1..8: delta_8 = {rep.deltas[-1]:.1e}, eventually decreasing {decreasing}, "
        f"cone error {cone:.1e}, min base radius {floor:.4f}, {dt:.2f}s (numerical evidence, not a proof)",
    )


def test_criterion_8_symmetry(octahedron_solution):
    T, spec, L = octahedron_solution
    rots = rotations(T)
    sym = max(abs(L[m[v]] - L[v]) for m in rots for v in T.vertices)
    perm = dict(zip(T.vertices, (13, 10, 15, 11, 14, 12)))
    T2 = Triangulation.from_faces([tuple(perm[v] for v in f) for f in T.faces])
    L2 = solve(T2, AngleSpec.uniform(T2.vertices, PI / 2))
    relabel = max(abs(L2[perm[v]] - L[v]) for v in T.vertices)
    # an asymmetric instance is the sharper uniqueness probe
    Tg, sg = CORPUS["genus2_three_cones"]
    Lg = solve(Tg, sg)
    pg = {v: 1000 - v for v in Tg.vertices}
    Tg2 = Triangulation.from_faces([tuple(pg[v] for v in f) for f in Tg.faces])
    Lg2 = solve(Tg2, AngleSpec({pg[v]: t for v, t in sg.cone_angles.items()}))
    relabel = max(relabel, max(abs(Lg2[pg[v]] - Lg[v]) for v in Tg.vertices))
    ok = len(rots) == 24 and sym <= 1e-9 and relabel <= 1e-9
    report(8, ok, f"{len(rots)} rotations, max deviation {sym:.1e}; relabel round trip {relabel:.1e}")


def test_criterion_9_layout(solved_corpus):
    rows, ok = [], True
    for name in ("octahedron_pi/2", "genus2_unmarked", "genus2_three_cones", "genus2_big_cone"):
        T, spec, L = solved_corpus[name]
        vr = verify_layout(develop(T, L), T, L, spec)
        ok &= vr.max_residual < 1e-8 and vr.max_angle_error <= 1e-8 and bool(vr.angle_closure)
        rows.append(f"{name} res {vr.max_residual:.0e} closure {vr.max_angle_error:.0e} ({len(vr.angle_closure)} v)")
    report(9, ok, "; ".join(rows))


def test_criterion_10_constants():
    h3 = ring_bound_H(3)
    hs = [ring_bound_H(k) for k in range(3, 51)]
    mono = all(b > a for a, b in zip(hs, hs[1:]))
    d = max_completed_degree(5, PI / 2)
    ok = abs(h3 - math.log(2 / math.sqrt(3))) <= 1e-12 and mono and d == 25
    report(10, ok, f"H_3 = {h3:.12f}, H increasing on k=3..50: {mono}, d(5, pi/2) = {d}")


def test_console_script_runs():
    out = subprocess.run(
        [sys.executable, "-m", "conepack.cli", "constants", "--k", "3..4"], capture_output=True, text=True
    )
    assert out.returncode == 0 and "0.1438410362" in out.stdout
