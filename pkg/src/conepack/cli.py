"""Command-line interface.

Exit codes: 0 success, 1 domain failure (infeasible, alarm, bad layout),
2 input error, 3 inconclusive (exhaustion not yet converged).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import replace

from . import __version__
from .angles import AngleSpec, parse_angle
from .hypgeom import max_completed_degree, ring_bound_H
from .io import (
    InputError, family_from_dict, format_pi, instance_to_dict, load_instance, load_label, read_json,
    write_json,
)
from .layout import LayoutError, develop, export_svg, verify_layout
from .limit import ExhaustionConfig, PreconditionError, run_exhaustion
from .mesh import GENERATORS, MeshError, generate
from .solver import InfeasibleError, NonConvergenceError, SolveConfig, check_feasible, metric_area, radius_ceiling, solve

OK, DOMAIN, INPUT, INCONCLUSIVE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT, f"{self.prog}: error: {message}\n")


def _emit(data) -> None:
    print(json.dumps(data, indent=2))


def _angles(spec: AngleSpec, T, args) -> AngleSpec:
    angles = dict(spec.cone_angles)
    if getattr(args, "all_angles", None) is not None:
        angles = {v: parse_angle(args.all_angles) for v in T.vertices}
    for item in getattr(args, "angle", None) or []:
        try:
            v, expr = item.split("=", 1)
            angles[int(v)] = parse_angle(expr)
        except ValueError as exc:
            raise InputError(f"bad --angle {item!r}: expected VERTEX=EXPR") from exc
    return AngleSpec(angles)


def cmd_validate(args) -> int:
    T, _ = load_instance(args.path)
    rep = T.validate()
    _emit(rep.to_dict())
    return OK if rep.valid else DOMAIN


def cmd_feasible(args) -> int:
    T, spec = load_instance(args.path)
    spec = _angles(spec, T, args)
    rep = T.validate()
    if not rep.valid:
        _emit(rep.to_dict())
        return DOMAIN
    verdict = check_feasible(T, spec)
    _emit(verdict.to_dict())
    return OK if verdict.ok else DOMAIN


def cmd_solve(args) -> int:
    T, spec = load_instance(args.path)
    spec = _angles(spec, T, args)
    rep = T.validate()
    if not rep.valid:
        print("invalid triangulation: " + "; ".join(rep.violations), file=sys.stderr)
        return DOMAIN
    cfg = SolveConfig(tol_angle=args.tol_angle, max_iters=args.max_iters)
    try:
        L = solve(T, spec, cfg)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}")
        return DOMAIN
    except NonConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return DOMAIN
    if args.output:
        write_json(args.output, L.to_dict())
    oc = spec.orbchar(T.euler_characteristic)
    area = metric_area(T, L)
    finite = L.finite()
    summary = {
        "vertices": T.num_vertices,
        "residual": L.residual,
        "iterations": L.iterations,
        "area": area,
        "minus_orbchar": -oc,
        "area_error": abs(area + oc),
        "max_radius": max(finite.values()),
        "min_radius": min(finite.values()),
    }
    if all(0 < spec.target(v) <= 2 * math.pi for v in T.vertices):
        summary["ring_ceiling"] = radius_ceiling(T, spec)
    if not args.output:
        summary["label"] = L.to_dict()
    _emit(summary)
    return OK


def cmd_exhaust(args) -> int:
    fam = family_from_dict(read_json(args.family), allow_large_angles=args.allow_large_angles)
    if args.depths:
        fam = replace(fam, depths=_depth_list(args.depths))
    cfg = ExhaustionConfig(
        tol_limit=args.tol_limit,
        collapse_floor=args.collapse_floor,
        solve=SolveConfig(tol_angle=args.tol_angle),
        workers=args.workers,
    )
    t0 = time.perf_counter()

    def progress(r):
        cone = max((abs(e) for e in r.cone_errors.values()), default=0.0)
        print(
            f"depth {r.depth}: {r.triangulation.num_vertices} vertices, residual {r.label.residual:.2e}, "
            f"cone-angle error {cone:.2e}, {time.perf_counter() - t0:.2f}s",
            flush=True,
        )

    try:
        report = run_exhaustion(fam, cfg, progress)
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return DOMAIN
    except (InfeasibleError, NonConvergenceError) as exc:
        print(f"solve failed: {exc}", file=sys.stderr)
        return DOMAIN
    data = report.to_dict()
    if args.output:
        write_json(args.output, data)
    for m, d in zip(report.depths[1:], report.deltas):
        print(f"delta {m}: {d:.3e}")
    print(f"verdict: {report.verdict} (tol_limit {cfg.tol_limit:g}; successive-difference evidence, not a proof)")
    return {"converged": OK, "alarm": DOMAIN}.get(report.verdict, INCONCLUSIVE)


def _depth_list(text: str) -> tuple[int, ...]:
    if ".." in text:
        a, b = text.split("..", 1)
        return tuple(range(int(a), int(b) + 1))
    return tuple(int(x) for x in text.split(","))


def cmd_layout(args) -> int:
    T, spec = load_instance(args.instance)
    L = load_label(args.label)
    if set(L.radii) != set(T.vertices):
        print("label and instance have different vertex sets", file=sys.stderr)
        return INPUT
    try:
        lay = develop(T, L, root_face=args.root_face)
    except LayoutError as exc:
        print(f"layout failed: {exc}", file=sys.stderr)
        return DOMAIN
    rep = verify_layout(lay, T, L, spec, tol=args.tol)
    export_svg(lay, args.output, {"edges": args.edges})
    if args.json:
        write_json(args.json, {**lay.to_dict(), "verification": rep.to_dict()})
    _emit({
        "svg": str(args.output),
        "circles": len(lay.circles),
        "max_residual": rep.max_residual,
        "max_angle_error": rep.max_angle_error,
        "checked_vertices": len(rep.angle_closure),
        "flagged": rep.flagged,
    })
    return DOMAIN if rep.max_residual > args.tol else OK


def cmd_constants(args) -> int:
    try:
        lo, hi = (int(x) for x in args.k.split("..")) if ".." in args.k else (int(args.k),) * 2
    except ValueError:
        raise InputError(f"bad k range {args.k!r}") from None
    if lo < 3 or hi < lo:
        print("k range must satisfy 3 <= kmin <= kmax", file=sys.stderr)
        return INPUT
    theta = parse_angle(args.theta)
    rows = []
    for k in range(lo, hi + 1):
        rows.append({"k": k, "H": ring_bound_H(k), "d": max_completed_degree(k, theta)})
    if args.json:
        _emit({"theta": theta, "rows": rows})
    else:
        print(f"theta = {format_pi(theta)}")
        print(f"{'k':>4} {'H_k':>14} {'d_k,theta':>10}")
        for r in rows:
            print(f"{r['k']:>4} {r['H']:>14.10f} {r['d']:>10}")
    return OK


def cmd_generate(args) -> int:
    marks = None
    if args.marks:
        marks = "all" if args.marks == "all" else [int(x) for x in args.marks.split(",")]
    T = generate(args.name, marks)
    angles = {}
    if args.theta is not None:
        angles = {v: parse_angle(args.theta) for v in T.marks}
    data = instance_to_dict(T, AngleSpec(angles))
    if args.family is not None:
        data = {"base": data, "refine_at": list(T.marks), "depth": args.family}
    if args.output:
        write_json(args.output, data)
    else:
        _emit(data)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="conepack", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def angle_opts(sp):
        sp.add_argument("--angle", action="append", metavar="V=EXPR", help="cone angle at vertex V, e.g. 3=pi/2")
        sp.add_argument("--all-angles", metavar="EXPR", help="same cone angle at every vertex")

    sp = sub.add_parser("validate", help="check a triangulation file")
    sp.add_argument("path")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("feasible", help="Gauss-Bonnet and face-excess checks")
    sp.add_argument("path")
    angle_opts(sp)
    sp.set_defaults(func=cmd_feasible)

    sp = sub.add_parser("solve", help="compute the label with the prescribed angle sums")
    sp.add_argument("path")
    sp.add_argument("-o", "--output", help="write the label JSON here")
    sp.add_argument("--tol-angle", type=float, default=1e-10)
    sp.add_argument("--max-iters", type=int, default=1_000_000)
    angle_opts(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("exhaust", help="solve a refinement family and test convergence")
    sp.add_argument("family")
    sp.add_argument("-o", "--output", help="write the report JSON here")
    sp.add_argument("--depths", help="e.g. 1..8 or 1,2,4 (overrides the family file)")
    sp.add_argument("--tol-limit", type=float, default=1e-2)
    sp.add_argument("--tol-angle", type=float, default=1e-10)
    sp.add_argument("--collapse-floor", type=float, default=1e-9)
    sp.add_argument("--workers", type=int, default=None, help="parallel depth solves (default: $CONEPACK_THREADS or 1)")
    sp.add_argument("--allow-large-angles", action="store_true",
                    help="accept cone angles >= pi (only justified for thrice-punctured spheres)")
    sp.set_defaults(func=cmd_exhaust)

    sp = sub.add_parser("layout", help="develop a solved label into the Poincare disk")
    sp.add_argument("label")
    sp.add_argument("instance")
    sp.add_argument("-o", "--output", required=True, help="SVG path")
    sp.add_argument("--json", help="also write the layout JSON here")
    sp.add_argument("--root-face", type=int, default=0)
    sp.add_argument("--edges", action="store_true", help="draw face edges")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_layout)

    sp = sub.add_parser("constants", help="ring-lemma radius bounds and completed-flower degrees")
    sp.add_argument("--k", default="3..6", help="degree or range, e.g. 3..6")
    sp.add_argument("--theta", default="2*pi")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("generate", help="write a named instance")
    sp.add_argument("name", choices=sorted(GENERATORS))
    sp.add_argument("-o", "--output")
    sp.add_argument("--marks", help="'all' or comma-separated vertex ids")
    sp.add_argument("--theta", help="cone angle for every marked vertex")
    sp.add_argument("--family", type=int, metavar="DEPTH", help="wrap as a refinement family of this depth")
    sp.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, MeshError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT


if __name__ == "__main__":
    sys.exit(main())
