"""Labels with prescribed angle sums on closed triangulations.

The solver is a nonlinear Gauss-Seidel sweep: each vertex in turn gets the
radius that makes its own angle sum hit the target with all neighbours held
fixed.  The angle sum is strictly decreasing in the vertex's own radius, with
range (0, deg*pi), so each one-dimensional problem has a unique root, found
by Newton's method on log(radius) inside a maintained bracket.

Once the sweeps bring the worst angle error below ``SolveConfig.newton_below``
the solver switches to full Newton steps on the vector of log-radii (the
Jacobian is assembled from closed-form partial derivatives), backtracking
until the worst error drops; a step that cannot be made to improve falls back
to another sweep.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .angles import AngleSpec
from .hypgeom import INF, angle_sum, face_angles, max_completed_degree, ring_bound_H, tangency_angle_dlog, tangency_angle_grad, triangle_area
from .mesh import MeshError, Triangulation, face_excess

log = logging.getLogger(__name__)

__all__ = [
    "AngleSpec", "FeasibilityVerdict", "InfeasibleError", "Label", "NonConvergenceError",
    "SolveConfig", "check_feasible", "metric_area", "radius_ceiling", "solve",
]


class InfeasibleError(ValueError):
    def __init__(self, msg, verdict=None):
        super().__init__(msg)
        self.verdict = verdict


class NonConvergenceError(RuntimeError):
    def __init__(self, msg, residual, iterations):
        super().__init__(msg)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class SolveConfig:
    tol_angle: float = 1e-10
    max_iters: int = 1_000_000
    log_radius_min: float = -300.0
    log_radius_max: float = 300.0
    initial_radius: float = 1.0
    # switch from sweeps to Newton steps on log-radii below this residual (0 disables)
    newton_below: float = 0.1

    def __post_init__(self):
        if not self.tol_angle > 0:
            raise ValueError("tol_angle must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class Label:
    radii: dict[int, float]
    residual: float = 0.0
    iterations: int = 0

    def __getitem__(self, v: int) -> float:
        return self.radii[v]

    def finite(self) -> dict[int, float]:
        return {v: r for v, r in self.radii.items() if r != INF}

    def scaled(self, factor: float) -> "Label":
        return Label({v: r * factor for v, r in self.radii.items()}, self.residual, self.iterations)

    def to_dict(self) -> dict:
        return {
            "radii": {str(v): ("inf" if r == INF else r) for v, r in sorted(self.radii.items())},
            "residual": self.residual,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Label":
        radii = {}
        for k, r in data["radii"].items():
            r = INF if r in ("inf", "Infinity") else float(r)
            if not r > 0:
                raise ValueError(f"radius at vertex {k} must be positive")
            radii[int(k)] = r
        return cls(radii, float(data.get("residual", 0.0)), int(data.get("iterations", 0)))


@dataclass
class FeasibilityVerdict:
    orbchar: float
    feasible: bool
    excess_violations: list[tuple[str, tuple[int, ...], float]] = field(default_factory=list)
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.feasible and not self.excess_violations and not self.problems

    def to_dict(self) -> dict:
        return {
            "orbchar": self.orbchar,
            "orbchar_over_pi": self.orbchar / math.pi,
            "gauss_bonnet_negative": self.feasible,
            "excess_violations": [
                {"kind": k, "vertices": list(vs), "excess": e} for k, vs, e in self.excess_violations
            ],
            "problems": self.problems,
            "ok": self.ok,
        }


def check_feasible(T: Triangulation, spec: AngleSpec) -> FeasibilityVerdict:
    """Gauss-Bonnet gate plus cheap combinatorial necessary conditions.

    The face excess is checked on every singleton and on the closed star of
    every vertex (excluding the whole vertex set, where it equals orbchar
    up to sign conventions and is covered by the gate).
    """
    T.require_valid()
    problems = []
    for v in spec.marked:
        if v not in T:
            problems.append(f"cone angle given for unknown vertex {v}")
    orbchar = spec.orbchar(T.euler_characteristic)
    verdict = FeasibilityVerdict(orbchar, orbchar < 0.0, problems=problems)
    if problems:
        return verdict
    all_v = frozenset(T.vertices)
    seen = set()
    for v in T.vertices:
        for kind, V in (("vertex", frozenset([v])), ("star", frozenset(T.neighbors[v] | {v}))):
            if V in seen or V == all_v:
                continue
            seen.add(V)
            e = face_excess(T, spec, V)
            if e <= 0.0:
                verdict.excess_violations.append((kind, tuple(sorted(V)), e))
    for v in T.vertices:
        if spec.target(v) >= T.degree(v) * math.pi:
            problems.append(
                f"target {spec.target(v):.6g} at vertex {v} is not below deg*pi = {T.degree(v) * math.pi:.6g}"
            )
    return verdict


def _solve_vertex(x0, pairs, target, lo_u, hi_u, tol):
    """Radius at which the angle sum over ``pairs`` equals ``target``."""

    def f(u):
        x = math.exp(u)
        s = 0.0
        ds = 0.0
        for y, z in pairs:
            a, d = tangency_angle_dlog(x, y, z)
            s += a
            ds += d
        return s - target, ds

    u = math.log(x0)
    g, dg = f(u)
    if g == 0.0:
        return x0
    # angle sum decreases in u: g > 0 means the radius must grow
    if g > 0:
        a, b = u, None
    else:
        a, b = None, u
    step = 1.0
    while a is None or b is None:
        probe = (b - step) if a is None else (a + step)
        probe = min(max(probe, lo_u), hi_u)
        gp, dgp = f(probe)
        if gp > 0:
            a = probe
            if probe >= hi_u:
                raise MeshError("radius bracket exhausted (target angle too small)")
        else:
            b = probe
            if probe <= lo_u:
                raise MeshError("radius bracket exhausted (target angle too large)")
        if gp == 0.0:
            return math.exp(probe)
        u, g, dg = probe, gp, dgp
        step *= 2.0
    for _ in range(200):
        if dg < 0.0:
            nu = u - g / dg
        else:
            nu = 0.5 * (a + b)
        if not a < nu < b:
            nu = 0.5 * (a + b)
        if abs(nu - u) <= 1e-15 * max(1.0, abs(u)):
            u = nu
            break
        u = nu
        g, dg = f(u)
        if g == 0.0:
            break
        if g > 0:
            a = u
        else:
            b = u
        if abs(g) < tol * 1e-3 or b - a < 1e-15 * max(1.0, abs(u)):
            break
    return math.exp(u)


def solve(T: Triangulation, spec: AngleSpec, cfg: SolveConfig | None = None) -> Label:
    """Label of ``T`` whose angle sum at every vertex equals ``spec.target``.

    Cusp targets (0) are pinned to radius +inf.  Raises :class:`InfeasibleError`
    when the Gauss-Bonnet gate fails and :class:`NonConvergenceError` when the
    residual is still above ``cfg.tol_angle`` after ``cfg.max_iters`` sweeps.
    """
    cfg = cfg or SolveConfig()
    verdict = check_feasible(T, spec)
    if not verdict.feasible:
        raise InfeasibleError(
            f"orbchar = {verdict.orbchar / math.pi:.6g}π ≥ 0: no hyperbolic cone metric", verdict
        )
    if verdict.problems:
        raise InfeasibleError("; ".join(verdict.problems), verdict)
    if verdict.excess_violations:
        kind, vs, e = verdict.excess_violations[0]
        raise InfeasibleError(f"face excess {e:.6g} <= 0 on {kind} {list(vs)}", verdict)

    verts = T.vertices
    index = {v: i for i, v in enumerate(verts)}
    radii = [INF if spec.is_cusp(v) else cfg.initial_radius for v in verts]
    targets = [spec.target(v) for v in verts]
    # per vertex: the (next, previous) neighbour indices of each face in its star
    petals = []
    for v in verts:
        ps = []
        for fi in T.vertex_faces[v]:
            f = T.faces[fi]
            i = f.index(v)
            ps.append((index[f[(i + 1) % 3]], index[f[(i + 2) % 3]]))
        petals.append(ps)
    active = [i for i, v in enumerate(verts) if radii[i] != INF]

    pos = {i: n for n, i in enumerate(active)}
    tgt = np.array([targets[i] for i in active])

    def angle_errors(rs):
        err = np.empty(len(active))
        for n, i in enumerate(active):
            s = 0.0
            x = rs[i]
            for j, k in petals[i]:
                s += tangency_angle_dlog(x, rs[j], rs[k])[0]
            err[n] = s - tgt[n]
        return err

    def newton_step(rs, err):
        J = np.zeros((len(active), len(active)))
        for n, i in enumerate(active):
            x = rs[i]
            for j, k in petals[i]:
                _, dx, dy, dz = tangency_angle_grad(x, rs[j], rs[k])
                J[n, n] += dx
                if j in pos:
                    J[n, pos[j]] += dy
                if k in pos:
                    J[n, pos[k]] += dz
        du = np.linalg.solve(J, -err)
        base = max(abs(err))
        t = 1.0
        for _ in range(30):
            trial = list(rs)
            for n, i in enumerate(active):
                trial[i] = rs[i] * math.exp(t * du[n])
            try:
                e2 = angle_errors(trial)
            except ArithmeticError:
                e2 = None
            if e2 is not None and max(abs(e2)) < base:
                return trial, e2
            t *= 0.5
        return None

    err = angle_errors(radii)
    res = float(max(abs(err), default=0.0))
    sweeps = 0
    while res > cfg.tol_angle and sweeps < cfg.max_iters:
        stepped = None
        if res < cfg.newton_below:
            try:
                stepped = newton_step(radii, err)
            except np.linalg.LinAlgError:
                stepped = None
        if stepped is not None:
            radii, err = stepped
        else:
            for i in active:
                pairs = [(radii[j], radii[k]) for j, k in petals[i]]
                radii[i] = _solve_vertex(
                    radii[i], pairs, targets[i], cfg.log_radius_min, cfg.log_radius_max, cfg.tol_angle
                )
            err = angle_errors(radii)
        sweeps += 1
        res = float(max(abs(err), default=0.0))
        if sweeps % 1000 == 0:
            log.debug("iteration %d residual %.3e", sweeps, res)
    if res > cfg.tol_angle:
        raise NonConvergenceError(
            f"no convergence after {sweeps} iterations (residual {res:.3e})", res, sweeps
        )
    return Label({v: radii[i] for i, v in enumerate(verts)}, res, sweeps)


def metric_area(T: Triangulation, L: Label) -> float:
    """Total hyperbolic area of the glued tangency triangles."""
    return sum(triangle_area(face_angles([L.radii[v] for v in f])) for f in T.faces)


def radius_ceiling(T: Triangulation, spec: AngleSpec) -> float:
    """Ring-lemma ceiling H_B on every finite radius, B the largest completed-flower degree.

    Only defined when every target lies in (0, 2*pi]; cusps contribute no bound.
    """
    B = 0
    for v in T.vertices:
        th = spec.target(v)
        if th == 0.0:
            continue
        B = max(B, max_completed_degree(T.degree(v), th))
    return ring_bound_H(B)


def angle_residuals(T: Triangulation, L: Label, spec: AngleSpec) -> dict[int, float]:
    return {
        v: angle_sum(T, L.radii, v) - spec.target(v) for v in T.vertices if L.radii[v] != INF
    }
