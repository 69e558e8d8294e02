"""Exhaustion of an infinite triangulation by nested coned-off triangulations.

For each depth m the stars of the punctures are refined m times, the deepest
links are coned off to the punctures, and the resulting closed triangulation
is solved with the same cone angles.  Radii on the surviving (non-puncture)
vertices are compared between consecutive depths; vertex ids are stable, so a
vertex present at two depths is literally the same vertex of the infinite
triangulation.  Convergence is certified by a Cauchy criterion on these
successive differences; this is numerical evidence, not a proof.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .angles import AngleSpec
from .hypgeom import INF, angle_sum
from .mesh import MeshError, Triangulation, cone_off, puncture_refine
from .solver import Label, SolveConfig, check_feasible, radius_ceiling, solve

log = logging.getLogger(__name__)

LENGTH_CONVENTION = (
    "edge-path length = sum over edges of R(u)+R(v); interior vertices count twice, "
    "unlike the vertex-sum form; both vanish together"
)


# solves at the default angle tolerance do not resolve radius changes below this
DELTA_NOISE = 1e-8


class PreconditionError(ValueError):
    pass


def eventually_decreasing(deltas: Sequence[float], noise: float = DELTA_NOISE) -> bool:
    """True if the second half of ``deltas`` never increases, ignoring
    fluctuations below ``noise``."""
    if len(deltas) < 2:
        return False
    tail = list(deltas[(len(deltas) - 1) // 2:])
    return all(b <= max(a, noise) for a, b in zip(tail, tail[1:]))


@dataclass(frozen=True)
class ExhaustionFamily:
    """Base triangulation with punctures, refinement rule, depths and cone angles.

    ``allow_large_angles`` lifts the theta_i < pi requirement; only justified
    for thrice-punctured spheres.
    """

    base: Triangulation
    depths: tuple[int, ...]
    theta: tuple[float, ...]
    punctures: tuple[int, ...] | None = None
    rule: str = "star"
    allow_large_angles: bool = False

    def __post_init__(self):
        object.__setattr__(self, "depths", tuple(int(d) for d in self.depths))
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))
        P = tuple(self.base.marks if self.punctures is None else self.punctures)
        object.__setattr__(self, "punctures", P)

    def check(self) -> None:
        if self.rule != "star":
            raise PreconditionError(f"unknown refinement rule {self.rule!r}")
        if not self.depths:
            raise PreconditionError("empty depth list")
        if any(d < 1 for d in self.depths):
            raise PreconditionError("depths must be positive")
        if any(b <= a for a, b in zip(self.depths, self.depths[1:])):
            raise PreconditionError("depths must be strictly increasing")
        if not self.punctures:
            raise PreconditionError("no punctures")
        if len(self.theta) != len(self.punctures):
            raise PreconditionError(
                f"{len(self.theta)} cone angles for {len(self.punctures)} punctures"
            )
        for p, th in zip(self.punctures, self.theta):
            if th < 0:
                raise PreconditionError(f"negative cone angle at puncture {p}")
            if th >= math.pi and not self.allow_large_angles:
                raise PreconditionError(
                    f"cone angle {th:.6g} at puncture {p} is not below pi"
                )
        rep = self.base.validate()
        if not rep.valid:
            raise PreconditionError("invalid base: " + "; ".join(rep.violations))
        oc = self.spec.orbchar(self.base.euler_characteristic)
        if not oc < 0:
            raise PreconditionError(f"orbchar = {oc / math.pi:.6g}*pi is not negative")

    @property
    def spec(self) -> AngleSpec:
        return AngleSpec(dict(zip(self.punctures, self.theta)))

    def coned(self, m: int):
        """Coned-off triangulation at depth m and its peripheral system."""
        R, C = puncture_refine(self.base, self.punctures, m)
        return cone_off(R, C), C


@dataclass(frozen=True)
class ExhaustionConfig:
    tol_limit: float = 1e-2
    collapse_floor: float = 1e-9
    solve: SolveConfig = field(default_factory=SolveConfig)
    workers: int | None = None

    def __post_init__(self):
        if not self.tol_limit > 0:
            raise ValueError("tol_limit must be positive")


@dataclass(frozen=True)
class EdgePath:
    vertices: tuple[int, ...]
    closed: bool = False

    def edges(self):
        vs = self.vertices
        pairs = list(zip(vs, vs[1:]))
        if self.closed and len(vs) > 1:
            pairs.append((vs[-1], vs[0]))
        return pairs


def edge_path_length(T: Triangulation, radii, gamma: EdgePath) -> float:
    """Metric length of an edge path: each edge (u, v) has length R(u) + R(v)."""
    if isinstance(radii, Label):
        radii = radii.radii
    total = 0.0
    for u, v in gamma.edges():
        if not T.adjacent(u, v):
            raise MeshError(f"vertices {u} and {v} are not adjacent")
        total += radii[u] + radii[v]
    return total


@dataclass
class DepthResult:
    depth: int
    triangulation: Triangulation
    label: Label
    cone_errors: dict[int, float]
    ceiling: float


@dataclass
class ExhaustionReport:
    depths: list[int]
    results: list[DepthResult]
    punctures: tuple[int, ...]
    base_vertices: tuple[int, ...]
    deltas: list[float]
    min_radius: list[float]
    base_min_radius: list[float]
    adjacent_ratio: list[float]
    verdict: str
    tol_limit: float
    loop_lengths: dict[str, list[float]] = field(default_factory=dict)
    loop_flags: dict[str, bool] = field(default_factory=dict)

    def extended_radii(self, k: int) -> dict[int, float]:
        """Radii at the k-th depth, extended by zero to the deepest vertex set (punctures dropped)."""
        deepest = self.results[-1].triangulation.vertices
        own = self.results[k].label.radii
        return {v: (own[v] if v in own else 0.0) for v in deepest if v not in self.punctures}

    def to_dict(self) -> dict:
        try:
            lim = limit_label(self)
            limit_radii = {str(v): r for v, r in sorted(lim.label.radii.items())}
            bands = {str(v): b for v, b in sorted(lim.bands.items())}
        except PreconditionError:
            limit_radii, bands = {}, {}
        return {
            "depths": self.depths,
            "deltas": self.deltas,
            "min_radius": self.min_radius,
            "base_min_radius": self.base_min_radius,
            "adjacent_ratio": self.adjacent_ratio,
            "max_radius": [max(r.label.finite().values()) for r in self.results],
            "ceiling": [r.ceiling for r in self.results],
            "cone_angle_errors": [
                {str(p): e for p, e in r.cone_errors.items()} for r in self.results
            ],
            "residual": [r.label.residual for r in self.results],
            "vertices": [r.triangulation.num_vertices for r in self.results],
            "loop_lengths": self.loop_lengths,
            "loop_flags": self.loop_flags,
            "loop_length_convention": LENGTH_CONVENTION,
            "deltas_eventually_decreasing": eventually_decreasing(self.deltas),
            "verdict": self.verdict,
            "tol_limit": self.tol_limit,
            "note": "convergence is judged by successive sup-norm differences; evidence only",
            "limit_radii": limit_radii,
            "stability_bands": bands,
        }


def _solve_depth(fam: ExhaustionFamily, m: int, cfg: SolveConfig) -> DepthResult:
    T, _ = fam.coned(m)
    rep = T.validate()
    if not rep.valid:
        raise MeshError(f"depth {m}: " + "; ".join(rep.violations))
    spec = fam.spec
    verdict = check_feasible(T, spec)
    if not verdict.ok:
        raise PreconditionError(f"depth {m} is infeasible: orbchar {verdict.orbchar:.6g}")
    L = solve(T, spec, cfg)
    errs = {
        p: (0.0 if L.radii[p] == INF else angle_sum(T, L.radii, p) - spec.target(p))
        for p in fam.punctures
    }
    ceiling = radius_ceiling(T, spec) if all(t > 0 for t in fam.theta) else INF
    return DepthResult(m, T, L, errs, ceiling)


def _workers(cfg: ExhaustionConfig) -> int:
    if cfg.workers is not None:
        return max(1, cfg.workers)
    try:
        return max(1, int(os.environ.get("CONEPACK_THREADS", "1")))
    except ValueError:
        return 1


def run_exhaustion(
    fam: ExhaustionFamily,
    cfg: ExhaustionConfig | None = None,
    progress: Callable[[DepthResult], None] | None = None,
) -> ExhaustionReport:
    cfg = cfg or ExhaustionConfig()
    fam.check()
    n = _workers(cfg)
    if n > 1 and len(fam.depths) > 1:
        with ProcessPoolExecutor(max_workers=min(n, len(fam.depths))) as pool:
            futures = [pool.submit(_solve_depth, fam, m, cfg.solve) for m in fam.depths]
            results = []
            for fut in futures:
                results.append(fut.result())
                if progress:
                    progress(results[-1])
    else:
        results = []
        for m in fam.depths:
            results.append(_solve_depth(fam, m, cfg.solve))
            if progress:
                progress(results[-1])

    P = set(fam.punctures)
    base_verts = tuple(v for v in fam.base.vertices if v not in P)

    deltas = []
    for prev, cur in zip(results, results[1:]):
        common = [v for v in prev.label.radii if v in cur.label.radii and v not in P]
        deltas.append(max(abs(cur.label.radii[v] - prev.label.radii[v]) for v in common))

    min_radius, base_min, ratios = [], [], []
    for r in results:
        fin = {v: x for v, x in r.label.radii.items() if v not in P and x != INF}
        min_radius.append(min(fin.values()))
        base_min.append(min(fin[v] for v in base_verts if v in fin))
        worst = 1.0
        for u, v in r.triangulation.edges:
            ru, rv = r.label.radii[u], r.label.radii[v]
            if ru != INF and rv != INF:
                worst = min(worst, ru / rv, rv / ru)
        ratios.append(worst)

    if len(results) < 2:
        verdict = "not_yet"
    else:
        prev_verts = [v for v in results[-2].label.radii if v not in P]
        floor = min(results[-1].label.radii[v] for v in prev_verts)
        if floor < cfg.collapse_floor:
            verdict = "alarm"
        elif deltas[-1] <= cfg.tol_limit:
            verdict = "converged"
        else:
            verdict = "not_yet"

    report = ExhaustionReport(
        depths=list(fam.depths),
        results=results,
        punctures=fam.punctures,
        base_vertices=base_verts,
        deltas=deltas,
        min_radius=min_radius,
        base_min_radius=base_min,
        adjacent_ratio=ratios,
        verdict=verdict,
        tol_limit=cfg.tol_limit,
    )
    loops = default_loops(fam)
    report.loop_lengths, report.loop_flags = loop_monitor(fam, report, loops)
    return report


def default_loops(fam: ExhaustionFamily) -> dict[str, EdgePath]:
    """The links of the punctures in the (possibly pre-subdivided) base."""
    _, C = puncture_refine(fam.base, fam.punctures, fam.depths[0])
    return {f"link_{p}": EdgePath(tuple(loop), closed=True) for p, loop in zip(C.punctures, C.levels[0])}


def loop_monitor(
    fam: ExhaustionFamily, report: ExhaustionReport, loops: Mapping[str, EdgePath] | Sequence[EdgePath]
) -> tuple[dict[str, list[float]], dict[str, bool]]:
    """Length of each loop at every depth, and a flag for loops whose length
    is collapsing (falling below a tenth of its first value while decreasing)."""
    if not isinstance(loops, Mapping):
        loops = {f"loop_{i}": g for i, g in enumerate(loops)}
    table, flags = {}, {}
    for name, g in loops.items():
        lengths = []
        for r in report.results:
            missing = [v for v in g.vertices if v not in r.triangulation]
            if missing:
                raise MeshError(f"loop {name} is missing vertices {missing} at depth {r.depth}")
            lengths.append(edge_path_length(r.triangulation, r.label.radii, g))
        table[name] = lengths
        decreasing = all(b < a for a, b in zip(lengths[-3:], lengths[-2:])) and len(lengths) >= 3
        flags[name] = bool(decreasing and lengths[-1] < 0.1 * lengths[0])
    return table, flags


@dataclass
class LimitLabel:
    label: Label
    bands: dict[int, float | str]

    def certified(self) -> dict[int, float]:
        return {v: b for v, b in self.bands.items() if b != "new"}


def limit_label(report: ExhaustionReport) -> LimitLabel:
    """Deepest radii on non-puncture vertices, with |R_M - R_{M-1}| per vertex
    (``"new"`` for vertices that did not exist one depth earlier)."""
    if report.verdict != "converged":
        raise PreconditionError(f"exhaustion not converged (verdict {report.verdict!r})")
    P = set(report.punctures)
    last = report.results[-1].label
    prev = report.results[-2].label
    radii = {v: r for v, r in last.radii.items() if v not in P}
    bands: dict[int, float | str] = {}
    for v, r in radii.items():
        bands[v] = abs(r - prev.radii[v]) if v in prev.radii else "new"
    return LimitLabel(Label(radii, last.residual, last.iterations), bands)
