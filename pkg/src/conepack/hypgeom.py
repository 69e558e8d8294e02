"""Hyperbolic trigonometry for tangency triangles.

A label assigns each vertex a radius in (0, inf]; the face {u, v, w} is the
hyperbolic triangle with side lengths R(u)+R(v), R(v)+R(w), R(u)+R(w).  The
angle at a vertex is computed from the half-angle form of the law of cosines

    sin^2(alpha/2) = sinh(y) sinh(z) / (sinh(x+y) sinh(x+z)),

rewritten with ``expm1`` so that no hyperbolic function is ever evaluated at a
large argument.  Infinite neighbour radii are exact limits of the same
expression.
"""

from __future__ import annotations

import math

INF = math.inf

# largest tolerated overshoot of a sine/cosine outside [-1, 1] before clamping
CLAMP_SLACK = 1e-9


class GeometryError(ArithmeticError):
    pass


def _clamp_unit(s: float, lo: float = 0.0) -> float:
    if s > 1.0:
        if s - 1.0 > CLAMP_SLACK:
            raise GeometryError(f"trigonometric argument {s!r} exceeds 1")
        return 1.0
    if s < lo:
        if lo - s > CLAMP_SLACK:
            raise GeometryError(f"trigonometric argument {s!r} below {lo}")
        return lo
    return s


def _sinh_ratio(y: float, x: float) -> float:
    """sinh(y) / sinh(x + y) for x > 0, y in (0, inf]."""
    if y == INF:
        return math.exp(-x)
    return math.exp(-x) * math.expm1(-2.0 * y) / math.expm1(-2.0 * (x + y))


def _coth(t: float) -> float:
    if t == INF or t > 20.0:
        return 1.0 + 2.0 * math.exp(-2.0 * t)
    return 1.0 / math.tanh(t)


def _check_radius(r: float, name: str) -> None:
    if not r > 0.0:
        raise GeometryError(f"radius {name} must be positive, got {r!r}")


def tangency_angle(x: float, y: float, z: float) -> float:
    """Angle at the circle of radius ``x`` in the triangle of mutually tangent
    circles with radii ``x, y, z``.  ``y`` and ``z`` may be ``inf``; ``x`` must
    be finite (the angle at an ideal vertex is 0 by convention)."""
    _check_radius(x, "x")
    _check_radius(y, "y")
    _check_radius(z, "z")
    if x == INF:
        raise GeometryError("angle at an ideal vertex is 0 by convention; do not evaluate it")
    s = _clamp_unit(_sinh_ratio(y, x) * _sinh_ratio(z, x))
    return 2.0 * math.asin(math.sqrt(s))


def tangency_angle_dlog(x: float, y: float, z: float) -> tuple[float, float]:
    """Angle at ``x`` and its derivative with respect to log(x).

    d(alpha)/dx = -tan(alpha/2) * (coth(x+y) + coth(x+z)).
    """
    alpha = tangency_angle(x, y, z)
    d = -math.tan(0.5 * alpha) * (_coth(x + y) + _coth(x + z)) * x
    return alpha, d


def tangency_angle_grad(x: float, y: float, z: float) -> tuple[float, float, float, float]:
    """Angle at ``x`` and its derivatives with respect to log x, log y, log z.

    d(alpha)/dy = tan(alpha/2) * (coth(y) - coth(x+y)); zero when y is infinite.
    """
    alpha, dx = tangency_angle_dlog(x, y, z)
    t = math.tan(0.5 * alpha)
    dy = 0.0 if y == INF else t * (_coth(y) - _coth(x + y)) * y
    dz = 0.0 if z == INF else t * (_coth(z) - _coth(x + z)) * z
    return alpha, dx, dy, dz


def tangency_angle_cosine_law(x: float, y: float, z: float) -> float:
    """Same angle via the plain law of cosines, with the closed-form ideal limits.

    Only accurate for moderate radii; kept as an independent cross-check.
    """
    if y == INF and z == INF:
        c = 1.0 - 2.0 * math.exp(-2.0 * x)
    elif z == INF or y == INF:
        if z != INF:
            y, z = z, y
        c = (math.cosh(x + y) - math.exp(y - x)) / math.sinh(x + y)
    else:
        a, b, opp = x + y, x + z, y + z
        c = (math.cosh(a) * math.cosh(b) - math.cosh(opp)) / (math.sinh(a) * math.sinh(b))
    return math.acos(_clamp_unit(c, -1.0))


def angle_sum(T, radii, v: int) -> float:
    """Total angle at ``v`` over the faces of its star; 0 at an infinite radius."""
    x = radii[v]
    if x == INF:
        return 0.0
    total = 0.0
    for fi in T.vertex_faces[v]:
        f = T.faces[fi]
        i = f.index(v)
        total += tangency_angle(x, radii[f[(i + 1) % 3]], radii[f[(i + 2) % 3]])
    return total


def face_angles(radii3) -> tuple[float, float, float]:
    """Angles of a tangency triangle, 0 at infinite radii."""
    a, b, c = radii3
    return (
        0.0 if a == INF else tangency_angle(a, b, c),
        0.0 if b == INF else tangency_angle(b, c, a),
        0.0 if c == INF else tangency_angle(c, a, b),
    )


def triangle_area(angles) -> float:
    """Area of a hyperbolic triangle from its angles (the angle deficit)."""
    a1, a2, a3 = angles
    if min(a1, a2, a3) < 0.0:
        raise GeometryError("triangle angles must be non-negative")
    return math.pi - a1 - a2 - a3


def ring_bound_H(k: int) -> float:
    """ln(1/sin(pi/k)): the largest possible radius of the center of a degree-k flower."""
    if int(k) != k or k < 3:
        raise ValueError(f"flower degree must be an integer >= 3, got {k!r}")
    return -math.log(math.sin(math.pi / k))


def max_completed_degree(k: int, theta: float) -> int:
    """k * (floor(2*pi/theta) + 1): degree bound for the completed flower at a cone of angle theta."""
    if int(k) != k or k < 3:
        raise ValueError(f"flower degree must be an integer >= 3, got {k!r}")
    if not theta > 0.0:
        raise ValueError("cone angle must be positive (a cusp has no finite bound)")
    if theta > 2.0 * math.pi + 1e-12:
        raise ValueError("no degree bound is available for cone angles above 2*pi")
    # guard floor() against 2*pi/theta landing a hair below an integer
    q = 2.0 * math.pi / theta
    fq = math.floor(q + 1e-12)
    return int(k) * (fq + 1)


def hyp_to_euc_radius(R: float) -> float:
    """Euclidean radius in the Poincare disk of a hyperbolic circle of radius R centered at 0."""
    if not (R > 0.0) or math.isinf(R):
        raise ValueError(f"hyperbolic radius must be finite and positive, got {R!r}")
    return math.tanh(0.5 * R)


def euc_to_hyp_radius(r: float) -> float:
    if not 0.0 < r < 1.0:
        raise ValueError(f"Euclidean radius must lie in (0, 1), got {r!r}")
    return 2.0 * math.atanh(r)
