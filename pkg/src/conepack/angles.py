"""Prescribed cone angles and parsing of ``pi``-expressions."""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from typing import Iterable, Mapping

TWO_PI = 2.0 * math.pi

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def parse_angle(text) -> float:
    """Evaluate an angle given as a number or an arithmetic expression in ``pi``.

    >>> parse_angle("pi/2") == math.pi / 2
    True
    """
    if isinstance(text, (int, float)):
        if not math.isfinite(text):
            raise ValueError(f"angle must be finite, got {text!r}")
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in ("pi", "PI", "π"):
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ValueError(f"unsupported angle expression: {text!r}")

    try:
        tree = ast.parse(str(text).strip().replace("π", "pi"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"unsupported angle expression: {text!r}") from exc
    try:
        value = ev(tree)
    except (ZeroDivisionError, OverflowError) as exc:
        raise ValueError(f"cannot evaluate angle {text!r}: {exc}") from exc
    if not math.isfinite(value):
        raise ValueError(f"angle must be finite, got {text!r}")
    return value


@dataclass(frozen=True)
class AngleSpec:
    """Target total angle per vertex; vertices not listed target 2*pi.

    A target of 0 marks a cusp.
    """

    cone_angles: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for v, th in dict(self.cone_angles).items():
            th = float(th)
            if not th >= 0.0 or math.isinf(th):
                raise ValueError(f"cone angle at vertex {v} must be finite and >= 0, got {th}")
            clean[int(v)] = th
        object.__setattr__(self, "cone_angles", dict(sorted(clean.items())))

    @classmethod
    def uniform(cls, vertices: Iterable[int], theta: float) -> "AngleSpec":
        return cls({v: theta for v in vertices})

    @property
    def marked(self) -> tuple[int, ...]:
        return tuple(self.cone_angles)

    def target(self, v: int) -> float:
        return self.cone_angles.get(v, TWO_PI)

    def is_cusp(self, v: int) -> bool:
        return self.cone_angles.get(v, TWO_PI) == 0.0

    def orbchar(self, euler_characteristic: int) -> float:
        """2*pi*chi + sum(theta_i - 2*pi); negative iff a hyperbolic cone metric exists."""
        return TWO_PI * euler_characteristic + sum(th - TWO_PI for th in self.cone_angles.values())
